#include "commands.hpp"

#include "ssmic/error.hpp"
#include "ssmic/log.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>

namespace {

using namespace ssmic::cli;

void add_cluster_flags(CLI::App& cmd, ClusterOptions& opt, bool select) {
    cmd.add_option("--input,-i", opt.input, "Feature CSV")->required();
    cmd.add_option("--format", opt.format, "csv or labeled-csv")->check(CLI::IsMember({"csv", "labeled-csv"}));
    cmd.add_option("--normalize", opt.normalize, "none, minmax or zscore")
        ->check(CLI::IsMember({"none", "minmax", "zscore"}));
    cmd.add_option("--classes,-c", opt.classes, "Number of clusters (default: label count of a labeled input)");
    cmd.add_option("--constraints", opt.constraints, "Link file (i j +1 / i j -1, 1-based)");
    if (!select) {
        cmd.add_option("--t", opt.t, "Neighbourhood size (default 7)");
        cmd.add_option("--gamma", opt.gamma, "Must-link weight (default 1)");
        cmd.add_option("--eta", opt.eta, "Cannot-link weight (default 1 for two classes, else 0)");
        cmd.add_flag("--auto", opt.automatic, "Choose t, gamma and eta by LSMI grid search");
    }
    cmd.add_option("--t-grid", opt.t_grid, "Candidate neighbourhood sizes")->delimiter(',');
    cmd.add_option("--gamma-grid", opt.gamma_grid, "Candidate gamma values")->delimiter(',');
    cmd.add_option("--eta-grid", opt.eta_grid, "Candidate eta values")->delimiter(',');
    cmd.add_option("--kappa-grid", opt.kappa_grid, "LSMI kernel widths (default: median-distance scaled)")
        ->delimiter(',');
    cmd.add_option("--delta-grid", opt.delta_grid, "LSMI ridge values")->delimiter(',');
    cmd.add_option("--folds", opt.folds, "LSMI cross-validation folds")->check(CLI::Range(2, 1000));
    cmd.add_option("--center-cap", opt.center_cap, "Maximum LSMI basis centres")->check(CLI::PositiveNumber);
    cmd.add_option("--output,-o", opt.output, "Labels CSV ('-' for stdout)");
    cmd.add_option("--model-out", opt.model_out, "Model JSON for later prediction");
    cmd.add_option("--kernel-out", opt.kernel_out, "Dense kernel CSV (debugging)");
    cmd.add_option("--table-out", opt.table_out, "Grid-search candidate table CSV");
    cmd.add_option("--cv-out", opt.cv_out, "LSMI cross-validation table CSV of the winner");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised SMI clustering with must-link and cannot-link constraints"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ssmic 0.1.0");

    CommonOptions common;
    int verbose = 0;
    bool quiet = false;
    app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--jobs,-j", common.jobs, "Worker threads (default: SSMIC_JOBS or all cores)");
    app.add_option("--manifest", common.manifest, "Manifest path (default: next to the first output file)");
    app.add_flag("--verbose,-v", verbose, "More log output");
    app.add_flag("--quiet,-q", quiet, "Only warnings and errors");
    for (auto* opt : app.get_options()) opt->configurable(false);
    app.fallthrough();

    ClusterOptions cluster_opt;
    auto* cluster = app.add_subcommand("cluster", "Cluster a dataset");
    add_cluster_flags(*cluster, cluster_opt, false);

    ClusterOptions select_opt;
    select_opt.automatic = true;
    auto* select = app.add_subcommand("select", "Grid-search t, gamma and eta, then cluster");
    add_cluster_flags(*select, select_opt, true);

    PredictOptions predict_opt;
    auto* predict = app.add_subcommand("predict", "Assign new points with a saved model");
    predict->add_option("--model,-m", predict_opt.model, "Model JSON")->required();
    predict->add_option("--input,-i", predict_opt.input, "Feature CSV")->required();
    predict->add_option("--format", predict_opt.format)->check(CLI::IsMember({"csv", "labeled-csv"}));
    predict->add_option("--output,-o", predict_opt.output, "Labels CSV ('-' for stdout)");

    ConstraintsOptions cons_opt;
    auto* cons = app.add_subcommand("constraints", "Sample links from ground-truth labels");
    cons->add_option("--input,-i", cons_opt.input, "Labeled CSV")->required();
    cons->add_option("--format", cons_opt.format)->check(CLI::IsMember({"csv", "labeled-csv"}));
    auto* links = cons->add_option("--links", cons_opt.links, "Number of distinct pairs");
    auto* fraction = cons->add_option("--fraction", cons_opt.fraction, "Fraction of all n(n-1)/2 pairs");
    links->excludes(fraction);
    cons->add_option("--output,-o", cons_opt.output, "Link file ('-' for stdout)");

    AriOptions ari_opt;
    auto* ari = app.add_subcommand("ari", "Adjusted Rand index between two label files");
    ari->add_option("a", ari_opt.a, "First labels CSV")->required();
    ari->add_option("b", ari_opt.b, "Second labels CSV")->required();
    ari->add_option("--output,-o", ari_opt.output, "Write the value here instead of stdout");

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "Run a link-count benchmark from a JSON config");
    bench->add_option("--config", bench_opt.config, "Benchmark JSON")->required();
    bench->add_option("--output,-o", bench_opt.output, "Per-run CSV ('-' for stdout)");
    bench->add_option("--summary", bench_opt.summary, "Mean/std JSON");

    GenerateOptions gen_opt;
    auto* gen = app.add_subcommand("generate", "Write a Gaussian blob dataset as labeled CSV");
    gen->add_option("--n-per-class", gen_opt.n_per_class)->check(CLI::PositiveNumber);
    gen->add_option("--classes,-c", gen_opt.classes)->check(CLI::Range(1, 1000));
    gen->add_option("--dim", gen_opt.dim)->check(CLI::PositiveNumber);
    gen->add_option("--separation", gen_opt.separation);
    gen->add_option("--output,-o", gen_opt.output, "CSV ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    namespace log = ssmic::log;
    if (quiet) log::set_level(log::Level::Warn);
    else if (verbose > 0) log::set_level(log::Level::Debug);

    try {
        if (cluster->parsed()) return cmd_cluster(cluster_opt, common);
        if (select->parsed()) return cmd_cluster(select_opt, common);
        if (predict->parsed()) return cmd_predict(predict_opt, common);
        if (cons->parsed()) return cmd_constraints(cons_opt, common);
        if (ari->parsed()) return cmd_ari(ari_opt, common);
        if (bench->parsed()) return cmd_bench(bench_opt, common);
        if (gen->parsed()) return cmd_generate(gen_opt, common);
    } catch (const ssmic::InputError& e) {
        log::error(e.what());
        return 2;
    } catch (const ssmic::NumericError& e) {
        log::error(e.what());
        return 1;
    } catch (const std::exception& e) {
        log::error(std::string("internal error: ") + e.what());
        return 1;
    }
    return 1;
}
