#include "commands.hpp"

#include "manifest.hpp"

#include "ssmic/constraints.hpp"
#include "ssmic/data.hpp"
#include "ssmic/error.hpp"
#include "ssmic/eval.hpp"
#include "ssmic/kernel.hpp"
#include "ssmic/log.hpp"
#include "ssmic/model_select.hpp"
#include "ssmic/parallel.hpp"
#include "ssmic/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ssmic::cli {

namespace {

std::size_t jobs_of(const CommonOptions& common) { return common.jobs == 0 ? default_jobs() : common.jobs; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cv_table_csv(const lsmi::CvResult& cv) {
    std::ostringstream out;
    out << "kappa,delta,mean_cv";
    const std::size_t folds = cv.table.empty() ? 0 : cv.table.front().folds.size();
    for (std::size_t m = 0; m < folds; ++m) out << ",fold" << m + 1;
    out << '\n';
    for (const auto& row : cv.table) {
        out << fmt(row.kappa) << ',' << fmt(row.delta) << ',' << fmt(row.mean);
        for (double v : row.folds) out << ',' << fmt(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string format_labels(const Labels& labels) {
    std::string out = "index,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out += std::to_string(i + 1) + "," + std::to_string(labels[i]) + "\n";
    return out;
}

Labels read_labels(const std::string& path) {
    const Matrix table = read_numeric_csv(path);
    Labels labels(static_cast<std::size_t>(table.rows()));
    const Eigen::Index last = table.cols() - 1;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        const double v = table(r, last);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw InputError(path + ": data row " + std::to_string(r + 1) + ": label is not an integer");
        labels[static_cast<std::size_t>(r)] = static_cast<int>(v);
    }
    return labels;
}

int cmd_cluster(const ClusterOptions& opt, const CommonOptions& common) {
    if (opt.automatic && (opt.t || opt.gamma || opt.eta))
        throw InputError("--auto selects t, gamma and eta itself; do not combine it with --t, --gamma or --eta");
    RunManifest manifest(opt.automatic ? "select" : "cluster");

    Dataset ds = load_dataset(opt.input, parse_csv_format(opt.format));
    manifest.record_input(opt.input);
    ds = normalize(ds, parse_normalization(opt.normalize));
    const int classes = opt.classes.value_or(ds.classes);
    if (classes < 1) throw InputError("--classes is required when the input carries no labels");

    ConstraintSet cs;
    cs.n = ds.size();
    if (!opt.constraints.empty()) {
        cs = read_constraints(opt.constraints, ds.size());
        manifest.record_input(opt.constraints);
    }

    auto& params = manifest.parameters();
    params["input"] = opt.input;
    params["format"] = opt.format;
    params["normalize"] = opt.normalize;
    params["classes"] = classes;
    params["constraints"] = opt.constraints;
    params["must_links"] = cs.must_links.size();
    params["cannot_links"] = cs.cannot_links.size();
    params["seed"] = common.seed;

    Labels labels;
    ClusterModel model;
    if (opt.automatic) {
        SearchGrid grid;
        if (!opt.t_grid.empty()) grid.t = opt.t_grid;
        if (!opt.gamma_grid.empty()) grid.gamma = opt.gamma_grid;
        if (!opt.eta_grid.empty()) grid.eta = opt.eta_grid;
        lsmi::LsmiConfig config;
        config.kappa_grid = opt.kappa_grid;
        config.delta_grid = opt.delta_grid;
        config.folds = opt.folds;
        config.center_cap = opt.center_cap;
        config.seed = common.seed;
        Selection sel = grid_search(ds, cs, classes, grid, config, jobs_of(common));
        params["t_grid"] = grid.t;
        params["gamma_grid"] = grid.gamma;
        params["eta_grid"] = classes > 2 ? std::vector<double>{0.0} : grid.eta;
        params["folds"] = opt.folds;
        params["center_cap"] = opt.center_cap;
        params["selected"] = {{"t", sel.best.params.t},
                              {"gamma", sel.best.params.gamma},
                              {"eta", sel.best.params.eta},
                              {"lsmi", sel.best.lsmi},
                              {"n_v", sel.best.violations},
                              {"score", sel.best.score},
                              {"kappa", sel.best.kappa},
                              {"delta", sel.best.delta}};
        params["warnings"] = sel.warnings;
        log::info("selected t=" + std::to_string(sel.best.params.t) + " gamma=" + fmt(sel.best.params.gamma) +
                  " eta=" + fmt(sel.best.params.eta) + " (LSMI " + fmt(sel.best.lsmi) + ", " +
                  std::to_string(sel.best.violations) + " violated links)");
        if (!opt.table_out.empty()) {
            std::ostringstream table;
            write_candidate_table(table, sel.table);
            manifest.write_output(opt.table_out, table.str());
        }
        if (!opt.cv_out.empty()) manifest.write_output(opt.cv_out, cv_table_csv(sel.best_cv));
        labels = sel.best.labels;
        model = std::move(sel.model);
    } else {
        SolverParams sp;
        sp.t = opt.t.value_or(7);
        sp.gamma = opt.gamma.value_or(1.0);
        sp.eta = opt.eta.value_or(classes == 2 ? 1.0 : 0.0);
        params["t"] = sp.t;
        params["gamma"] = sp.gamma;
        params["eta"] = sp.eta;
        Clustering result = cluster(ds, cs, sp, classes);
        labels = std::move(result.labels);
        model = std::move(result.model);
    }

    if (!opt.kernel_out.empty()) {
        KernelMatrix k = local_scaling_kernel(ds.features, model.params.t);
        if (!cs.empty()) k = apply_constraints(k, cs);
        std::ostringstream dump;
        write_kernel_csv(dump, k);
        manifest.write_output(opt.kernel_out, dump.str());
    }
    manifest.write_output(opt.output, format_labels(labels));
    if (!opt.model_out.empty()) manifest.write_output(opt.model_out, model_to_json(model));
    manifest.emit(common.manifest);
    return 0;
}

int cmd_predict(const PredictOptions& opt, const CommonOptions& common) {
    RunManifest manifest("predict");
    const ClusterModel model = load_model(opt.model);
    manifest.record_input(opt.model);
    Matrix points = read_numeric_csv(opt.input, true);
    manifest.record_input(opt.input);
    if (parse_csv_format(opt.format) == CsvFormat::Labeled && points.cols() > 0) {
        const Matrix features = points.leftCols(points.cols() - 1);
        points = features;
    }
    manifest.parameters() = {{"model", opt.model}, {"input", opt.input}, {"format", opt.format}, {"rows", points.rows()}};
    if (points.rows() > 0 && points.cols() != model.train_features.cols())
        throw InputError(opt.input + " has " + std::to_string(points.cols()) + " feature columns but the model expects " +
                         std::to_string(model.train_features.cols()));
    manifest.write_output(opt.output, format_labels(predict(model, points)));
    manifest.emit(common.manifest);
    return 0;
}

int cmd_constraints(const ConstraintsOptions& opt, const CommonOptions& common) {
    if (opt.links.has_value() == opt.fraction.has_value())
        throw InputError("give exactly one of --links or --fraction");
    RunManifest manifest("constraints");
    const Dataset ds = load_dataset(opt.input, parse_csv_format(opt.format));
    manifest.record_input(opt.input);
    if (!ds.labels) throw InputError("constraint sampling needs a labeled dataset (--format labeled-csv)");
    std::uint64_t count = 0;
    if (opt.links) {
        count = *opt.links;
    } else {
        if (!(*opt.fraction >= 0.0 && *opt.fraction <= 1.0)) throw InputError("--fraction must lie in [0, 1]");
        count = static_cast<std::uint64_t>(std::llround(*opt.fraction * static_cast<double>(pair_count(ds.size()))));
    }
    const ConstraintSet cs = sample_constraints(*ds.labels, count, common.seed);
    manifest.parameters() = {{"input", opt.input},   {"links", count},
                             {"seed", common.seed},  {"must_links", cs.must_links.size()},
                             {"cannot_links", cs.cannot_links.size()}};
    std::ostringstream out;
    write_constraints(out, cs,
                      "ssmic constraints: n=" + std::to_string(ds.size()) + " links=" + std::to_string(count) +
                          " must=" + std::to_string(cs.must_links.size()) +
                          " cannot=" + std::to_string(cs.cannot_links.size()) + " seed=" + std::to_string(common.seed) +
                          "\nformat: i j +1 (must-link) | i j -1 (cannot-link), 1-based indices");
    manifest.write_output(opt.output, out.str());
    manifest.emit(common.manifest);
    return 0;
}

int cmd_ari(const AriOptions& opt, const CommonOptions& common) {
    RunManifest manifest("ari");
    const Labels a = read_labels(opt.a);
    manifest.record_input(opt.a);
    const Labels b = read_labels(opt.b);
    manifest.record_input(opt.b);
    const double value = ari(a, b);
    manifest.parameters() = {{"a", opt.a}, {"b", opt.b}, {"ari", value}};
    char line[64];
    std::snprintf(line, sizeof line, "%.6f\n", value);
    manifest.write_output(opt.output.empty() ? "-" : opt.output, line);
    manifest.emit(common.manifest);
    return 0;
}

int cmd_bench(const BenchOptions& opt, const CommonOptions& common) {
    RunManifest manifest("bench");
    std::ifstream in(opt.config);
    if (!in) throw InputError("cannot open config '" + opt.config + "'");
    std::ostringstream text;
    text << in.rdbuf();
    manifest.record_input(opt.config);
    const BenchmarkConfig config =
        parse_benchmark_config(text.str(), std::filesystem::path(opt.config).parent_path());
    const BenchmarkReport report = run_benchmark(config, jobs_of(common));
    manifest.parameters() = nlohmann::json::parse(config.snapshot);
    manifest.parameters()["resolved_link_counts"] = config.link_counts;
    std::ostringstream csv;
    write_report_csv(csv, report);
    manifest.write_output(opt.output, csv.str());
    if (!opt.summary.empty()) manifest.write_output(opt.summary, report_summary_json(report));
    for (const auto& s : report.series)
        for (std::size_t k = 0; k < report.link_counts.size(); ++k)
            log::info(s.method + " links=" + std::to_string(report.link_counts[k]) + " ARI " + fmt(s.mean[k]) +
                      " +/- " + fmt(s.std[k]));
    manifest.emit(common.manifest);
    return 0;
}

int cmd_generate(const GenerateOptions& opt, const CommonOptions& common) {
    RunManifest manifest("generate");
    const Dataset ds = make_blobs(opt.n_per_class, opt.classes, opt.dim, opt.separation, common.seed);
    manifest.parameters() = {{"n_per_class", opt.n_per_class}, {"classes", opt.classes}, {"dim", opt.dim},
                             {"separation", opt.separation},   {"seed", common.seed}};
    std::ostringstream out;
    write_dataset_csv(out, ds);
    manifest.write_output(opt.output, out.str());
    manifest.emit(common.manifest);
    return 0;
}

}  // namespace ssmic::cli
