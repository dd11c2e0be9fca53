// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path to ssmic binary> <bundled benchmark config> [criterion numbers...]

#include "oracles.hpp"
#include "support.hpp"

#include "ssmic/constraints.hpp"
#include "ssmic/data.hpp"
#include "ssmic/error.hpp"
#include "ssmic/eval.hpp"
#include "ssmic/kernel.hpp"
#include "ssmic/log.hpp"
#include "ssmic/lsmi.hpp"
#include "ssmic/model_select.hpp"
#include "ssmic/parallel.hpp"
#include "ssmic/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace ssmic;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

ConstraintSet no_links(std::size_t n) {
    ConstraintSet cs;
    cs.n = n;
    return cs;
}

Outcome reduction_to_smic() {
    const auto start = Clock::now();
    Outcome o;
    int identical = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        // class counts that divide n = 200
        const int classes = std::array<int, 4>{2, 4, 5, 8}[seed % 4];
        const auto per_class = static_cast<std::size_t>(200 / classes);
        const Dataset ds = make_blobs(per_class, classes, 1 + seed % 3, 1.5 + 0.5 * static_cast<double>(seed % 5), 1000 + seed);
        const Labels semi = cluster(ds, no_links(200), SolverParams{7, 0.0, 0.0}, classes).labels;
        const Labels plain = cluster_unsupervised(ds.features, 7, classes).labels;
        if (ari(semi, plain) == 1.0) ++identical;
    }
    const double secs = seconds_since(start);
    o.pass = identical == 20 && secs < 30.0;
    o.detail = std::to_string(identical) + "/20 datasets with ARI = 1, " + num(secs, 3) + " s (limit 30 s)";
    return o;
}

Outcome eigen_optimality() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<Eigen::Index> size(3, 15);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = size(rng);
        const int c = 1 + trial % 3;
        const Matrix k = oracle::random_gaussian_kernel(n, rng);
        const double best = smi_hat(k, top_eigs(k, c).vectors, c);
        for (int r = 0; r < 100; ++r)
            worst = std::min(worst, best - smi_hat(k, oracle::random_orthonormal(n, c, rng), c));
    }
    return {worst >= -1e-10, "min margin over 5000 comparisons " + num(worst) + " (tolerance -1e-10)"};
}

Outcome constraint_benefit() {
    const auto start = Clock::now();
    const std::vector<double> fractions{0.0, 0.01, 0.03};
    SearchGrid grid{{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {0.0, 1.0}, {0.0, 1.0}};
    std::vector<double> mean(fractions.size(), 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Dataset ds = make_blobs(100, 2, 2, 2.0, seed);
        for (std::size_t f = 0; f < fractions.size(); ++f) {
            const auto links =
                static_cast<std::uint64_t>(std::llround(fractions[f] * static_cast<double>(pair_count(ds.size()))));
            const ConstraintSet cs = sample_constraints(*ds.labels, links, seed);
            lsmi::LsmiConfig cfg;
            cfg.seed = seed;
            const Selection sel = grid_search(ds, cs, 2, grid, cfg, default_jobs());
            mean[f] += ari(sel.best.labels, *ds.labels) / 20.0;
        }
    }
    const double secs = seconds_since(start);
    const bool monotone = mean[1] >= mean[0] && mean[2] >= mean[1];
    const double gain = mean[2] - mean[0];
    return {monotone && gain >= 0.1 && secs < 300.0,
            "mean ARI at 0/1/3% links: " + num(mean[0]) + " / " + num(mean[1]) + " / " + num(mean[2]) + ", gain " +
                num(gain) + " (need >= 0.1), " + num(secs, 3) + " s (limit 300 s)"};
}

Outcome lsmi_calibration() {
    const auto start = Clock::now();
    double worst_sep = 0.0, worst_shuffled = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset ds = make_blobs(100, 2, 2, 10.0, 500 + seed);
        lsmi::LsmiConfig cfg;
        cfg.seed = seed;
        const double sep = lsmi::estimate(ds.features, *ds.labels, cfg).value;
        Labels shuffled = *ds.labels;
        std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(seed));
        const double shuf = lsmi::estimate(ds.features, shuffled, cfg).value;
        worst_sep = std::max(worst_sep, std::abs(sep - 0.5));
        worst_shuffled = std::max(worst_shuffled, std::abs(shuf));
    }
    const double secs = seconds_since(start);
    return {worst_sep <= 0.15 && worst_shuffled <= 0.1 && secs < 60.0,
            "max |LSMI - 0.5| separated " + num(worst_sep) + " (<= 0.15), max |LSMI| shuffled " + num(worst_shuffled) +
                " (<= 0.1), n = 200, 5 datasets, " + num(secs, 3) + " s"};
}

Outcome lsmi_formulas() {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> size(2, 10);
    double err = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = size(rng);
        const int classes = 1 + trial % 3;
        Matrix x(n, 2);
        Labels y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            x.row(i) << g(rng), g(rng);
            y[static_cast<std::size_t>(i)] = 1 + (i % classes);
        }
        std::shuffle(y.begin(), y.end(), rng);
        const double kappa = 0.3 + 0.05 * (trial % 30);
        const double delta = 0.001 * (1 + trial % 50);
        const lsmi::LsmiModel m = lsmi::fit(x, y, kappa, delta);
        for (std::size_t k = 0; k < m.classes.size(); ++k) {
            const auto sys = lsmi::build_system(x, y, m.classes[k], m.centers[k], kappa);
            err = std::max(err, (sys.h_matrix - oracle::h_matrix(x, y, m.classes[k], m.centers[k], kappa)).cwiseAbs().maxCoeff());
            err = std::max(err, (sys.h_vector - oracle::h_vector(x, y, m.classes[k], m.centers[k], kappa)).cwiseAbs().maxCoeff());
            const Matrix reg = oracle::h_matrix(x, y, m.classes[k], m.centers[k], kappa) +
                               delta * Matrix::Identity(m.centers[k].rows(), m.centers[k].rows());
            const Vector w = oracle::solve(reg, oracle::h_vector(x, y, m.classes[k], m.centers[k], kappa));
            err = std::max(err, (m.weights[k] - w).cwiseAbs().maxCoeff());
        }
        err = std::max(err, std::abs(lsmi::lsmi_value(m, x, y) - oracle::lsmi(m, x, y)));
        // hold-out half against a model fitted on the rest
        Matrix xh(n, 2);
        xh = x.colwise().reverse();
        Labels yh(y.rbegin(), y.rend());
        err = std::max(err, std::abs(lsmi::cv_objective(m, xh, yh) - oracle::cv(m, xh, yh)));
    }
    return {err <= 1e-10, "max deviation from literal transcriptions over 200 instances " + num(err) + " (<= 1e-10)"};
}

Outcome ari_oracle() {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> size(2, 30);
    std::uniform_int_distribution<int> classes(1, 6);
    double err = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = size(rng);
        std::uniform_int_distribution<int> la(1, classes(rng)), lb(1, classes(rng));
        Labels a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = la(rng);
            b[i] = trial % 7 == 0 ? a[i] : lb(rng);
        }
        err = std::max(err, std::abs(ari(a, b) - oracle::ari(a, b)));
    }
    const double known = ari({1, 1, 2, 2}, {1, 2, 1, 2});
    return {err <= 1e-12 && std::abs(known + 0.5) <= 1e-12,
            "max deviation " + num(err) + " (<= 1e-12); [1,1,2,2] vs [1,2,1,2] = " + num(known, 17)};
}

Outcome u_oracle() {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> size(2, 20);
    std::uniform_real_distribution<double> w(0.0, 4.0);
    std::normal_distribution<double> g;
    double err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = size(rng);
        Matrix x(static_cast<Eigen::Index>(n), 2);
        for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) << g(rng), g(rng);
        std::uniform_int_distribution<std::size_t> tt(1, n - 1);
        std::uniform_int_distribution<std::size_t> lc(0, std::min<std::size_t>(2 * n, pair_count(n)));
        const ConstraintSet cs = oracle::random_links(n, lc(rng), rng);
        const KernelMatrix kp = apply_constraints(local_scaling_kernel(x, tt(rng)), cs);
        const double gamma = trial % 5 == 0 ? 0.0 : w(rng);
        const double eta = trial % 7 == 0 ? 0.0 : w(rng);
        const UMatrix u = build_u(kp, cs, gamma, eta, 2);
        err = std::max(err, (u.entries - oracle::u_matrix(kp.entries, cs, gamma, eta)).cwiseAbs().maxCoeff());
    }
    bool rejected = false;
    try {
        Matrix x(4, 1);
        x << 0, 1, 2, 3;
        build_u(local_scaling_kernel(x, 1), no_links(4), 0.0, 1.0, 3);
    } catch (const InputError&) {
        rejected = true;
    }
    return {err <= 1e-10 && rejected, "max deviation from dense products over 100 instances " + num(err) +
                                          " (<= 1e-10); eta with c = 3 " + (rejected ? "rejected" : "ACCEPTED")};
}

Outcome selection_sanity() {
    const auto start = Clock::now();
    SearchGrid grid{{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {0.0, 1.0, 4.0}, {0.0, 1.0, 4.0}};
    int good = 0;
    std::string notes;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset ds = make_blobs(100, 2, 2, 8.0, 300 + seed);
        const ConstraintSet cs = sample_constraints(*ds.labels, 20, seed);
        lsmi::LsmiConfig cfg;
        cfg.seed = seed;
        const Selection sel = grid_search(ds, cs, 2, grid, cfg, default_jobs());
        std::vector<double> scores;
        for (const auto& c : sel.table)
            if (c.ok()) scores.push_back(ari(c.labels, *ds.labels));
        std::sort(scores.begin(), scores.end());
        const std::size_t m = scores.size();
        const double median = m % 2 ? scores[m / 2] : 0.5 * (scores[m / 2 - 1] + scores[m / 2]);
        const double best = ari(sel.best.labels, *ds.labels);
        if (sel.best.violations == 0 && best >= median) ++good;
        else notes += " seed " + std::to_string(seed) + ": n_v " + std::to_string(sel.best.violations) + ", ARI " +
                      num(best) + " vs median " + num(median) + ";";
    }
    return {good == 10, std::to_string(good) + "/10 seeds with n_v = 0 and ARI >= median candidate, " +
                            num(seconds_since(start), 3) + " s" + notes};
}

struct CliRun {
    std::string binary;
    testing_support::TempDir dir;

    int operator()(const std::string& args) const {
        const std::string cmd = "cd '" + dir.path().string() + "' && '" + binary + "' -q " + args +
                                " >/dev/null 2>>'" + (dir / "stderr.log").string() + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
};

std::string without_wall_time(const std::string& csv) {
    // the candidate table's wall_ms column is a measurement, not data
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (i != 8) out += cells[i] + ",";
        out += "\n";
    }
    return out;
}

Outcome cli_determinism(const std::string& binary, const std::string& config) {
    CliRun run{binary, {}};
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"--seed 5 generate --n-per-class 40 --separation 3 -o d.csv", {"d.csv"}},
        {"--seed 5 constraints -i d.csv --fraction 0.01 -o l.txt", {"l.txt"}},
        {"cluster -i d.csv --format labeled-csv --normalize zscore --constraints l.txt -o c.csv --model-out m.json "
         "--kernel-out k.csv",
         {"c.csv", "m.json", "k.csv"}},
        {"--seed 5 cluster --auto -i d.csv --format labeled-csv --constraints l.txt --t-grid 2,5,8 --gamma-grid 0,1 "
         "--eta-grid 0,1 -o a.csv --table-out table.csv --cv-out cv.csv",
         {"a.csv", "table.csv", "cv.csv"}},
        {"--seed 5 select -i d.csv --format labeled-csv --t-grid 4,7 --gamma-grid 0 --eta-grid 0 -o s.csv", {"s.csv"}},
        {"predict -m m.json -i d.csv --format labeled-csv -o p.csv", {"p.csv"}},
        {"ari c.csv d.csv -o ari.txt", {"ari.txt"}},
        {"bench --config '" + config + "' -o b.csv --summary b.json", {"b.csv", "b.json"}},
    };
    int identical = 0, total = 0;
    std::string notes;
    for (const auto& [args, files] : commands) {
        std::vector<std::string> first;
        const int c1 = run(args);
        for (const auto& f : files) first.push_back(testing_support::slurp(run.dir / f));
        const int c2 = run(args);
        for (std::size_t i = 0; i < files.size(); ++i) {
            ++total;
            std::string again = testing_support::slurp(run.dir / files[i]);
            std::string before = first[i];
            if (files[i] == "table.csv") {
                again = without_wall_time(again);
                before = without_wall_time(before);
            }
            if (c1 == 0 && c2 == 0 && !before.empty() && again == before) ++identical;
            else notes += " " + files[i] + " (exit " + std::to_string(c1) + "/" + std::to_string(c2) + ")";
        }
    }
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " outputs byte-identical across reruns" + (notes.empty() ? "" : ";" + notes)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <ssmic binary> <benchmark config> [criterion numbers...]\n";
        return 2;
    }
    log::set_level(log::Level::Error);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"reduction to unsupervised SMIC", reduction_to_smic},
        {"eigenvector optimality of smi_hat", eigen_optimality},
        {"constraint benefit on overlapping blobs", constraint_benefit},
        {"LSMI calibration", lsmi_calibration},
        {"LSMI formula oracle", lsmi_formulas},
        {"ARI oracle", ari_oracle},
        {"U matrix oracle", u_oracle},
        {"model selection sanity", selection_sanity},
        {"CLI determinism",
         [&] {
             return cli_determinism(std::filesystem::absolute(argv[1]).string(),
                                    std::filesystem::absolute(argv[2]).string());
         }},
    };
    std::vector<bool> selected(criteria.size(), argc == 3);
    for (int a = 3; a < argc; ++a) {
        const auto k = static_cast<std::size_t>(std::atoi(argv[a]));
        if (k >= 1 && k <= criteria.size()) selected[k - 1] = true;
    }
    int failed = 0, ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) continue;
        ++ran;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << ran - failed << "/" << ran << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
