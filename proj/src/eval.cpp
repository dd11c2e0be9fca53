#include "ssmic/eval.hpp"

#include "ssmic/constraints.hpp"
#include "ssmic/error.hpp"
#include "ssmic/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <string_view>
#include <ostream>

namespace ssmic {

namespace {

double choose2(double v) { return v * (v - 1.0) / 2.0; }

using nlohmann::json;

template <class T>
T field(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

std::uint64_t resolve_link_count(const json& entry, std::size_t n) {
    const auto total = static_cast<double>(pair_count(n));
    double fraction = -1.0;
    if (entry.is_number_unsigned() || entry.is_number_integer()) {
        const auto v = entry.get<long long>();
        if (v < 0) throw InputError("link counts must be non-negative");
        return static_cast<std::uint64_t>(v);
    }
    if (entry.is_number_float()) {
        fraction = entry.get<double>();
    } else if (entry.is_string()) {
        auto text = entry.get<std::string>();
        if (text.empty() || text.back() != '%') throw InputError("link count string must look like '3%'");
        text.pop_back();
        try {
            fraction = std::stod(text) / 100.0;
        } catch (const std::exception&) {
            throw InputError("cannot parse link fraction '" + entry.get<std::string>() + "'");
        }
    } else {
        throw InputError("link counts must be numbers or percentage strings");
    }
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("link fractions must lie in [0, 1]");
    return static_cast<std::uint64_t>(std::llround(fraction * total));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// A misspelt key would otherwise silently fall back to a default.
void check_keys(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!object.is_object()) throw InputError(where + " must be a JSON object");
    for (const auto& item : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw InputError("unknown key '" + item.key() + "' in " + where);
    }
}

}  // namespace

double ari(const Labels& a, const Labels& b) {
    if (a.size() != b.size())
        throw InputError("ARI: labelings have different lengths (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    if (a.size() < 2) throw InputError("ARI needs at least two samples");

    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cells[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, count] : cells) index += choose2(count);
    for (const auto& [key, count] : rows) sum_rows += choose2(count);
    for (const auto& [key, count] : cols) sum_cols += choose2(count);
    const double expected = sum_rows * sum_cols / choose2(static_cast<double>(a.size()));
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) {
        // Identical partitions: a bijection between the two label sets.
        const bool identical = cells.size() == rows.size() && cells.size() == cols.size();
        return identical ? 1.0 : 0.0;
    }
    return (index - expected) / (maximum - expected);
}

BenchmarkConfig parse_benchmark_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    try {
        const json doc = json::parse(json_text);
        check_keys(doc, {"name", "dataset", "classes", "link_counts", "runs", "seed", "methods", "grids", "lsmi"},
                   "benchmark config");
        BenchmarkConfig cfg;
        cfg.snapshot = doc.dump();
        const json& data = doc.at("dataset");
        check_keys(data, {"generator", "n_per_class", "classes", "dim", "separation", "seed", "path", "format", "normalize"},
                   "dataset");
        if (data.contains("generator")) {
            const auto gen = data.at("generator").get<std::string>();
            if (gen != "blobs") throw InputError("unknown dataset generator '" + gen + "'");
            cfg.dataset = make_blobs(data.at("n_per_class").get<std::size_t>(), data.at("classes").get<int>(),
                                     field<std::size_t>(data, "dim", 2), data.at("separation").get<double>(),
                                     field<std::uint64_t>(data, "seed", 0));
        } else {
            std::filesystem::path path = data.at("path").get<std::string>();
            if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
            cfg.dataset = load_dataset(path, parse_csv_format(field<std::string>(data, "format", "labeled-csv")));
        }
        if (data.contains("normalize"))
            cfg.dataset = normalize(cfg.dataset, parse_normalization(data.at("normalize").get<std::string>()));
        if (!cfg.dataset.labels) throw InputError("benchmark dataset has no ground-truth labels");

        cfg.name = field<std::string>(doc, "name", cfg.dataset.name);
        cfg.classes = field<int>(doc, "classes", cfg.dataset.classes);
        cfg.runs = doc.at("runs").get<std::size_t>();
        if (cfg.runs == 0) throw InputError("benchmark needs at least one run");
        cfg.seed = field<std::uint64_t>(doc, "seed", 0);
        for (const auto& entry : doc.at("link_counts")) cfg.link_counts.push_back(resolve_link_count(entry, cfg.dataset.size()));
        if (cfg.link_counts.empty()) throw InputError("link_counts must not be empty");

        if (doc.contains("methods")) {
            for (const auto& m : doc.at("methods")) {
                check_keys(m, {"name", "select", "t", "gamma", "eta"}, "methods entry");
                MethodSpec spec;
                spec.name = field<std::string>(m, "name", "3smic");
                spec.select = field<bool>(m, "select", !m.contains("t"));
                spec.fixed.t = field<std::size_t>(m, "t", 7);
                spec.fixed.gamma = field<double>(m, "gamma", 0.0);
                spec.fixed.eta = field<double>(m, "eta", 0.0);
                cfg.methods.push_back(spec);
            }
        } else {
            cfg.methods.push_back(MethodSpec{});
        }
        if (cfg.methods.empty()) throw InputError("methods must not be empty");

        if (doc.contains("grids")) {
            const json& g = doc.at("grids");
            check_keys(g, {"t", "gamma", "eta"}, "grids");
            if (g.contains("t")) cfg.grid.t = g.at("t").get<std::vector<std::size_t>>();
            if (g.contains("gamma")) cfg.grid.gamma = g.at("gamma").get<std::vector<double>>();
            if (g.contains("eta")) cfg.grid.eta = g.at("eta").get<std::vector<double>>();
        }
        if (doc.contains("lsmi")) {
            const json& l = doc.at("lsmi");
            check_keys(l, {"center_cap", "folds", "kappa", "delta"}, "lsmi");
            cfg.lsmi.center_cap = field<std::size_t>(l, "center_cap", 500);
            cfg.lsmi.folds = field<std::size_t>(l, "folds", 5);
            if (l.contains("kappa")) cfg.lsmi.kappa_grid = l.at("kappa").get<std::vector<double>>();
            if (l.contains("delta")) cfg.lsmi.delta_grid = l.at("delta").get<std::vector<double>>();
        }
        return cfg;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed benchmark config: ") + e.what());
    }
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, std::size_t jobs) {
    if (config.runs == 0) throw InputError("benchmark needs at least one run");
    if (!config.dataset.labels) throw InputError("benchmark dataset has no ground-truth labels");
    config.dataset.validate();
    const Labels& truth = *config.dataset.labels;

    const std::size_t links = config.link_counts.size();
    const std::size_t methods = config.methods.size();
    // scores[(link * runs + run) * methods + method]
    std::vector<double> scores(links * config.runs * methods, 0.0);

    lsmi::LsmiConfig lsmi_config = config.lsmi;
    if (lsmi_config.kappa_grid.empty()) lsmi_config.kappa_grid = lsmi::default_kappa_grid(config.dataset.features);

    parallel_for(links * config.runs, jobs, [&](std::size_t task) {
        const std::size_t li = task / config.runs;
        const std::size_t run = task % config.runs;
        const std::uint64_t seed = config.seed + run;
        const ConstraintSet cs = sample_constraints(truth, config.link_counts[li], seed);
        for (std::size_t m = 0; m < methods; ++m) {
            const MethodSpec& spec = config.methods[m];
            Labels labels;
            if (spec.select) {
                lsmi::LsmiConfig per_run = lsmi_config;
                per_run.seed = seed;
                labels = grid_search(config.dataset, cs, config.classes, config.grid, per_run, 1).best.labels;
            } else {
                labels = cluster(config.dataset, cs, spec.fixed, config.classes).labels;
            }
            scores[task * methods + m] = ari(labels, truth);
        }
    });

    BenchmarkReport report;
    report.dataset = config.name;
    report.link_counts = config.link_counts;
    report.config = config.snapshot;
    for (std::size_t r = 0; r < config.runs; ++r) report.seeds.push_back(config.seed + r);
    for (std::size_t m = 0; m < methods; ++m) {
        Series s;
        s.method = config.methods[m].name;
        s.runs = config.runs;
        for (std::size_t li = 0; li < links; ++li) {
            double sum = 0.0;
            for (std::size_t r = 0; r < config.runs; ++r) {
                const double v = scores[(li * config.runs + r) * methods + m];
                sum += v;
                report.records.push_back({s.method, config.link_counts[li], r, config.seed + r, v});
            }
            const double mean = sum / static_cast<double>(config.runs);
            double ss = 0.0;
            for (std::size_t r = 0; r < config.runs; ++r) {
                const double dv = scores[(li * config.runs + r) * methods + m] - mean;
                ss += dv * dv;
            }
            s.mean.push_back(mean);
            s.std.push_back(config.runs > 1 ? std::sqrt(ss / static_cast<double>(config.runs - 1)) : 0.0);
        }
        report.series.push_back(std::move(s));
    }
    return report;
}

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "dataset,method,links,run,seed,ari\n";
    for (const auto& r : report.records)
        out << report.dataset << ',' << r.method << ',' << r.links << ',' << r.run << ',' << r.seed << ','
            << fmt(r.ari) << '\n';
}

std::string report_summary_json(const BenchmarkReport& report) {
    json doc;
    doc["dataset"] = report.dataset;
    doc["link_counts"] = report.link_counts;
    doc["seeds"] = report.seeds;
    doc["series"] = json::array();
    for (const auto& s : report.series)
        doc["series"].push_back({{"method", s.method}, {"mean", s.mean}, {"std", s.std}, {"runs", s.runs}});
    doc["config"] = report.config.empty() ? json(nullptr) : json::parse(report.config);
    return doc.dump(2) + "\n";
}

}  // namespace ssmic
