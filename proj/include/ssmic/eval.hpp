#pragma once

#include "ssmic/data.hpp"
#include "ssmic/lsmi.hpp"
#include "ssmic/model_select.hpp"
#include "ssmic/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssmic {

/// Adjusted Rand Index (Hubert & Arabie) from the contingency table.
/// When the maximum and expected index coincide (e.g. both partitions are a
/// single cluster) the ratio is 0/0; it is defined as 1 for identical
/// partitions and 0 otherwise. Throws InputError on length mismatch or
/// fewer than two samples.
double ari(const Labels& a, const Labels& b);

/// How a benchmark method obtains its clustering.
struct MethodSpec {
    std::string name = "3smic";
    bool select = true;  ///< grid search; otherwise `fixed`
    SolverParams fixed;
};

struct BenchmarkConfig {
    std::string name;
    Dataset dataset;
    int classes = 0;
    std::vector<std::uint64_t> link_counts;  ///< resolved absolute counts
    std::size_t runs = 20;
    std::uint64_t seed = 0;
    std::vector<MethodSpec> methods;
    SearchGrid grid;
    lsmi::LsmiConfig lsmi;
    std::string snapshot;  ///< the source document, re-serialised
};

/// Parses the JSON config:
///   { "name", "dataset": {"path", "format", "normalize"} | {"generator": "blobs", "n_per_class",
///     "classes", "dim", "separation", "seed"}, "classes", "link_counts": [...], "runs", "seed",
///     "methods": [{"name", "t", "gamma", "eta"} | {"name", "select": true}],
///     "grids": {"t", "gamma", "eta"}, "lsmi": {"center_cap", "folds", "kappa", "delta"} }
/// Integer link counts are absolute; real numbers (or "3%" strings) are
/// fractions of n(n-1)/2. Relative dataset paths resolve against base_dir.
BenchmarkConfig parse_benchmark_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

struct RunRecord {
    std::string method;
    std::uint64_t links = 0;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double ari = 0.0;
};

struct Series {
    std::string method;
    std::vector<double> mean;  ///< one entry per link count
    std::vector<double> std;   ///< sample standard deviation (0 for a single run)
    std::size_t runs = 0;
};

struct BenchmarkReport {
    std::string dataset;
    std::vector<std::uint64_t> link_counts;
    std::vector<Series> series;
    std::vector<RunRecord> records;  ///< method, link count, run order
    std::vector<std::uint64_t> seeds;
    std::string config;
};

/// For every link count and run r, samples constraints from the ground
/// truth with seed + r, clusters with each method and scores ARI against
/// the truth. Features stay fixed across runs.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, std::size_t jobs = 1);

/// Long format: dataset,method,links,run,seed,ari
void write_report_csv(std::ostream& out, const BenchmarkReport& report);
std::string report_summary_json(const BenchmarkReport& report);

}  // namespace ssmic
