#pragma once

#include "ssmic/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssmic::cli {

struct CommonOptions {
    std::uint64_t seed = 0;
    std::size_t jobs = 0;  ///< 0: default_jobs()
    std::string manifest;
};

struct ClusterOptions {
    std::string input;
    std::string format = "csv";
    std::string normalize = "none";
    std::optional<int> classes;
    std::string constraints;
    std::optional<std::size_t> t;
    std::optional<double> gamma;
    std::optional<double> eta;
    bool automatic = false;
    std::vector<std::size_t> t_grid;
    std::vector<double> gamma_grid;
    std::vector<double> eta_grid;
    std::vector<double> kappa_grid;
    std::vector<double> delta_grid;
    std::size_t folds = 5;
    std::size_t center_cap = 500;
    std::string output = "-";
    std::string model_out;
    std::string kernel_out;
    std::string table_out;
    std::string cv_out;
};

struct PredictOptions {
    std::string model;
    std::string input;
    std::string format = "csv";
    std::string output = "-";
};

struct ConstraintsOptions {
    std::string input;
    std::string format = "labeled-csv";
    std::optional<std::uint64_t> links;
    std::optional<double> fraction;
    std::string output = "-";
};

struct AriOptions {
    std::string a;
    std::string b;
    std::string output;
};

struct BenchOptions {
    std::string config;
    std::string output = "-";
    std::string summary;
};

struct GenerateOptions {
    std::size_t n_per_class = 100;
    int classes = 2;
    std::size_t dim = 2;
    double separation = 10.0;
    std::string output = "-";
};

// Each returns the process exit code; errors propagate as exceptions.
int cmd_cluster(const ClusterOptions& opt, const CommonOptions& common);
int cmd_predict(const PredictOptions& opt, const CommonOptions& common);
int cmd_constraints(const ConstraintsOptions& opt, const CommonOptions& common);
int cmd_ari(const AriOptions& opt, const CommonOptions& common);
int cmd_bench(const BenchOptions& opt, const CommonOptions& common);
int cmd_generate(const GenerateOptions& opt, const CommonOptions& common);

/// "index,label" CSV with 1-based indices.
std::string format_labels(const Labels& labels);

/// Reads a label file: the last column of a numeric CSV (an "index,label"
/// file written by this tool, or a single column).
Labels read_labels(const std::string& path);

}  // namespace ssmic::cli
