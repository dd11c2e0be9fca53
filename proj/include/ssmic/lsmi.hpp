#pragma once

#include "ssmic/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ssmic::lsmi {

/// Least-squares density-ratio model
///   r(x, y) = sum_l omega^(y)_l exp(-|x - c^(y)_l|^2 / (2 kappa^2))
/// with one weight vector per class over that class's kernel centres.
struct LsmiModel {
    double kappa = 1.0;
    double delta = 0.0;
    std::vector<int> classes;     ///< ascending
    std::vector<Matrix> centers;  ///< per class, one centre per row
    std::vector<Vector> weights;  ///< per class, length = centre count
    bool pseudo_inverse = false;  ///< a singular delta = 0 system was solved in the least-squares sense

    /// Position of class y in `classes`; throws InputError for unknown labels.
    std::size_t class_index(int y) const;
};

/// H^(y) and h^(y) for one class:
///   H_ll' = (n_y / n^2) sum_i L(x_i, c_l) L(x_i, c_l'),   h_l = (1/n) sum_{i: y_i = y} L(x_i, c_l).
struct LsmiSystem {
    Matrix h_matrix;
    Vector h_vector;
};

/// Gaussian kernel matrix between the rows of a and b.
Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double kappa);

LsmiSystem build_system(const Matrix& x, const Labels& y, int cls, const Matrix& centers, double kappa);

/// Solves (H + delta I) omega = h. Uses a Cholesky factorisation; if that
/// fails or the system is numerically singular, falls back to the
/// minimum-norm least-squares solution and sets *pseudo.
Vector solve_weights(const LsmiSystem& system, double delta, bool* pseudo = nullptr);

/// Kernel centres per class (classes ascending), as sample indices. All
/// samples when n <= cap; otherwise cap centres split across classes in
/// proportion to class size (at least one per class) and drawn without
/// replacement.
std::vector<std::vector<std::size_t>> select_centers(const Labels& y, std::size_t cap, std::uint64_t seed);

/// Fits the ratio model. Throws InputError for kappa <= 0, delta < 0 or
/// mismatched sizes.
LsmiModel fit(const Matrix& x, const Labels& y, double kappa, double delta, std::size_t center_cap = 500,
              std::uint64_t seed = 0);

double evaluate_ratio(const LsmiModel& model, const RowVector& x, int y);

/// n x (number of classes) matrix of r(x_i, class), columns ordered as model.classes.
Matrix ratio_matrix(const LsmiModel& model, const Matrix& x);

/// LSMI = -(1/2n^2) sum_{i,j} r(x_i, y_j)^2 + (1/n) sum_i r(x_i, y_i) - 1/2.
double lsmi_value(const LsmiModel& model, const Matrix& x, const Labels& y);

/// Hold-out error of one fold:
///   (1/2|Z|^2) sum_{x in Z} sum_{y in Z} r(x, y)^2 - (1/|Z|) sum_{(x,y) in Z} r(x, y).
double cv_objective(const LsmiModel& model, const Matrix& x_holdout, const Labels& y_holdout);

/// Fold id in [0, folds) for each sample: seeded shuffle, grouped by class,
/// dealt round-robin so every class is spread over the folds and fold sizes
/// differ by at most one.
std::vector<std::size_t> assign_folds(const Labels& y, std::size_t folds, std::uint64_t seed);

struct CvRow {
    double kappa = 0.0;
    double delta = 0.0;
    double mean = 0.0;
    std::vector<double> folds;
};

struct CvResult {
    double kappa = 0.0;
    double delta = 0.0;
    std::vector<CvRow> table;  ///< kappa ascending, then delta ascending
};

/// M-fold cross-validation over the (kappa, delta) grid; returns the
/// minimiser of the mean hold-out error, ties to smaller kappa then smaller
/// delta. Throws InputError if a hold-out fold contains a class absent from
/// its training folds.
CvResult cross_validate(const Matrix& x, const Labels& y, std::span<const double> kappa_grid,
                        std::span<const double> delta_grid, std::size_t folds = 5, std::size_t center_cap = 500,
                        std::uint64_t seed = 0);

double median_pairwise_distance(const Matrix& x);

/// Ten log-spaced multiples (0.1 .. 10) of the median pairwise distance.
std::vector<double> default_kappa_grid(const Matrix& x);
std::vector<double> default_delta_grid();

struct LsmiConfig {
    std::vector<double> kappa_grid;  ///< empty: default_kappa_grid
    std::vector<double> delta_grid;  ///< empty: default_delta_grid
    std::size_t folds = 5;
    std::size_t center_cap = 500;
    std::uint64_t seed = 0;
};

struct LsmiEstimate {
    double value = 0.0;
    CvResult cv;
    LsmiModel model;
};

/// Cross-validates (kappa, delta), refits on all samples, evaluates LSMI.
LsmiEstimate estimate(const Matrix& x, const Labels& y, const LsmiConfig& config);

}  // namespace ssmic::lsmi
