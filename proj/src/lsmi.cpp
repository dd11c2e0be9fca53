#include "ssmic/lsmi.hpp"

#include "ssmic/error.hpp"
#include "ssmic/log.hpp"
#include "ssmic/seed.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace ssmic::lsmi {

namespace {

std::vector<int> distinct_labels(const Labels& y) {
    std::vector<int> classes(y.begin(), y.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

std::vector<double> sorted_grid(std::span<const double> grid, const char* name, bool strictly_positive) {
    if (grid.empty()) throw InputError(std::string(name) + " grid is empty");
    std::vector<double> out(grid.begin(), grid.end());
    for (double v : out)
        if (!std::isfinite(v) || (strictly_positive ? !(v > 0.0) : !(v >= 0.0)))
            throw InputError(std::string(name) + " grid value " + std::to_string(v) + " out of range");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw InputError("Gaussian kernel: dimension mismatch");
    Matrix d2(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) d2(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    return d2;
}

Matrix kernel_from_distances(const Matrix& d2, double kappa) {
    return (d2.array() * (-1.0 / (2.0 * kappa * kappa))).exp().matrix();
}

// Systems for every class from a precomputed kernel between samples and
// that class's centres.
LsmiSystem system_from_kernel(const Matrix& l, const Labels& y, int cls) {
    const auto n = static_cast<double>(y.size());
    const auto n_y = static_cast<double>(std::count(y.begin(), y.end(), cls));
    LsmiSystem s;
    s.h_matrix = Matrix::Zero(l.cols(), l.cols());
    s.h_matrix.selfadjointView<Eigen::Lower>().rankUpdate(l.transpose(), n_y / (n * n));
    s.h_matrix.triangularView<Eigen::StrictlyUpper>() = s.h_matrix.transpose();
    s.h_vector = Vector::Zero(l.cols());
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == cls) s.h_vector += l.row(static_cast<Eigen::Index>(i)).transpose();
    s.h_vector /= n;
    return s;
}

void check_xy(const Matrix& x, const Labels& y) {
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw InputError("LSMI: " + std::to_string(x.rows()) + " samples but " + std::to_string(y.size()) + " labels");
    if (y.empty()) throw InputError("LSMI needs at least one sample");
}

// sum_{x in X} sum_{j} r(x, y_j)^2 and sum_i r(x_i, y_i) from a ratio matrix.
std::pair<double, double> ratio_sums(const LsmiModel& model, const Matrix& ratios, const Labels& y) {
    std::vector<double> counts(model.classes.size(), 0.0);
    double paired = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::size_t k = model.class_index(y[i]);
        counts[k] += 1.0;
        paired += ratios(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    double all_pairs = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] > 0.0) all_pairs += counts[k] * ratios.col(static_cast<Eigen::Index>(k)).squaredNorm();
    return {all_pairs, paired};
}

}  // namespace

std::size_t LsmiModel::class_index(int y) const {
    const auto it = std::lower_bound(classes.begin(), classes.end(), y);
    if (it == classes.end() || *it != y)
        throw InputError("class " + std::to_string(y) + " is not represented in the LSMI model");
    return static_cast<std::size_t>(it - classes.begin());
}

Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double kappa) {
    return kernel_from_distances(squared_distances(a, b), kappa);
}

LsmiSystem build_system(const Matrix& x, const Labels& y, int cls, const Matrix& centers, double kappa) {
    check_xy(x, y);
    return system_from_kernel(gaussian_kernel(x, centers, kappa), y, cls);
}

Vector solve_weights(const LsmiSystem& system, double delta, bool* pseudo) {
    if (pseudo) *pseudo = false;
    Matrix a = system.h_matrix;
    a.diagonal().array() += delta;
    const Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-13) return llt.solve(system.h_vector);
    if (pseudo) *pseudo = true;
    return Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(system.h_vector);
}

std::vector<std::vector<std::size_t>> select_centers(const Labels& y, std::size_t cap, std::uint64_t seed) {
    const std::vector<int> classes = distinct_labels(y);
    std::vector<std::vector<std::size_t>> members(classes.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
        members[k].push_back(i);
    }
    if (y.size() <= cap) return members;
    if (cap < classes.size())
        throw InputError("center cap " + std::to_string(cap) + " is smaller than the number of classes");

    // Largest-remainder apportionment of the cap, at least one centre per class.
    const auto n = static_cast<double>(y.size());
    std::vector<std::size_t> quota(classes.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const double exact = static_cast<double>(cap) * static_cast<double>(members[k].size()) / n;
        quota[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(exact)));
        assigned += quota[k];
        remainders.emplace_back(-(exact - std::floor(exact)), k);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t r = 0; assigned < cap && r < remainders.size(); ++r, ++assigned) ++quota[remainders[r].second];
    while (assigned > cap) {
        const auto largest = static_cast<std::size_t>(std::max_element(quota.begin(), quota.end()) - quota.begin());
        --quota[largest];
        --assigned;
    }

    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(classes[k])));
        std::shuffle(members[k].begin(), members[k].end(), rng);
        members[k].resize(std::min(quota[k], members[k].size()));
        std::sort(members[k].begin(), members[k].end());
    }
    return members;
}

LsmiModel fit(const Matrix& x, const Labels& y, double kappa, double delta, std::size_t center_cap,
              std::uint64_t seed) {
    check_xy(x, y);
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("kappa must be positive");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InputError("delta must be non-negative");
    LsmiModel model;
    model.kappa = kappa;
    model.delta = delta;
    model.classes = distinct_labels(y);
    const auto center_sets = select_centers(y, center_cap, seed);
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        Matrix centers = gather_rows(x, center_sets[k]);
        const LsmiSystem system = build_system(x, y, model.classes[k], centers, kappa);
        bool pseudo = false;
        model.weights.push_back(solve_weights(system, delta, &pseudo));
        model.centers.push_back(std::move(centers));
        if (pseudo) {
            model.pseudo_inverse = true;
            log::warn("LSMI system for class " + std::to_string(model.classes[k]) +
                      " is singular; using the least-squares solution (choose delta > 0)");
        }
    }
    return model;
}

double evaluate_ratio(const LsmiModel& model, const RowVector& x, int y) {
    const std::size_t k = model.class_index(y);
    Matrix point(1, x.size());
    point.row(0) = x;
    return (gaussian_kernel(point, model.centers[k], model.kappa) * model.weights[k])(0);
}

Matrix ratio_matrix(const LsmiModel& model, const Matrix& x) {
    Matrix r(x.rows(), static_cast<Eigen::Index>(model.classes.size()));
    for (std::size_t k = 0; k < model.classes.size(); ++k)
        r.col(static_cast<Eigen::Index>(k)) = gaussian_kernel(x, model.centers[k], model.kappa) * model.weights[k];
    return r;
}

double lsmi_value(const LsmiModel& model, const Matrix& x, const Labels& y) {
    check_xy(x, y);
    const auto n = static_cast<double>(y.size());
    const auto [all_pairs, paired] = ratio_sums(model, ratio_matrix(model, x), y);
    return -all_pairs / (2.0 * n * n) + paired / n - 0.5;
}

double cv_objective(const LsmiModel& model, const Matrix& x_holdout, const Labels& y_holdout) {
    check_xy(x_holdout, y_holdout);
    const auto z = static_cast<double>(y_holdout.size());
    const auto [all_pairs, paired] = ratio_sums(model, ratio_matrix(model, x_holdout), y_holdout);
    return all_pairs / (2.0 * z * z) - paired / z;
}

std::vector<std::size_t> assign_folds(const Labels& y, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
    if (y.size() < folds)
        throw InputError("cross-validation with " + std::to_string(folds) + " folds needs at least that many samples");
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    std::vector<std::size_t> fold(y.size());
    for (std::size_t p = 0; p < order.size(); ++p) fold[order[p]] = p % folds;
    return fold;
}

CvResult cross_validate(const Matrix& x, const Labels& y, std::span<const double> kappa_grid,
                        std::span<const double> delta_grid, std::size_t folds, std::size_t center_cap,
                        std::uint64_t seed) {
    check_xy(x, y);
    const auto kappas = sorted_grid(kappa_grid, "kappa", true);
    const auto deltas = sorted_grid(delta_grid, "delta", false);
    const auto fold_of = assign_folds(y, folds, seed);

    CvResult result;
    for (double kappa : kappas)
        for (double delta : deltas) result.table.push_back({kappa, delta, 0.0, std::vector<double>(folds, 0.0)});

    for (std::size_t m = 0; m < folds; ++m) {
        std::vector<std::size_t> train_rows;
        std::vector<std::size_t> hold_rows;
        for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == m ? hold_rows : train_rows).push_back(i);
        Labels y_train, y_hold;
        for (auto i : train_rows) y_train.push_back(y[i]);
        for (auto i : hold_rows) y_hold.push_back(y[i]);
        const Matrix x_train = gather_rows(x, train_rows);
        const Matrix x_hold = gather_rows(x, hold_rows);

        LsmiModel model;
        model.classes = distinct_labels(y_train);
        for (int cls : distinct_labels(y_hold))
            if (!std::binary_search(model.classes.begin(), model.classes.end(), cls))
                throw InputError("class " + std::to_string(cls) + " has no samples outside cross-validation fold " +
                                 std::to_string(m + 1));
        const auto center_sets = select_centers(y_train, center_cap, mix_seed(seed, m));
        for (const auto& rows : center_sets) model.centers.push_back(gather_rows(x_train, rows));
        model.weights.resize(model.classes.size());
        std::vector<Matrix> train_d2, hold_d2;
        for (const auto& centers : model.centers) {
            train_d2.push_back(squared_distances(x_train, centers));
            hold_d2.push_back(squared_distances(x_hold, centers));
        }

        std::size_t row = 0;
        for (double kappa : kappas) {
            model.kappa = kappa;
            std::vector<LsmiSystem> systems;
            std::vector<Matrix> hold_kernels;
            for (std::size_t k = 0; k < model.classes.size(); ++k) {
                systems.push_back(system_from_kernel(kernel_from_distances(train_d2[k], kappa), y_train, model.classes[k]));
                hold_kernels.push_back(kernel_from_distances(hold_d2[k], kappa));
            }
            for (double delta : deltas) {
                model.delta = delta;
                Matrix ratios(x_hold.rows(), static_cast<Eigen::Index>(model.classes.size()));
                for (std::size_t k = 0; k < model.classes.size(); ++k) {
                    model.weights[k] = solve_weights(systems[k], delta);
                    ratios.col(static_cast<Eigen::Index>(k)) = hold_kernels[k] * model.weights[k];
                }
                const auto z = static_cast<double>(y_hold.size());
                const auto [all_pairs, paired] = ratio_sums(model, ratios, y_hold);
                result.table[row++].folds[m] = all_pairs / (2.0 * z * z) - paired / z;
            }
        }
    }

    double best = 0.0;
    for (std::size_t r = 0; r < result.table.size(); ++r) {
        auto& entry = result.table[r];
        double sum = 0.0;
        for (double v : entry.folds) sum += v;
        entry.mean = sum / static_cast<double>(folds);
        if (r == 0 || entry.mean < best) {
            best = entry.mean;
            result.kappa = entry.kappa;
            result.delta = entry.delta;
        }
    }
    return result;
}

double median_pairwise_distance(const Matrix& x) {
    constexpr Eigen::Index kMaxPoints = 1000;
    const Eigen::Index stride = std::max<Eigen::Index>(1, (x.rows() + kMaxPoints - 1) / kMaxPoints);
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < x.rows(); i += stride) rows.push_back(i);
    std::vector<double> d;
    d.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) d.push_back((x.row(rows[a]) - x.row(rows[b])).norm());
    if (d.empty()) return 0.0;
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    if (d.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(d.begin(), mid);
    return 0.5 * (lower + upper);
}

std::vector<double> default_kappa_grid(const Matrix& x) {
    double median = median_pairwise_distance(x);
    if (!(median > 0.0)) median = 1.0;
    std::vector<double> grid(10);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = median * std::pow(10.0, -1.0 + 2.0 * static_cast<double>(k) / 9.0);
    return grid;
}

std::vector<double> default_delta_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 10.0}; }

LsmiEstimate estimate(const Matrix& x, const Labels& y, const LsmiConfig& config) {
    const auto kappas = config.kappa_grid.empty() ? default_kappa_grid(x) : config.kappa_grid;
    const auto deltas = config.delta_grid.empty() ? default_delta_grid() : config.delta_grid;
    LsmiEstimate est;
    est.cv = cross_validate(x, y, kappas, deltas, config.folds, config.center_cap, config.seed);
    est.model = fit(x, y, est.cv.kappa, est.cv.delta, config.center_cap, config.seed);
    est.value = lsmi_value(est.model, x, y);
    return est;
}

}  // namespace ssmic::lsmi
