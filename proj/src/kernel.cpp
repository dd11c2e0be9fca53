#include "ssmic/kernel.hpp"

#include "ssmic/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

namespace ssmic {

namespace {

// Accumulated coordinate-by-coordinate so that d(i,j) == d(j,i) bitwise and
// coincident points give exactly 0.
double squared_distance(const Matrix& x, Eigen::Index i, Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const double diff = x(i, k) - x(j, k);
        s += diff * diff;
    }
    return s;
}

Matrix pairwise_squared_distances(const Matrix& x) {
    const Eigen::Index n = x.rows();
    Matrix d2 = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) d2(i, j) = d2(j, i) = squared_distance(x, i, j);
    return d2;
}

double scaled_similarity(double dist2, double sigma_a, double sigma_b) {
    if (dist2 == 0.0) return 1.0;
    const double denom = 2.0 * sigma_a * sigma_b;
    if (denom == 0.0) return 0.0;
    return std::exp(-dist2 / denom);
}

void check_t(std::size_t n, std::size_t t) {
    if (t < 1 || t + 1 > n)
        throw InputError("neighbourhood size t=" + std::to_string(t) + " must lie in 1.." +
                         std::to_string(n == 0 ? 0 : n - 1));
}

Neighborhoods knn_from_distances(const Matrix& d2, std::size_t t) {
    const auto n = static_cast<std::size_t>(d2.rows());
    check_t(n, t);
    Neighborhoods nb;
    nb.t = t;
    nb.indices.resize(n);
    nb.sigma.resize(static_cast<Eigen::Index>(n));
    std::vector<std::size_t> order(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order[w++] = j;
        const auto row = static_cast<Eigen::Index>(i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double da = d2(row, static_cast<Eigen::Index>(a));
                              const double db = d2(row, static_cast<Eigen::Index>(b));
                              return da < db || (da == db && a < b);
                          });
        nb.indices[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t));
        nb.sigma(row) = std::sqrt(d2(row, static_cast<Eigen::Index>(nb.indices[i].back())));
    }
    return nb;
}

}  // namespace

Neighborhoods knn(const Matrix& features, std::size_t t) {
    check_t(static_cast<std::size_t>(features.rows()), t);
    return knn_from_distances(pairwise_squared_distances(features), t);
}

KernelMatrix local_scaling_kernel(const Matrix& features, std::size_t t) {
    check_t(static_cast<std::size_t>(features.rows()), t);
    const Matrix d2 = pairwise_squared_distances(features);
    const Neighborhoods nb = knn_from_distances(d2, t);

    KernelMatrix k;
    k.t = t;
    k.sigma = nb.sigma;
    const Eigen::Index n = features.rows();
    k.entries = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const std::size_t nj : nb.indices[static_cast<std::size_t>(i)]) {
            const auto j = static_cast<Eigen::Index>(nj);
            const double v = scaled_similarity(d2(i, j), nb.sigma(i), nb.sigma(j));
            k.entries(i, j) = v;
            k.entries(j, i) = v;
        }
    }
    return k;
}

KernelMatrix apply_constraints(const KernelMatrix& kernel, const ConstraintSet& cs) {
    if (cs.n != kernel.size())
        throw InputError("constraint set covers " + std::to_string(cs.n) + " samples but the kernel has " +
                         std::to_string(kernel.size()));
    cs.validate();
    KernelMatrix out = kernel;
    for (const auto& l : cs.must_links) {
        out.entries(static_cast<Eigen::Index>(l.i), static_cast<Eigen::Index>(l.j)) = 1.0;
        out.entries(static_cast<Eigen::Index>(l.j), static_cast<Eigen::Index>(l.i)) = 1.0;
    }
    for (const auto& l : cs.cannot_links) {
        out.entries(static_cast<Eigen::Index>(l.i), static_cast<Eigen::Index>(l.j)) = 0.0;
        out.entries(static_cast<Eigen::Index>(l.j), static_cast<Eigen::Index>(l.i)) = 0.0;
    }
    out.modified = true;
    return out;
}

Vector out_of_sample_kernel(const Matrix& train, const Vector& train_sigma, std::size_t t, const RowVector& x) {
    const auto n = static_cast<std::size_t>(train.rows());
    if (t < 1 || t > n)
        throw InputError("neighbourhood size t=" + std::to_string(t) + " exceeds the " + std::to_string(n) +
                         " training points");
    if (x.size() != train.cols())
        throw InputError("point has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(train.cols()));
    Vector d2(train.rows());
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < train.cols(); ++k) {
            const double diff = x(k) - train(i, k);
            s += diff * diff;
        }
        d2(i) = s;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double da = d2(static_cast<Eigen::Index>(a));
                          const double db = d2(static_cast<Eigen::Index>(b));
                          return da < db || (da == db && a < b);
                      });
    const double sigma_x = std::sqrt(d2(static_cast<Eigen::Index>(order[t - 1])));

    Vector k = Vector::Zero(train.rows());
    auto set = [&](Eigen::Index i) { k(i) = scaled_similarity(d2(i), sigma_x, train_sigma(i)); };
    for (std::size_t r = 0; r < t; ++r) set(static_cast<Eigen::Index>(order[r]));
    for (Eigen::Index i = 0; i < train.rows(); ++i)
        if (d2(i) <= train_sigma(i) * train_sigma(i)) set(i);
    return k;
}

void write_kernel_csv(std::ostream& out, const KernelMatrix& kernel) {
    char buf[32];
    for (Eigen::Index i = 0; i < kernel.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < kernel.entries.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", kernel.entries(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace ssmic
