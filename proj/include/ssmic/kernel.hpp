#pragma once

#include "ssmic/constraints.hpp"
#include "ssmic/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace ssmic {

/// t nearest neighbours of every sample (self excluded) and the local
/// scale sigma_i, the distance to the t-th of them.
struct Neighborhoods {
    std::size_t t = 0;
    std::vector<std::vector<std::size_t>> indices;  ///< ascending distance, ties to lower index
    Vector sigma;
};

/// Brute-force Euclidean t-NN. Throws InputError unless 1 <= t <= n-1.
Neighborhoods knn(const Matrix& features, std::size_t t);

/// Symmetric similarity matrix with entries in [0, 1] and unit diagonal.
struct KernelMatrix {
    Matrix entries;
    Vector sigma;           ///< local scales of the unmodified kernel
    std::size_t t = 0;
    bool modified = false;  ///< must/cannot edits applied

    std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Sparse local-scaling kernel:
///   K_ij = exp(-|x_i - x_j|^2 / (2 sigma_i sigma_j))  if i in N_t(j) or j in N_t(i), else 0,
/// with K_ii = 1 and K_ij = 1 for coincident points.
KernelMatrix local_scaling_kernel(const Matrix& features, std::size_t t);

/// K' : entries of must-linked pairs set to 1, cannot-linked pairs to 0.
KernelMatrix apply_constraints(const KernelMatrix& kernel, const ConstraintSet& cs);

/// Kernel values between a new point and every training point, using the
/// stored training scales and sigma(x) = distance from x to its t-th nearest
/// training point. The neighbourhood test treats x as a member of N_t(x_i)
/// when |x - x_i| <= sigma_i.
Vector out_of_sample_kernel(const Matrix& train, const Vector& train_sigma, std::size_t t, const RowVector& x);

/// Dense dump, one matrix row per line.
void write_kernel_csv(std::ostream& out, const KernelMatrix& kernel);

}  // namespace ssmic
