#pragma once

#include "ssmic/constraints.hpp"
#include "ssmic/data.hpp"
#include "ssmic/kernel.hpp"
#include "ssmic/types.hpp"

#include <cstddef>
#include <filesystem>

namespace ssmic {

/// U = K'(2I + 2 gamma M + gamma^2 M^2 - 2 eta C + eta^2 C^2)K'.
struct UMatrix {
    Matrix entries;
    double gamma = 0.0;
    double eta = 0.0;
};

/// Throws InputError for negative or non-finite gamma/eta, eta != 0 with
/// more than two classes, or a constraint set of the wrong size.
UMatrix build_u(const KernelMatrix& modified_kernel, const ConstraintSet& cs, double gamma, double eta,
                int classes);

struct EigenPairs {
    Vector values;   ///< descending
    Matrix vectors;  ///< orthonormal columns
};

/// The c algebraically largest eigenpairs of a symmetric matrix.
///
/// Degenerate eigenspaces have no preferred basis, so every cluster of
/// eigenvalues (relative gap below 1e-9) that reaches into the top c is
/// re-expressed in a canonical basis: the projections of e_1, e_2, ... onto
/// the eigenspace, Gram-Schmidt orthonormalised in sample order. The result
/// then depends only on the matrix, not on the solver's internal choices.
///
/// Throws NumericError if the solver fails or a residual
/// |U phi - lambda phi| exceeds 1e-8 |U|.
EigenPairs top_eigs(const Matrix& u, int c);

/// Multiplies each column by the sign of its sum (sign of its first nonzero
/// entry when the sum is exactly zero).
Matrix fix_signs(Matrix phi);

/// y_i = argmax_y max(0, phi_y)_i / sum(max(0, phi_y)); columns whose clipped
/// sum is zero use |phi_y| instead. Ties resolve to the smallest y.
Labels assign_clusters(const Matrix& phi_tilde);

/// (c / 2n) sum_y alpha_y' K^2 alpha_y - 1/2.
double smi_hat(const Matrix& kernel, const Matrix& alpha, int c);

struct SolverParams {
    std::size_t t = 7;
    double gamma = 0.0;
    double eta = 0.0;
};

/// Everything needed to reproduce assignments and predict new points.
struct ClusterModel {
    int classes = 0;
    SolverParams params;
    Vector lambda;          ///< top-c eigenvalues of U, descending
    Matrix phi;             ///< sign-fixed eigenvectors, n x c
    Matrix train_features;  ///< n x d
    Vector train_sigma;     ///< local scales of the training kernel
};

struct Clustering {
    Labels labels;
    ClusterModel model;
};

/// Semi-supervised clustering: kernel, constraint edits, U, top-c
/// eigenvectors, sign fixing, assignment. An empty ConstraintSet with n == 0
/// stands for "no links".
Clustering cluster(const Dataset& ds, const ConstraintSet& cs, const SolverParams& params, int classes);

/// Same pipeline reusing an unmodified local-scaling kernel of `features`.
Clustering cluster(const Matrix& features, const KernelMatrix& kernel, const ConstraintSet& cs, double gamma,
                   double eta, int classes);

/// Plain unsupervised variant: top-c eigenvectors of K itself.
Clustering cluster_unsupervised(const Matrix& features, std::size_t t, int classes);

/// Out-of-sample assignment
///   y' = argmax_y max(0, sum_i K(x', x_i) phi_y,i) / (lambda_y sum(max(0, phi_y)))
/// with the unmodified local-scaling kernel. Throws NumericError when any
/// lambda_y <= 0 and InputError on a dimension mismatch.
int predict(const ClusterModel& model, const RowVector& x);
Labels predict(const ClusterModel& model, const Matrix& points);

/// JSON persistence, schema tag "ssmic.cluster_model/1".
std::string model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const ClusterModel& model);
ClusterModel load_model(const std::filesystem::path& path);

}  // namespace ssmic
