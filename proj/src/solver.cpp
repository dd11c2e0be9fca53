#include "ssmic/solver.hpp"

#include "ssmic/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <cmath>
#include <string>

namespace ssmic {

namespace {

void check_classes(int classes, Eigen::Index n) {
    if (classes < 1) throw InputError("number of classes must be at least 1");
    if (classes > n)
        throw InputError("number of classes (" + std::to_string(classes) + ") exceeds the sample count (" +
                         std::to_string(n) + ")");
}

// Orthonormal basis of span(q) built from projections of e_0, e_1, ...
Matrix canonical_basis(const Matrix& q) {
    const Eigen::Index n = q.rows();
    const Eigen::Index m = q.cols();
    Matrix basis(n, m);
    Eigen::Index found = 0;
    for (Eigen::Index k = 0; k < n && found < m; ++k) {
        Vector v = q * q.row(k).transpose();
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index b = 0; b < found; ++b) v -= basis.col(b).dot(v) * basis.col(b);
        const double norm = v.norm();
        if (norm > 1e-6) basis.col(found++) = v / norm;
    }
    if (found < m) throw NumericError("could not canonicalise a degenerate eigenspace");
    return basis;
}

Vector clipped_or_abs(const Eigen::Ref<const Vector>& column) {
    Vector clipped = column.cwiseMax(0.0);
    if (clipped.sum() == 0.0) clipped = column.cwiseAbs();
    return clipped;
}

}  // namespace

UMatrix build_u(const KernelMatrix& modified_kernel, const ConstraintSet& cs, double gamma, double eta,
                int classes) {
    const auto n = static_cast<Eigen::Index>(modified_kernel.size());
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be finite and non-negative");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw InputError("eta must be finite and non-negative");
    if (classes > 2 && eta != 0.0)
        throw InputError("eta must be 0 when there are more than two classes (got eta=" + std::to_string(eta) + ")");
    ConstraintSet links = cs;
    if (links.n == 0 && links.empty()) links.n = static_cast<std::size_t>(n);
    if (links.n != static_cast<std::size_t>(n))
        throw InputError("constraint set covers " + std::to_string(links.n) + " samples but the kernel has " +
                         std::to_string(n));
    links.validate();

    using Sparse = Eigen::SparseMatrix<double>;
    const Sparse m = links.must_matrix();
    const Sparse c = links.cannot_matrix();
    Sparse identity(n, n);
    identity.setIdentity();
    Sparse middle = 2.0 * identity;
    if (gamma != 0.0) {
        const Sparse m2 = m * m;
        middle += 2.0 * gamma * m + gamma * gamma * m2;
    }
    if (eta != 0.0) {
        const Sparse c2 = c * c;
        middle += -2.0 * eta * c + eta * eta * c2;
    }
    const Sparse k = modified_kernel.entries.sparseView();
    const Sparse product = k * (middle * k);

    UMatrix u;
    u.gamma = gamma;
    u.eta = eta;
    u.entries = Matrix(product);
    u.entries = 0.5 * (u.entries + u.entries.transpose()).eval();
    return u;
}

EigenPairs top_eigs(const Matrix& u, int c) {
    const Eigen::Index n = u.rows();
    if (u.cols() != n) throw InputError("eigenproblem needs a square matrix");
    check_classes(c, n);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(u);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed to converge");
    const Vector ascending = solver.eigenvalues();
    const Matrix& vectors = solver.eigenvectors();

    Vector values = ascending.reverse();
    Matrix basis = vectors.rowwise().reverse();
    const double scale = values.cwiseAbs().maxCoeff();
    const double tie = 1e-9 * scale;

    for (Eigen::Index start = 0; start < c;) {
        Eigen::Index end = start + 1;
        while (end < n && values(end - 1) - values(end) <= tie) ++end;
        if (end - start > 1) basis.middleCols(start, end - start) = canonical_basis(basis.middleCols(start, end - start));
        start = end;
    }

    EigenPairs out;
    out.values = values.head(c);
    out.vectors = basis.leftCols(c);
    for (Eigen::Index y = 0; y < c; ++y) {
        const double residual = (u * out.vectors.col(y) - out.values(y) * out.vectors.col(y)).norm();
        if (residual > 1e-8 * scale)
            throw NumericError("eigenpair " + std::to_string(y + 1) + " residual " + std::to_string(residual) +
                               " exceeds tolerance");
    }
    return out;
}

Matrix fix_signs(Matrix phi) {
    for (Eigen::Index y = 0; y < phi.cols(); ++y) {
        auto col = phi.col(y);
        const double sum = col.sum();
        double sign = 1.0;
        if (sum < 0.0) {
            sign = -1.0;
        } else if (sum == 0.0) {
            for (Eigen::Index i = 0; i < col.size(); ++i)
                if (col(i) != 0.0) {
                    sign = col(i) < 0.0 ? -1.0 : 1.0;
                    break;
                }
        }
        col *= sign;
    }
    return phi;
}

Labels assign_clusters(const Matrix& phi_tilde) {
    const Eigen::Index n = phi_tilde.rows();
    const Eigen::Index c = phi_tilde.cols();
    Matrix scores(n, c);
    for (Eigen::Index y = 0; y < c; ++y) {
        const Vector clipped = clipped_or_abs(phi_tilde.col(y));
        const double total = clipped.sum();
        scores.col(y) = total > 0.0 ? Vector(clipped / total) : Vector::Zero(n);
    }
    Labels labels(static_cast<std::size_t>(n), 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index y = 1; y < c; ++y)
            if (scores(i, y) > scores(i, best)) best = y;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best + 1);
    }
    return labels;
}

double smi_hat(const Matrix& kernel, const Matrix& alpha, int c) {
    const Eigen::Index n = kernel.rows();
    if (kernel.cols() != n || alpha.rows() != n) throw InputError("smi_hat: inconsistent dimensions");
    return static_cast<double>(c) / (2.0 * static_cast<double>(n)) * (kernel * alpha).squaredNorm() - 0.5;
}

Clustering cluster(const Matrix& features, const KernelMatrix& kernel, const ConstraintSet& cs, double gamma,
                   double eta, int classes) {
    check_classes(classes, features.rows());
    if (kernel.size() != static_cast<std::size_t>(features.rows()))
        throw InputError("kernel size does not match the sample count");
    const bool linked = !(cs.n == 0 && cs.empty());
    const KernelMatrix modified = linked ? apply_constraints(kernel, cs) : kernel;
    const UMatrix u = build_u(modified, cs, gamma, eta, classes);
    const EigenPairs eig = top_eigs(u.entries, classes);

    Clustering out;
    out.model.classes = classes;
    out.model.params = {kernel.t, gamma, eta};
    out.model.lambda = eig.values;
    out.model.phi = fix_signs(eig.vectors);
    out.model.train_features = features;
    out.model.train_sigma = kernel.sigma;
    out.labels = assign_clusters(out.model.phi);
    return out;
}

Clustering cluster(const Dataset& ds, const ConstraintSet& cs, const SolverParams& params, int classes) {
    ds.validate();
    return cluster(ds.features, local_scaling_kernel(ds.features, params.t), cs, params.gamma, params.eta, classes);
}

Clustering cluster_unsupervised(const Matrix& features, std::size_t t, int classes) {
    check_classes(classes, features.rows());
    const KernelMatrix k = local_scaling_kernel(features, t);
    const EigenPairs eig = top_eigs(k.entries, classes);
    Clustering out;
    out.model.classes = classes;
    out.model.params = {t, 0.0, 0.0};
    out.model.lambda = eig.values;
    out.model.phi = fix_signs(eig.vectors);
    out.model.train_features = features;
    out.model.train_sigma = k.sigma;
    out.labels = assign_clusters(out.model.phi);
    return out;
}

Labels predict(const ClusterModel& model, const Matrix& points) {
    const Eigen::Index c = model.phi.cols();
    if (points.rows() > 0 && points.cols() != model.train_features.cols())
        throw InputError("input has " + std::to_string(points.cols()) + " features, model expects " +
                         std::to_string(model.train_features.cols()));
    Vector denominators(c);
    for (Eigen::Index y = 0; y < c; ++y) {
        if (!(model.lambda(y) > 0.0))
            throw NumericError("cannot predict: eigenvalue " + std::to_string(y + 1) + " of the model is " +
                               std::to_string(model.lambda(y)) + " (out-of-sample prediction needs positive eigenvalues)");
        denominators(y) = model.lambda(y) * clipped_or_abs(model.phi.col(y)).sum();
    }
    Labels labels(static_cast<std::size_t>(points.rows()), 1);
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
        const Vector k = out_of_sample_kernel(model.train_features, model.train_sigma, model.params.t, points.row(p));
        const RowVector projections = k.transpose() * model.phi;
        Eigen::Index best = 0;
        double best_score = 0.0;
        for (Eigen::Index y = 0; y < c; ++y) {
            const double score = denominators(y) > 0.0 ? std::max(0.0, projections(y)) / denominators(y) : 0.0;
            if (y == 0 || score > best_score) {
                best = y;
                best_score = score;
            }
        }
        labels[static_cast<std::size_t>(p)] = static_cast<int>(best + 1);
    }
    return labels;
}

int predict(const ClusterModel& model, const RowVector& x) {
    Matrix one(1, x.size());
    one.row(0) = x;
    return predict(model, one).front();
}

}  // namespace ssmic
