#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ssmic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Cluster or class labels, one per sample, valued in 1..c.
using Labels = std::vector<int>;

}  // namespace ssmic
