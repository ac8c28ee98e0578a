#pragma once

#include <Eigen/Dense>

#include "gmshape/errors.hpp"

namespace gmshape {

/// Labeled pairwise weight products q_ij = pi_i pi_j (i != j, diagonal
/// ignored) plus the recovered diagonal mass sum pi_i^2 from the zero node.
struct ProductAssignment {
    Eigen::MatrixXd q;  // k x k symmetric off the diagonal
    double zero_node_weight = 0.0;
};

struct WeightRecovery {
    Eigen::VectorXd weights;      // normalized to sum 1
    Eigen::VectorXd raw_weights;  // as recovered
    double sum_defect = 0.0;      // |sum raw - 1|
    double zero_node_defect = 0.0;  // |sum raw^2 - zero_node_weight|
};

/// Recovers the mixture weights from their pairwise products.
///
/// k >= 3 solves log pi_i + log pi_j = log q_ij in least squares; k = 2
/// solves pi (1 - pi) = q_12, which requires q_12 <= 1/4 + tol and returns
/// the pair in ascending order. Throws Error("domain") on nonpositive input
/// and Error("inconsistent") for an infeasible k = 2 product.
WeightRecovery recover_weights(const ProductAssignment& pa, double tol = 1e-8);

}  // namespace gmshape
