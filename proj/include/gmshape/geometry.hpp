#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "gmshape/model.hpp"

namespace gmshape {

/// Labeled point configuration, one point per row.
struct PointConfig {
    Eigen::MatrixXd points;  // k x d

    int k() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// Unlabeled multiset of k(k-1)/2 squared pairwise distances, kept sorted.
struct DistanceMultiset {
    std::vector<double> values;  // ascending
    int k = 0;

    static DistanceMultiset from_values(std::vector<double> values, int k);
};

/// k x k matrix of squared distances under the given form.
Eigen::MatrixXd pairwise_sq_distances(const PointConfig& cfg,
                                      const DistanceForm& form = DistanceForm::euclidean());

/// Linear index of pair (i,j), i<j, in lexicographic order.
int pair_index(int i, int j, int k);

struct ReconstructionSolution {
    PointConfig config;
    /// Entry pair_index(i,j,k) is the index into the input multiset values of
    /// the element realized as the squared distance between points i and j.
    std::vector<int> assignment;
};

struct ReconstructionResult {
    std::vector<ReconstructionSolution> solutions;  // non-congruent, [0] primary
    long nodes_visited = 0;
};

/// Branch-and-prune reconstruction of a point configuration from the
/// unlabeled multiset of its squared distances (Euclidean only).
///
/// Point 1 is fixed at the origin and point 2 on the first axis at the
/// largest multiset element; each later point branches over assignments of
/// remaining elements to its distances to the placed points, is located by
/// sequential trilateration, and is pruned on negative squared heights
/// (Cayley-Menger infeasibility of the candidate simplex) or residual
/// mismatches. Matching windows are tol * (1 + |value|). Solutions are
/// deduplicated up to congruence.
///
/// Throws Error("infeasible") when the search completes without a solution
/// and Error("budget") when node_budget search steps are exceeded.
ReconstructionResult reconstruct_unlabeled(const DistanceMultiset& D, int d, int k,
                                           double tol = 1e-6,
                                           long node_budget = 10'000'000);

/// Spectral embedding of a labeled squared-distance matrix: Gram matrix
/// anchored at point 1, eigen-decomposition, top eigenpairs per the form's
/// signature scaled by sqrt|lambda|. Euclidean requires the Gram matrix to be
/// positive semidefinite within psd_tol (relative) with at most d significant
/// eigenvalues, else Error("not-embeddable-in-d").
PointConfig embed_labeled(const Eigen::MatrixXd& sqdist, int d,
                          const DistanceForm& form = DistanceForm::euclidean(),
                          double psd_tol = 1e-9);

struct AlignResult {
    double rms = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd rotation;     // d x d orthogonal, det +-1
    Eigen::VectorXd translation;
    std::vector<int> permutation;  // B row i matches A row permutation[i]

    bool feasible() const { return permutation.size() > 0; }
};

/// Least-RMS alignment of B onto A over permutations and the full orthogonal
/// group (reflections allowed) plus translation: exact search over matchings
/// with distance-profile pruning. When weight vectors are supplied, only
/// weight-compatible labelings (|wa - wb| <= weight_tol) are considered; an
/// empty permutation signals that none exists.
AlignResult align(const PointConfig& A, const PointConfig& B,
                  const std::vector<double>* weights_a = nullptr,
                  const std::vector<double>* weights_b = nullptr,
                  double weight_tol = 1e-6);

/// RMS from align; zero iff the configurations are congruent (up to
/// tolerance).
double shape_distance(const PointConfig& A, const PointConfig& B);

}  // namespace gmshape
