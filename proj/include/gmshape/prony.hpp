#pragma once

#include <vector>

#include "gmshape/moments.hpp"

namespace gmshape {

/// Coefficients c_1..c_K of F(t) = t^K - sum_r c_r t^(K-r), the monic
/// polynomial whose roots are the nodes.
struct CharPoly {
    std::vector<double> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()); }
};

struct Node {
    double weight = 0.0;
    double x = 0.0;
};

/// Recovered unlabeled weighted nodes, sorted ascending by x.
struct NodeSet {
    std::vector<Node> nodes;
    double scale = 1.0;     // node rescaling factor applied during the solve
    double residual = 0.0;  // worst mismatch regenerating the input power sums,
                            // relative to max(1, |p_n|)
    bool merged_roots = false;  // near-coincident roots were clustered

    double regenerate(int order) const;  // sum_m a_m x_m^order
};

struct PronyOptions {
    double rank_tol = 1e-8;     // relative singular-value threshold (node count)
    double sv_reject = 1e-14;   // hankel_solve rejects below this sigma_min/sigma_max
    double imag_tol = 1e-7;     // 1e-3 is appropriate for empirical inputs
    double cluster_tol = 1e-6;  // root merge window, relative to max |node|
    bool euclidean = true;      // reject negative recovered weights
    bool refine = true;         // Gauss-Newton polish against the power sums

    static PronyOptions exact() { return PronyOptions{}; }
    static PronyOptions empirical() {
        PronyOptions o;
        o.imag_tol = 1e-3;
        return o;
    }
};

struct HankelDiagnostics {
    std::vector<double> singular_values;  // of the (rescaled) Hankel matrix
    double recurrence_residual = 0.0;     // worst recurrence mismatch of the solve
    double scale = 1.0;
};

/// Solves the K x K Hankel system H (c_K,...,c_1)^T = (p_K,...,p_{2K-1})^T,
/// H[m][r] = p_{m+r}, by orthogonal factorization. Requires orders 0..2K-1.
/// Throws Error("rank-deficient", ..., singular values) when the matrix is
/// numerically singular (wrong K or coincident nodes).
CharPoly hankel_solve(const PowerSums& p, int K, const PronyOptions& opts = {},
                      HankelDiagnostics* diag = nullptr);

/// Real roots of F via companion-matrix eigenvalues polished by Newton
/// iteration. Near-coincident roots (gap below the cluster window) are merged
/// and flagged. Throws Error("nonreal-roots") when an eigenvalue has
/// |imag| > imag_tol * (1 + |real|).
std::vector<double> poly_roots(const CharPoly& f, const PronyOptions& opts = {},
                               bool* merged = nullptr);

/// Solves the Vandermonde system Xi a = (p_0,...,p_{K-1})^T, Xi[m][i] = x_i^m,
/// for the node weights. Throws Error("vandermonde-singular") on coincident
/// roots.
NodeSet vandermonde_weights(const std::vector<double>& roots, const PowerSums& p);

/// Full recovery: rescale by s = p_1/p_0 (robust fallback when that is
/// unusable), Hankel solve, rooting, Vandermonde weights, optional
/// Gauss-Newton polish, unscale. The reported residual is the worst relative
/// mismatch when regenerating p_0..p_{2K-1}.
NodeSet prony_recover(const PowerSums& p, int K, const PronyOptions& opts = {},
                      HankelDiagnostics* diag = nullptr);

struct NodeCountEstimate {
    int K = 0;
    std::vector<double> singular_values;  // of the rescaled Hankel matrix
    double scale = 1.0;
};

/// Numerical rank of the largest square Hankel matrix formable from p,
/// using the relative singular-value threshold rank_tol. Needs at least
/// four power sums.
NodeCountEstimate estimate_node_count(const PowerSums& p, double rank_tol = 1e-8);

}  // namespace gmshape
