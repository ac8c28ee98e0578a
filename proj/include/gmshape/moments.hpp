#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gmshape/model.hpp"

namespace gmshape {

/// Weighted power sums p_n = sum_{i,j} pi_i pi_j delta_ij^n of the squared
/// inter-mean distances, double sum over all ordered component pairs with the
/// convention 0^0 = 1 (so p_0 = 1 and the diagonal contributes the zero node).
struct PowerSums {
    std::vector<double> values;  // p_0 .. p_L

    int max_order() const { return static_cast<int>(values.size()) - 1; }
};

enum class MomentSource { Exact, Empirical };

/// Raw moments E[Delta^0 .. Delta^L] of the squared-distance variable.
struct MomentVector {
    std::vector<double> values;
    int d = 0;  // dimension used in the expansion (0 = not yet assigned)
    MomentSource source = MomentSource::Exact;
    std::vector<double> stderrs;  // per-entry standard errors, empirical only

    int max_order() const { return static_cast<int>(values.size()) - 1; }
};

/// p_n by direct double summation over component pairs, orders 0..max_order.
PowerSums exact_power_sums(const MixtureModel& model, int max_order);

/// Lower-triangular map from power sums to moments:
///
///   E[Delta^p] = sum_{n<=p} binom(p,n) 4^(p-n) R(n+d/2, p-n) p_n
///
/// with R the rising factorial; row p, column n. Derived from the MGF
/// expansion M(t) = sum_n (p_n/n!) t^n (1-4t)^-(n+d/2).
Eigen::MatrixXd moment_expansion_matrix(int d, int max_order);

/// Exact moments of Delta for a Euclidean-form model.
/// Throws Error("unsupported-form") otherwise.
MomentVector exact_moments(const MixtureModel& model, int max_order);

/// Sample moments with per-entry standard errors.
/// Throws Error("empty") for fewer than two samples.
MomentVector empirical_moments(const DeltaSamples& samples, int max_order);

/// Inverts the triangular expansion (m.d must be set); round-trips with
/// power_sums_to_moments to 1e-10 relative.
PowerSums moments_to_power_sums(const MomentVector& m);

MomentVector power_sums_to_moments(const PowerSums& p, int d);

/// Naive linear propagation of moment standard errors through the triangular
/// inversion; entry n is the resulting standard error of p_n.
std::vector<double> propagate_power_sum_stderr(const MomentVector& m);

}  // namespace gmshape
