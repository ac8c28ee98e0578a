#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmshape/geometry.hpp"
#include "gmshape/moments.hpp"
#include "gmshape/prony.hpp"
#include "gmshape/weights.hpp"

namespace gmshape {

/// Tolerance set threaded through a recovery run. Exact mode uses 1e-8-scale
/// defaults everywhere; empirical mode widens the Prony and matching
/// tolerances by 3x the propagated moment standard errors (with the exact
/// values as floors).
struct Tolerances {
    double rank_tol = 1e-8;
    double sv_reject = 1e-14;
    double imag_tol = 1e-7;
    double cluster_tol = 1e-6;
    double zero_tol = 1e-6;    // zero-node acceptance, relative to the node scale
    double match_tol = 1e-6;   // multiset matching, relative
    double weight_tol = 1e-8;
    double report_tol = 1e-8;  // forward-check threshold quoted in reports
    long search_budget = 10'000'000;

    static Tolerances exact() { return Tolerances{}; }
    static Tolerances empirical(double noise_level);
};

struct RecoveryReport {
    MixtureModel recovered;

    // residuals
    double power_sum_residual = 0.0;  // forward check against the input sums
    double weight_sum_defect = 0.0;
    double zero_node_defect = 0.0;

    // diagnostics
    double prony_residual = 0.0;
    double prony_scale = 1.0;
    bool merged_roots = false;
    std::vector<double> hankel_singular_values;
    long search_nodes = 0;
    int solutions_found = 0;
    double noise_level = 0.0;  // max relative power-sum standard error (empirical)

    // provenance
    std::uint64_t input_hash = 0;
    bool has_seed = false;
    std::uint64_t seed = 0;
    Tolerances tolerances;
    std::vector<std::string> warnings;
};

/// Recovery from power sums: Prony with K = k(k-1)/2 + 1, zero-node
/// identification, unlabeled reconstruction of the means, product labeling
/// through the reconstruction's pair assignment (node weight = 2 pi_i pi_j),
/// weight recovery, and a forward power-sum check. Stage errors are rethrown
/// with the stage recorded; a missing node near zero raises
/// Error("zero-node-missing").
RecoveryReport recover_mixture(const PowerSums& p, int k, int d,
                               const Tolerances& tol = Tolerances::exact());

/// Recovery from delta samples: empirical moments of orders 0..k(k-1)+1,
/// triangular inversion, then the power-sum route with empirically scaled
/// tolerances.
RecoveryReport recover_mixture(const DeltaSamples& samples, int k, int d);

struct ComparisonReport {
    double power_sum_discrepancy = 0.0;  // worst relative entrywise mismatch
    int orders_compared = 0;
    bool structure_match = false;  // k, d and form kind all agree
    bool shape_compared = false;
    double shape_dist = 0.0;  // weight-aware alignment RMS, when compared

    bool same_shape(double tol) const {
        if (power_sum_discrepancy > tol) return false;
        if (!structure_match) return false;
        return !shape_compared || shape_dist <= tol;
    }
};

/// Entrywise power-sum comparison up to max_order plus, for matching (k, d)
/// Euclidean models, the shape distance of the means under weight-compatible
/// labelings.
ComparisonReport compare_models(const MixtureModel& a, const MixtureModel& b,
                                int max_order, double weight_tol = 1e-6);

}  // namespace gmshape
