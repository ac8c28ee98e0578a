#include "gmshape/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace gmshape {

Tolerances Tolerances::empirical(double noise_level) {
    Tolerances t;
    const double widen = 3.0 * std::max(0.0, noise_level);
    t.imag_tol = std::max(1e-3, widen);
    t.cluster_tol = std::max(1e-6, widen);
    t.zero_tol = std::max(1e-6, widen);
    t.match_tol = std::max(1e-6, widen);
    t.weight_tol = std::max(1e-8, widen);
    t.report_tol = std::max(1e-8, widen);
    return t;
}

namespace {

[[noreturn]] void rethrow_with_stage(Error& e, const std::string& stage) {
    if (e.stage().empty()) e.set_stage(stage);
    throw e;
}

PronyOptions prony_options(const Tolerances& tol) {
    PronyOptions o;
    o.rank_tol = tol.rank_tol;
    o.sv_reject = tol.sv_reject;
    o.imag_tol = tol.imag_tol;
    o.cluster_tol = tol.cluster_tol;
    o.euclidean = true;
    o.refine = true;
    return o;
}

RecoveryReport recover_core(const PowerSums& p, int k, int d, const Tolerances& tol,
                            double noise_level) {
    if (k < 1) throw Error("domain", "component count must be positive");
    if (d < 1) throw Error("dimension", "dimension must be positive");

    RecoveryReport report;
    report.tolerances = tol;
    report.noise_level = noise_level;
    if (k < d + 2)
        report.warnings.push_back(
            "k = " + std::to_string(k) + " is below d + 2 = " + std::to_string(d + 2) +
            "; uniqueness is only guaranteed for k <= 3 in this regime");

    const int K = k * (k - 1) / 2 + 1;
    if (static_cast<int>(p.values.size()) < 2 * K) {
        Error e("order", "need power sums of orders 0.." + std::to_string(2 * K - 1) +
                             " for k = " + std::to_string(k));
        rethrow_with_stage(e, "input");
    }

    // Prony step: unlabeled nodes (zero node + distinct squared distances)
    NodeSet nodes;
    HankelDiagnostics hdiag;
    try {
        nodes = prony_recover(p, K, prony_options(tol), &hdiag);
    } catch (Error& e) {
        rethrow_with_stage(e, "prony");
    }
    report.prony_residual = nodes.residual;
    report.prony_scale = nodes.scale;
    report.merged_roots = nodes.merged_roots;
    report.hankel_singular_values = hdiag.singular_values;

    // zero-node identification
    double node_scale = 0.0;
    for (const Node& n : nodes.nodes) node_scale = std::max(node_scale, std::abs(n.x));
    std::size_t zero_idx = 0;
    for (std::size_t i = 1; i < nodes.nodes.size(); ++i)
        if (std::abs(nodes.nodes[i].x) < std::abs(nodes.nodes[zero_idx].x)) zero_idx = i;
    const double zero_x = nodes.nodes[zero_idx].x;
    if (std::abs(zero_x) > tol.zero_tol * std::max(node_scale, 1.0)) {
        Error e("zero-node-missing",
                "nearest node to zero sits at " + std::to_string(zero_x));
        rethrow_with_stage(e, "prony");
    }
    const double zero_weight = nodes.nodes[zero_idx].weight;

    std::vector<Node> dist_nodes;
    for (std::size_t i = 0; i < nodes.nodes.size(); ++i)
        if (i != zero_idx) dist_nodes.push_back(nodes.nodes[i]);

    if (k == 1) {
        report.recovered.d = d;
        report.recovered.k = 1;
        report.recovered.weights = Eigen::VectorXd::Ones(1);
        report.recovered.means = Eigen::MatrixXd::Zero(1, d);
        report.recovered.validate();
        report.zero_node_defect = std::abs(zero_weight - 1.0);
        report.solutions_found = 1;
    } else {
        for (const Node& n : dist_nodes)
            if (!(n.x > 0.0)) {
                Error e("infeasible", "recovered a nonpositive squared distance " +
                                          std::to_string(n.x));
                rethrow_with_stage(e, "geometry");
            }

        // unlabeled reconstruction of the means
        std::vector<double> dvals;
        for (const Node& n : dist_nodes) dvals.push_back(n.x);
        ReconstructionResult rec;
        try {
            const DistanceMultiset D = DistanceMultiset::from_values(dvals, k);
            rec = reconstruct_unlabeled(D, d, k, tol.match_tol, tol.search_budget);
        } catch (Error& e) {
            rethrow_with_stage(e, "geometry");
        }
        report.search_nodes = rec.nodes_visited;
        report.solutions_found = static_cast<int>(rec.solutions.size());
        const ReconstructionSolution& sol = rec.solutions.front();

        // label the products through the reconstruction's pair assignment
        // (dist_nodes is ascending, matching the sorted multiset order)
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                const int elem = sol.assignment[static_cast<std::size_t>(pair_index(i, j, k))];
                const double prod = dist_nodes[static_cast<std::size_t>(elem)].weight / 2.0;
                q(i, j) = prod;
                q(j, i) = prod;
            }

        WeightRecovery wr;
        try {
            wr = recover_weights(ProductAssignment{q, zero_weight}, tol.weight_tol);
        } catch (Error& e) {
            rethrow_with_stage(e, "weights");
        }
        report.weight_sum_defect = wr.sum_defect;
        report.zero_node_defect = wr.zero_node_defect;

        report.recovered.d = d;
        report.recovered.k = k;
        report.recovered.weights = wr.weights;
        report.recovered.means = sol.config.points;
        try {
            report.recovered.validate();
        } catch (Error& e) {
            rethrow_with_stage(e, "report");
        }
    }

    // forward check: the recovered model must regenerate the input sums
    const PowerSums regen = exact_power_sums(report.recovered, p.max_order());
    double worst = 0.0;
    for (std::size_t n = 0; n < p.values.size(); ++n)
        worst = std::max(worst, std::abs(regen.values[n] - p.values[n]) /
                                    std::max(1.0, std::abs(p.values[n])));
    report.power_sum_residual = worst;
    return report;
}

}  // namespace

RecoveryReport recover_mixture(const PowerSums& p, int k, int d, const Tolerances& tol) {
    return recover_core(p, k, d, tol, 0.0);
}

RecoveryReport recover_mixture(const DeltaSamples& samples, int k, int d) {
    if (samples.form_kind != FormKind::Euclidean) {
        Error e("unsupported-form", "sample-based recovery requires the euclidean form");
        e.set_stage("input");
        throw e;
    }
    const int L = std::max(k * (k - 1) + 1, 1);
    MomentVector m;
    PowerSums p;
    std::vector<double> perr;
    try {
        m = empirical_moments(samples, L);
        m.d = d;
        p = moments_to_power_sums(m);
        perr = propagate_power_sum_stderr(m);
    } catch (Error& e) {
        if (e.stage().empty()) e.set_stage("moments");
        throw;
    }

    double noise = 0.0;
    for (std::size_t n = 1; n < p.values.size(); ++n)
        noise = std::max(noise, perr[n] / std::max(1.0, std::abs(p.values[n])));

    RecoveryReport report = recover_core(p, k, d, Tolerances::empirical(noise), noise);
    report.has_seed = true;
    report.seed = samples.seed;
    return report;
}

ComparisonReport compare_models(const MixtureModel& a, const MixtureModel& b,
                                int max_order, double weight_tol) {
    ComparisonReport out;
    out.orders_compared = max_order;
    const PowerSums pa = exact_power_sums(a, max_order);
    const PowerSums pb = exact_power_sums(b, max_order);
    double worst = 0.0;
    for (std::size_t n = 0; n < pa.values.size(); ++n)
        worst = std::max(worst, std::abs(pa.values[n] - pb.values[n]) /
                                    std::max({1.0, std::abs(pa.values[n]),
                                              std::abs(pb.values[n])}));
    out.power_sum_discrepancy = worst;

    out.structure_match = a.k == b.k && a.d == b.d && a.form.kind == b.form.kind;
    if (out.structure_match && a.form.is_euclidean()) {
        std::vector<double> wa(a.weights.data(), a.weights.data() + a.k);
        std::vector<double> wb(b.weights.data(), b.weights.data() + b.k);
        const AlignResult res = align(PointConfig{a.means}, PointConfig{b.means}, &wa,
                                      &wb, weight_tol);
        out.shape_compared = true;
        out.shape_dist = res.feasible() ? res.rms
                                        : std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace gmshape
