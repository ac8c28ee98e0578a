// Acceptance suite: prints one pass/fail line per criterion and exits with
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gmshape/pipeline.hpp"
#include "oracles.hpp"

using namespace gmshape;
using testutil::TestRng;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double matched_weight_error(const MixtureModel& truth, const MixtureModel& rec) {
    const AlignResult res = align(PointConfig{rec.means}, PointConfig{truth.means});
    if (!res.feasible()) return 1e300;
    double worst = 0.0;
    for (int i = 0; i < truth.k; ++i)
        worst = std::max(worst,
                         std::abs(rec.weights[res.permutation[static_cast<std::size_t>(i)]] -
                                  truth.weights[i]));
    return worst;
}

// 1. Exact-theorem round trip at desk scale.
bool exact_round_trip(std::string& detail) {
    const auto t0 = Clock::now();
    TestRng rng(100);
    double worst_shape = 0.0, worst_weight = 0.0;
    int done = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const int k = 2 + rep % 5;
        const int d = 1 + rep % 3;
        const MixtureModel truth = testutil::random_admissible_model(k, d, rng);
        const PowerSums p = exact_power_sums(truth, k * (k - 1) + 1);
        const RecoveryReport r = recover_mixture(p, k, d);
        worst_shape = std::max(worst_shape, shape_distance(PointConfig{r.recovered.means},
                                                           PointConfig{truth.means}));
        worst_weight = std::max(worst_weight, matched_weight_error(truth, r.recovered));
        ++done;
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d/100 models, max shape %.2e (<=1e-5), max weight %.2e (<=1e-6), %.1f s (<=60)",
                  done, worst_shape, worst_weight, secs);
    detail = buf;
    return done == 100 && worst_shape <= 1e-5 && worst_weight <= 1e-6 && secs <= 60.0;
}

// 2. Lemma oracle equivalence on random node sets.
bool lemma_equivalence(std::string& detail) {
    TestRng rng(200);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const int K = 1 + rep % 6;
        std::vector<Node> nodes;
        int guard = 0;
        while (static_cast<int>(nodes.size()) < K && ++guard < 100000) {
            const double x = rng.uniform(0, 1);
            bool ok = true;
            for (const Node& n : nodes) ok = ok && std::abs(n.x - x) >= 0.05;
            if (ok) nodes.push_back({rng.uniform(0.05, 1.0), x});
        }
        if (static_cast<int>(nodes.size()) != K) return false;
        std::sort(nodes.begin(), nodes.end(),
                  [](const Node& a, const Node& b) { return a.x < b.x; });

        PowerSums p;  // extended-precision accumulation, exact to 0.5 ulp
        for (int n = 0; n <= 2 * K - 1; ++n) {
            long double acc = 0.0L;
            for (const Node& nd : nodes) {
                long double xp = 1.0L;
                for (int j = 0; j < n; ++j) xp *= static_cast<long double>(nd.x);
                acc += static_cast<long double>(nd.weight) * xp;
            }
            p.values.push_back(static_cast<double>(acc));
        }
        PronyOptions opts;
        opts.euclidean = false;
        const NodeSet got = prony_recover(p, K, opts);
        if (got.nodes.size() != static_cast<std::size_t>(K)) return false;
        for (int i = 0; i < K; ++i) {
            worst = std::max(worst, std::abs(got.nodes[static_cast<std::size_t>(i)].x -
                                             nodes[static_cast<std::size_t>(i)].x));
            worst = std::max(worst, std::abs(got.nodes[static_cast<std::size_t>(i)].weight -
                                             nodes[static_cast<std::size_t>(i)].weight));
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "200 node sets, worst node/weight error %.2e (<=1e-8)", worst);
    detail = buf;
    return worst <= 1e-8;
}

// 3. Power sums are invariant under E(d) and relabeling.
bool power_sum_invariance(std::string& detail) {
    TestRng rng(300);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int k = 2 + rep % 5;
        const int d = 1 + rep % 3;
        const MixtureModel m = testutil::random_admissible_model(k, d, rng);
        const PowerSums p = exact_power_sums(m, 10);

        const Eigen::MatrixXd Q = testutil::random_orthogonal(d, rng);
        Eigen::VectorXd shift(d);
        for (int c = 0; c < d; ++c) shift[c] = rng.uniform(-3, 3);
        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int i = k - 1; i > 0; --i)
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);

        MixtureModel moved = m;
        for (int i = 0; i < k; ++i) {
            moved.means.row(i) =
                (Q * m.means.row(perm[static_cast<std::size_t>(i)]).transpose()).transpose() +
                shift.transpose();
            moved.weights[i] = m.weights[perm[static_cast<std::size_t>(i)]];
        }
        const PowerSums q = exact_power_sums(moved, 10);
        for (int n = 0; n <= 10; ++n)
            worst = std::max(worst, std::abs(q.values[static_cast<std::size_t>(n)] -
                                             p.values[static_cast<std::size_t>(n)]) /
                                        std::max(1.0, std::abs(p.values[static_cast<std::size_t>(n)])));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "50 models, worst relative drift %.2e (<=1e-9)", worst);
    detail = buf;
    return worst <= 1e-9;
}

// 4. Monte Carlo check of the moment identity (d-general exponent).
bool moment_identity_mc(std::string& detail) {
    TestRng rng(400);
    double worst_sigma = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const int k = 1 + rep % 4;
        const int d = 1 + rep % 3;
        const MixtureModel m = testutil::random_admissible_model(k, d, rng);
        const DeltaSamples s = sample_deltas(m, 1'000'000, 4000 + static_cast<std::uint64_t>(rep));
        const MomentVector emp = empirical_moments(s, 2);
        const MomentVector ex = exact_moments(m, 2);
        for (int p = 1; p <= 2; ++p) {
            const double sigmas = std::abs(emp.values[static_cast<std::size_t>(p)] -
                                           ex.values[static_cast<std::size_t>(p)]) /
                                  emp.stderrs[static_cast<std::size_t>(p)];
            worst_sigma = std::max(worst_sigma, sigmas);
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "10 models x {E[D], E[D^2]}, worst deviation %.2f sigma (<4)", worst_sigma);
    detail = buf;
    return worst_sigma < 4.0;
}

// 5. Triangular maps invert each other to order 12.
bool triangular_round_trip(std::string& detail) {
    TestRng rng(500);
    double worst = 0.0;
    const int dims[] = {1, 2, 3, 5};
    for (int rep = 0; rep < 50; ++rep) {
        const int k = 1 + rep % 6;
        const int d = dims[rep % 4];
        const MixtureModel m = testutil::random_admissible_model(k, std::min(d, 3), rng);
        const MomentVector mom = power_sums_to_moments(exact_power_sums(m, 12), d);
        const PowerSums p = moments_to_power_sums(mom);
        const MomentVector back = power_sums_to_moments(p, d);
        for (int n = 0; n <= 12; ++n)
            worst = std::max(worst, std::abs(back.values[static_cast<std::size_t>(n)] -
                                             mom.values[static_cast<std::size_t>(n)]) /
                                        std::max(1.0, std::abs(mom.values[static_cast<std::size_t>(n)])));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "50 models, d in {1,2,3,5}, worst relative error %.2e (<=1e-10)",
                  worst);
    detail = buf;
    return worst <= 1e-10;
}

// 6. Empirical end-to-end with a pinned seed.
bool empirical_end_to_end(std::string& detail) {
    const auto t0 = Clock::now();
    const MixtureModel truth = testutil::make_model(2, {0.3, 0.7}, {{0, 0}, {4, 0}});
    const DeltaSamples s = sample_deltas(truth, 1'000'000, 616);
    const RecoveryReport r = recover_mixture(s, 2, 2);
    const double delta_rec =
        (r.recovered.means.row(0) - r.recovered.means.row(1)).squaredNorm();
    const double delta_err = std::abs(delta_rec - 16.0) / 16.0;
    Eigen::VectorXd w = r.recovered.weights;
    std::sort(w.data(), w.data() + 2);
    const double weight_err = std::max(std::abs(w[0] - 0.3), std::abs(w[1] - 0.7));
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "delta error %.2f%% (<=5%%), weight error %.3f (<=0.05), %.1f s (<=30)",
                  100.0 * delta_err, weight_err, secs);
    detail = buf;
    return delta_err <= 0.05 && weight_err <= 0.05 && secs <= 30.0;
}

// 7. uDGP soundness on the classic homometric pair.
bool homometric_soundness(std::string& detail) {
    const std::vector<double> pos_a = {0, 1, 4, 10, 12, 17};
    const std::vector<double> pos_b = {0, 1, 8, 11, 13, 17};
    if (testutil::difference_multiset(pos_a) != testutil::difference_multiset(pos_b)) {
        detail = "difference multisets do not coincide";
        return false;
    }

    std::vector<double> sq;
    for (std::size_t i = 0; i < pos_a.size(); ++i)
        for (std::size_t j = i + 1; j < pos_a.size(); ++j)
            sq.push_back((pos_a[i] - pos_a[j]) * (pos_a[i] - pos_a[j]));
    const DistanceMultiset D = DistanceMultiset::from_values(sq, 6);
    const ReconstructionResult r = reconstruct_unlabeled(D, 1, 6);

    double worst = 0.0;
    for (const ReconstructionSolution& s : r.solutions) {
        std::vector<double> regen;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j)
                regen.push_back((s.config.points.row(i) - s.config.points.row(j)).squaredNorm());
        std::sort(regen.begin(), regen.end());
        for (std::size_t i = 0; i < regen.size(); ++i)
            worst = std::max(worst, std::abs(regen[i] - D.values[i]));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%zu non-congruent solutions, worst multiset deviation %.2e (exact regeneration)",
                  r.solutions.size(), worst);
    detail = buf;
    return !r.solutions.empty() && worst <= 1e-9;
}

// 8. Weight recovery exactness plus pipeline-context consistency.
bool weight_exactness(std::string& detail) {
    TestRng rng(800);
    double worst = 0.0, worst_zero = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int k = 2 + rep % 7;
        Eigen::VectorXd w(k);
        for (int i = 0; i < k; ++i) w[i] = rng.uniform(1.0, 2.0);
        w /= w.sum();

        ProductAssignment pa;
        pa.q = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j) pa.q(i, j) = w[i] * w[j];
        pa.zero_node_weight = w.squaredNorm();

        const WeightRecovery wr = recover_weights(pa);
        Eigen::VectorXd got = wr.weights, want = w;
        std::sort(got.data(), got.data() + k);
        std::sort(want.data(), want.data() + k);
        for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        worst_zero = std::max(worst_zero, wr.zero_node_defect);
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "100 weight vectors, worst weight error %.2e (<=1e-10), worst zero-node defect %.2e (<=1e-8)",
                  worst, worst_zero);
    detail = buf;
    return worst <= 1e-10 && worst_zero <= 1e-8;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"exact-theorem round trip (100 mixtures)", exact_round_trip},
        {"Lemma oracle equivalence (200 node sets)", lemma_equivalence},
        {"power-sum rigid-motion invariance (50 models)", power_sum_invariance},
        {"moment-identity Monte Carlo check (10 models)", moment_identity_mc},
        {"triangular round trip to order 12 (50 models)", triangular_round_trip},
        {"empirical end-to-end, pinned seed", empirical_end_to_end},
        {"uDGP soundness on homometric data", homometric_soundness},
        {"weight-recovery exactness (100 vectors)", weight_exactness},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %zu. %s: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
