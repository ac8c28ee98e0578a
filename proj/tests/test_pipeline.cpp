#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmshape/pipeline.hpp"
#include "oracles.hpp"

using namespace gmshape;
using testutil::TestRng;

namespace {

// weight error after the alignment's labeling
double matched_weight_error(const MixtureModel& truth, const MixtureModel& rec) {
    const AlignResult res = align(PointConfig{rec.means}, PointConfig{truth.means});
    REQUIRE(res.feasible());
    double worst = 0.0;
    for (int i = 0; i < truth.k; ++i)
        worst = std::max(worst,
                         std::abs(rec.weights[res.permutation[static_cast<std::size_t>(i)]] -
                                  truth.weights[i]));
    return worst;
}

}  // namespace

TEST_CASE("recover the worked k=3 model from exact power sums") {
    const MixtureModel truth =
        testutil::make_model(2, {0.2, 0.3, 0.5}, {{0, 0}, {3, 0}, {0, 4}});
    const PowerSums p = exact_power_sums(truth, truth.k * (truth.k - 1) + 1);
    const RecoveryReport r = recover_mixture(p, truth.k, truth.d);

    CHECK(shape_distance(PointConfig{r.recovered.means}, PointConfig{truth.means}) <= 1e-5);
    CHECK(matched_weight_error(truth, r.recovered) <= 1e-6);
    CHECK(r.power_sum_residual <= 1e-8);
    CHECK(r.weight_sum_defect <= 1e-8);
    CHECK(r.zero_node_defect <= 1e-8);
    CHECK(r.solutions_found >= 1);
    CHECK(r.hankel_singular_values.size() == 4);
}

TEST_CASE("recover a single gaussian") {
    const MixtureModel truth = testutil::make_model(3, {1.0}, {{0.5, -1.0, 2.0}});
    const PowerSums p = exact_power_sums(truth, 3);
    const RecoveryReport r = recover_mixture(p, 1, 3);
    CHECK(r.recovered.k == 1);
    CHECK(r.recovered.weights[0] == 1.0);
    CHECK(r.recovered.means.cwiseAbs().maxCoeff() == 0.0);  // origin, up to rigid motion
    CHECK(r.zero_node_defect <= 1e-10);
}

TEST_CASE("idempotence of recovery") {
    TestRng rng(313);
    const MixtureModel truth = testutil::random_admissible_model(4, 2, rng);
    const int L = truth.k * (truth.k - 1) + 1;
    const RecoveryReport first = recover_mixture(exact_power_sums(truth, L), truth.k, truth.d);
    const RecoveryReport second =
        recover_mixture(exact_power_sums(first.recovered, L), truth.k, truth.d);
    CHECK(shape_distance(PointConfig{second.recovered.means},
                         PointConfig{first.recovered.means}) <= 1e-6);
    CHECK(matched_weight_error(first.recovered, second.recovered) <= 1e-6);
}

TEST_CASE("stage tags propagate") {
    // power sums of a k=2 model cannot support a k=3 recovery (Hankel rank)
    const MixtureModel m2 = testutil::make_model(1, {0.5, 0.5}, {{0.0}, {2.0}});
    const PowerSums p = exact_power_sums(m2, 13);
    bool threw = false;
    try {
        recover_mixture(p, 3, 1);
    } catch (const Error& e) {
        threw = true;
        CHECK(e.stage() == "prony");
        CHECK(e.tag() == "rank-deficient");
    }
    CHECK(threw);

    // sums whose nodes all sit away from zero have no zero node
    PowerSums shifted;
    for (int n = 0; n <= 3; ++n)
        shifted.values.push_back(0.4 * std::pow(5.0, n) + 0.6 * std::pow(9.0, n));
    threw = false;
    try {
        recover_mixture(shifted, 2, 1);
    } catch (const Error& e) {
        threw = true;
        CHECK(e.tag() == "zero-node-missing");
        CHECK(e.stage() == "prony");
    }
    CHECK(threw);

    // too few orders
    PowerSums tiny;
    tiny.values = {1.0, 0.5};
    threw = false;
    try {
        recover_mixture(tiny, 3, 1);
    } catch (const Error& e) {
        threw = true;
        CHECK(e.tag() == "order");
        CHECK(e.stage() == "input");
    }
    CHECK(threw);
}

TEST_CASE("k below d+2 only warns") {
    const MixtureModel truth = testutil::make_model(3, {0.5, 0.5}, {{0, 0, 0}, {2, 0, 0}});
    const PowerSums p = exact_power_sums(truth, 3);
    const RecoveryReport r = recover_mixture(p, 2, 3);
    CHECK(r.warnings.size() == 1);
    CHECK(shape_distance(PointConfig{r.recovered.means}, PointConfig{truth.means}) <= 1e-6);
}

TEST_CASE("empirical route end to end (reduced sample size)") {
    const MixtureModel truth = testutil::make_model(2, {0.3, 0.7}, {{0, 0}, {4, 0}});
    const DeltaSamples s = sample_deltas(truth, 200'000, 20260810);
    const RecoveryReport r = recover_mixture(s, 2, 2);

    CHECK(r.noise_level > 0.0);
    CHECK(r.has_seed);
    CHECK(r.seed == 20260810);
    const double delta_rec =
        (r.recovered.means.row(0) - r.recovered.means.row(1)).squaredNorm();
    CHECK(std::abs(delta_rec - 16.0) / 16.0 < 0.10);
    Eigen::VectorXd w = r.recovered.weights;
    std::sort(w.data(), w.data() + 2);
    CHECK(std::abs(w[0] - 0.3) < 0.08);
    CHECK(std::abs(w[1] - 0.7) < 0.08);
}

TEST_CASE("compare: invariance and discrimination") {
    TestRng rng(747);
    const MixtureModel a = testutil::random_admissible_model(4, 2, rng);

    MixtureModel moved = a;
    const Eigen::MatrixXd Q = testutil::random_orthogonal(2, rng);
    for (int i = 0; i < a.k; ++i)
        moved.means.row(a.k - 1 - i) =
            (Q * a.means.row(i).transpose()).transpose() + Eigen::RowVector2d(1.5, -0.5);
    for (int i = 0; i < a.k; ++i) moved.weights[a.k - 1 - i] = a.weights[i];

    const ComparisonReport same = compare_models(a, moved, 10);
    CHECK(same.power_sum_discrepancy <= 1e-9);
    CHECK(same.shape_compared);
    CHECK(same.shape_dist <= 1e-9);
    CHECK(same.same_shape(1e-8));

    // k=2, delta 1 vs 4 with equal weights: p_1 differs by 2 * 1/4 * 3 = 1.5
    const MixtureModel b1 = testutil::make_model(1, {0.5, 0.5}, {{0.0}, {1.0}});
    const MixtureModel b2 = testutil::make_model(1, {0.5, 0.5}, {{0.0}, {2.0}});
    const PowerSums p1 = exact_power_sums(b1, 1);
    const PowerSums p2 = exact_power_sums(b2, 1);
    CHECK(std::abs(p1.values[1] - p2.values[1]) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK_FALSE(compare_models(b1, b2, 4).same_shape(1e-8));

    // equal-weight collinear triples {0,1,3} vs {0,1,2}
    const MixtureModel c1 =
        testutil::make_model(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {{0.0}, {1.0}, {3.0}});
    const MixtureModel c2 =
        testutil::make_model(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {{0.0}, {1.0}, {2.0}});
    const PowerSums q1 = exact_power_sums(c1, 1);
    const PowerSums q2 = exact_power_sums(c2, 1);
    CHECK(q1.values[1] == doctest::Approx(28.0 / 9.0).epsilon(1e-13));
    CHECK(q2.values[1] == doctest::Approx(12.0 / 9.0).epsilon(1e-13));
    CHECK_FALSE(compare_models(c1, c2, 4).same_shape(1e-8));
}
