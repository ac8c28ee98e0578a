#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmshape/model.hpp"
#include "gmshape/rng.hpp"
#include "oracles.hpp"

using namespace gmshape;
using testutil::TestRng;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("normal quantile reference values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(normal_quantile(0.01) == doctest::Approx(-2.3263478740408408).epsilon(1e-13));
    CHECK(normal_quantile(0.8) == doctest::Approx(0.8416212335729143).epsilon(1e-13));
    CHECK(normal_quantile(0.3) == doctest::Approx(-normal_quantile(0.7)).epsilon(1e-13));
    CHECK(normal_quantile(1e-12) == doctest::Approx(-7.034483825301131).epsilon(1e-12));
}

TEST_CASE("sq_distance examples") {
    CHECK(sq_distance(DistanceForm::euclidean(), vec({0, 0}), vec({3, 4})) == 25.0);
    CHECK(sq_distance(DistanceForm::euclidean(), vec({1, 2}), vec({1, 2})) == 0.0);
    CHECK(sq_distance(DistanceForm::diagonal(vec({1, -1})), vec({1, 2}), vec({1, 2})) == 0.0);
    // direct evaluation of sum eps_l w_l^2
    CHECK(sq_distance(DistanceForm::diagonal(vec({1, -1})), vec({1, 2}), vec({0, 0})) ==
          doctest::Approx(-3.0));
    bool threw = false;
    try {
        sq_distance(DistanceForm::euclidean(), vec({1}), vec({1, 2}));
    } catch (const Error& e) {
        threw = true;
        CHECK(e.tag() == "dimension");
    }
    CHECK(threw);
}

TEST_CASE("sq_distance symmetry and translation invariance") {
    TestRng rng(11);
    Eigen::MatrixXd M(3, 3);
    M << 2, 0.3, -0.1, 0.3, -1, 0.2, -0.1, 0.2, 0.5;
    const DistanceForm forms[] = {DistanceForm::euclidean(),
                                  DistanceForm::diagonal(vec({1, -1, 1})),
                                  DistanceForm::full(M)};
    for (const DistanceForm& f : forms) {
        for (int rep = 0; rep < 50; ++rep) {
            Eigen::VectorXd u(3), v(3), c(3);
            for (int i = 0; i < 3; ++i) {
                u[i] = rng.uniform(-5, 5);
                v[i] = rng.uniform(-5, 5);
                c[i] = rng.uniform(-5, 5);
            }
            CHECK(sq_distance(f, u, v) == sq_distance(f, v, u));
            CHECK(sq_distance(f, u + c, v + c) ==
                  doctest::Approx(sq_distance(f, u, v)).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("model validation") {
    MixtureModel m = testutil::make_model(1, {0.5, 0.5}, {{0.0}, {1.0}});
    CHECK_NOTHROW(m.validate());

    MixtureModel bad = m;
    bad.weights[0] = 0.6;
    CHECK_THROWS_AS(bad.validate(), Error);

    bad = m;
    bad.weights[0] = -0.5;
    bad.weights[1] = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);

    bad = m;
    bad.means.resize(2, 2);
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("distance form validation and canonicalization") {
    DistanceForm all_plus = DistanceForm::diagonal(vec({1, 1, 1}));
    all_plus.validate(3);
    CHECK(all_plus.kind == FormKind::Euclidean);

    DistanceForm mixed = DistanceForm::diagonal(vec({1, -1}));
    mixed.validate(2);
    CHECK(mixed.kind == FormKind::DiagonalSigns);
    CHECK(mixed.signature(2) == std::pair<int, int>{1, 1});

    DistanceForm bad_sign = DistanceForm::diagonal(vec({1, 0.5}));
    CHECK_THROWS_AS(bad_sign.validate(2), Error);

    Eigen::MatrixXd asym(2, 2);
    asym << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(DistanceForm::full(asym).validate(2), Error);

    Eigen::MatrixXd degenerate(2, 2);
    degenerate << 1, 1, 1, 1;
    CHECK_THROWS_AS(DistanceForm::full(degenerate).validate(2), Error);

    Eigen::MatrixXd ok(2, 2);
    ok << 2, 0.5, 0.5, -1;
    DistanceForm f = DistanceForm::full(ok);
    CHECK_NOTHROW(f.validate(2));
    CHECK(f.signature(2) == std::pair<int, int>{1, 1});
}

TEST_CASE("sample_points statistics") {
    const MixtureModel single = testutil::make_model(1, {1.0}, {{0.0}});
    const std::int64_t n = 1'000'000;
    const PointSample s = sample_points(single, n, 42);
    CHECK(std::abs(s.points.col(0).mean()) < 4e-3);  // 4 sigma / sqrt(N)

    const MixtureModel two = testutil::make_model(1, {0.3, 0.7}, {{0.0}, {10.0}});
    const PointSample s2 = sample_points(two, n, 7);
    long count0 = 0;
    for (int c : s2.components) count0 += (c == 0);
    const double freq = static_cast<double>(count0) / static_cast<double>(n);
    CHECK(freq > 0.29);
    CHECK(freq < 0.31);

    CHECK(sample_points(single, 0, 1).points.rows() == 0);
}

TEST_CASE("sampling determinism and chunk equivalence") {
    const MixtureModel m =
        testutil::make_model(2, {0.4, 0.6}, {{0.0, 0.0}, {2.0, 1.0}});
    const PointSample a = sample_points(m, 1000, 99);
    const PointSample b = sample_points(m, 1000, 99);
    CHECK(a.points == b.points);
    CHECK(a.components == b.components);

    const PointSample c1 = sample_points_range(m, 0, 357, 99);
    const PointSample c2 = sample_points_range(m, 357, 1000, 99);
    Eigen::MatrixXd glued(1000, 2);
    glued << c1.points, c2.points;
    CHECK(glued == a.points);

    const DeltaSamples d1 = sample_deltas(m, 500, 31);
    const DeltaSamples d2 = sample_deltas(m, 500, 31);
    CHECK(d1.values == d2.values);
    const DeltaSamples d3 = sample_deltas(m, 500, 32);
    CHECK(d1.values != d3.values);
}

TEST_CASE("sample_deltas empirical means") {
    const std::int64_t n = 1'000'000;

    // k=1, d=1: Delta/2 ~ chi^2_1, so E[Delta] = 2, Var(Delta) = 8
    const MixtureModel m1 = testutil::make_model(1, {1.0}, {{0.0}});
    const DeltaSamples s1 = sample_deltas(m1, n, 4);
    double mean = 0;
    for (double v : s1.values) {
        CHECK(v >= 0.0);
        mean += v;
    }
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - 2.0) < 3.0 * std::sqrt(8.0 / static_cast<double>(n)));

    // k=1, d=2: E[Delta] = 2d = 4
    const MixtureModel m2 = testutil::make_model(2, {1.0}, {{0.0, 0.0}});
    const DeltaSamples s2 = sample_deltas(m2, n, 6);
    double mean2 = 0;
    for (double v : s2.values) mean2 += v;
    mean2 /= static_cast<double>(n);
    CHECK(std::abs(mean2 - 4.0) < 3.0 * std::sqrt(16.0 / static_cast<double>(n)));

    // k=2, d=1, means {0,1}: E[Delta] = 2d + sum pi_i pi_j delta_ij = 2.5
    const MixtureModel m3 = testutil::make_model(1, {0.5, 0.5}, {{0.0}, {1.0}});
    const DeltaSamples s3 = sample_deltas(m3, n, 8);
    double mean3 = 0;
    for (double v : s3.values) mean3 += v;
    mean3 /= static_cast<double>(n);
    CHECK(std::abs(mean3 - 2.5) < 4.0 * std::sqrt(10.0 / static_cast<double>(n)));
}

TEST_CASE("two-point route matches component-pair route in law") {
    // k=2: draw the pair (i,j) with probability pi_i pi_j and form B(z,z),
    // z ~ N(mu_i - mu_j, 2I). Empirical means of both routes must agree.
    const MixtureModel m = testutil::make_model(2, {0.3, 0.7}, {{0.0, 0.0}, {3.0, 1.0}});
    const std::int64_t n = 100'000;

    const DeltaSamples route_a = sample_deltas(m, n, 1234);
    double mean_a = 0, sq_a = 0;
    for (double v : route_a.values) {
        mean_a += v;
        sq_a += v * v;
    }
    mean_a /= static_cast<double>(n);
    const double var_a = sq_a / static_cast<double>(n) - mean_a * mean_a;

    TestRng rng(4321);
    double mean_b = 0, sq_b = 0;
    const double sqrt2 = std::sqrt(2.0);
    for (std::int64_t t = 0; t < n; ++t) {
        const double u = rng.uniform();
        // pair probabilities (0,0): .09, (0,1): .21, (1,0): .21, (1,1): .49
        int i = 0, j = 0;
        if (u < 0.09) {
            i = 0; j = 0;
        } else if (u < 0.30) {
            i = 0; j = 1;
        } else if (u < 0.51) {
            i = 1; j = 0;
        } else {
            i = 1; j = 1;
        }
        Eigen::VectorXd z(2);
        for (int c = 0; c < 2; ++c)
            z[c] = m.means(i, c) - m.means(j, c) + sqrt2 * rng.normal();
        const double v = z.squaredNorm();
        mean_b += v;
        sq_b += v * v;
    }
    mean_b /= static_cast<double>(n);
    const double var_b = sq_b / static_cast<double>(n) - mean_b * mean_b;

    const double stderr_combined =
        std::sqrt((var_a + var_b) / static_cast<double>(n));
    CHECK(std::abs(mean_a - mean_b) < 4.0 * stderr_combined);
}
