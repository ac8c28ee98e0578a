#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gmshape/errors.hpp"

namespace gmshape {

enum class FormKind { Euclidean, DiagonalSigns, FullMatrix };

std::string form_kind_name(FormKind kind);

/// Symmetric bilinear form B defining the squared distance B(u-v, u-v).
///
/// Euclidean is the all-plus diagonal form; a diagonal form whose signs are
/// all +1 canonicalizes to Euclidean. A full matrix must be symmetric within
/// 1e-12 and non-degenerate (no eigenvalue below 1e-10 * max|lambda| in
/// magnitude).
struct DistanceForm {
    FormKind kind = FormKind::Euclidean;
    Eigen::VectorXd signs;   // diagonal case, entries exactly +1 or -1
    Eigen::MatrixXd matrix;  // full case

    static DistanceForm euclidean();
    static DistanceForm diagonal(Eigen::VectorXd signs);
    static DistanceForm full(Eigen::MatrixXd matrix);

    bool is_euclidean() const { return kind == FormKind::Euclidean; }

    /// Checks invariants against ambient dimension d; canonicalizes an
    /// all-plus diagonal form to Euclidean. Throws Error on violation.
    void validate(int d);

    /// Inertia (positive count, negative count) of the form on R^d.
    std::pair<int, int> signature(int d) const;
};

/// Mixture of k identity-covariance Gaussians in R^d: weights pi_i > 0
/// summing to 1, one mean per row of `means`.
struct MixtureModel {
    int d = 0;
    int k = 0;
    Eigen::VectorXd weights;
    Eigen::MatrixXd means;  // k x d
    DistanceForm form;

    void validate();
};

/// Empirical draws of the squared distance between two independent samples.
struct DeltaSamples {
    std::vector<double> values;
    std::uint64_t seed = 0;
    FormKind form_kind = FormKind::Euclidean;

    std::int64_t count() const { return static_cast<std::int64_t>(values.size()); }
};

/// B(u-v, u-v); the squared Euclidean norm for the Euclidean form.
/// Throws Error("dimension", ...) on length mismatch.
double sq_distance(const DistanceForm& form, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v);

struct PointSample {
    Eigen::MatrixXd points;       // n x d
    std::vector<int> components;  // generating component per row (test instrumentation)
};

// Draw layout: point m consumes counters (d+1)*m .. (d+1)*m + d of the seed's
// stream; counter (d+1)*m selects the component by inverse CDF on the
// cumulative weights with strict "<", the next d counters feed the coordinate
// normals. Chunked generation of index ranges therefore reproduces the
// single-threaded sequence exactly.

/// Points for draw indices [first, last).
PointSample sample_points_range(const MixtureModel& model, std::int64_t first,
                                std::int64_t last, std::uint64_t seed);

PointSample sample_points(const MixtureModel& model, std::int64_t n,
                          std::uint64_t seed);

/// Delta draw t pairs points 2t and 2t+1 of the same stream.
DeltaSamples sample_deltas(const MixtureModel& model, std::int64_t n,
                           std::uint64_t seed);

}  // namespace gmshape
