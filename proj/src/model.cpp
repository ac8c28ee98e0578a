#include "gmshape/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "gmshape/rng.hpp"

namespace gmshape {

std::string form_kind_name(FormKind kind) {
    switch (kind) {
        case FormKind::Euclidean: return "euclidean";
        case FormKind::DiagonalSigns: return "diagonal";
        case FormKind::FullMatrix: return "matrix";
    }
    return "?";
}

DistanceForm DistanceForm::euclidean() { return DistanceForm{}; }

DistanceForm DistanceForm::diagonal(Eigen::VectorXd signs) {
    DistanceForm f;
    f.kind = FormKind::DiagonalSigns;
    f.signs = std::move(signs);
    return f;
}

DistanceForm DistanceForm::full(Eigen::MatrixXd matrix) {
    DistanceForm f;
    f.kind = FormKind::FullMatrix;
    f.matrix = std::move(matrix);
    return f;
}

void DistanceForm::validate(int d) {
    switch (kind) {
        case FormKind::Euclidean:
            break;
        case FormKind::DiagonalSigns: {
            if (signs.size() != d)
                throw Error("dimension", "diagonal form has " +
                                              std::to_string(signs.size()) +
                                              " signs, expected " + std::to_string(d));
            bool all_plus = true;
            for (Eigen::Index i = 0; i < signs.size(); ++i) {
                if (signs[i] != 1.0 && signs[i] != -1.0)
                    throw Error("form", "diagonal sign entries must be exactly +1 or -1");
                all_plus = all_plus && signs[i] == 1.0;
            }
            if (all_plus) {
                kind = FormKind::Euclidean;
                signs.resize(0);
            }
            break;
        }
        case FormKind::FullMatrix: {
            if (matrix.rows() != d || matrix.cols() != d)
                throw Error("dimension", "form matrix must be " + std::to_string(d) +
                                             "x" + std::to_string(d));
            const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
            if (asym > 1e-12)
                throw Error("form", "form matrix is not symmetric (max asymmetry " +
                                        std::to_string(asym) + ")");
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
            const Eigen::VectorXd ev = es.eigenvalues();
            const double max_abs = ev.cwiseAbs().maxCoeff();
            if (max_abs == 0.0 || ev.cwiseAbs().minCoeff() < 1e-10 * max_abs)
                throw Error("form", "form matrix is numerically degenerate");
            break;
        }
    }
}

std::pair<int, int> DistanceForm::signature(int d) const {
    switch (kind) {
        case FormKind::Euclidean:
            return {d, 0};
        case FormKind::DiagonalSigns: {
            int pos = 0;
            for (Eigen::Index i = 0; i < signs.size(); ++i)
                if (signs[i] > 0.0) ++pos;
            return {pos, static_cast<int>(signs.size()) - pos};
        }
        case FormKind::FullMatrix: {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
            int pos = 0, neg = 0;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
                if (es.eigenvalues()[i] > 0.0) ++pos;
                else ++neg;
            }
            return {pos, neg};
        }
    }
    return {d, 0};
}

void MixtureModel::validate() {
    if (d < 1) throw Error("model", "dimension must be positive");
    if (k < 1) throw Error("model", "component count must be positive");
    if (weights.size() != k)
        throw Error("model", "expected " + std::to_string(k) + " weights, got " +
                                 std::to_string(weights.size()));
    if (means.rows() != k || means.cols() != d)
        throw Error("model", "means must be a " + std::to_string(k) + "x" +
                                 std::to_string(d) + " array");
    for (int i = 0; i < k; ++i)
        if (!(weights[i] > 0.0))
            throw Error("model", "weights must be strictly positive");
    const double sum = weights.sum();
    if (std::abs(sum - 1.0) > 1e-12)
        throw Error("model", "weights sum to " + std::to_string(sum) + ", expected 1");
    if (!means.allFinite()) throw Error("model", "means must be finite");
    form.validate(d);
}

double sq_distance(const DistanceForm& form, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) {
    if (u.size() != v.size())
        throw Error("dimension", "point lengths differ");
    const Eigen::VectorXd w = u - v;
    switch (form.kind) {
        case FormKind::Euclidean:
            return w.squaredNorm();
        case FormKind::DiagonalSigns:
            if (form.signs.size() != w.size())
                throw Error("dimension", "point length does not match form");
            return (form.signs.array() * w.array().square()).sum();
        case FormKind::FullMatrix:
            if (form.matrix.rows() != w.size())
                throw Error("dimension", "point length does not match form");
            return w.dot(form.matrix * w);
    }
    return 0.0;
}

PointSample sample_points_range(const MixtureModel& model, std::int64_t first,
                                std::int64_t last, std::uint64_t seed) {
    const int d = model.d;
    const std::int64_t n = last - first;
    PointSample out;
    out.points.resize(n, d);
    out.components.resize(static_cast<std::size_t>(n));

    Eigen::VectorXd cumw(model.k);
    double acc = 0.0;
    for (int i = 0; i < model.k; ++i) {
        acc += model.weights[i];
        cumw[i] = acc;
    }

    const std::uint64_t stride = static_cast<std::uint64_t>(d) + 1;
    for (std::int64_t m = first; m < last; ++m) {
        const std::uint64_t base = static_cast<std::uint64_t>(m) * stride;
        const double u = uniform01_at(seed, base);
        int comp = model.k - 1;
        for (int i = 0; i < model.k; ++i) {
            if (u < cumw[i]) {  // strict: ties cannot occur for uniform draws
                comp = i;
                break;
            }
        }
        const std::int64_t row = m - first;
        out.components[static_cast<std::size_t>(row)] = comp;
        for (int j = 0; j < d; ++j)
            out.points(row, j) =
                model.means(comp, j) + normal01_at(seed, base + 1 + static_cast<std::uint64_t>(j));
    }
    return out;
}

PointSample sample_points(const MixtureModel& model, std::int64_t n,
                          std::uint64_t seed) {
    return sample_points_range(model, 0, n, seed);
}

DeltaSamples sample_deltas(const MixtureModel& model, std::int64_t n,
                           std::uint64_t seed) {
    PointSample pts = sample_points(model, 2 * n, seed);
    DeltaSamples out;
    out.seed = seed;
    out.form_kind = model.form.kind;
    out.values.resize(static_cast<std::size_t>(n));
    for (std::int64_t t = 0; t < n; ++t) {
        out.values[static_cast<std::size_t>(t)] = sq_distance(
            model.form, pts.points.row(2 * t).transpose(),
            pts.points.row(2 * t + 1).transpose());
    }
    return out;
}

}  // namespace gmshape
