#include "gmshape/moments.hpp"

#include <cmath>

#include "gmshape/numerics.hpp"

namespace gmshape {

PowerSums exact_power_sums(const MixtureModel& model, int max_order) {
    if (max_order < 0) throw Error("order", "max order must be nonnegative");
    const int k = model.k;

    Eigen::MatrixXd delta(k, k);
    for (int i = 0; i < k; ++i) {
        delta(i, i) = 0.0;
        for (int j = i + 1; j < k; ++j) {
            const double v = sq_distance(model.form, model.means.row(i).transpose(),
                                         model.means.row(j).transpose());
            delta(i, j) = v;
            delta(j, i) = v;
        }
    }

    PowerSums out;
    out.values.resize(static_cast<std::size_t>(max_order) + 1);
    // pow[i][j] carries delta_ij^n across orders
    Eigen::MatrixXd pw = Eigen::MatrixXd::Ones(k, k);
    for (int n = 0; n <= max_order; ++n) {
        if (n > 0) pw = pw.cwiseProduct(delta);
        NeumaierSum s;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                s.add(model.weights[i] * model.weights[j] * pw(i, j));
        out.values[static_cast<std::size_t>(n)] = s.value();
    }
    return out;
}

Eigen::MatrixXd moment_expansion_matrix(int d, int max_order) {
    if (d < 1) throw Error("dimension", "dimension must be positive");
    if (max_order < 0) throw Error("order", "max order must be nonnegative");
    const int L = max_order;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(L + 1, L + 1);
    // binomials by Pascal's rule; exact in double well past the orders used here
    std::vector<std::vector<double>> binom(static_cast<std::size_t>(L) + 1);
    for (int p = 0; p <= L; ++p) {
        binom[p].resize(static_cast<std::size_t>(p) + 1);
        binom[p][0] = 1.0;
        binom[p][static_cast<std::size_t>(p)] = 1.0;
        for (int n = 1; n < p; ++n)
            binom[p][n] = binom[p - 1][n - 1] + binom[p - 1][n];
    }
    for (int p = 0; p <= L; ++p) {
        double pow4 = 1.0;
        for (int n = p; n >= 0; --n) {
            B(p, n) = binom[p][n] * pow4 * rising_factorial(n + 0.5 * d, p - n);
            pow4 *= 4.0;
        }
    }
    return B;
}

MomentVector exact_moments(const MixtureModel& model, int max_order) {
    if (!model.form.is_euclidean())
        throw Error("unsupported-form",
                    "exact moments require the euclidean form (got " +
                        form_kind_name(model.form.kind) + ")");
    return power_sums_to_moments(exact_power_sums(model, max_order), model.d);
}

MomentVector empirical_moments(const DeltaSamples& samples, int max_order) {
    if (max_order < 0) throw Error("order", "max order must be nonnegative");
    const std::int64_t n = samples.count();
    if (n < 2) throw Error("empty", "need at least two delta samples");

    MomentVector out;
    out.source = MomentSource::Empirical;
    out.values.resize(static_cast<std::size_t>(max_order) + 1);
    out.stderrs.resize(static_cast<std::size_t>(max_order) + 1);
    out.values[0] = 1.0;
    out.stderrs[0] = 0.0;

    for (int p = 1; p <= max_order; ++p) {
        NeumaierSum sum;
        for (const double v : samples.values) sum.add(std::pow(v, p));
        const double mean = sum.value() / static_cast<double>(n);
        NeumaierSum dev2;
        for (const double v : samples.values) {
            const double r = std::pow(v, p) - mean;
            dev2.add(r * r);
        }
        const double var = std::max(0.0, dev2.value() / static_cast<double>(n - 1));
        out.values[static_cast<std::size_t>(p)] = mean;
        out.stderrs[static_cast<std::size_t>(p)] = std::sqrt(var / static_cast<double>(n));
    }
    return out;
}

PowerSums moments_to_power_sums(const MomentVector& m) {
    if (m.values.empty()) throw Error("order", "empty moment vector");
    if (!m.stderrs.empty() && m.stderrs.size() != m.values.size())
        throw Error("order", "stderr length does not match moment length");
    if (m.d < 1) throw Error("dimension", "moment vector has no dimension assigned");

    const int L = m.max_order();
    const Eigen::MatrixXd B = moment_expansion_matrix(m.d, L);
    PowerSums out;
    out.values.resize(static_cast<std::size_t>(L) + 1);
    // forward substitution; diagonal of B is 1
    for (int p = 0; p <= L; ++p) {
        NeumaierSum s;
        s.add(m.values[static_cast<std::size_t>(p)]);
        for (int j = 0; j < p; ++j)
            s.add(-B(p, j) * out.values[static_cast<std::size_t>(j)]);
        out.values[static_cast<std::size_t>(p)] = s.value();
    }
    return out;
}

MomentVector power_sums_to_moments(const PowerSums& p, int d) {
    if (p.values.empty()) throw Error("order", "empty power sums");
    const int L = p.max_order();
    const Eigen::MatrixXd B = moment_expansion_matrix(d, L);
    MomentVector out;
    out.d = d;
    out.source = MomentSource::Exact;
    out.values.resize(static_cast<std::size_t>(L) + 1);
    for (int q = 0; q <= L; ++q) {
        NeumaierSum s;
        for (int n = 0; n <= q; ++n)
            s.add(B(q, n) * p.values[static_cast<std::size_t>(n)]);
        out.values[static_cast<std::size_t>(q)] = s.value();
    }
    return out;
}

std::vector<double> propagate_power_sum_stderr(const MomentVector& m) {
    if (m.stderrs.empty())
        return std::vector<double>(m.values.size(), 0.0);
    if (m.d < 1) throw Error("dimension", "moment vector has no dimension assigned");
    const int L = m.max_order();
    const Eigen::MatrixXd B = moment_expansion_matrix(m.d, L);
    // columns of Binv by forward substitution on B x = e_j
    Eigen::MatrixXd Binv = Eigen::MatrixXd::Zero(L + 1, L + 1);
    for (int j = 0; j <= L; ++j) {
        for (int i = j; i <= L; ++i) {
            double v = (i == j) ? 1.0 : 0.0;
            for (int r = j; r < i; ++r) v -= B(i, r) * Binv(r, j);
            Binv(i, j) = v;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(L) + 1, 0.0);
    for (int i = 0; i <= L; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= L; ++j) {
            const double t = Binv(i, j) * m.stderrs[static_cast<std::size_t>(j)];
            acc += t * t;
        }
        out[static_cast<std::size_t>(i)] = std::sqrt(acc);
    }
    return out;
}

}  // namespace gmshape
