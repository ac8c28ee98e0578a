#include "gmshape/prony.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

#include "gmshape/numerics.hpp"

namespace gmshape {

namespace {

// Rescaling factor s so that the largest |node| lands near 1, which is where
// the Hankel/Vandermonde conditioning is best; dividing by the mean node
// (p_1/p_0) instead can leave nodes far above 1 or compress a well-spread
// set, both of which cost many digits at K >= 5.
//
// For all-positive sums the consecutive ratio p_L/p_(L-1) increases with the
// order (log-convexity) and approaches the dominant node from below, so the
// highest available ratio is a tight estimate. Sign-mixed sums (indefinite
// forms) fall back to max_n |p_n|^(1/n), which bounds max|node| up to a
// (sum of |weights|)^(1/n) factor.
double node_scale(const std::vector<double>& p) {
    double s = 0.0;
    bool all_positive = true;
    for (double v : p) all_positive = all_positive && v > 0.0;
    if (all_positive && p.size() >= 2) {
        s = p[p.size() - 1] / p[p.size() - 2];
    } else {
        for (std::size_t n = 1; n < p.size(); ++n)
            s = std::max(s, std::pow(std::abs(p[n]), 1.0 / static_cast<double>(n)));
    }
    if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
    // round to a power of two: dividing p_n by s^n is then exact, so the
    // rescaled problem carries no error beyond the input's own encoding
    return std::exp2(std::round(std::log2(s)));
}

std::vector<double> rescaled(const std::vector<double>& p, double s) {
    std::vector<double> q(p.size());
    double sn = 1.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        q[n] = p[n] / sn;
        sn *= s;
    }
    return q;
}

double poly_eval(const CharPoly& f, double t) {
    const int K = f.degree();
    double v = 1.0;  // t^K accumulated by Horner over the monic polynomial
    for (int r = 1; r <= K; ++r) v = v * t - f.coeffs[static_cast<std::size_t>(r - 1)];
    return v;
}

double poly_deriv(const CharPoly& f, double t) {
    const int K = f.degree();
    double v = static_cast<double>(K);
    for (int r = 1; r < K; ++r)
        v = v * t - static_cast<double>(K - r) * f.coeffs[static_cast<std::size_t>(r - 1)];
    return v;
}

// Horner magnitude |t|^K + sum |c_r| |t|^(K-r); |F(t)| at or below its
// rounding level signals the polish has hit the noise floor.
double poly_magnitude(const CharPoly& f, double t) {
    const int K = f.degree();
    const double at = std::abs(t);
    double v = 1.0;
    for (int r = 1; r <= K; ++r) v = v * at + std::abs(f.coeffs[static_cast<std::size_t>(r - 1)]);
    return v;
}

// Newton polish on the square residual system
//   g_n(a, x) = sum_m a_m x_m^n - q_n,  n = 0..2K-1,
// rows scaled by 1/max(1, |q_n|). Runs in extended precision: the parameter
// accuracy at the solution is cond(J) times the residual floor, and the
// Vandermonde-type Jacobian can reach cond 1e7..1e9 even for well-separated
// nodes, which double precision alone cannot serve.
bool refine_nodes(std::vector<Node>& nodes, const std::vector<double>& q) {
    using LD = long double;
    using MatLD = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
    using VecLD = Eigen::Matrix<LD, Eigen::Dynamic, 1>;

    const int K = static_cast<int>(nodes.size());
    const int rows = 2 * K;
    if (static_cast<int>(q.size()) < rows) return false;

    VecLD w(rows), qv(rows);
    for (int n = 0; n < rows; ++n) {
        qv[n] = static_cast<LD>(q[static_cast<std::size_t>(n)]);
        w[n] = LD(1) / std::max(LD(1), std::abs(qv[n]));
    }

    VecLD a(K), x(K);
    for (int m = 0; m < K; ++m) {
        a[m] = static_cast<LD>(nodes[static_cast<std::size_t>(m)].weight);
        x[m] = static_cast<LD>(nodes[static_cast<std::size_t>(m)].x);
    }

    auto residual = [&](const VecLD& av, const VecLD& xv, VecLD& g) {
        VecLD xp = VecLD::Ones(K);
        for (int n = 0; n < rows; ++n) {
            LD acc = 0;
            for (int m = 0; m < K; ++m) acc += av[m] * xp[m];
            g[n] = (acc - qv[n]) * w[n];
            for (int m = 0; m < K; ++m) xp[m] *= xv[m];
        }
        return static_cast<LD>(g.norm());
    };

    VecLD g(rows);
    LD gnorm = residual(a, x, g);

    for (int iter = 0; iter < 50 && gnorm > LD(1e-21) * rows; ++iter) {
        MatLD J(rows, 2 * K);
        VecLD xp = VecLD::Ones(K);   // x^n
        VecLD xpm = VecLD::Zero(K);  // x^(n-1)
        for (int n = 0; n < rows; ++n) {
            for (int m = 0; m < K; ++m) {
                J(n, m) = xp[m] * w[n];
                J(n, K + m) = (n == 0) ? LD(0) : LD(n) * a[m] * xpm[m] * w[n];
            }
            for (int m = 0; m < K; ++m) {
                xpm[m] = xp[m];
                xp[m] *= x[m];
            }
        }
        const VecLD step = J.colPivHouseholderQr().solve(-g);
        if (!step.allFinite()) break;

        LD t = 1;
        bool improved = false;
        for (int half = 0; half < 16; ++half, t *= LD(0.5)) {
            const VecLD at = a + t * step.head(K);
            const VecLD xt = x + t * step.tail(K);
            VecLD gt(rows);
            const LD gn = residual(at, xt, gt);
            if (gn < gnorm) {
                a = at;
                x = xt;
                g = gt;
                gnorm = gn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }

    for (int m = 0; m < K; ++m) {
        nodes[static_cast<std::size_t>(m)].weight = static_cast<double>(a[m]);
        nodes[static_cast<std::size_t>(m)].x = static_cast<double>(x[m]);
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& l, const Node& r) { return l.x < r.x; });
    return true;
}

}  // namespace

double NodeSet::regenerate(int order) const {
    NeumaierSum s;
    for (const Node& n : nodes) s.add(n.weight * std::pow(n.x, order));
    return s.value();
}

CharPoly hankel_solve(const PowerSums& p, int K, const PronyOptions& opts,
                      HankelDiagnostics* diag) {
    if (K < 1) throw Error("order", "node count must be positive");
    if (static_cast<int>(p.values.size()) < 2 * K)
        throw Error("order", "need power sums of orders 0.." + std::to_string(2 * K - 1) +
                                 ", got " + std::to_string(p.values.size()));

    Eigen::MatrixXd H(K, K);
    Eigen::VectorXd rhs(K);
    for (int m = 0; m < K; ++m) {
        for (int r = 0; r < K; ++r) H(m, r) = p.values[static_cast<std::size_t>(m + r)];
        rhs[m] = p.values[static_cast<std::size_t>(K + m)];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    const Eigen::VectorXd sv = svd.singularValues();
    if (diag) {
        diag->singular_values.assign(sv.data(), sv.data() + sv.size());
    }
    if (!(sv[0] > 0.0) || sv[K - 1] < opts.sv_reject * sv[0]) {
        std::vector<double> profile(sv.data(), sv.data() + sv.size());
        throw Error("rank-deficient",
                    "Hankel matrix is numerically singular (wrong node count or "
                    "coincident nodes)",
                    profile);
    }

    // unknowns ordered (c_K, ..., c_1)
    const Eigen::VectorXd sol = H.colPivHouseholderQr().solve(rhs);

    CharPoly f;
    f.coeffs.resize(static_cast<std::size_t>(K));
    for (int r = 1; r <= K; ++r) f.coeffs[static_cast<std::size_t>(r - 1)] = sol[K - r];

    if (diag) {
        double worst = 0.0;
        const int extra = static_cast<int>(p.values.size()) - 2 * K;
        for (int m = 0; m < K + std::max(0, extra); ++m) {
            if (m + 2 * K > static_cast<int>(p.values.size())) break;
            double v = p.values[static_cast<std::size_t>(K + m)];
            for (int r = 1; r <= K; ++r)
                v -= f.coeffs[static_cast<std::size_t>(r - 1)] *
                     p.values[static_cast<std::size_t>(K - r + m)];
            worst = std::max(worst, std::abs(v));
        }
        diag->recurrence_residual = worst;
    }
    return f;
}

std::vector<double> poly_roots(const CharPoly& f, const PronyOptions& opts,
                               bool* merged) {
    const int K = f.degree();
    if (K < 1) throw Error("order", "polynomial degree must be at least 1");
    if (merged) *merged = false;

    std::vector<double> roots;
    if (K == 1) {
        roots.push_back(f.coeffs[0]);
        return roots;
    }

    // companion matrix: subdiagonal ones, last column c_K, c_{K-1}, ..., c_1
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K, K);
    for (int i = 0; i + 1 < K; ++i) C(i + 1, i) = 1.0;
    for (int i = 0; i < K; ++i) C(i, K - 1) = f.coeffs[static_cast<std::size_t>(K - 1 - i)];

    Eigen::EigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success)
        throw Error("nonreal-roots", "companion eigen decomposition failed");

    std::vector<double> imag_profile;
    for (int i = 0; i < K; ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        imag_profile.push_back(z.imag());
        if (std::abs(z.imag()) > opts.imag_tol * (1.0 + std::abs(z.real())))
            throw Error("nonreal-roots",
                        "complex root " + std::to_string(z.real()) + " + " +
                            std::to_string(z.imag()) + "i (noise too high or wrong K)",
                        imag_profile);
        roots.push_back(z.real());
    }

    // guarded Newton polish; near multiple roots F(r) is rounding noise and
    // the raw step is garbage, so a step is kept only if it shrinks |F|
    for (double& r : roots) {
        double fv = poly_eval(f, r);
        for (int it = 0; it < 12; ++it) {
            if (std::abs(fv) <= 8.0 * 2.22e-16 * poly_magnitude(f, r)) break;
            const double dv = poly_deriv(f, r);
            if (dv == 0.0) break;
            const double step = fv / dv;
            if (!std::isfinite(step) || std::abs(step) > 0.1 * (1.0 + std::abs(r))) break;
            const double trial = r - step;
            const double ft = poly_eval(f, trial);
            if (std::abs(ft) >= std::abs(fv)) break;
            r = trial;
            fv = ft;
        }
    }

    std::sort(roots.begin(), roots.end());
    double max_abs = 0.0;
    for (double r : roots) max_abs = std::max(max_abs, std::abs(r));
    const double window = opts.cluster_tol * std::max(1.0, max_abs);

    std::vector<double> out;
    std::size_t i = 0;
    while (i < roots.size()) {
        std::size_t j = i + 1;
        double acc = roots[i];
        while (j < roots.size() && roots[j] - roots[j - 1] <= window) {
            acc += roots[j];
            ++j;
        }
        out.push_back(acc / static_cast<double>(j - i));
        if (j - i > 1 && merged) *merged = true;
        i = j;
    }
    return out;
}

NodeSet vandermonde_weights(const std::vector<double>& roots, const PowerSums& p) {
    const int K = static_cast<int>(roots.size());
    if (K < 1) throw Error("order", "no roots given");
    if (static_cast<int>(p.values.size()) < K)
        throw Error("order", "need power sums of orders 0.." + std::to_string(K - 1));

    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j)
            if (roots[static_cast<std::size_t>(i)] == roots[static_cast<std::size_t>(j)])
                throw Error("vandermonde-singular", "coincident roots");

    Eigen::MatrixXd Xi(K, K);
    for (int i = 0; i < K; ++i) Xi(0, i) = 1.0;
    for (int m = 1; m < K; ++m)
        for (int i = 0; i < K; ++i)
            Xi(m, i) = Xi(m - 1, i) * roots[static_cast<std::size_t>(i)];

    Eigen::VectorXd rhs(K);
    for (int m = 0; m < K; ++m) rhs[m] = p.values[static_cast<std::size_t>(m)];

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xi);
    if (qr.rank() < K) {
        throw Error("vandermonde-singular", "Vandermonde matrix is numerically singular");
    }
    const Eigen::VectorXd a = qr.solve(rhs);

    NodeSet out;
    out.nodes.resize(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i)
        out.nodes[static_cast<std::size_t>(i)] = Node{a[i], roots[static_cast<std::size_t>(i)]};
    std::sort(out.nodes.begin(), out.nodes.end(),
              [](const Node& l, const Node& r) { return l.x < r.x; });

    double worst = 0.0;
    for (std::size_t n = 0; n < p.values.size(); ++n) {
        const double regen = out.regenerate(static_cast<int>(n));
        worst = std::max(worst, std::abs(regen - p.values[n]) / std::max(1.0, std::abs(p.values[n])));
    }
    out.residual = worst;
    return out;
}

NodeSet prony_recover(const PowerSums& p, int K, const PronyOptions& opts,
                      HankelDiagnostics* diag) {
    if (K < 1) throw Error("order", "node count must be positive");
    if (static_cast<int>(p.values.size()) < 2 * K)
        throw Error("order", "need power sums of orders 0.." + std::to_string(2 * K - 1) +
                                 ", got " + std::to_string(p.values.size()));

    const double s = node_scale(p.values);

    PowerSums q;
    q.values = rescaled(p.values, s);

    HankelDiagnostics local_diag;
    HankelDiagnostics* dg = diag ? diag : &local_diag;
    const CharPoly f = hankel_solve(q, K, opts, dg);
    dg->scale = s;

    bool merged = false;
    const std::vector<double> roots = poly_roots(f, opts, &merged);

    NodeSet ns = vandermonde_weights(roots, q);
    ns.merged_roots = merged;

    if (opts.refine && !merged) refine_nodes(ns.nodes, q.values);

    // unscale and regenerate against the original sums
    for (Node& n : ns.nodes) n.x *= s;
    ns.scale = s;
    double worst = 0.0;
    for (std::size_t n = 0; n < p.values.size(); ++n) {
        const double regen = ns.regenerate(static_cast<int>(n));
        worst = std::max(worst,
                         std::abs(regen - p.values[n]) / std::max(1.0, std::abs(p.values[n])));
    }
    ns.residual = worst;

    if (opts.euclidean) {
        for (const Node& n : ns.nodes)
            if (!(n.weight > 0.0))
                throw Error("negative-weight",
                            "recovered weight " + std::to_string(n.weight) +
                                " is not positive (noise too high or wrong K)");
    }
    return ns;
}

NodeCountEstimate estimate_node_count(const PowerSums& p, double rank_tol) {
    if (p.values.size() < 4)
        throw Error("order", "need at least four power sums");

    const int L = p.max_order();
    const int Kmax = L / 2 + 1;

    const double s = node_scale(p.values);
    const std::vector<double> q = rescaled(p.values, s);

    Eigen::MatrixXd H(Kmax, Kmax);
    for (int m = 0; m < Kmax; ++m)
        for (int r = 0; r < Kmax; ++r) H(m, r) = q[static_cast<std::size_t>(m + r)];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    const Eigen::VectorXd sv = svd.singularValues();

    NodeCountEstimate out;
    out.scale = s;
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    out.K = 0;
    for (int i = 0; i < Kmax; ++i)
        if (sv[i] >= rank_tol * sv[0]) ++out.K;
    return out;
}

}  // namespace gmshape
