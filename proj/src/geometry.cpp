#include "gmshape/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace gmshape {

DistanceMultiset DistanceMultiset::from_values(std::vector<double> values, int k) {
    if (k < 1) throw Error("shape", "point count must be positive");
    const std::size_t expect = static_cast<std::size_t>(k) * (k - 1) / 2;
    if (values.size() != expect)
        throw Error("shape", "expected " + std::to_string(expect) +
                                 " distances for k=" + std::to_string(k) + ", got " +
                                 std::to_string(values.size()));
    std::sort(values.begin(), values.end());
    DistanceMultiset out;
    out.values = std::move(values);
    out.k = k;
    return out;
}

Eigen::MatrixXd pairwise_sq_distances(const PointConfig& cfg, const DistanceForm& form) {
    const int k = cfg.k();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double v = sq_distance(form, cfg.points.row(i).transpose(),
                                         cfg.points.row(j).transpose());
            D(i, j) = v;
            D(j, i) = v;
        }
    return D;
}

int pair_index(int i, int j, int k) {
    // lexicographic over i<j
    return i * k - i * (i + 1) / 2 + (j - i - 1);
}

namespace {

class Reconstructor {
public:
    Reconstructor(const DistanceMultiset& D, int d, int k, double tol, long budget)
        : vals_(D.values), d_(d), k_(k), tol_(tol), budget_(budget) {
        used_.assign(vals_.size(), 0);
        pts_ = Eigen::MatrixXd::Zero(k, d);
        qnorm2_.assign(static_cast<std::size_t>(k), 0.0);
        intro_.assign(static_cast<std::size_t>(k), -1);
        pair_elem_.assign(vals_.size(), -1);
        diam_ = vals_.empty() ? 0.0 : std::sqrt(std::max(0.0, vals_.back()));
    }

    ReconstructionResult run() {
        ReconstructionResult out;
        if (k_ == 1) {
            out.solutions.push_back({PointConfig{Eigen::MatrixXd::Zero(1, d_)}, {}});
            out.nodes_visited = 0;
            return out;
        }

        // largest element is realized by some pair; call those points 1 and 2
        const int max_idx = static_cast<int>(vals_.size()) - 1;
        used_[static_cast<std::size_t>(max_idx)] = 1;
        pair_elem_[static_cast<std::size_t>(pair_index(0, 1, k_))] = max_idx;
        pts_(1, 0) = std::sqrt(vals_[static_cast<std::size_t>(max_idx)]);
        qnorm2_[1] = vals_[static_cast<std::size_t>(max_idx)];
        intro_[1] = 0;
        rank_ = 1;
        placed_ = 2;

        slot_dist_.assign(static_cast<std::size_t>(k_), 0.0);
        slot_elem_.assign(static_cast<std::size_t>(k_), -1);
        coords_.assign(static_cast<std::size_t>(d_), 0.0);

        place_next();

        if (solutions_.empty())
            throw Error("infeasible", "no configuration realizes the multiset within tolerance");
        out.solutions = std::move(solutions_);
        out.nodes_visited = visited_;
        return out;
    }

private:
    double window(double v) const { return tol_ * (1.0 + std::abs(v)); }

    void tick() {
        if (++visited_ > budget_)
            throw Error("budget", "search node budget exceeded (" +
                                      std::to_string(budget_) + ")");
    }

    void place_next() {
        if (placed_ == k_) {
            complete();
            return;
        }
        assign_slot(placed_, 0, 0.0);
    }

    // Assign a multiset element as the squared distance from the new point
    // (index t = placed_) to placed point j, folding in its trilateration
    // constraint immediately. sumsq carries the squared norm of the
    // determined coordinates.
    void assign_slot(int t, int j, double sumsq) {
        const std::size_t n = vals_.size();
        if (j == 0) {
            double last_tried = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t idx = 0; idx < n; ++idx) {
                if (used_[idx]) continue;
                const double v = vals_[idx];
                if (!std::isnan(last_tried) && v - last_tried <= window(v)) continue;
                last_tried = v;
                tick();
                used_[idx] = 1;
                slot_dist_[0] = v;
                slot_elem_[0] = static_cast<int>(idx);
                assign_slot(t, 1, 0.0);
                used_[idx] = 0;
            }
            return;
        }

        if (j == t) {
            finish_point(t, sumsq);
            return;
        }

        // triangle feasibility against the anchor: the candidate distance to
        // placed point j must be realizable with |x| fixed by slot 0
        const double d0 = slot_dist_[0];
        const double rq = std::sqrt(qnorm2_[static_cast<std::size_t>(j)]);
        const double r0 = std::sqrt(d0);
        const double lo = (rq - r0) * (rq - r0);
        const double hi = (rq + r0) * (rq + r0);

        const auto first = std::lower_bound(vals_.begin(), vals_.end(), lo - window(lo));
        double last_tried = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t idx = static_cast<std::size_t>(first - vals_.begin());
             idx < n && vals_[idx] <= hi + window(hi); ++idx) {
            if (used_[idx]) continue;
            const double v = vals_[idx];
            if (!std::isnan(last_tried) && v - last_tried <= window(v)) continue;
            last_tried = v;
            tick();

            // <x, q_j> = (d0 + |q_j|^2 - v) / 2
            const double b = 0.5 * (d0 + qnorm2_[static_cast<std::size_t>(j)] - v);
            const double slack = tol_ * (1.0 + d0 + qnorm2_[static_cast<std::size_t>(j)] + std::abs(v));
            const int axis = intro_[static_cast<std::size_t>(j)];

            if (axis < 0) {
                // q_j spans no new axis: pure consistency check
                double dot = 0.0;
                for (int c = 0; c < d_; ++c) dot += pts_(j, c) * coords_[static_cast<std::size_t>(c)];
                if (std::abs(dot - b) > slack) continue;
                used_[idx] = 1;
                slot_dist_[static_cast<std::size_t>(j)] = v;
                slot_elem_[static_cast<std::size_t>(j)] = static_cast<int>(idx);
                assign_slot(t, j + 1, sumsq);
                used_[idx] = 0;
            } else {
                double dot = 0.0;
                for (int c = 0; c < axis; ++c) dot += pts_(j, c) * coords_[static_cast<std::size_t>(c)];
                const double xa = (b - dot) / pts_(j, axis);
                const double new_sumsq = sumsq + xa * xa;
                if (new_sumsq > d0 + window(d0)) continue;  // negative squared height
                used_[idx] = 1;
                slot_dist_[static_cast<std::size_t>(j)] = v;
                slot_elem_[static_cast<std::size_t>(j)] = static_cast<int>(idx);
                coords_[static_cast<std::size_t>(axis)] = xa;
                assign_slot(t, j + 1, new_sumsq);
                used_[idx] = 0;
            }
        }
    }

    void finish_point(int t, double sumsq) {
        const double d0 = slot_dist_[0];
        const double h2 = d0 - sumsq;
        double h = 0.0;
        int new_axis = -1;
        if (rank_ < d_) {
            if (h2 < -window(d0)) return;
            if (h2 > window(d0)) {
                h = std::sqrt(h2);
                new_axis = rank_;
            }
        } else {
            if (std::abs(h2) > window(d0)) return;  // no room left for a height
        }

        for (int c = 0; c < d_; ++c) pts_(t, c) = 0.0;
        for (int c = 0; c < rank_; ++c) pts_(t, c) = coords_[static_cast<std::size_t>(c)];
        if (new_axis >= 0) pts_(t, new_axis) = h;

        double nrm2 = 0.0;
        for (int c = 0; c < d_; ++c) nrm2 += pts_(t, c) * pts_(t, c);
        qnorm2_[static_cast<std::size_t>(t)] = nrm2;
        intro_[static_cast<std::size_t>(t)] = new_axis;
        for (int j = 0; j < t; ++j)
            pair_elem_[static_cast<std::size_t>(pair_index(j, t, k_))] =
                slot_elem_[static_cast<std::size_t>(j)];

        const int saved_rank = rank_;
        if (new_axis >= 0) ++rank_;
        ++placed_;

        // coords_ is reused by deeper levels; save the prefix we consumed
        std::vector<double> saved_coords(coords_.begin(), coords_.begin() + d_);
        place_next();
        std::copy(saved_coords.begin(), saved_coords.end(), coords_.begin());

        --placed_;
        rank_ = saved_rank;
        intro_[static_cast<std::size_t>(t)] = -1;
    }

    void complete() {
        // regenerate the multiset and compare entrywise
        PointConfig cfg{pts_.topRows(k_)};
        std::vector<double> regen;
        regen.reserve(vals_.size());
        for (int i = 0; i < k_; ++i)
            for (int j = i + 1; j < k_; ++j)
                regen.push_back((pts_.row(i) - pts_.row(j)).squaredNorm());
        std::sort(regen.begin(), regen.end());
        for (std::size_t i = 0; i < vals_.size(); ++i)
            if (std::abs(regen[i] - vals_[i]) > window(vals_[i])) return;

        // deduplicate up to congruence
        const double dedupe_tol = std::max(1e-8, 5.0 * tol_ * (1.0 + diam_));
        for (const ReconstructionSolution& s : solutions_)
            if (align(s.config, cfg).rms <= dedupe_tol) return;

        solutions_.push_back({cfg, pair_elem_});
    }

    std::vector<double> vals_;
    int d_, k_;
    double tol_;
    long budget_;
    long visited_ = 0;

    std::vector<char> used_;
    Eigen::MatrixXd pts_;
    std::vector<double> qnorm2_;
    std::vector<int> intro_;
    std::vector<double> slot_dist_;
    std::vector<int> slot_elem_;
    std::vector<double> coords_;
    std::vector<int> pair_elem_;
    int rank_ = 0;
    int placed_ = 0;
    double diam_ = 0.0;

    std::vector<ReconstructionSolution> solutions_;
};

}  // namespace

ReconstructionResult reconstruct_unlabeled(const DistanceMultiset& D, int d, int k,
                                           double tol, long node_budget) {
    if (d < 1) throw Error("dimension", "dimension must be positive");
    const std::size_t expect = static_cast<std::size_t>(k) * (k - 1) / 2;
    if (k < 1 || D.values.size() != expect)
        throw Error("shape", "multiset size does not match k(k-1)/2");
    for (double v : D.values)
        if (!(v > 0.0))
            throw Error("domain", "squared distances must be positive in euclidean mode");
    if (!std::is_sorted(D.values.begin(), D.values.end()))
        throw Error("domain", "multiset values must be sorted");

    Reconstructor rec(D, d, k, tol, node_budget);
    return rec.run();
}

PointConfig embed_labeled(const Eigen::MatrixXd& sqdist, int d, const DistanceForm& form,
                          double psd_tol) {
    const int k = static_cast<int>(sqdist.rows());
    if (k < 1 || sqdist.cols() != k)
        throw Error("shape", "squared-distance matrix must be square");
    if (d < 1) throw Error("dimension", "dimension must be positive");

    const double scale0 = std::max(1.0, sqdist.cwiseAbs().maxCoeff());
    if ((sqdist - sqdist.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale0)
        throw Error("domain", "squared-distance matrix must be symmetric");
    for (int i = 0; i < k; ++i)
        if (std::abs(sqdist(i, i)) > 1e-9 * scale0)
            throw Error("domain", "squared-distance matrix must have zero diagonal");

    // sign slots and change of basis back to the form's coordinates
    std::vector<int> slot_sign(static_cast<std::size_t>(d), 1);
    Eigen::MatrixXd back;  // points = X * back^T when set
    bool has_back = false;
    switch (form.kind) {
        case FormKind::Euclidean:
            break;
        case FormKind::DiagonalSigns: {
            if (form.signs.size() != d) throw Error("dimension", "form does not match d");
            for (int s = 0; s < d; ++s) slot_sign[static_cast<std::size_t>(s)] = form.signs[s] > 0 ? 1 : -1;
            break;
        }
        case FormKind::FullMatrix: {
            if (form.matrix.rows() != d) throw Error("dimension", "form does not match d");
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fes(form.matrix);
            const Eigen::VectorXd lam = fes.eigenvalues();
            for (int s = 0; s < d; ++s) slot_sign[static_cast<std::size_t>(s)] = lam[s] > 0 ? 1 : -1;
            back = fes.eigenvectors() * lam.cwiseAbs().cwiseSqrt().cwiseInverse().asDiagonal();
            has_back = true;
            break;
        }
    }
    int want_pos = 0, want_neg = 0;
    for (int s : slot_sign) (s > 0 ? want_pos : want_neg)++;

    // Gram matrix anchored at point 1
    Eigen::MatrixXd G(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            G(i, j) = 0.5 * (sqdist(0, i) + sqdist(0, j) - sqdist(i, j));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd lam = es.eigenvalues();  // ascending
    const double lscale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);

    int sig_pos = 0, sig_neg = 0;
    for (int i = 0; i < k; ++i) {
        if (lam[i] > psd_tol * lscale) ++sig_pos;
        if (lam[i] < -psd_tol * lscale) ++sig_neg;
    }
    if (sig_pos > want_pos || sig_neg > want_neg) {
        std::vector<double> profile(lam.data(), lam.data() + k);
        throw Error("not-embeddable-in-d",
                    "Gram spectrum needs signature (" + std::to_string(sig_pos) + "," +
                        std::to_string(sig_neg) + "), form provides (" +
                        std::to_string(want_pos) + "," + std::to_string(want_neg) + ")",
                    profile);
    }

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(k, d);
    int next_pos = k - 1;  // positive eigenpairs from the top
    int next_neg = 0;      // negative from the bottom
    for (int s = 0; s < d; ++s) {
        if (slot_sign[static_cast<std::size_t>(s)] > 0) {
            if (next_pos >= 0 && lam[next_pos] > psd_tol * lscale) {
                X.col(s) = es.eigenvectors().col(next_pos) * std::sqrt(lam[next_pos]);
                --next_pos;
            }
        } else {
            if (next_neg < k && lam[next_neg] < -psd_tol * lscale) {
                X.col(s) = es.eigenvectors().col(next_neg) * std::sqrt(-lam[next_neg]);
                ++next_neg;
            }
        }
    }

    PointConfig out;
    out.points = has_back ? Eigen::MatrixXd(X * back.transpose()) : X;
    return out;
}

namespace {

class Matcher {
public:
    Matcher(const PointConfig& A, const PointConfig& B, const std::vector<double>* wa,
            const std::vector<double>* wb, double wtol)
        : A_(A.points), B_(B.points), k_(A.k()), d_(A.dim()) {
        ca_ = A_.colwise().mean();
        cb_ = B_.colwise().mean();
        A0_ = A_.rowwise() - ca_;
        B0_ = B_.rowwise() - cb_;

        distA_ = dist_matrix(A0_);
        distB_ = dist_matrix(B0_);
        profA_ = profiles(distA_);
        profB_ = profiles(distB_);

        allowed_.assign(static_cast<std::size_t>(k_) * k_, 1);
        if (wa && wb) {
            for (int i = 0; i < k_; ++i)
                for (int j = 0; j < k_; ++j)
                    allowed_[static_cast<std::size_t>(i) * k_ + j] =
                        std::abs((*wa)[static_cast<std::size_t>(i)] -
                                 (*wb)[static_cast<std::size_t>(j)]) <= wtol;
        }
    }

    AlignResult run() {
        best_ = AlignResult{};
        seed_greedy();
        perm_.assign(static_cast<std::size_t>(k_), -1);
        used_.assign(static_cast<std::size_t>(k_), 0);
        search(0);
        return best_;
    }

private:
    static Eigen::MatrixXd dist_matrix(const Eigen::MatrixXd& P) {
        const int k = static_cast<int>(P.rows());
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                const double v = (P.row(i) - P.row(j)).norm();
                D(i, j) = v;
                D(j, i) = v;
            }
        return D;
    }

    static std::vector<std::vector<double>> profiles(const Eigen::MatrixXd& D) {
        const int k = static_cast<int>(D.rows());
        std::vector<std::vector<double>> out(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j)
                if (j != i) out[static_cast<std::size_t>(i)].push_back(D(i, j));
            std::sort(out[static_cast<std::size_t>(i)].begin(), out[static_cast<std::size_t>(i)].end());
        }
        return out;
    }

    double profile_mismatch(int ai, int bi) const {
        double m = 0.0;
        for (std::size_t l = 0; l < profA_[static_cast<std::size_t>(ai)].size(); ++l)
            m = std::max(m, std::abs(profA_[static_cast<std::size_t>(ai)][l] -
                                     profB_[static_cast<std::size_t>(bi)][l]));
        return m;
    }

    // a completed matching sigma (B row i <- A row sigma[i]) scored by
    // orthogonal Procrustes over the full orthogonal group
    void score(const std::vector<int>& sigma) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d_, d_);
        for (int i = 0; i < k_; ++i)
            H += B0_.row(i).transpose() * A0_.row(sigma[static_cast<std::size_t>(i)]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::MatrixXd Q = svd.matrixU() * svd.matrixV().transpose();

        double ss = 0.0;
        for (int i = 0; i < k_; ++i)
            ss += (Q * A0_.row(sigma[static_cast<std::size_t>(i)]).transpose() -
                   B0_.row(i).transpose())
                      .squaredNorm();
        const double rms = std::sqrt(ss / k_);
        if (rms < best_.rms) {
            best_.rms = rms;
            best_.rotation = Q;
            best_.translation = cb_.transpose() - Q * ca_.transpose();
            best_.permutation = sigma;
        }
    }

    void seed_greedy() {
        std::vector<int> sigma(static_cast<std::size_t>(k_), -1);
        std::vector<char> used(static_cast<std::size_t>(k_), 0);
        for (int i = 0; i < k_; ++i) {
            int pick = -1;
            double bestm = std::numeric_limits<double>::infinity();
            for (int a = 0; a < k_; ++a) {
                if (used[static_cast<std::size_t>(a)] ||
                    !allowed_[static_cast<std::size_t>(a) * k_ + i])
                    continue;
                const double m = profile_mismatch(a, i);
                if (m < bestm) {
                    bestm = m;
                    pick = a;
                }
            }
            if (pick < 0) return;  // no greedy completion; bound stays infinite
            sigma[static_cast<std::size_t>(i)] = pick;
            used[static_cast<std::size_t>(pick)] = 1;
        }
        score(sigma);
    }

    void search(int i) {
        if (i == k_) {
            score(perm_);
            return;
        }
        // any matching achieving rms r keeps every pairwise-distance and
        // profile mismatch below 2 sqrt(k) r, so the current best prunes safely
        const double bound = 2.0 * std::sqrt(static_cast<double>(k_)) * best_.rms + 1e-12;
        for (int a = 0; a < k_; ++a) {
            if (used_[static_cast<std::size_t>(a)] ||
                !allowed_[static_cast<std::size_t>(a) * k_ + i])
                continue;
            if (profile_mismatch(a, i) > bound) continue;
            bool ok = true;
            for (int p = 0; p < i && ok; ++p)
                ok = std::abs(distA_(perm_[static_cast<std::size_t>(p)], a) - distB_(p, i)) <= bound;
            if (!ok) continue;
            perm_[static_cast<std::size_t>(i)] = a;
            used_[static_cast<std::size_t>(a)] = 1;
            search(i + 1);
            used_[static_cast<std::size_t>(a)] = 0;
        }
        perm_[static_cast<std::size_t>(i)] = -1;
    }

    Eigen::MatrixXd A_, B_, A0_, B0_;
    Eigen::RowVectorXd ca_, cb_;
    Eigen::MatrixXd distA_, distB_;
    std::vector<std::vector<double>> profA_, profB_;
    std::vector<char> allowed_;
    int k_, d_;

    std::vector<int> perm_;
    std::vector<char> used_;
    AlignResult best_;
};

}  // namespace

AlignResult align(const PointConfig& A, const PointConfig& B,
                  const std::vector<double>* weights_a,
                  const std::vector<double>* weights_b, double weight_tol) {
    if (A.k() != B.k() || A.dim() != B.dim())
        throw Error("shape", "configurations must have matching k and d");
    if ((weights_a == nullptr) != (weights_b == nullptr))
        throw Error("shape", "weights must be given for both configurations or neither");
    if (weights_a && (static_cast<int>(weights_a->size()) != A.k() ||
                      static_cast<int>(weights_b->size()) != B.k()))
        throw Error("shape", "weight vectors must have one entry per point");

    Matcher m(A, B, weights_a, weights_b, weight_tol);
    return m.run();
}

double shape_distance(const PointConfig& A, const PointConfig& B) {
    return align(A, B).rms;
}

}  // namespace gmshape
