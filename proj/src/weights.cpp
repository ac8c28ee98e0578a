#include "gmshape/weights.hpp"

#include <cmath>

namespace gmshape {

WeightRecovery recover_weights(const ProductAssignment& pa, double tol) {
    const int k = static_cast<int>(pa.q.rows());
    if (k < 2 || pa.q.cols() != k)
        throw Error("domain", "need a square product matrix with k >= 2");
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && !(pa.q(i, j) > 0.0))
                throw Error("domain", "pairwise products must be positive");

    Eigen::VectorXd raw(k);
    if (k == 2) {
        const double q12 = 0.5 * (pa.q(0, 1) + pa.q(1, 0));
        if (q12 > 0.25 + tol)
            throw Error("inconsistent",
                        "pi1 pi2 = " + std::to_string(q12) + " exceeds 1/4");
        const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * q12));
        raw[0] = 0.5 * (1.0 - disc);
        raw[1] = 0.5 * (1.0 + disc);
    } else {
        // log pi_i + log pi_j = log q_ij, all pairs, least squares
        const int rows = k * (k - 1) / 2;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, k);
        Eigen::VectorXd rhs(rows);
        int r = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j, ++r) {
                M(r, i) = 1.0;
                M(r, j) = 1.0;
                rhs[r] = std::log(0.5 * (pa.q(i, j) + pa.q(j, i)));
            }
        const Eigen::VectorXd logw = M.colPivHouseholderQr().solve(rhs);
        raw = logw.array().exp();
    }

    WeightRecovery out;
    out.raw_weights = raw;
    const double sum = raw.sum();
    out.sum_defect = std::abs(sum - 1.0);
    out.zero_node_defect = std::abs(raw.squaredNorm() - pa.zero_node_weight);
    out.weights = raw / sum;
    return out;
}

}  // namespace gmshape
