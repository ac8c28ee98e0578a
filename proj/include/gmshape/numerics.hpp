#pragma once

#include <cmath>
#include <cstddef>

namespace gmshape {

/// Compensated (Neumaier) accumulator. The moment algebra sums terms whose
/// magnitudes span many orders (coefficients grow like 4^p * (d/2)_p), so
/// plain summation loses digits to cancellation in the triangular solves.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Rising factorial R(alpha, j) = alpha (alpha+1) ... (alpha+j-1), R(alpha,0)=1.
inline double rising_factorial(double alpha, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= alpha + i;
    return r;
}

}  // namespace gmshape
