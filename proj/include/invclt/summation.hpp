#pragma once

#include <cmath>

namespace invclt {

// Neumaier's variant of Kahan summation. Order-dependent only in the last
// bit, which keeps tolerance-gated invariants stable across run layouts.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    CompensatedSum& operator+=(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace invclt
