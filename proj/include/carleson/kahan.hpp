#pragma once

namespace carleson {

// Compensated accumulator; summation order is kept fixed by callers so that
// reports are bit-stable across thread counts.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

}  // namespace carleson
