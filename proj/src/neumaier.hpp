#pragma once

#include <cmath>

namespace rdd {

// Neumaier's variant of Kahan summation: tracks a running compensation term so
// long accumulations keep ~double precision even with heavy cancellation.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

}  // namespace rdd
