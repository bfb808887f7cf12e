#pragma once

#include <span>
#include <vector>

namespace ssda {

// Winsorized empirical CDF of one feature within one class.
// The raw ECDF is right-continuous with ties counted by <=, and the value is
// clamped into [lower_bound, upper_bound] before any inverse-normal mapping.
struct EcdfTable {
    std::vector<double> sorted_values;  // ascending, length n_class
    int n_class = 0;
    double lower_bound = 0.0;  // a in (0, 0.5)
    double upper_bound = 1.0;  // b in (0.5, 1)
    bool degenerate = false;   // all sample values identical

    // clamp(#{v_i <= x} / n, a, b); nondecreasing in x, range [a, b].
    double evaluate(double x) const;

    // Raw (un-Winsorized) ECDF value #{v_i <= x} / n.
    double raw(double x) const;

    // Generalized (left-continuous) inverse of the raw ECDF:
    // min{ x in sorted_values : raw(x) >= u }, for u in (0, 1].
    double raw_inverse(double u) const;
};

// Sorts a copy of `values`. Throws InsufficientClassDataError for fewer than
// two values and ArgumentError unless 0 < a < 0.5 < b < 1. A constant sample
// is retained with the degenerate flag set.
EcdfTable fit_ecdf(std::span<const double> values, double a, double b);

}  // namespace ssda
