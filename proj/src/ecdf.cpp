#include "ssda/ecdf.hpp"

#include <algorithm>
#include <cmath>

#include "ssda/errors.hpp"

namespace ssda {

double EcdfTable::raw(double x) const {
    const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
    return static_cast<double>(it - sorted_values.begin()) / n_class;
}

double EcdfTable::evaluate(double x) const {
    return std::clamp(raw(x), lower_bound, upper_bound);
}

double EcdfTable::raw_inverse(double u) const {
    // smallest 1-based count k with k/n >= u, i.e. k = ceil(u*n), with
    // floating-point guards around the grid comparisons
    const int n = n_class;
    long k = static_cast<long>(std::ceil(u * n));
    k = std::clamp(k, 1L, static_cast<long>(n));
    while (k > 1 && static_cast<double>(k - 1) / n >= u) --k;
    while (k < n && static_cast<double>(k) / n < u) ++k;
    return sorted_values[static_cast<std::size_t>(k - 1)];
}

EcdfTable fit_ecdf(std::span<const double> values, double a, double b) {
    if (values.size() < 2) {
        throw InsufficientClassDataError("ECDF needs at least 2 values, got " +
                                         std::to_string(values.size()));
    }
    if (!(0.0 < a && a < 0.5 && 0.5 < b && b < 1.0)) {
        throw ArgumentError("Winsorization bounds must satisfy 0 < a < 0.5 < b < 1");
    }
    EcdfTable table;
    table.sorted_values.assign(values.begin(), values.end());
    std::sort(table.sorted_values.begin(), table.sorted_values.end());
    table.n_class = static_cast<int>(values.size());
    table.lower_bound = a;
    table.upper_bound = b;
    table.degenerate = table.sorted_values.front() == table.sorted_values.back();
    return table;
}

}  // namespace ssda
