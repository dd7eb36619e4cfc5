#pragma once

#include <cstdint>
#include <vector>

namespace exodet {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion at the given two-sided
// confidence level.  Well behaved at 0 and `trials` successes.
Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                         double confidence = 0.95);

// Inverse standard normal CDF, p in (0, 1).
double normal_quantile(double p);

// Survival function P(X >= stat) of a chi-square law with dof degrees of
// freedom; returns 1 for dof = 0 (fully constrained fit).
double chi_square_survival(double stat, int dof);

// Least-squares slope of ln y against ln x.  Every entry must be positive
// and the sizes equal, with at least two distinct x values.
double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace exodet
