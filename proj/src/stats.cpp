#include "exodet/stats.hpp"

#include <cmath>

#include <gsl/gsl_cdf.h>

#include "exodet/errors.hpp"

namespace exodet {

Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                         double confidence) {
    if (trials < 1) throw ContractViolation("interval needs trials >= 1");
    if (successes < 0 || successes > trials) {
        throw ContractViolation("successes must lie in [0, trials]");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ContractViolation("confidence must lie in (0, 1)");
    }
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double m = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / m;
    const double z2m = z * z / m;
    const double center = (p + z2m / 2.0) / (1.0 + z2m);
    const double half =
        z * std::sqrt(p * (1.0 - p) / m + z2m / (4.0 * m)) / (1.0 + z2m);
    // At the boundaries center - half (resp. center + half) is exactly 0
    // (resp. 1) in real arithmetic; pin them so downstream log transforms
    // see the boundary, not rounding residue.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ContractViolation("normal quantile needs p in (0, 1)");
    }
    return gsl_cdf_ugaussian_Pinv(p);
}

double chi_square_survival(double stat, int dof) {
    if (stat < 0.0) throw ContractViolation("chi-square statistic must be >= 0");
    if (dof < 0) throw ContractViolation("degrees of freedom must be >= 0");
    if (dof == 0) return 1.0;
    if (stat == 0.0) return 1.0;
    return gsl_cdf_chisq_Q(stat, static_cast<double>(dof));
}

double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw ContractViolation("slope fit needs two equal-length samples");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
            throw ContractViolation("log-log fit needs positive samples");
        }
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) {
        throw ContractViolation("log-log fit needs at least two distinct x values");
    }
    return (n * sxy - sx * sy) / denom;
}

}  // namespace exodet
