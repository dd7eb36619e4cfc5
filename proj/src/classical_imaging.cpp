#include "exodet/classical_imaging.hpp"

#include <cmath>

#include "exodet/errors.hpp"
#include "exodet/numerics.hpp"

namespace exodet {

namespace {

// ln(1 - eps + eps * e^z) without overflow or cancellation.
double log_mixture(double eps, double z) {
    if (eps == 0.0) return 0.0;
    if (z < 700.0) return std::log1p(eps * std::expm1(z));
    // e^z overflows: ln(eps e^z (1 + (1-eps) e^{-z}/eps))
    return z + std::log(eps) + std::log1p((1.0 - eps) * std::exp(-z) / eps);
}

double llr_in_units(const Scenario& s, double u) {
    double r = s.separation / s.sigma;
    double z = u * r - 0.5 * r * r;
    return log_mixture(s.epsilon, z);
}

}  // namespace

IntensityProfile intensity_h0(const Scenario& s) {
    s.validate();
    GaussianPsf psf{s.sigma};
    return {[psf](double x) {
                double a = psf_amplitude(psf, x);
                return a * a;
            },
            "star-only intensity"};
}

IntensityProfile intensity_h1(const Scenario& s) {
    s.validate();
    GaussianPsf psf{s.sigma};
    double eps = s.epsilon, sep = s.separation;
    return {[psf, eps, sep](double x) {
                double a0 = psf_amplitude(psf, x);
                double a1 = psf_amplitude(psf, x - sep);
                return (1.0 - eps) * a0 * a0 + eps * a1 * a1;
            },
            "star-plus-companion intensity"};
}

double di_log_likelihood_ratio(const Scenario& s, double x) {
    s.validate();
    return llr_in_units(s, x / s.sigma);
}

double kl_direct_imaging(const Scenario& s) {
    s.validate();
    if (s.epsilon == 0.0 || s.separation == 0.0) return 0.0;
    // D = -E_{p0}[ln(p1/p0)]; in units u = x/sigma the reference density is
    // a standard normal.
    return -integrate_gaussian_weighted(
        [&s](double u) { return llr_in_units(s, u); }, 0.0, 1.0);
}

double kl_direct_imaging_series(const Scenario& s) {
    s.validate();
    double r = s.separation / s.sigma;
    return 0.5 * std::expm1(r * r) * s.epsilon * s.epsilon;
}

double di_llr_variance(const Scenario& s) {
    s.validate();
    if (s.epsilon == 0.0 || s.separation == 0.0) return 0.0;
    double mean = -kl_direct_imaging(s);
    double second = integrate_gaussian_weighted(
        [&s](double u) {
            double v = llr_in_units(s, u);
            return v * v;
        },
        0.0, 1.0);
    return std::max(0.0, second - mean * mean);
}

}  // namespace exodet
