#pragma once

#include <functional>
#include <string>

#include "exodet/scene.hpp"

namespace exodet {

// Normalized one-dimensional photon arrival density on the image plane.
struct IntensityProfile {
    std::function<double(double)> density;
    std::string label;
};

// Star-centered intensity under the star-only hypothesis: |psi(x)|^2.
IntensityProfile intensity_h0(const Scenario& s);

// Star-centered intensity with a companion present:
// (1 - eps) |psi(x)|^2 + eps |psi(x - separation)|^2.
IntensityProfile intensity_h1(const Scenario& s);

// Pointwise log-likelihood ratio ln(p1(x) / p0(x)) of the two intensities,
// evaluated in a form that stays finite for arbitrarily large |x| and
// separations (log-sum-exp rearrangement).
double di_log_likelihood_ratio(const Scenario& s, double x);

// Classical relative entropy per detected photon of ideal intensity
// measurement, D(p0 || p1), in nats.  Zero iff epsilon * separation == 0.
double kl_direct_imaging(const Scenario& s);

// Small-epsilon closed form (exp(separation^2/sigma^2) - 1) epsilon^2 / 2.
double kl_direct_imaging_series(const Scenario& s);

// Variance of ln(p0/p1) under p0; the dispersion that sets the second-order
// term of the error exponent.
double di_llr_variance(const Scenario& s);

}  // namespace exodet
