#pragma once

#include <string>

#include <json.hpp>

namespace exodet {

enum class Alignment { StarCentered, CentroidCentered };

enum class Hypothesis { H0, H1 };

std::string to_string(Alignment a);
Alignment alignment_from_string(const std::string& s);

// One observing configuration: a star at the origin holding fraction
// (1 - epsilon) of the collected light and a candidate companion at
// `separation` holding fraction epsilon.  `sigma` is the width of the
// Gaussian point-spread function, `mean_photons` the mean photon number per
// temporal mode for the thermal model (ignored by the single-photon and
// classical operations).  All positions are in the same length unit as
// sigma; only the ratio separation/sigma enters any result.
struct Scenario {
    double epsilon = 0.0;
    double separation = 0.0;
    double sigma = 1.0;
    double mean_photons = 0.0;
    Alignment alignment = Alignment::CentroidCentered;

    // Throws ContractViolation unless 0 <= epsilon < 1, separation >= 0,
    // sigma > 0, mean_photons >= 0.
    void validate() const;
};

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

// Gaussian aperture profile of width sigma.  The amplitude is L2-normalized:
// integral of |psi|^2 over the line is 1.
struct GaussianPsf {
    double sigma = 1.0;
    void validate() const;  // sigma > 0
};

// psi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / 4 sigma^2).
double psf_amplitude(const GaussianPsf& psf, double x);

// Overlap of two copies of the aperture function displaced by `shift`:
// exp(-shift^2 / 8 sigma^2).
double overlap_omega(double shift, double sigma);

// Intensity centroid of the two-source scene, relative to the star.
double centroid(const Scenario& s);

// Source positions relative to the intensity centroid.
double star_offset(const Scenario& s);    // -epsilon * separation
double planet_offset(const Scenario& s);  // (1 - epsilon) * separation

}  // namespace exodet
