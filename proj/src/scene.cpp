#include "exodet/scene.hpp"

#include <cmath>
#include <numbers>

#include "exodet/errors.hpp"

namespace exodet {

std::string to_string(Alignment a) {
    return a == Alignment::StarCentered ? "star-centered" : "centroid-centered";
}

Alignment alignment_from_string(const std::string& s) {
    if (s == "star-centered") return Alignment::StarCentered;
    if (s == "centroid-centered") return Alignment::CentroidCentered;
    throw ContractViolation("unknown alignment '" + s + "'");
}

void Scenario::validate() const {
    if (!(epsilon >= 0.0) || !(epsilon < 1.0))
        throw ContractViolation("scenario: epsilon must be in [0, 1)");
    if (!(separation >= 0.0))
        throw ContractViolation("scenario: separation must be non-negative");
    if (!(sigma > 0.0)) throw ContractViolation("scenario: sigma must be positive");
    if (!(mean_photons >= 0.0))
        throw ContractViolation("scenario: mean_photons must be non-negative");
}

nlohmann::json to_json(const Scenario& s) {
    return nlohmann::json{{"epsilon", s.epsilon},
                          {"separation", s.separation},
                          {"sigma", s.sigma},
                          {"mean_photons", s.mean_photons},
                          {"alignment", to_string(s.alignment)}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.epsilon = j.at("epsilon").get<double>();
    s.separation = j.at("separation").get<double>();
    s.sigma = j.at("sigma").get<double>();
    s.mean_photons = j.at("mean_photons").get<double>();
    s.alignment = alignment_from_string(j.at("alignment").get<std::string>());
    s.validate();
    return s;
}

void GaussianPsf::validate() const {
    if (!(sigma > 0.0)) throw ContractViolation("psf: sigma must be positive");
}

double psf_amplitude(const GaussianPsf& psf, double x) {
    psf.validate();
    double norm = std::pow(2.0 * std::numbers::pi * psf.sigma * psf.sigma, -0.25);
    return norm * std::exp(-x * x / (4.0 * psf.sigma * psf.sigma));
}

double overlap_omega(double shift, double sigma) {
    if (!(sigma > 0.0)) throw ContractViolation("overlap_omega: sigma must be positive");
    return std::exp(-shift * shift / (8.0 * sigma * sigma));
}

double centroid(const Scenario& s) {
    s.validate();
    return s.epsilon * s.separation;
}

double star_offset(const Scenario& s) { return -centroid(s); }

double planet_offset(const Scenario& s) {
    s.validate();
    return (1.0 - s.epsilon) * s.separation;
}

}  // namespace exodet
