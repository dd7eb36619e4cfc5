#include "exodet/measurements.hpp"

#include <cmath>
#include <sstream>

#include "exodet/errors.hpp"

namespace exodet {

namespace {

// Q parameter (squared displacement over 4 sigma^2) of a displaced source.
double mode_q_parameter(double displacement, double sigma) {
    return displacement * displacement / (4.0 * sigma * sigma);
}

void require_centroid_alignment(const Scenario& s, const char* op) {
    if (s.alignment != Alignment::CentroidCentered) {
        throw ContractViolation(std::string(op) +
                                ": requires centroid-centered alignment");
    }
}

}  // namespace

void OutcomeDistribution::validate() const {
    if (labels.size() != probabilities.size()) {
        throw ContractViolation("outcome distribution: label/probability size mismatch");
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) {
            throw ContractViolation("outcome distribution: negative probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "outcome distribution: total probability " << total << " is not 1";
        throw ContractViolation(os.str());
    }
}

double hermite_gauss_mode_probability(int q, double displacement, double sigma) {
    if (q < 0) throw ContractViolation("mode index must be non-negative");
    if (!(sigma > 0.0)) throw ContractViolation("sigma must be positive");
    const double big_q = mode_q_parameter(displacement, sigma);
    if (big_q == 0.0) return q == 0 ? 1.0 : 0.0;
    return std::exp(-big_q + q * std::log(big_q) - std::lgamma(q + 1.0));
}

OutcomeDistribution spade_distribution_h1(const Scenario& s, int q_max) {
    s.validate();
    require_centroid_alignment(s, "mode-sorter distribution");
    if (q_max < 0) throw ContractViolation("q_max must be non-negative");

    const double d_star = star_offset(s);
    const double d_planet = planet_offset(s);

    OutcomeDistribution dist;
    dist.labels.reserve(static_cast<std::size_t>(q_max) + 2);
    dist.probabilities.reserve(static_cast<std::size_t>(q_max) + 2);
    double total = 0.0, comp = 0.0;  // compensated sum of retained mass
    for (int q = 0; q <= q_max; ++q) {
        const double p =
            (1.0 - s.epsilon) * hermite_gauss_mode_probability(q, d_star, s.sigma) +
            s.epsilon * hermite_gauss_mode_probability(q, d_planet, s.sigma);
        dist.labels.push_back("q=" + std::to_string(q));
        dist.probabilities.push_back(p);
        const double y = p - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    dist.labels.push_back("q>" + std::to_string(q_max));
    dist.probabilities.push_back(std::max(0.0, 1.0 - total));
    dist.validate();
    return dist;
}

double spade_relative_entropy(const Scenario& s) {
    s.validate();
    require_centroid_alignment(s, "mode-sorter exponent");
    const double inv4s2 = 1.0 / (4.0 * s.sigma * s.sigma);
    const double q_star = s.epsilon * s.epsilon * s.separation * s.separation * inv4s2;
    const double q_planet = (1.0 - s.epsilon) * (1.0 - s.epsilon) *
                            s.separation * s.separation * inv4s2;
    // p1(0) = (1-eps) e^{-q_star} + eps e^{-q_planet}; keep the deviation from
    // 1 in expm1 form so -ln p1(0) stays accurate when it is ~1e-8.
    const double delta = (1.0 - s.epsilon) * std::expm1(-q_star) +
                         s.epsilon * std::expm1(-q_planet);
    return -std::log1p(delta);
}

double sliver_even_probability(double displacement, const GaussianPsf& psf) {
    psf.validate();
    return 0.5 * (1.0 + overlap_omega(2.0 * displacement, psf.sigma));
}

double sliver_relative_entropy(const Scenario& s) {
    s.validate();
    require_centroid_alignment(s, "parity-measurement exponent");
    const double inv2s2 = 1.0 / (2.0 * s.sigma * s.sigma);
    const double d_star = star_offset(s);
    const double d_planet = planet_offset(s);
    // pi_even(d) - 1 = expm1(-d^2/2 sigma^2) / 2
    const double delta =
        0.5 * ((1.0 - s.epsilon) * std::expm1(-d_star * d_star * inv2s2) +
               s.epsilon * std::expm1(-d_planet * d_planet * inv2s2));
    return -std::log1p(delta);
}

namespace {

// ln of the H1 probability of >= 1 photon in the fundamental sorter mode
// after discarding vacuum records, written so every difference of
// near-equal quantities goes through expm1/log1p.
double log_thermal_click_probability(const Scenario& s) {
    const double ns = s.mean_photons;
    const double a = (1.0 - s.epsilon) * ns;  // star mean photons
    const double b = s.epsilon * ns;          // companion mean photons
    const double inv4s2 = 1.0 / (4.0 * s.sigma * s.sigma);
    const double qa = s.epsilon * s.epsilon * s.separation * s.separation * inv4s2;
    const double qb = (1.0 - s.epsilon) * (1.0 - s.epsilon) * s.separation *
                      s.separation * inv4s2;
    // Coupling of each source into the fundamental mode.
    const double ap = a * std::exp(-qa);
    const double bp = b * std::exp(-qb);

    // P(click) = 1 - 1/((1+ap)(1+bp)) = S'/((1+ap)(1+bp)), S' = ap+bp+ap*bp;
    // the denominator of the post-selection is the same with (a, b).
    const double s_all = a + b + a * b;
    const double delta = a * std::expm1(-qa) + b * std::expm1(-qb) +
                         a * b * std::expm1(-qa - qb);
    // ln p1 = ln(S'/S) + ln((1+a)/(1+ap)) + ln((1+b)/(1+bp))
    return std::log1p(delta / s_all) + std::log1p((a - ap) / (1.0 + ap)) +
           std::log1p((b - bp) / (1.0 + bp));
}

}  // namespace

OutcomeDistribution spade_thermal_distribution(const Scenario& s, Hypothesis h) {
    s.validate();
    require_centroid_alignment(s, "thermal mode-sorter distribution");
    if (!(s.mean_photons > 0.0)) {
        throw DomainFailure(
            "thermal mode sorter: mean_photons must be positive (vacuum "
            "post-selection is undefined at zero intensity)");
    }
    double p_click = 1.0;
    if (h == Hypothesis::H1) {
        p_click = std::exp(log_thermal_click_probability(s));
    }
    OutcomeDistribution dist;
    dist.labels = {"q0-click", "q0-no-click"};
    dist.probabilities = {p_click, std::max(0.0, 1.0 - p_click)};
    dist.validate();
    return dist;
}

double spade_thermal_relative_entropy_per_photon(const Scenario& s) {
    s.validate();
    require_centroid_alignment(s, "thermal mode-sorter exponent");
    if (!(s.mean_photons > 0.0)) {
        throw DomainFailure(
            "thermal mode sorter: mean_photons must be positive (vacuum "
            "post-selection is undefined at zero intensity)");
    }
    const double d_prime = -log_thermal_click_probability(s);
    // Post-selection inflates the photon number by (1+N_s)/N_s, so the fair
    // per-photon rate is D' / (1 + N_s).
    return d_prime / (1.0 + s.mean_photons);
}

}  // namespace exodet
