#pragma once

#include <string>
#include <vector>

#include "exodet/scene.hpp"

namespace exodet {

// Discrete outcome distribution with an explicit residual bucket so that a
// truncated family (e.g. mode indices up to q_max) still sums to one.
struct OutcomeDistribution {
    std::vector<std::string> labels;
    std::vector<double> probabilities;
    // Sizes match, probabilities >= 0, total within 1e-9 of 1.
    void validate() const;
};

// Probability of finding a photon displaced by `displacement` in the q-th
// Hermite-Gauss mode of a sorter matched to a width-sigma Gaussian aperture:
// the Poisson weight e^{-Q} Q^q / q! with Q = displacement^2 / (4 sigma^2).
// Evaluated in log space so large q cannot overflow q!.
double hermite_gauss_mode_probability(int q, double displacement, double sigma);

// Mode-index distribution of one photon from the two-source scene when the
// sorter is pointed at the intensity centroid (star displaced by -eps*s,
// companion by (1-eps)*s).  Entries q = 0..q_max plus a residual bucket for
// q > q_max.  Requires centroid-centered alignment.
OutcomeDistribution spade_distribution_h1(const Scenario& s, int q_max = 64);

// Error exponent of the mode-sorting measurement: -ln p1(q=0), where the
// reference distribution is the point mass at q = 0 (a lone star on the
// pointing axis always lands in the fundamental mode).  Approaches
// eps * (1 - e^{-s^2/4 sigma^2}) for small eps.
double spade_relative_entropy(const Scenario& s);

// Probability that a photon from a source displaced by d from the inversion
// axis gives an even parity outcome: (1 + omega(2d))/2, which for the
// Gaussian aperture is (1 + e^{-d^2/2 sigma^2})/2.
double sliver_even_probability(double displacement, const GaussianPsf& psf);

// Error exponent of the inversion-interferometer parity measurement with the
// axis at the intensity centroid: -ln pi1(even), reference point mass on the
// even outcome.  Approaches eps * s^2 / 4 sigma^2 for small eps and s.
double sliver_relative_entropy(const Scenario& s);

// Binary click statistic of the thermal-light mode sorter with the vacuum
// record discarded: "at least one photon in q = 0" versus the complement.
// Under H0 the click is certain; under H1 the click probability follows from
// the geometric photon-number law of each independently thermal source.
// Requires mean_photons > 0 (post-selection is undefined at zero intensity).
OutcomeDistribution spade_thermal_distribution(const Scenario& s,
                                               Hypothesis h = Hypothesis::H1);

// Per-detected-photon error exponent of the thermal mode sorter:
// -ln p1(click) deflated by the post-selected mean photon number, i.e.
// divided by (1 + N_s).  Tends to the single-photon value as N_s -> 0 and
// decreases with N_s.
double spade_thermal_relative_entropy_per_photon(const Scenario& s);

}  // namespace exodet
