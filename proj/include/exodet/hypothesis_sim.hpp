#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "exodet/measurements.hpp"
#include "exodet/rng.hpp"
#include "exodet/scene.hpp"
#include "exodet/stats.hpp"

namespace exodet {

enum class MeasurementKind { DirectImaging, Spade, Sliver };

std::string to_string(MeasurementKind k);
MeasurementKind measurement_kind_from_string(const std::string& s);

// A concrete per-photon measurement: outcome sampler plus the matched
// likelihood pair (p0, p1).  Outcomes are encoded as doubles: detector
// position (direct imaging), mode index with q_max+1 for the truncation
// bucket (mode sorter), or parity bit 0/1 (inversion interferometer).
class MeasurementModel {
public:
    // Builds the model and self-checks the sampler against the likelihoods
    // with a chi-square goodness-of-fit test (1e5 samples per hypothesis,
    // fixed internal seed); a fit p-value <= 1e-6 aborts construction.
    static MeasurementModel make(MeasurementKind kind, const Scenario& scenario);

    MeasurementKind kind() const { return kind_; }
    const Scenario& scenario() const { return scenario_; }

    // One outcome under the given hypothesis.
    double sample(Hypothesis h, SplitMix64& rng) const;

    // ln(p1(x)/p0(x)); +infinity when p0(x) = 0 < p1(x).  Outcomes outside
    // both supports throw MalformedRecord.
    double log_likelihood_ratio(double outcome) const;

    // First-order exponent D(p0 || p1) of this measurement.
    double relative_entropy() const { return d_; }
    // Second-order coefficient Var_{p0}[ln(p0/p1)] (zero when p0 is a point
    // mass, as for the interferometric measurements).
    double llr_variance() const { return b_; }

private:
    MeasurementModel() = default;

    MeasurementKind kind_ = MeasurementKind::DirectImaging;
    Scenario scenario_;
    double d_ = 0.0;
    double b_ = 0.0;
    // mode sorter: H1 cumulative weights over q = 0..q_max and the residual
    std::vector<double> spade_h1_cdf_;
    double log_p1_keep_ = 0.0;    // ln p1 of the only H0-possible outcome
    double sliver_p1_even_ = 1.0;
};

// n i.i.d. outcomes; deterministic in (model, hypothesis, n, seed).
std::vector<double> sample_record(const MeasurementModel& model, Hypothesis h,
                                  int n, std::uint64_t seed);

// Sum of per-outcome log-likelihood ratios of a record.
double record_llr(const MeasurementModel& model, const std::vector<double>& record);

// True = reject H0.  Rejects exactly when record_llr > threshold; outcomes
// impossible under H0 push the sum to +infinity and force rejection.
bool neyman_pearson_test(const std::vector<double>& record,
                         const MeasurementModel& model, double threshold);

struct ExponentEstimate {
    MeasurementKind kind = MeasurementKind::DirectImaging;
    Scenario scenario;
    int n = 0;
    std::int64_t trials = 0;
    double alpha_budget = 0.0;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    double alpha_hat = 0.0;   // achieved false-positive rate on calibration set
    double beta_hat = 0.0;    // empirical type-II rate on fresh H1 records
    Interval beta_ci;         // 95% Wilson
    double exponent_hat = 0.0;  // -ln(beta_hat)/n; +inf when beta_hat = 0
    Interval exponent_ci;
    double predicted_first_order = 0.0;   // D
    double predicted_second_order = 0.0;  // D + sqrt(b/n) Phi^{-1}(delta)
    bool conclusive = true;   // false when beta_hat = 0 (lower bound only)
};

nlohmann::json to_json(const ExponentEstimate& e);

// Calibrates the likelihood-ratio threshold on >= 1e4 H0 records so the
// empirical false-positive rate stays within alpha_budget = delta, then
// measures beta on `trials` fresh H1 records.  Requires trials >= 1000 and,
// for distinguishable hypotheses, an n for which the predicted beta lies in
// [1e-3, 0.3] (outside that window the estimate would be vacuous).
// Deterministic in (model, n, trials, delta, seed) regardless of thread
// count.
ExponentEstimate estimate_type2_exponent(const MeasurementModel& model, int n,
                                         std::int64_t trials, double delta,
                                         std::uint64_t seed);

// Smallest n whose predicted type-II rate falls below beta_max (and inside
// [beta_min, beta_max] whenever the per-step decay permits).
int tune_sample_size(const MeasurementModel& model, double delta,
                     double beta_min = 1e-3, double beta_max = 1e-2);

}  // namespace exodet
