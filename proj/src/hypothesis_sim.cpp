#include "exodet/hypothesis_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "exodet/classical_imaging.hpp"
#include "exodet/errors.hpp"

namespace exodet {

namespace {

constexpr int kSpadeQMax = 64;
constexpr std::uint64_t kSelfCheckSeed = 0x1005e1fc3ec5ULL;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Chi-square goodness-of-fit p-value with greedy grouping so every group
// carries expected mass >= 10 counts; leftover mass joins the last group.
double grouped_chi_square_pvalue(const std::vector<std::int64_t>& counts,
                                 const std::vector<double>& probs,
                                 std::int64_t total) {
    std::vector<double> gp;
    std::vector<std::int64_t> gc;
    double acc_p = 0.0;
    std::int64_t acc_c = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc_p += probs[i];
        acc_c += counts[i];
        if (acc_p * static_cast<double>(total) >= 10.0) {
            gp.push_back(acc_p);
            gc.push_back(acc_c);
            acc_p = 0.0;
            acc_c = 0;
        }
    }
    if (acc_p > 0.0 || acc_c > 0) {
        if (gp.empty()) {
            gp.push_back(acc_p);
            gc.push_back(acc_c);
        } else {
            gp.back() += acc_p;
            gc.back() += acc_c;
        }
    }
    if (gp.size() < 2) return 1.0;
    double stat = 0.0;
    for (std::size_t j = 0; j < gp.size(); ++j) {
        const double e = gp[j] * static_cast<double>(total);
        const double diff = static_cast<double>(gc[j]) - e;
        stat += diff * diff / e;
    }
    return chi_square_survival(stat, static_cast<int>(gp.size()) - 1);
}

// Category probabilities and a categorizer for the sampler self-check.
struct GofPlan {
    std::vector<double> probs;
    std::function<int(double)> categorize;
};

GofPlan gof_plan(const MeasurementModel& m, Hypothesis h) {
    GofPlan plan;
    const Scenario& sc = m.scenario();
    switch (m.kind()) {
        case MeasurementKind::DirectImaging: {
            const int interior = 40;
            const double lo = std::min(0.0, sc.separation) - 5.0 * sc.sigma;
            const double hi = std::max(0.0, sc.separation) + 5.0 * sc.sigma;
            std::vector<double> edges(interior + 1);
            for (int i = 0; i <= interior; ++i) {
                edges[static_cast<std::size_t>(i)] =
                    lo + (hi - lo) * i / interior;
            }
            const double eps = h == Hypothesis::H1 ? sc.epsilon : 0.0;
            auto cdf = [&sc, eps](double x) {
                return (1.0 - eps) * normal_cdf(x / sc.sigma) +
                       eps * normal_cdf((x - sc.separation) / sc.sigma);
            };
            plan.probs.push_back(cdf(edges.front()));
            for (int i = 0; i < interior; ++i) {
                plan.probs.push_back(cdf(edges[static_cast<std::size_t>(i) + 1]) -
                                     cdf(edges[static_cast<std::size_t>(i)]));
            }
            plan.probs.push_back(1.0 - cdf(edges.back()));
            plan.categorize = [edges](double x) {
                const auto it = std::upper_bound(edges.begin(), edges.end(), x);
                return static_cast<int>(it - edges.begin());
            };
            return plan;
        }
        case MeasurementKind::Spade: {
            if (h == Hypothesis::H0) {
                plan.probs = {1.0};
            } else {
                plan.probs = spade_distribution_h1(sc, kSpadeQMax).probabilities;
            }
            plan.categorize = [](double x) { return static_cast<int>(x); };
            return plan;
        }
        case MeasurementKind::Sliver: {
            const double p_even =
                h == Hypothesis::H0 ? 1.0 : std::exp(-sliver_relative_entropy(sc));
            plan.probs = {p_even, 1.0 - p_even};
            plan.categorize = [](double x) { return static_cast<int>(x); };
            return plan;
        }
    }
    throw ContractViolation("unknown measurement kind");
}

void self_check(const MeasurementModel& m) {
    constexpr std::int64_t kSamples = 100000;
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
        const GofPlan plan = gof_plan(m, h);
        std::vector<std::int64_t> counts(plan.probs.size(), 0);
        SplitMix64 rng(derive_seed(kSelfCheckSeed,
                                   static_cast<std::uint64_t>(m.kind()) * 2 +
                                       (h == Hypothesis::H1 ? 1 : 0),
                                   0));
        for (std::int64_t i = 0; i < kSamples; ++i) {
            const int c = plan.categorize(m.sample(h, rng));
            if (c < 0 || c >= static_cast<int>(counts.size())) {
                throw ValidityFailure("sampler produced an out-of-range outcome");
            }
            ++counts[static_cast<std::size_t>(c)];
        }
        const double p = grouped_chi_square_pvalue(counts, plan.probs, kSamples);
        if (!(p > 1e-6)) {
            std::ostringstream os;
            os << "sampler/likelihood mismatch for " << to_string(m.kind())
               << " (goodness-of-fit p = " << p << ")";
            throw ValidityFailure(os.str());
        }
    }
}

// Runs fn(i) for i in [0, m) across threads; writes are indexed, so the
// result is independent of the thread count.
void parallel_for(std::int64_t m, const std::function<void(std::int64_t)>& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min(workers, 8u);
    if (m < 1024 || workers == 1) {
        for (std::int64_t i = 0; i < m; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = (m + workers - 1) / workers;
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
        const std::int64_t beg = static_cast<std::int64_t>(w) * chunk;
        const std::int64_t end = std::min<std::int64_t>(m, beg + chunk);
        if (beg >= end) break;
        threads.emplace_back([beg, end, &fn] {
            for (std::int64_t i = beg; i < end; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

std::vector<double> record_llr_sums(const MeasurementModel& model, Hypothesis h,
                                    int n, std::int64_t m, std::uint64_t seed,
                                    std::uint64_t stream) {
    std::vector<double> sums(static_cast<std::size_t>(m));
    parallel_for(m, [&](std::int64_t i) {
        SplitMix64 rng(derive_seed(seed, stream, static_cast<std::uint64_t>(i)));
        double total = 0.0;
        for (int k = 0; k < n; ++k) {
            total += model.log_likelihood_ratio(model.sample(h, rng));
        }
        sums[static_cast<std::size_t>(i)] = total;
    });
    return sums;
}

}  // namespace

std::string to_string(MeasurementKind k) {
    switch (k) {
        case MeasurementKind::DirectImaging: return "di";
        case MeasurementKind::Spade: return "spade";
        case MeasurementKind::Sliver: return "sliver";
    }
    throw ContractViolation("unknown measurement kind");
}

MeasurementKind measurement_kind_from_string(const std::string& s) {
    if (s == "di") return MeasurementKind::DirectImaging;
    if (s == "spade") return MeasurementKind::Spade;
    if (s == "sliver") return MeasurementKind::Sliver;
    throw ContractViolation("unknown measurement '" + s + "'");
}

MeasurementModel MeasurementModel::make(MeasurementKind kind, const Scenario& sc) {
    sc.validate();
    MeasurementModel m;
    m.kind_ = kind;
    m.scenario_ = sc;
    switch (kind) {
        case MeasurementKind::DirectImaging:
            m.d_ = kl_direct_imaging(sc);
            m.b_ = di_llr_variance(sc);
            break;
        case MeasurementKind::Spade: {
            m.d_ = spade_relative_entropy(sc);
            m.b_ = 0.0;
            m.log_p1_keep_ = -m.d_;
            const OutcomeDistribution dist = spade_distribution_h1(sc, kSpadeQMax);
            double cum = 0.0;
            m.spade_h1_cdf_.reserve(dist.probabilities.size());
            for (double p : dist.probabilities) {
                cum += p;
                m.spade_h1_cdf_.push_back(cum);
            }
            m.spade_h1_cdf_.back() = 1.0;  // absorb rounding in the tail bucket
            break;
        }
        case MeasurementKind::Sliver:
            m.d_ = sliver_relative_entropy(sc);
            m.b_ = 0.0;
            m.log_p1_keep_ = -m.d_;
            m.sliver_p1_even_ = std::exp(-m.d_);
            break;
    }
    self_check(m);
    return m;
}

double MeasurementModel::sample(Hypothesis h, SplitMix64& rng) const {
    switch (kind_) {
        case MeasurementKind::DirectImaging: {
            double mean = 0.0;
            if (h == Hypothesis::H1 && rng.uniform01() < scenario_.epsilon) {
                mean = scenario_.separation;
            }
            return mean + scenario_.sigma * rng.normal();
        }
        case MeasurementKind::Spade: {
            if (h == Hypothesis::H0) return 0.0;
            const double u = rng.uniform01();
            const auto it = std::upper_bound(spade_h1_cdf_.begin(),
                                             spade_h1_cdf_.end(), u);
            return static_cast<double>(it - spade_h1_cdf_.begin());
        }
        case MeasurementKind::Sliver: {
            if (h == Hypothesis::H0) return 0.0;
            return rng.uniform01() < sliver_p1_even_ ? 0.0 : 1.0;
        }
    }
    throw ContractViolation("unknown measurement kind");
}

double MeasurementModel::log_likelihood_ratio(double outcome) const {
    switch (kind_) {
        case MeasurementKind::DirectImaging:
            if (!std::isfinite(outcome)) {
                throw MalformedRecord("position outcome must be finite");
            }
            return di_log_likelihood_ratio(scenario_, outcome);
        case MeasurementKind::Spade: {
            const double q = outcome;
            if (q != std::floor(q) || q < 0.0 ||
                q > static_cast<double>(kSpadeQMax) + 1.0) {
                throw MalformedRecord("mode outcome outside the sorter range");
            }
            if (q == 0.0) return log_p1_keep_;
            return kInf;  // impossible under H0, possible under H1
        }
        case MeasurementKind::Sliver:
            if (outcome == 0.0) return log_p1_keep_;
            if (outcome == 1.0) return kInf;
            throw MalformedRecord("parity outcome must be 0 or 1");
    }
    throw ContractViolation("unknown measurement kind");
}

std::vector<double> sample_record(const MeasurementModel& model, Hypothesis h,
                                  int n, std::uint64_t seed) {
    if (n < 1) throw ContractViolation("record length must be >= 1");
    std::vector<double> record(static_cast<std::size_t>(n));
    SplitMix64 rng(derive_seed(seed, h == Hypothesis::H1 ? 1 : 0, 0));
    for (auto& x : record) x = model.sample(h, rng);
    return record;
}

double record_llr(const MeasurementModel& model, const std::vector<double>& record) {
    if (record.empty()) throw ContractViolation("record must be non-empty");
    double total = 0.0;
    for (double x : record) total += model.log_likelihood_ratio(x);
    return total;
}

bool neyman_pearson_test(const std::vector<double>& record,
                         const MeasurementModel& model, double threshold) {
    return record_llr(model, record) > threshold;
}

ExponentEstimate estimate_type2_exponent(const MeasurementModel& model, int n,
                                         std::int64_t trials, double delta,
                                         std::uint64_t seed) {
    if (n < 1) throw ContractViolation("n must be >= 1");
    if (trials < 1000) throw ContractViolation("trials must be >= 1000");
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ContractViolation("delta must lie in (0, 1)");
    }

    const double d = model.relative_entropy();
    const double b = model.llr_variance();
    const double predicted_second = d + std::sqrt(b / n) * normal_quantile(delta);
    const double predicted_beta = std::min(1.0, std::exp(-n * predicted_second));
    if (d > 0.0 && (predicted_beta < 1e-3 || predicted_beta > 0.3)) {
        std::ostringstream os;
        os << "predicted type-II rate " << predicted_beta << " at n = " << n
           << " is outside [1e-3, 0.3]; pick n so the estimate is measurable";
        throw ContractViolation(os.str());
    }

    const std::int64_t m_cal = std::max<std::int64_t>(10000, trials);
    const std::vector<double> h0_sums =
        record_llr_sums(model, Hypothesis::H0, n, m_cal, seed, 0);
    std::vector<double> sorted = h0_sums;
    std::sort(sorted.begin(), sorted.end());
    const auto k_max =
        static_cast<std::int64_t>(std::floor(delta * static_cast<double>(m_cal)));
    const double threshold = sorted[static_cast<std::size_t>(m_cal - k_max - 1)];
    const std::int64_t rejects =
        sorted.end() -
        std::upper_bound(sorted.begin(), sorted.end(), threshold);

    const std::vector<double> h1_sums =
        record_llr_sums(model, Hypothesis::H1, n, trials, seed, 1);
    const std::int64_t accepts = std::count_if(
        h1_sums.begin(), h1_sums.end(),
        [threshold](double s) { return s <= threshold; });

    ExponentEstimate e;
    e.kind = model.kind();
    e.scenario = model.scenario();
    e.n = n;
    e.trials = trials;
    e.alpha_budget = delta;
    e.seed = seed;
    e.threshold = threshold;
    e.alpha_hat = static_cast<double>(rejects) / static_cast<double>(m_cal);
    e.beta_hat = static_cast<double>(accepts) / static_cast<double>(trials);
    e.beta_ci = wilson_interval(accepts, trials);
    e.conclusive = accepts > 0;
    e.exponent_hat = e.conclusive ? -std::log(e.beta_hat) / n : kInf;
    e.exponent_ci.lo = e.beta_ci.hi > 0.0 ? -std::log(e.beta_ci.hi) / n : kInf;
    e.exponent_ci.hi = e.beta_ci.lo > 0.0 ? -std::log(e.beta_ci.lo) / n : kInf;
    e.predicted_first_order = d;
    e.predicted_second_order = predicted_second;
    return e;
}

int tune_sample_size(const MeasurementModel& model, double delta,
                     double beta_min, double beta_max) {
    if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0)) {
        throw ContractViolation("beta window must satisfy 0 < min < max < 1");
    }
    const double d = model.relative_entropy();
    if (!(d > 0.0)) {
        throw ContractViolation("hypotheses indistinguishable: no feasible n");
    }
    const double b = model.llr_variance();
    const double zq = normal_quantile(delta);
    for (int n = 1; n <= 10000000; ++n) {
        const double log_beta = -(n * d + std::sqrt(n * b) * zq);
        if (log_beta <= std::log(beta_max)) {
            if (log_beta < std::log(beta_min)) {
                throw DomainFailure(
                    "predicted type-II rate skips the requested window; "
                    "the per-sample exponent is too large");
            }
            return n;
        }
    }
    throw DomainFailure("no sample size reaches the requested type-II window");
}

namespace {

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

nlohmann::json to_json(const ExponentEstimate& e) {
    return nlohmann::json{
        {"measurement", to_string(e.kind)},
        {"scenario", to_json(e.scenario)},
        {"n", e.n},
        {"trials", e.trials},
        {"delta", e.alpha_budget},
        {"seed", e.seed},
        {"threshold", e.threshold},
        {"alpha_hat", e.alpha_hat},
        {"beta_hat", e.beta_hat},
        {"beta_ci", {e.beta_ci.lo, e.beta_ci.hi}},
        {"exponent_hat", finite_or_null(e.exponent_hat)},
        {"exponent_ci", {finite_or_null(e.exponent_ci.lo), finite_or_null(e.exponent_ci.hi)}},
        {"predicted_first_order", e.predicted_first_order},
        {"predicted_second_order", e.predicted_second_order},
        {"conclusive", e.conclusive}};
}

}  // namespace exodet
