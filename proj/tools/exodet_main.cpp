#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "exodet/classical_imaging.hpp"
#include "exodet/errors.hpp"
#include "exodet/gaussian_thermal.hpp"
#include "exodet/hypothesis_sim.hpp"
#include "exodet/measurements.hpp"
#include "exodet/report.hpp"
#include "exodet/scene.hpp"
#include "exodet/single_photon.hpp"

namespace {

using namespace exodet;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInconclusive = 4;

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Shared scenario flags; lengths are in units of sigma unless --sigma is set.
struct ScenarioFlags {
    double epsilon = 0.0;
    double separation = 0.0;
    double sigma = 1.0;
    double mean_photons = 0.0;
    std::string alignment = "centroid-centered";

    void attach(CLI::App* cmd) {
        cmd->add_option("--epsilon", epsilon, "relative companion intensity in [0,1)");
        cmd->add_option("--separation", separation, "source separation (same unit as sigma)");
        cmd->add_option("--sigma", sigma, "PSF width (default 1: lengths in sigma units)");
        cmd->add_option("--mean-photons", mean_photons, "thermal mean photon number per mode");
        cmd->add_option("--alignment", alignment,
                        "star-centered | centroid-centered (default)");
    }

    Scenario build() const {
        Scenario sc;
        sc.epsilon = epsilon;
        sc.separation = separation;
        sc.sigma = sigma;
        sc.mean_photons = mean_photons;
        sc.alignment = alignment_from_string(alignment);
        sc.validate();
        return sc;
    }
};

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty() || output_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw ContractViolation("cannot open '" + output_path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw ContractViolation("write to '" + output_path + "' failed");
}

const std::vector<std::string> kEntropyKinds = {
    "di",       "di-series",        "quantum",        "spade",
    "sliver",   "gaussian-numeric", "gaussian-closed", "spade-thermal"};

bool is_thermal_kind(const std::string& which) {
    return which == "gaussian-numeric" || which == "gaussian-closed" ||
           which == "spade-thermal";
}

struct EntropyValue {
    double value = 0.0;
    std::optional<double> per_photon;
};

EntropyValue compute_entropy(const std::string& which, const Scenario& sc) {
    if (is_thermal_kind(which) && !(sc.mean_photons > 0.0)) {
        throw ContractViolation("'" + which + "' needs --mean-photons > 0");
    }
    if (which == "di") return {kl_direct_imaging(sc), std::nullopt};
    if (which == "di-series") return {kl_direct_imaging_series(sc), std::nullopt};
    if (which == "quantum") return {qre_single_closed(sc), std::nullopt};
    if (which == "spade") return {spade_relative_entropy(sc), std::nullopt};
    if (which == "sliver") return {sliver_relative_entropy(sc), std::nullopt};
    if (which == "gaussian-numeric") {
        const double d = gaussian_relative_entropy(build_cm(sc, Hypothesis::H0),
                                                   build_cm(sc, Hypothesis::H1));
        return {d, d / sc.mean_photons};
    }
    if (which == "gaussian-closed") {
        const double d = qre_thermal_closed(sc);
        return {d, d / sc.mean_photons};
    }
    if (which == "spade-thermal") {
        const double d = spade_thermal_relative_entropy_per_photon(sc);
        return {d, d};
    }
    throw ContractViolation("unknown entropy kind '" + which + "'");
}

std::vector<std::string> scenario_metadata(const Scenario& sc) {
    return {"epsilon = " + format_value(sc.epsilon),
            "separation = " + format_value(sc.separation),
            "sigma = " + format_value(sc.sigma),
            "mean_photons = " + format_value(sc.mean_photons),
            "alignment = " + to_string(sc.alignment)};
}

int run_entropy(const std::string& which, const ScenarioFlags& flags, bool json,
                const std::string& output) {
    const Scenario sc = flags.build();
    const EntropyValue v = compute_entropy(which, sc);
    if (json) {
        nlohmann::json j{{"which", which},
                         {"scenario", to_json(sc)},
                         {"value", v.value}};
        j["value_per_photon"] =
            v.per_photon ? nlohmann::json(*v.per_photon) : nlohmann::json(nullptr);
        emit(j.dump(2) + "\n", output);
        return kExitOk;
    }
    std::string text = "which = " + which + "\n";
    for (const auto& line : scenario_metadata(sc)) text += line + "\n";
    text += "value_nats = " + format_value(v.value) + "\n";
    if (v.per_photon) {
        text += "value_per_photon_nats = " + format_value(*v.per_photon) + "\n";
    }
    emit(text, output);
    return kExitOk;
}

int run_sweep(const std::string& parameter, double from, double to, int points,
              const std::string& scale, const std::vector<std::string>& which,
              const ScenarioFlags& flags, bool json, const std::string& output) {
    if (parameter != "epsilon" && parameter != "separation" &&
        parameter != "mean_photons") {
        throw ContractViolation("sweep parameter must be epsilon, separation or "
                                "mean_photons");
    }
    if (!(from < to)) throw ContractViolation("sweep needs from < to");
    if (points < 2) throw ContractViolation("sweep needs points >= 2");
    if (scale != "linear" && scale != "log") {
        throw ContractViolation("scale must be linear or log");
    }
    if (scale == "log" && !(from > 0.0)) {
        throw ContractViolation("log scale needs from > 0");
    }
    if (which.empty()) throw ContractViolation("sweep needs at least one --which");
    for (const auto& w : which) {
        if (std::find(kEntropyKinds.begin(), kEntropyKinds.end(), w) ==
            kEntropyKinds.end()) {
            throw ContractViolation("unknown entropy kind '" + w + "'");
        }
    }

    std::vector<double> values(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        values[static_cast<std::size_t>(i)] =
            scale == "log" ? from * std::pow(to / from, t) : from + (to - from) * t;
    }

    const Scenario base = flags.build();
    std::vector<CsvColumn> columns;
    columns.push_back({parameter, values});
    for (const auto& w : which) columns.push_back({w, {}});

    nlohmann::json series = nlohmann::json::array();
    for (std::size_t wi = 0; wi < which.size(); ++wi) {
        nlohmann::json vals = nlohmann::json::array();
        for (double pv : values) {
            Scenario sc = base;
            if (parameter == "epsilon") sc.epsilon = pv;
            if (parameter == "separation") sc.separation = pv;
            if (parameter == "mean_photons") sc.mean_photons = pv;
            double out = std::numeric_limits<double>::quiet_NaN();
            try {
                sc.validate();
                out = compute_entropy(which[wi], sc).value;
            } catch (const ContractViolation&) {
                // point outside this operation's domain: blank cell
            } catch (const DomainFailure&) {
            }
            columns[wi + 1].values.push_back(out);
            vals.push_back(std::isfinite(out) ? nlohmann::json(out)
                                              : nlohmann::json(nullptr));
        }
        series.push_back({{"which", which[wi]}, {"values", vals}});
    }

    if (json) {
        nlohmann::json j{{"parameter", parameter}, {"scale", scale},
                         {"scenario", to_json(base)}, {"param_values", values},
                         {"series", series}};
        emit(j.dump(2) + "\n", output);
        return kExitOk;
    }
    std::vector<std::string> meta = {"exodet sweep", "parameter = " + parameter,
                                     "scale = " + scale};
    for (const auto& line : scenario_metadata(base)) meta.push_back(line);
    std::ostringstream os;
    write_csv(os, meta, columns);
    emit(os.str(), output);
    return kExitOk;
}

// Fixed figure recipes; scenario values follow the published plots.
int run_figure(const std::string& name, std::string output,
               const std::string& svg, std::vector<double> eps_list,
               std::vector<double> ns_list) {
    if (output.empty()) output = name + ".csv";
    std::vector<std::string> meta = {"exodet figure " + name,
                                     "lengths in units of sigma"};
    std::vector<CsvColumn> columns;
    std::vector<SvgSeries> series;
    SvgOptions svg_opts;

    if (name == "qre-vs-eps") {
        const double sep = 0.05;
        meta.push_back("separation = 0.05");
        const int points = 41;
        CsvColumn eps_col{"eps", {}}, q_col{"D_quantum", {}}, di_col{"D_di", {}};
        for (int i = 0; i < points; ++i) {
            const double t = static_cast<double>(i) / (points - 1);
            const double eps = 1e-4 * std::pow(100.0, t);  // 1e-4 .. 1e-2
            Scenario sc;
            sc.epsilon = eps;
            sc.separation = sep;
            eps_col.values.push_back(eps);
            q_col.values.push_back(qre_single_closed(sc));
            di_col.values.push_back(kl_direct_imaging(sc));
        }
        columns = {eps_col, q_col, di_col};
        series = {{"D_quantum", eps_col.values, q_col.values},
                  {"D_di", eps_col.values, di_col.values}};
        svg_opts = {720, 480, true, true, "error exponent vs companion fraction",
                    "eps", "D (nats)"};
    } else if (name == "qre-vs-sep") {
        if (eps_list.empty()) eps_list = {0.01, 0.05, 0.1};
        const int points = 120;
        CsvColumn sep_col{"sep", {}};
        for (int i = 0; i < points; ++i) {
            sep_col.values.push_back(0.05 + (6.0 - 0.05) * i / (points - 1));
        }
        columns.push_back(sep_col);
        for (double eps : eps_list) {
            CsvColumn q_col{"D_quantum_eps_" + format_value(eps), {}};
            CsvColumn di_col{"D_di_eps_" + format_value(eps), {}};
            for (double sep : sep_col.values) {
                Scenario sc;
                sc.epsilon = eps;
                sc.separation = sep;
                q_col.values.push_back(qre_single_closed(sc));
                di_col.values.push_back(kl_direct_imaging(sc));
            }
            series.push_back({q_col.name, sep_col.values, q_col.values});
            series.push_back({di_col.name, sep_col.values, di_col.values});
            columns.push_back(std::move(q_col));
            columns.push_back(std::move(di_col));
        }
        svg_opts = {720, 480, false, true, "error exponents vs separation",
                    "s / sigma", "D (nats)"};
    } else if (name == "thermal-per-photon") {
        if (ns_list.empty()) ns_list = {0.1, 1.0, 10.0};
        meta.push_back("epsilon = 0.05");
        const int points = 80;
        CsvColumn sep_col{"sep", {}};
        for (int i = 0; i < points; ++i) {
            sep_col.values.push_back(0.1 + (4.0 - 0.1) * i / (points - 1));
        }
        columns.push_back(sep_col);
        for (double ns : ns_list) {
            CsvColumn col{"D_per_photon_ns_" + format_value(ns), {}};
            for (double sep : sep_col.values) {
                Scenario sc;
                sc.epsilon = 0.05;
                sc.separation = sep;
                sc.mean_photons = ns;
                const double d = gaussian_relative_entropy(
                    build_cm(sc, Hypothesis::H0), build_cm(sc, Hypothesis::H1));
                col.values.push_back(d / ns);
            }
            series.push_back({col.name, sep_col.values, col.values});
            columns.push_back(std::move(col));
        }
        svg_opts = {720, 480, false, false,
                    "thermal relative entropy per photon", "s / sigma",
                    "D / N_s (nats)"};
    } else if (name == "spade-thermal") {
        if (ns_list.empty()) ns_list = {0.1, 0.5};
        meta.push_back("epsilon = 0.01");
        const int points = 80;
        CsvColumn sep_col{"sep", {}};
        for (int i = 0; i < points; ++i) {
            sep_col.values.push_back(0.1 + (4.0 - 0.1) * i / (points - 1));
        }
        columns.push_back(sep_col);
        CsvColumn qre_col{"qre_single", {}}, spade_col{"spade_single", {}};
        for (double sep : sep_col.values) {
            Scenario sc;
            sc.epsilon = 0.01;
            sc.separation = sep;
            qre_col.values.push_back(qre_single_closed(sc));
            spade_col.values.push_back(spade_relative_entropy(sc));
        }
        series.push_back({qre_col.name, sep_col.values, qre_col.values});
        series.push_back({spade_col.name, sep_col.values, spade_col.values});
        columns.push_back(qre_col);
        columns.push_back(spade_col);
        for (double ns : ns_list) {
            CsvColumn col{"spade_thermal_ns_" + format_value(ns), {}};
            for (double sep : sep_col.values) {
                Scenario sc;
                sc.epsilon = 0.01;
                sc.separation = sep;
                sc.mean_photons = ns;
                col.values.push_back(spade_thermal_relative_entropy_per_photon(sc));
            }
            series.push_back({col.name, sep_col.values, col.values});
            columns.push_back(std::move(col));
        }
        svg_opts = {720, 480, false, false,
                    "mode-sorter exponents, single photon vs thermal",
                    "s / sigma", "D per photon (nats)"};
    } else {
        throw ContractViolation("unknown figure '" + name + "'");
    }

    write_csv_file(output, meta, columns);
    if (!svg.empty()) write_svg_file(svg, series, svg_opts);
    return kExitOk;
}

int run_simulate(const std::string& measurement, const ScenarioFlags& flags,
                 int n, std::int64_t trials, double delta, std::uint64_t seed,
                 const std::string& output) {
    const Scenario sc = flags.build();
    const MeasurementModel model =
        MeasurementModel::make(measurement_kind_from_string(measurement), sc);
    if (n <= 0) n = tune_sample_size(model, delta);
    const ExponentEstimate est = estimate_type2_exponent(model, n, trials, delta, seed);
    emit(to_json(est).dump(2) + "\n", output);
    if (!est.conclusive) {
        std::cerr << "inconclusive: no type-II errors observed; only a lower "
                     "bound on the exponent is available\n";
        return kExitInconclusive;
    }
    return kExitOk;
}

int run_validate_thermal(int eps_points, int sep_points,
                         const std::vector<double>& ns_list, double tolerance,
                         const std::string& output) {
    ThermalValidationOptions opts;
    opts.epsilon_points = eps_points;
    opts.separation_points = sep_points;
    if (!ns_list.empty()) opts.mean_photons = ns_list;
    opts.rel_tolerance = tolerance;
    emit(thermal_validation_report(opts).dump(2) + "\n", output);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"error exponents for faint-companion detection at the "
                 "diffraction limit"};
    app.require_subcommand(1);

    std::function<int()> task;

    // entropy
    auto* entropy = app.add_subcommand("entropy", "evaluate one error exponent");
    static ScenarioFlags entropy_flags;
    static std::string entropy_which;
    static bool entropy_json = false;
    static std::string entropy_output;
    entropy->add_option("--which", entropy_which, "quantity to evaluate")
        ->required()
        ->check(CLI::IsMember(kEntropyKinds));
    entropy_flags.attach(entropy);
    entropy->add_flag("--json", entropy_json, "emit JSON instead of text");
    entropy->add_option("--output", entropy_output, "output path (default stdout)");
    entropy->callback([&] {
        task = [] {
            return run_entropy(entropy_which, entropy_flags, entropy_json,
                               entropy_output);
        };
    });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "sweep one scenario parameter");
    static ScenarioFlags sweep_flags;
    static std::string sweep_parameter;
    static double sweep_from = 0.0, sweep_to = 0.0;
    static int sweep_points = 0;
    static std::string sweep_scale = "linear";
    static std::vector<std::string> sweep_which;
    static bool sweep_json = false;
    static std::string sweep_output;
    sweep->add_option("--parameter", sweep_parameter, "epsilon | separation | mean_photons")
        ->required();
    sweep->add_option("--from", sweep_from, "start value")->required();
    sweep->add_option("--to", sweep_to, "end value")->required();
    sweep->add_option("--points", sweep_points, "grid size (>= 2)")->required();
    sweep->add_option("--scale", sweep_scale, "linear (default) | log");
    sweep->add_option("--which", sweep_which, "quantities (repeat or comma-separate)")
        ->required()
        ->delimiter(',');
    sweep_flags.attach(sweep);
    sweep->add_flag("--json", sweep_json, "emit JSON instead of CSV");
    sweep->add_option("--output", sweep_output, "output path (default stdout)");
    sweep->callback([&] {
        task = [] {
            return run_sweep(sweep_parameter, sweep_from, sweep_to, sweep_points,
                             sweep_scale, sweep_which, sweep_flags, sweep_json,
                             sweep_output);
        };
    });

    // figure
    auto* figure = app.add_subcommand("figure", "write a published-figure dataset");
    static std::string figure_name;
    static std::string figure_output;
    static std::string figure_svg;
    static std::vector<double> figure_eps_list;
    static std::vector<double> figure_ns_list;
    figure->add_option("--name", figure_name, "figure to produce")
        ->required()
        ->check(CLI::IsMember({"qre-vs-eps", "qre-vs-sep", "thermal-per-photon",
                               "spade-thermal"}));
    figure->add_option("--output", figure_output, "CSV path (default <name>.csv)");
    figure->add_option("--svg", figure_svg, "also render a line plot to this path");
    figure->add_option("--eps-list", figure_eps_list,
                       "companion fractions for qre-vs-sep (default 0.01,0.05,0.1)")
        ->delimiter(',');
    figure->add_option("--ns-list", figure_ns_list,
                       "thermal photon numbers (defaults per figure)")
        ->delimiter(',');
    figure->callback([&] {
        task = [] {
            return run_figure(figure_name, figure_output, figure_svg,
                              figure_eps_list, figure_ns_list);
        };
    });

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "Monte Carlo estimate of the type-II error exponent");
    static ScenarioFlags sim_flags;
    static std::string sim_measurement;
    static int sim_n = 0;
    static std::int64_t sim_trials = 10000;
    static double sim_delta = 0.05;
    static std::uint64_t sim_seed = 42;
    static std::string sim_output;
    simulate->add_option("--measurement", sim_measurement, "di | spade | sliver")
        ->required()
        ->check(CLI::IsMember({"di", "spade", "sliver"}));
    sim_flags.attach(simulate);
    simulate->add_option("--n", sim_n,
                         "photons per trial (omit to auto-tune for beta ~ 1e-3..1e-2)");
    simulate->add_option("--trials", sim_trials, "H1 records for the beta estimate");
    simulate->add_option("--delta", sim_delta, "type-I error budget (default 0.05)");
    simulate->add_option("--seed", sim_seed, "RNG seed (default 42)");
    simulate->add_option("--output", sim_output, "output path (default stdout)");
    simulate->callback([&] {
        task = [] {
            return run_simulate(sim_measurement, sim_flags, sim_n, sim_trials,
                                sim_delta, sim_seed, sim_output);
        };
    });

    // validate-thermal
    auto* validate = app.add_subcommand(
        "validate-thermal", "cross-check the thermal closed form on a grid");
    static int val_eps_points = 20;
    static int val_sep_points = 20;
    static std::vector<double> val_ns_list;
    static double val_tolerance = 1e-8;
    static std::string val_output;
    validate->add_option("--eps-points", val_eps_points, "epsilon grid size");
    validate->add_option("--sep-points", val_sep_points, "separation grid size");
    validate->add_option("--ns-list", val_ns_list,
                         "photon numbers (default 0.05,0.5,5)")
        ->delimiter(',');
    validate->add_option("--tolerance", val_tolerance,
                         "relative agreement threshold (default 1e-8)");
    validate->add_option("--output", val_output, "output path (default stdout)");
    validate->callback([&] {
        task = [] {
            return run_validate_thermal(val_eps_points, val_sep_points,
                                        val_ns_list, val_tolerance, val_output);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return task ? task() : kExitUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainFailure& e) {
        std::cerr << "domain failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const AccuracyFailure& e) {
        std::cerr << "accuracy failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ValidityFailure& e) {
        std::cerr << "validity failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const MalformedRecord& e) {
        std::cerr << "malformed record: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
