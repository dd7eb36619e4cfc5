#include "exodet/gaussian_thermal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "exodet/errors.hpp"
#include "exodet/numerics.hpp"

namespace exodet {

namespace {

constexpr double kPureTol = 1e-10;     // nu within this of 1/2 counts as pure
constexpr double kSupportTol = 1e-8;   // vacuum-factorization check on v0

// h(y) = (y+1) ln(y+1) - y ln y, the entropy of a thermal mode with mean
// occupation y.
double thermal_h(double y) {
    if (y <= 0.0) return 0.0;
    return (y + 1.0) * std::log1p(y) - y * std::log(y);
}

double arccoth(double x) {
    // 0.5 ln((x+1)/(x-1)) for |x| > 1
    return 0.5 * std::log((x + 1.0) / (x - 1.0));
}

}  // namespace

void CovarianceMatrix::validate() const {
    if (modes < 1) throw ContractViolation("covariance matrix: modes must be >= 1");
    if (entries.rows() != 2 * modes || entries.cols() != 2 * modes) {
        throw ContractViolation("covariance matrix: entries must be 2n x 2n");
    }
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ContractViolation("covariance matrix: entries must be symmetric");
    }
    // Throws ValidityFailure when a symplectic eigenvalue is below the
    // uncertainty bound 1/2 - 1e-10.
    symplectic_eigenvalues(entries);
}

ThermalSceneCM thermal_scene_cm(const Scenario& s, Hypothesis h) {
    s.validate();
    const double eps = h == Hypothesis::H0 ? 0.0 : s.epsilon;
    const double om = overlap_omega(s.separation, s.sigma);
    const double one_minus_om2 = -std::expm1(-s.separation * s.separation /
                                             (4.0 * s.sigma * s.sigma));
    ThermalSceneCM cm;
    cm.mu_plus = 0.5 * ((1.0 + om) * s.mean_photons + 1.0);
    cm.mu_minus = 0.5 * ((1.0 - om) * s.mean_photons + 1.0);
    cm.nu = 0.5 * s.mean_photons * std::sqrt(one_minus_om2) * (1.0 - 2.0 * eps);
    return cm;
}

CovarianceMatrix build_cm(const Scenario& s, Hypothesis h) {
    const ThermalSceneCM t = thermal_scene_cm(s, h);
    CovarianceMatrix v;
    v.modes = 2;
    v.entries = Eigen::MatrixXd::Zero(4, 4);
    Eigen::Matrix2d block;
    block << t.mu_plus, t.nu, t.nu, t.mu_minus;
    v.entries.topLeftCorner(2, 2) = block;      // q-q
    v.entries.bottomRightCorner(2, 2) = block;  // p-p
    v.validate();  // bug trap: valid scenarios always satisfy the bound
    return v;
}

double von_neumann_entropy(const CovarianceMatrix& v) {
    v.validate();
    double total = 0.0;
    for (double nu : symplectic_eigenvalues(v.entries)) {
        total += thermal_h(nu - 0.5);
    }
    return total;
}

namespace {

// ln det(V + i Omega / 2) through the spectrum of the Hermitian matrix.
double log_det_shifted(const Eigen::MatrixXd& v) {
    const int dim = static_cast<int>(v.rows());
    const Eigen::MatrixXd omega = symplectic_form(dim / 2);
    Eigen::MatrixXcd h = v.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
        throw ValidityFailure("log-determinant eigensolve did not converge");
    }
    double sum = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double lam = es.eigenvalues()[k];
        if (!(lam > 0.0)) {
            throw ValidityFailure(
                "log-determinant hit a non-positive eigenvalue on a mixed state");
        }
        sum += std::log(lam);
    }
    return sum;
}

// G = 2 i Omega arccoth(2 V i Omega) through the complex eigendecomposition
// of 2 V i Omega.  The result of the calculus must come out real and
// symmetric; residues above 1e-9 (relative) abort.
Eigen::MatrixXd gibbs_matrix(const Eigen::MatrixXd& v) {
    using Cx = std::complex<double>;
    const int dim = static_cast<int>(v.rows());
    const Eigen::MatrixXcd omega =
        symplectic_form(dim / 2).cast<Cx>();
    const Eigen::MatrixXcd x = Cx(0.0, 2.0) * (v.cast<Cx>() * omega);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(x);
    if (es.info() != Eigen::Success) {
        throw ValidityFailure("Gibbs-matrix eigensolve did not converge");
    }
    Eigen::VectorXcd f(dim);
    for (int k = 0; k < dim; ++k) {
        const Cx lam = es.eigenvalues()[k];
        // arccoth(z) = 0.5 ln((z+1)/(z-1)); eigenvalues are +-2 nu_j with
        // |nu_j| > 1/2 here, so the argument stays off the branch cut.
        f[k] = 0.5 * (std::log(lam + 1.0) - std::log(lam - 1.0));
    }
    const Eigen::MatrixXcd p = es.eigenvectors();
    const Eigen::MatrixXcd g =
        Cx(0.0, 2.0) * omega * (p * f.asDiagonal() * p.inverse());

    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (g.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw ValidityFailure("Gibbs matrix has a non-real residue");
    }
    Eigen::MatrixXd gr = g.real();
    if ((gr - gr.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw ValidityFailure("Gibbs matrix is not symmetric");
    }
    return 0.5 * (gr + gr.transpose());
}

double entropy_from_matrix(const Eigen::MatrixXd& v) {
    double total = 0.0;
    for (double nu : symplectic_eigenvalues(v)) total += thermal_h(nu - 0.5);
    return total;
}

}  // namespace

double gaussian_relative_entropy(const CovarianceMatrix& v0,
                                 const CovarianceMatrix& v1) {
    v0.validate();
    v1.validate();
    if (v0.modes != v1.modes) {
        throw ContractViolation("relative entropy: mode counts differ");
    }
    const int n = v1.modes;

    Eigen::MatrixXd a = v0.entries;
    Eigen::MatrixXd b = v1.entries;

    const std::vector<double> nu1 = symplectic_eigenvalues(b);
    const bool has_pure =
        std::any_of(nu1.begin(), nu1.end(),
                    [](double nu) { return nu <= 0.5 + kPureTol; });
    if (has_pure) {
        // Move to the normal-mode basis of v1.  Modes of v1 at the vacuum
        // limit carry no state freedom: rho0 must factor as vacuum on them
        // (rows of the transformed v0 equal to the identity rows times 1/2),
        // otherwise its support sticks out of supp(rho1).
        const WilliamsonForm w = williamson(b);
        const Eigen::MatrixXd s_inv = symplectic_inverse(w.s);
        const Eigen::MatrixXd a_n = s_inv * a * s_inv.transpose();

        std::vector<int> keep;
        for (int j = 0; j < n; ++j) {
            if (w.nu[static_cast<std::size_t>(j)] > 0.5 + kPureTol) {
                keep.push_back(j);
                continue;
            }
            for (int k = 0; k < 2 * n; ++k) {
                const double want_q = k == j ? 0.5 : 0.0;
                const double want_p = k == n + j ? 0.5 : 0.0;
                if (std::abs(a_n(j, k) - want_q) > kSupportTol ||
                    std::abs(a_n(n + j, k) - want_p) > kSupportTol) {
                    return std::numeric_limits<double>::infinity();
                }
            }
        }
        if (keep.empty()) return 0.0;

        const int m = static_cast<int>(keep.size());
        Eigen::MatrixXd a_red(2 * m, 2 * m);
        Eigen::MatrixXd b_red = Eigen::MatrixXd::Zero(2 * m, 2 * m);
        for (int r = 0; r < m; ++r) {
            const double nu = w.nu[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])];
            b_red(r, r) = nu;
            b_red(m + r, m + r) = nu;
            for (int c = 0; c < m; ++c) {
                const int jr = keep[static_cast<std::size_t>(r)];
                const int jc = keep[static_cast<std::size_t>(c)];
                a_red(r, c) = a_n(jr, jc);
                a_red(r, m + c) = a_n(jr, n + jc);
                a_red(m + r, c) = a_n(n + jr, jc);
                a_red(m + r, m + c) = a_n(n + jr, n + jc);
            }
        }
        a = a_red;
        b = b_red;
    }

    const double s0 = entropy_from_matrix(a);
    const double log_det = log_det_shifted(b);
    const double trace_term = (a * gibbs_matrix(b)).trace();
    return -s0 + 0.5 * (log_det + trace_term);
}

double qre_thermal_closed(const Scenario& s) {
    s.validate();
    if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) {
        throw ContractViolation("closed-form relative entropy needs 0 < eps < 1");
    }
    if (!(s.mean_photons > 0.0)) {
        throw ContractViolation("closed-form relative entropy needs mean_photons > 0");
    }
    const double eps = s.epsilon;
    const double ns = s.mean_photons;
    const double om = overlap_omega(s.separation, s.sigma);
    const double om2 = om * om;
    const double c = 1.0 - om2;

    const double x = 1.0 - 4.0 * c * eps + 4.0 * c * eps * eps;
    const double y = std::sqrt(c) - 2.0 * std::pow(c, 1.5) * eps;
    const double z =
        ns * ns * c * (1.0 - eps) * eps *
        (ns + 1.0 + ns * ns * c * (1.0 - eps) * eps);

    if (!(x > 0.0)) throw DomainFailure("closed form: X must be positive");
    const double x_om = x - x * om2;
    if (!(x_om > 0.0)) {
        throw DomainFailure("closed form: sqrt(X - X omega^2) leaves the real domain");
    }
    if (!(z > 0.0)) throw DomainFailure("closed form: log(Z) leaves the real domain");

    const double sqrt_x = std::sqrt(x);
    const double ratio = ns * y / std::sqrt(x_om);

    const double arg1 = ns + ns * sqrt_x + 1.0;
    const double arg2 = ns - ns * sqrt_x + 1.0;
    if (!(std::abs(arg1) > 1.0) || !(std::abs(arg2) > 1.0)) {
        throw DomainFailure("closed form: arccoth argument inside [-1, 1]");
    }

    return arccoth(arg1) * (ns + ratio + 1.0) +
           arccoth(arg2) * (ns - ratio + 1.0) + ns * std::log(ns) -
           ns * std::log(ns + 1.0) - std::log(ns + 1.0) + 0.5 * std::log(z);
}

double qre_thermal_leading(const Scenario& s) {
    s.validate();
    const double c = -std::expm1(-s.separation * s.separation /
                                 (4.0 * s.sigma * s.sigma));
    return s.mean_photons * c * s.epsilon;
}

nlohmann::json thermal_validation_report(const ThermalValidationOptions& opts) {
    if (opts.epsilon_points < 2 || opts.separation_points < 2 ||
        opts.mean_photons.empty()) {
        throw ContractViolation("validation grid needs >= 2 points per axis");
    }
    nlohmann::json points = nlohmann::json::array();
    int agreements = 0;
    int domain_failures = 0;
    double max_rel_diff = 0.0;

    for (double ns : opts.mean_photons) {
        for (int i = 0; i < opts.epsilon_points; ++i) {
            // geometric spacing: the epsilon range spans decades
            const double t = static_cast<double>(i) / (opts.epsilon_points - 1);
            const double eps = opts.epsilon_min *
                               std::pow(opts.epsilon_max / opts.epsilon_min, t);
            for (int j = 0; j < opts.separation_points; ++j) {
                const double u =
                    static_cast<double>(j) / (opts.separation_points - 1);
                const double sep = opts.separation_min +
                                   (opts.separation_max - opts.separation_min) * u;
                Scenario sc;
                sc.epsilon = eps;
                sc.separation = sep;
                sc.sigma = 1.0;
                sc.mean_photons = ns;

                const double numeric = gaussian_relative_entropy(
                    build_cm(sc, Hypothesis::H0), build_cm(sc, Hypothesis::H1));

                nlohmann::json rec;
                rec["scenario"] = to_json(sc);
                rec["numeric"] = numeric;
                try {
                    const double closed = qre_thermal_closed(sc);
                    const double abs_diff = std::abs(closed - numeric);
                    const double rel_diff =
                        abs_diff / std::max(std::abs(numeric), 1e-300);
                    rec["closed_form"] = closed;
                    rec["abs_diff"] = abs_diff;
                    rec["rel_diff"] = rel_diff;
                    const bool ok = rel_diff <= opts.rel_tolerance;
                    rec["within_tolerance"] = ok;
                    if (ok) {
                        ++agreements;
                    }
                    max_rel_diff = std::max(max_rel_diff, rel_diff);
                } catch (const DomainFailure& e) {
                    rec["closed_form"] = nullptr;
                    rec["closed_form_error"] = e.what();
                    rec["within_tolerance"] = false;
                    ++domain_failures;
                }
                points.push_back(std::move(rec));
            }
        }
    }

    nlohmann::json report;
    report["rel_tolerance"] = opts.rel_tolerance;
    report["points"] = std::move(points);
    report["summary"] = {
        {"total", opts.epsilon_points * opts.separation_points *
                      static_cast<int>(opts.mean_photons.size())},
        {"within_tolerance", agreements},
        {"closed_form_domain_failures", domain_failures},
        {"max_rel_diff", max_rel_diff}};
    return report;
}

}  // namespace exodet
