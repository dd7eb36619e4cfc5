#pragma once

#include <Eigen/Dense>
#include <vector>

#include <json.hpp>

#include "exodet/scene.hpp"

namespace exodet {

// Covariance matrix of a zero-mean Gaussian state over `modes` bosonic
// modes, quadratures ordered (q_1..q_n, p_1..p_n) with vacuum variance 1/2.
struct CovarianceMatrix {
    Eigen::MatrixXd entries;
    int modes = 0;
    // Square 2n x 2n, symmetric to 1e-12, all symplectic eigenvalues
    // >= 1/2 - 1e-10 (uncertainty bound).
    void validate() const;
};

// The three independent entries of the two-mode covariance matrix of the
// collective image modes: variances mu_plus, mu_minus of the symmetric and
// antisymmetric modes and their cross-correlation nu.
struct ThermalSceneCM {
    double mu_plus = 0.5;
    double mu_minus = 0.5;
    double nu = 0.0;
};

// Entries for the two-source thermal scene:
//   mu_pm = ((1 +- omega) N_s + 1) / 2,   nu = (N_s/2) sqrt(1-omega^2) (1-2 eps)
// with omega the aperture overlap at the source separation.  H0 is the
// eps = 0 scene.  N_s is the image-plane mean photon number: any collection
// loss factor rescales the source brightness and the detected N_s together,
// so no separate transmission parameter appears anywhere in the model.
ThermalSceneCM thermal_scene_cm(const Scenario& s, Hypothesis h);

// Assembled 4x4 covariance matrix in the (q+, q-, p+, p-) ordering.  The
// cross-correlation nu sits inside the q-q and p-p blocks (the two collective
// modes are correlated quadrature-by-quadrature; q and p never mix for a
// phase-insensitive source).
CovarianceMatrix build_cm(const Scenario& s, Hypothesis h);

// Sum of h(nu_j - 1/2) over the symplectic spectrum, with
// h(y) = (y+1) ln(y+1) - y ln y and h(0) = 0.
double von_neumann_entropy(const CovarianceMatrix& v);

// Quantum relative entropy D(rho0 || rho1) between zero-mean Gaussian states
// with covariance matrices v0 and v1:
//   D = -S(rho0) + (ln det(V1 + i Omega/2) + Tr[V0 G1]) / 2,
//   G1 = 2 i Omega arccoth(2 V1 i Omega).
// The log-determinant is the eigenvalue sum of the Hermitian matrix
// V1 + i Omega/2; G1 goes through the complex spectral calculus of
// 2 V1 i Omega and is checked to be real-symmetric to 1e-9.  Modes of v1 at
// the vacuum limit are handled exactly: if v0 is also vacuum and uncorrelated
// on those modes they drop out, otherwise the result is +infinity.
double gaussian_relative_entropy(const CovarianceMatrix& v0,
                                 const CovarianceMatrix& v1);

// A published closed-form expression for the thermal-scene relative entropy,
// transcribed term by term and evaluated as printed.  Kept verbatim as a
// reproduction target: it is cross-checked against the numeric route, never
// trusted over it (it diverges from the numeric value in part of the
// parameter range; see thermal_validation_report).  Requires 0 < eps < 1 and
// mean_photons > 0; parameter combinations where a logarithm or inverse
// hyperbolic cotangent leaves its real domain throw DomainFailure.
double qre_thermal_closed(const Scenario& s);

// Leading small-eps behaviour N_s (1 - omega^2) eps.
double qre_thermal_leading(const Scenario& s);

// Grid cross-validation of the closed form against the numeric route.
struct ThermalValidationOptions {
    int epsilon_points = 20;
    double epsilon_min = 1e-3;
    double epsilon_max = 0.3;
    int separation_points = 20;
    double separation_min = 0.1;  // units of sigma
    double separation_max = 4.0;
    std::vector<double> mean_photons = {0.05, 0.5, 5.0};
    double rel_tolerance = 1e-8;
};

// JSON report: one record per grid point with the scenario, both values,
// absolute and relative differences, plus an aggregate summary.
nlohmann::json thermal_validation_report(const ThermalValidationOptions& opts = {});

}  // namespace exodet
