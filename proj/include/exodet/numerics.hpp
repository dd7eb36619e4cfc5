#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace exodet {

// Gauss-Hermite rule for the weight exp(-x^2):
//   integral exp(-x^2) f(x) dx  ~=  sum_i weights[i] * f(nodes[i])
// Nodes whose true weight underflows double precision are omitted; they
// cannot contribute to any representable integrand value.
struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Rules are built once per order and cached (thread safe).
// pre: 16 <= order <= 1024.
const QuadratureRule& gauss_hermite_rule(int order);

// integral f(x) N(x; center, width^2) dx with a normalized Gaussian weight.
// Starts at `order` points and doubles the order until two consecutive
// estimates agree to 1e-10 relative (with an L1-scaled round-off floor) AND
// the preceding refinement already sat within 1e6x of that tolerance, so one
// accidental agreement between under-resolved rungs cannot end the ladder.
// Capped at order 1024; throws AccuracyFailure carrying the last two
// estimates if the cap is hit.
// pre: width > 0, 16 <= order <= 256 (the cap must allow two refinements).
double integrate_gaussian_weighted(const std::function<double(double)>& f,
                                   double center, double width,
                                   int order = 16);

// Physicists' Hermite polynomial H_q(x) by the three-term recurrence.
// pre: 0 <= q <= 64 (throws DomainFailure above the cap, where the
// recurrence overflows for the arguments this library feeds it).
double hermite_polynomial(int q, double x);

struct Spectrum {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
};

// Eigendecomposition of a small dense symmetric matrix.
// pre: square, dimension <= 8, symmetric to 1e-12 (relative to its norm).
Spectrum sym_eig(const Eigen::MatrixXd& m);

// Symplectic form for n modes in (q_1..q_n, p_1..p_n) ordering:
//   Omega = [[0, I], [-I, 0]].
Eigen::MatrixXd symplectic_form(int n_modes);

// Symplectic spectrum of a covariance matrix: the moduli of the eigenvalues
// of i*Omega*V, one per mode, sorted descending.  Validates symmetry and the
// uncertainty bound nu_j >= 1/2 - 1e-10 (throws ValidityFailure naming the
// offending value).
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v);

// Williamson normal form: V = S * diag(nu_1..nu_n, nu_1..nu_n) * S^T with
// S symplectic.  nu sorted descending.
struct WilliamsonForm {
    std::vector<double> nu;
    Eigen::MatrixXd s;
};
WilliamsonForm williamson(const Eigen::MatrixXd& v);

// Inverse of a symplectic matrix via S^{-1} = -Omega S^T Omega.
Eigen::MatrixXd symplectic_inverse(const Eigen::MatrixXd& s);

}  // namespace exodet
