#include "exodet/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "exodet/errors.hpp"

namespace exodet {

namespace {

constexpr int kMinQuadOrder = 16;
constexpr int kMaxQuadOrder = 1024;

// Orthonormal Hermite function phi_k(x) = H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi)),
// evaluated as mantissa * 2^exp2 so that the e^{-x^2/2} prefactor never
// underflows at the far nodes of high-order rules.
struct ScaledPair {
    double lo;  // phi_{n-1}
    double hi;  // phi_n
    int exp2;
};

ScaledPair hermite_function_pair(int n, double x) {
    const double log2e = std::numbers::log2e;
    double t = -0.5 * x * x * log2e;
    int e = static_cast<int>(std::floor(t));
    double prev = std::pow(std::numbers::pi, -0.25) * std::exp2(t - e);
    double cur = std::numbers::sqrt2 * x * prev;
    for (int k = 1; k < n; ++k) {
        double next = x * std::sqrt(2.0 / (k + 1)) * cur -
                      std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
        double m = std::max(std::abs(prev), std::abs(cur));
        if (m > 1e140) {
            prev = std::ldexp(prev, -500);
            cur = std::ldexp(cur, -500);
            e += 500;
        } else if (m < 1e-140 && m > 0.0) {
            prev = std::ldexp(prev, 500);
            cur = std::ldexp(cur, 500);
            e -= 500;
        }
    }
    return {prev, cur, e};
}

QuadratureRule build_gauss_hermite(int order) {
    // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix for the
    // weight e^{-x^2} (zero diagonal, off-diagonal sqrt(k/2)).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

    QuadratureRule rule;
    rule.order = order;
    rule.nodes.reserve(order);
    rule.weights.reserve(order);
    const double ln_n = std::log(static_cast<double>(order));
    for (int i = 0; i < order; ++i) {
        double x = es.eigenvalues()[i];
        ScaledPair p{0, 0, 0};
        for (int it = 0; it < 2; ++it) {  // Newton polish on phi_n
            p = hermite_function_pair(order, x);
            double deriv = std::sqrt(2.0 * order) * p.lo - x * p.hi;
            if (deriv != 0.0) x -= p.hi / deriv;
        }
        p = hermite_function_pair(order, x);
        // w = e^{-x^2} / (n * phi_{n-1}(x)^2)
        double ln_w = -x * x - ln_n -
                      2.0 * (std::log(std::abs(p.lo)) + p.exp2 * std::numbers::ln2);
        double w = std::exp(ln_w);
        if (w > 0.0 && std::isfinite(w)) {
            rule.nodes.push_back(x);
            rule.weights.push_back(w);
        }
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_hermite_rule(int order) {
    if (order < kMinQuadOrder || order > kMaxQuadOrder)
        throw ContractViolation("gauss_hermite_rule: order must be in [16, 1024]");
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_gauss_hermite(order)).first;
    return it->second;
}

double integrate_gaussian_weighted(const std::function<double(double)>& f,
                                   double center, double width, int order) {
    if (!(width > 0.0))
        throw ContractViolation("integrate_gaussian_weighted: width must be positive");
    // The cap at 1024 must leave room for two refinements (see below), so the
    // starting order stops at 256.
    if (order < kMinQuadOrder || order > kMaxQuadOrder / 4)
        throw ContractViolation("integrate_gaussian_weighted: order must be in [16, 256]");

    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    const double scale = std::numbers::sqrt2 * width;
    auto evaluate = [&](int n, double& l1) {
        const QuadratureRule& rule = gauss_hermite_rule(n);
        double acc = 0.0, abs_acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double v = f(center + scale * rule.nodes[i]);
            acc += rule.weights[i] * v;
            abs_acc += rule.weights[i] * std::abs(v);
        }
        l1 = abs_acc * inv_sqrt_pi;
        return acc * inv_sqrt_pi;
    };

    double l1 = 0.0;
    double prev = evaluate(order, l1);
    double prev_diff = std::numeric_limits<double>::infinity();
    for (int n = order * 2;; n *= 2) {
        double cur = evaluate(n, l1);
        // Relative agreement with a round-off floor scaled by the L1 mass of
        // the integrand, so that integrals that vanish by cancellation (odd
        // integrands) still terminate.
        double tol = 1e-10 * std::abs(cur) +
                     64.0 * std::numeric_limits<double>::epsilon() * l1;
        // A single agreement is trusted only with evidence of a convergent
        // tail: the previous refinement must already sit within six orders of
        // magnitude of the tolerance.  A feature narrower than the coarse
        // rule's node spacing can leave one pair of rungs identical while the
        // estimate is far from the truth (e.g. a step inside the innermost
        // node gap), but it cannot also fake a converging predecessor.
        double diff = std::abs(cur - prev);
        if (diff <= tol && prev_diff <= 1e6 * tol) return cur;
        if (n == kMaxQuadOrder) {
            std::ostringstream msg;
            msg << "integrate_gaussian_weighted: no convergence at order cap "
                << kMaxQuadOrder;
            throw AccuracyFailure(msg.str(), prev, cur);
        }
        prev = cur;
        prev_diff = diff;
    }
}

double hermite_polynomial(int q, double x) {
    if (q < 0) throw ContractViolation("hermite_polynomial: q must be non-negative");
    if (q > 64)
        throw DomainFailure("hermite_polynomial: recurrence capped at q = 64");
    if (q == 0) return 1.0;
    double prev = 1.0, cur = 2.0 * x;
    for (int k = 1; k < q; ++k) {
        double next = 2.0 * x * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

Spectrum sym_eig(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ContractViolation("sym_eig: matrix must be square");
    if (m.rows() < 1 || m.rows() > 8)
        throw ContractViolation("sym_eig: dimension must be in [1, 8]");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ContractViolation("sym_eig: matrix is not symmetric within 1e-12");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const int d = static_cast<int>(m.rows());
    Spectrum s;
    s.eigenvalues.resize(d);
    s.eigenvectors.resize(d, d);
    for (int i = 0; i < d; ++i) {  // Eigen sorts ascending; we report descending
        s.eigenvalues[i] = es.eigenvalues()[d - 1 - i];
        s.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    return s;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    if (n_modes < 1) throw ContractViolation("symplectic_form: need at least one mode");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int j = 0; j < n_modes; ++j) {
        omega(j, n_modes + j) = 1.0;
        omega(n_modes + j, j) = -1.0;
    }
    return omega;
}

namespace {

void check_covariance_shape(const Eigen::MatrixXd& v, const char* who) {
    if (v.rows() != v.cols() || v.rows() < 2 || v.rows() % 2 != 0)
        throw ContractViolation(std::string(who) + ": need a 2n x 2n matrix");
    double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ContractViolation(std::string(who) +
                                ": matrix is not symmetric within 1e-12");
}

}  // namespace

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v) {
    check_covariance_shape(v, "symplectic_eigenvalues");
    const int n = static_cast<int>(v.rows()) / 2;
    Eigen::MatrixXd k = symplectic_form(n) * v;
    Eigen::EigenSolver<Eigen::MatrixXd> es(k, /*computeEigenvectors=*/false);
    std::vector<double> mods(2 * n);
    for (int i = 0; i < 2 * n; ++i) mods[i] = std::abs(es.eigenvalues()[i]);
    std::sort(mods.begin(), mods.end(), std::greater<>());
    std::vector<double> nu(n);
    for (int j = 0; j < n; ++j) {
        double a = mods[2 * j], b = mods[2 * j + 1];
        if (std::abs(a - b) > 1e-8 * std::max(1.0, a))
            throw ValidityFailure("symplectic_eigenvalues: spectrum does not pair up");
        nu[j] = 0.5 * (a + b);
        if (nu[j] < 0.5 - 1e-10) {
            std::ostringstream msg;
            msg << "symplectic_eigenvalues: eigenvalue " << nu[j]
                << " violates the uncertainty bound 1/2";
            throw ValidityFailure(msg.str());
        }
    }
    return nu;
}

WilliamsonForm williamson(const Eigen::MatrixXd& v) {
    check_covariance_shape(v, "williamson");
    const int n = static_cast<int>(v.rows()) / 2;
    Spectrum spec = sym_eig(v);
    if (spec.eigenvalues.minCoeff() <= 0.0)
        throw ValidityFailure("williamson: covariance matrix is not positive definite");

    Eigen::VectorXd sqrt_ev = spec.eigenvalues.cwiseSqrt();
    Eigen::MatrixXd v_half = spec.eigenvectors * sqrt_ev.asDiagonal() *
                             spec.eigenvectors.transpose();
    Eigen::MatrixXd v_half_inv = spec.eigenvectors *
                                 sqrt_ev.cwiseInverse().asDiagonal() *
                                 spec.eigenvectors.transpose();

    Eigen::MatrixXd omega = symplectic_form(n);
    Eigen::MatrixXd sigma = v_half_inv * omega * v_half_inv;
    sigma = 0.5 * (sigma - sigma.transpose().eval());  // enforce antisymmetry

    // Real Schur form of an antisymmetric matrix is block diagonal with
    // 2x2 blocks [[0, kappa], [-kappa, 0]], kappa = 1/nu.
    Eigen::RealSchur<Eigen::MatrixXd> schur(sigma);
    Eigen::MatrixXd t = schur.matrixT();
    Eigen::MatrixXd q = schur.matrixU();

    struct Mode {
        double nu;
        int col;  // first column of its pair in q
        bool flip;
    };
    std::vector<Mode> modes;
    for (int i = 0; i < 2 * n; i += 2) {
        double kappa = 0.5 * (t(i, i + 1) - t(i + 1, i));
        if (std::abs(kappa) < 1e-14)
            throw ValidityFailure("williamson: degenerate symplectic block");
        modes.push_back({1.0 / std::abs(kappa), i, kappa < 0.0});
    }
    std::sort(modes.begin(), modes.end(),
              [](const Mode& a, const Mode& b) { return a.nu > b.nu; });

    Eigen::MatrixXd q_sorted(2 * n, 2 * n);
    Eigen::VectorXd inv_sqrt_nu(2 * n);
    for (int j = 0; j < n; ++j) {
        const Mode& m = modes[j];
        int c0 = m.flip ? m.col + 1 : m.col;
        int c1 = m.flip ? m.col : m.col + 1;
        q_sorted.col(2 * j) = q.col(c0);
        q_sorted.col(2 * j + 1) = q.col(c1);
        inv_sqrt_nu[2 * j] = inv_sqrt_nu[2 * j + 1] = std::sqrt(1.0 / m.nu);
    }

    // S maps interleaved normal modes to the (q.., p..) layout.
    Eigen::MatrixXd s_interleaved = v_half * q_sorted * inv_sqrt_nu.asDiagonal();
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        perm(j, 2 * j) = 1.0;
        perm(n + j, 2 * j + 1) = 1.0;
    }
    WilliamsonForm form;
    form.s = s_interleaved * perm.transpose();
    form.nu.resize(n);
    for (int j = 0; j < n; ++j) form.nu[j] = modes[j].nu;

    Eigen::VectorXd d(2 * n);
    for (int j = 0; j < n; ++j) d[j] = d[n + j] = form.nu[j];
    double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((form.s * d.asDiagonal() * form.s.transpose() - v).cwiseAbs().maxCoeff() >
        1e-9 * scale)
        throw ValidityFailure("williamson: decomposition failed to reconstruct input");
    if ((form.s * omega * form.s.transpose() - omega).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidityFailure("williamson: transform is not symplectic");
    return form;
}

Eigen::MatrixXd symplectic_inverse(const Eigen::MatrixXd& s) {
    const int n = static_cast<int>(s.rows()) / 2;
    Eigen::MatrixXd omega = symplectic_form(n);
    return -omega * s.transpose() * omega;
}

}  // namespace exodet
