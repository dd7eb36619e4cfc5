#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "exodet/errors.hpp"
#include "exodet/numerics.hpp"
#include "exodet/rng.hpp"

using namespace exodet;

namespace {

// Embed a 2x2 single-mode transform acting on (q_k, p_k) into the 2n x 2n
// (q..q, p..p) ordering.
Eigen::MatrixXd embed_mode(const Eigen::Matrix2d& g, int k, int n) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    s(k, k) = g(0, 0);
    s(k, n + k) = g(0, 1);
    s(n + k, k) = g(1, 0);
    s(n + k, n + k) = g(1, 1);
    return s;
}

Eigen::Matrix2d rotation2(double theta) {
    Eigen::Matrix2d g;
    g << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return g;
}

Eigen::Matrix2d squeezer2(double r) {
    Eigen::Matrix2d g;
    g << std::exp(r), 0.0, 0.0, std::exp(-r);
    return g;
}

// Beamsplitter between modes 0 and 1 of an n-mode system: the same rotation
// on the q block and on the p block, which preserves Omega.
Eigen::MatrixXd beamsplitter(double theta, int n) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double c = std::cos(theta), sn = std::sin(theta);
    s(0, 0) = c;
    s(0, 1) = sn;
    s(1, 0) = -sn;
    s(1, 1) = c;
    s(n, n) = c;
    s(n, n + 1) = sn;
    s(n + 1, n) = -sn;
    s(n + 1, n + 1) = c;
    return s;
}

Eigen::MatrixXd random_symplectic(int n, SplitMix64& rng) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        s = embed_mode(rotation2(2.0 * std::numbers::pi * rng.uniform01()), k, n) * s;
        s = embed_mode(squeezer2(0.8 * (rng.uniform01() - 0.5)), k, n) * s;
    }
    if (n >= 2) s = beamsplitter(2.0 * std::numbers::pi * rng.uniform01(), n) * s;
    for (int k = 0; k < n; ++k)
        s = embed_mode(rotation2(2.0 * std::numbers::pi * rng.uniform01()), k, n) * s;
    return s;
}

}  // namespace

TEST_CASE("gauss_hermite_rule: weights positive, nodes symmetric, total mass sqrt(pi)") {
    for (int order : {16, 32, 64, 128, 512, 1024}) {
        const QuadratureRule& rule = gauss_hermite_rule(order);
        CHECK(rule.order == order);
        CHECK(rule.nodes.size() == rule.weights.size());
        CHECK(!rule.nodes.empty());
        double total = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            total += w;
        }
        CHECK(total == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
        // Node set is symmetric about the origin.
        double min_plus_max = rule.nodes.front() + rule.nodes.back();
        CHECK(std::abs(min_plus_max) < 1e-12);
    }
}

TEST_CASE("gauss_hermite_rule: rejects orders outside [16, 1024]") {
    CHECK_THROWS_AS(gauss_hermite_rule(8), ContractViolation);
    CHECK_THROWS_AS(gauss_hermite_rule(2048), ContractViolation);
}

TEST_CASE("integrate_gaussian_weighted: exact moments of the Gaussian weight") {
    for (double width : {0.3, 1.0, 2.5}) {
        for (double center : {0.0, -1.5, 4.0}) {
            double one = integrate_gaussian_weighted([](double) { return 1.0; },
                                                     center, width);
            CHECK(one == doctest::Approx(1.0).epsilon(1e-12));
            double mean = integrate_gaussian_weighted([](double x) { return x; },
                                                      center, width);
            CHECK(std::abs(mean - center) < 1e-12 * std::max(1.0, std::abs(center)));
            double second = integrate_gaussian_weighted(
                [](double x) { return x * x; }, center, width);
            double expected = center * center + width * width;
            CHECK(second == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("integrate_gaussian_weighted: centered odd integrand integrates to zero") {
    double v = integrate_gaussian_weighted([](double x) { return x * x * x; }, 0.0, 1.0);
    CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("integrate_gaussian_weighted: precondition failures") {
    auto f = [](double x) { return x; };
    CHECK_THROWS_AS(integrate_gaussian_weighted(f, 0.0, 0.0), ContractViolation);
    CHECK_THROWS_AS(integrate_gaussian_weighted(f, 0.0, -1.0), ContractViolation);
    CHECK_THROWS_AS(integrate_gaussian_weighted(f, 0.0, 1.0, 8), ContractViolation);
    // starting orders above 256 leave no room to confirm convergence
    CHECK_THROWS_AS(integrate_gaussian_weighted(f, 0.0, 1.0, 512), ContractViolation);
}

TEST_CASE("integrate_gaussian_weighted: non-smooth integrand hits the order cap "
          "and the failure carries both estimates") {
    // A step inside the bulk of the weight defeats polynomial quadrature.
    auto step = [](double x) { return x > 0.25 ? 1.0 : 0.0; };
    const double truth = 0.5 * std::erfc(0.25 / std::numbers::sqrt2);
    bool threw = false;
    try {
        integrate_gaussian_weighted(step, 0.0, 1.0);
    } catch (const AccuracyFailure& e) {
        threw = true;
        // Both stashed estimates are still in the right neighbourhood.
        CHECK(std::abs(e.previous - truth) < 0.05);
        CHECK(std::abs(e.last - truth) < 0.05);
    }
    CHECK(threw);
}

TEST_CASE("hermite_polynomial: pinned low-order values") {
    CHECK(hermite_polynomial(0, 0.7) == 1.0);
    CHECK(hermite_polynomial(0, -3.0) == 1.0);
    CHECK(hermite_polynomial(1, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(hermite_polynomial(2, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(hermite_polynomial(3, 1.0) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("hermite_polynomial: matches an explicit recurrence at random points") {
    SplitMix64 rng(0xabcdef12u);
    for (int trial = 0; trial < 100; ++trial) {
        double x = 6.0 * (rng.uniform01() - 0.5);
        double hm1 = 0.0, h = 1.0;  // H_{-1} = 0, H_0 = 1
        for (int q = 0; q <= 20; ++q) {
            CAPTURE(q);
            CAPTURE(x);
            CHECK(hermite_polynomial(q, x) ==
                  doctest::Approx(h).epsilon(1e-12).scale(std::abs(h) + 1.0));
            double next = 2.0 * x * h - 2.0 * q * hm1;
            hm1 = h;
            h = next;
        }
    }
}

TEST_CASE("hermite_polynomial: degree bounds") {
    CHECK_THROWS_AS(hermite_polynomial(-1, 0.0), ContractViolation);
    CHECK_THROWS_AS(hermite_polynomial(65, 0.0), DomainFailure);
    CHECK_NOTHROW(hermite_polynomial(64, 0.5));
}

TEST_CASE("sym_eig: pinned small cases") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    Spectrum s = sym_eig(id);
    CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(1.0));

    Eigen::MatrixXd d(2, 2);
    d << 3.0, 0.0, 0.0, 1.0;
    s = sym_eig(d);
    CHECK(s.eigenvalues(0) == doctest::Approx(3.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.eigenvectors(1, 1)) == doctest::Approx(1.0));

    Eigen::MatrixXd x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    s = sym_eig(x);
    CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(-1.0));
}

TEST_CASE("sym_eig: contract errors") {
    Eigen::MatrixXd rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(sym_eig(rect), ContractViolation);

    Eigen::MatrixXd big = Eigen::MatrixXd::Identity(9, 9);
    CHECK_THROWS_AS(sym_eig(big), ContractViolation);

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(sym_eig(asym), ContractViolation);
}

TEST_CASE("sym_eig: reconstruction and orthonormality on random symmetric matrices") {
    SplitMix64 rng(0x51d2u);
    for (int trial = 0; trial < 200; ++trial) {
        int dim = 1 + static_cast<int>(rng.uniform01() * 8.0);
        if (dim > 8) dim = 8;
        Eigen::MatrixXd a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = 2.0 * rng.uniform01() - 1.0;
        Eigen::MatrixXd m = 0.5 * (a + a.transpose());
        Spectrum sp = sym_eig(m);

        Eigen::MatrixXd rebuilt = sp.eigenvectors * sp.eigenvalues.asDiagonal() *
                                  sp.eigenvectors.transpose();
        double scale = std::max(1.0, m.norm());
        CHECK((rebuilt - m).norm() <= 1e-12 * scale);

        Eigen::MatrixXd gram = sp.eigenvectors.transpose() * sp.eigenvectors;
        CHECK((gram - Eigen::MatrixXd::Identity(dim, dim)).norm() <= 1e-12 * dim);

        for (int i = 0; i + 1 < dim; ++i)
            CHECK(sp.eigenvalues(i) >= sp.eigenvalues(i + 1));
    }
}

TEST_CASE("symplectic_form: block structure and Omega^2 = -I") {
    for (int n : {1, 2, 3}) {
        Eigen::MatrixXd omega = symplectic_form(n);
        CHECK(omega.rows() == 2 * n);
        Eigen::MatrixXd sq = omega * omega;
        CHECK((sq + Eigen::MatrixXd::Identity(2 * n, 2 * n)).norm() < 1e-15);
        CHECK((omega + omega.transpose()).norm() < 1e-15);
    }
    Eigen::MatrixXd o1 = symplectic_form(1);
    CHECK(o1(0, 1) == 1.0);
    CHECK(o1(1, 0) == -1.0);
}

TEST_CASE("symplectic_eigenvalues: vacuum and single-mode thermal spectra") {
    for (int n : {1, 2, 3}) {
        Eigen::MatrixXd vac = 0.5 * Eigen::MatrixXd::Identity(2 * n, 2 * n);
        std::vector<double> nu = symplectic_eigenvalues(vac);
        REQUIRE(nu.size() == static_cast<std::size_t>(n));
        for (double v : nu) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }
    for (double nbar : {0.1, 0.5, 5.0}) {
        Eigen::MatrixXd v = (nbar + 0.5) * Eigen::MatrixXd::Identity(2, 2);
        std::vector<double> nu = symplectic_eigenvalues(v);
        CHECK(nu[0] == doctest::Approx(nbar + 0.5).epsilon(1e-12));
    }
}

TEST_CASE("symplectic_eigenvalues: correlated two-mode thermal block gives {0.7, 0.5}") {
    // Mean photon number 0.2 split over two modes overlapping with omega = 0.5
    // and no companion light: mu_pm = ((1 +- 0.5) * 0.2 + 1) / 2 and the
    // cross term 0.1 * sqrt(1 - 0.25).  One collective mode carries all the
    // excitation (nu = 0.7), the other is vacuum (nu = 0.5).
    const double mu_p = 0.65, mu_m = 0.55;
    const double nu_c = 0.1 * std::sqrt(0.75);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
    v(0, 0) = mu_p;
    v(0, 1) = nu_c;
    v(1, 0) = nu_c;
    v(1, 1) = mu_m;
    v.block(2, 2, 2, 2) = v.block(0, 0, 2, 2);
    std::vector<double> nu = symplectic_eigenvalues(v);
    REQUIRE(nu.size() == 2);
    CHECK(nu[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(nu[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("symplectic_eigenvalues: rejects unphysical and malformed input") {
    Eigen::MatrixXd below = 0.4 * Eigen::MatrixXd::Identity(2, 2);
    bool threw = false;
    try {
        symplectic_eigenvalues(below);
    } catch (const ValidityFailure& e) {
        threw = true;
        CHECK(std::string(e.what()).find("0.4") != std::string::npos);
    }
    CHECK(threw);

    Eigen::MatrixXd odd = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(symplectic_eigenvalues(odd), ContractViolation);

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.3, -0.3, 1.0;
    CHECK_THROWS_AS(symplectic_eigenvalues(asym), ContractViolation);
}

TEST_CASE("williamson: reconstructs the covariance and returns a symplectic transform") {
    SplitMix64 rng(0x77123u);
    for (int trial = 0; trial < 150; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform01() * 2.0);
        if (n > 2) n = 2;
        Eigen::VectorXd nus(n);
        for (int k = 0; k < n; ++k) nus(k) = 0.5 + 2.0 * rng.uniform01();
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (int k = 0; k < n; ++k) {
            d(k, k) = nus(k);
            d(n + k, n + k) = nus(k);
        }
        Eigen::MatrixXd s = random_symplectic(n, rng);
        Eigen::MatrixXd v = s * d * s.transpose();
        v = 0.5 * (v + v.transpose());

        WilliamsonForm wf = williamson(v);
        REQUIRE(wf.nu.size() == static_cast<std::size_t>(n));

        std::sort(nus.data(), nus.data() + n, std::greater<>());
        for (int k = 0; k < n; ++k)
            CHECK(wf.nu[static_cast<std::size_t>(k)] ==
                  doctest::Approx(nus(k)).epsilon(1e-9));

        Eigen::MatrixXd dd = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (int k = 0; k < n; ++k) {
            dd(k, k) = wf.nu[static_cast<std::size_t>(k)];
            dd(n + k, n + k) = wf.nu[static_cast<std::size_t>(k)];
        }
        CHECK((wf.s * dd * wf.s.transpose() - v).norm() <= 1e-8 * std::max(1.0, v.norm()));

        Eigen::MatrixXd omega = symplectic_form(n);
        CHECK((wf.s * omega * wf.s.transpose() - omega).norm() <= 1e-8);

        // Inverse identity -Omega S^T Omega.
        Eigen::MatrixXd inv = symplectic_inverse(wf.s);
        CHECK((inv * wf.s - Eigen::MatrixXd::Identity(2 * n, 2 * n)).norm() <= 1e-8);
    }
}

TEST_CASE("symplectic_eigenvalues: invariant under random symplectic transforms") {
    SplitMix64 rng(0x9e3779b9u);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform01() * 2.0);
        if (n > 2) n = 2;
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        std::vector<double> expect(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            double nu = 0.5 + 3.0 * rng.uniform01();
            expect[static_cast<std::size_t>(k)] = nu;
            d(k, k) = nu;
            d(n + k, n + k) = nu;
        }
        std::sort(expect.begin(), expect.end(), std::greater<>());
        Eigen::MatrixXd s = random_symplectic(n, rng);
        Eigen::MatrixXd v = s * d * s.transpose();
        v = 0.5 * (v + v.transpose());
        std::vector<double> nu = symplectic_eigenvalues(v);
        REQUIRE(nu.size() == expect.size());
        for (std::size_t k = 0; k < nu.size(); ++k)
            CHECK(nu[k] == doctest::Approx(expect[k]).epsilon(1e-10));
    }
}
