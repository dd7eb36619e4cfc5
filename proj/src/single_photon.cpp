#include "exodet/single_photon.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "exodet/errors.hpp"
#include "exodet/numerics.hpp"

namespace exodet {

namespace {

constexpr double kSupportTol = 1e-12;

}  // namespace

void DensityMatrix::validate() const {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw ContractViolation("density matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ContractViolation("density matrix must be symmetric");
    }
    if (std::abs(m.trace() - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "density matrix trace " << m.trace() << " is not 1";
        throw ContractViolation(os.str());
    }
    const Spectrum spec = sym_eig(m);
    for (double lam : spec.eigenvalues) {
        if (lam < -1e-12) {
            std::ostringstream os;
            os << "density matrix has negative eigenvalue " << lam;
            throw ContractViolation(os.str());
        }
    }
}

std::pair<DensityMatrix, DensityMatrix> single_photon_states(const Scenario& s) {
    s.validate();
    const double om = overlap_omega(s.separation, s.sigma);
    // 1 - omega^2 via expm1 so tiny separations keep full precision.
    const double c = -std::expm1(-s.separation * s.separation /
                                 (4.0 * s.sigma * s.sigma));
    const double eps = s.epsilon;

    DensityMatrix rho0;
    rho0.m = Eigen::MatrixXd::Zero(2, 2);
    rho0.m(0, 0) = 1.0;

    DensityMatrix rho1;
    rho1.m = Eigen::MatrixXd::Zero(2, 2);
    rho1.m(0, 0) = 1.0 - eps * c;
    rho1.m(1, 1) = eps * c;
    rho1.m(0, 1) = rho1.m(1, 0) = eps * om * std::sqrt(c);

    rho0.validate();
    rho1.validate();
    return {std::move(rho0), std::move(rho1)};
}

double qre_from_states(const DensityMatrix& rho0, const DensityMatrix& rho1) {
    rho0.validate();
    rho1.validate();
    if (rho0.m.rows() != rho1.m.rows()) {
        throw ContractViolation("density matrices must have equal dimension");
    }

    const Spectrum s0 = sym_eig(rho0.m);
    const Spectrum s1 = sym_eig(rho1.m);

    double tr0 = 0.0;  // Tr[rho0 ln rho0]
    for (double lam : s0.eigenvalues) {
        if (lam > kSupportTol) tr0 += lam * std::log(lam);
    }

    double tr01 = 0.0;       // Tr[rho0 ln rho1]
    double null_mass = 0.0;  // weight of rho0 outside supp(rho1)
    for (int k = 0; k < s1.eigenvectors.cols(); ++k) {
        const Eigen::VectorXd v = s1.eigenvectors.col(k);
        const double w = v.dot(rho0.m * v);
        if (s1.eigenvalues[static_cast<std::size_t>(k)] > kSupportTol) {
            tr01 += w * std::log(s1.eigenvalues[static_cast<std::size_t>(k)]);
        } else {
            null_mass += std::max(0.0, w);
        }
    }
    if (null_mass > kSupportTol) {
        return std::numeric_limits<double>::infinity();
    }
    return tr0 - tr01;
}

double qre_single_closed(const Scenario& s) {
    s.validate();
    const double eps = s.epsilon;
    const double om2 = std::exp(-s.separation * s.separation /
                                (4.0 * s.sigma * s.sigma));
    const double c = -std::expm1(-s.separation * s.separation /
                                 (4.0 * s.sigma * s.sigma));  // 1 - omega^2

    if (eps == 0.0 || c == 0.0) return 0.0;
    if (eps * c < 1e-14) return eps * c;      // leading order dominates noise
    if (om2 < 1e-150) return -std::log1p(-eps);  // orthogonal sources

    const double cc = 4.0 * eps * (1.0 - eps) * c;
    const double u = std::sqrt(1.0 - cc);
    const double onemu = cc / (1.0 + u);  // 1 - u, exact
    const double onepu = 1.0 + u;
    const double denom = 1.0 - 2.0 * eps + u;  // > 0 for eps < 1

    // Weight of rho0 on the small eigenvector of rho1, written so the
    // numerator's double cancellation (1 - u - 2 eps (1 - omega^2)) never
    // happens in floating point.
    const double t1 = -4.0 * eps * (1.0 - eps) * om2 / denom;  // 1 - u - 2 eps
    const double n_neg_root = -2.0 * eps * om2 * onemu / denom;
    const double n_neg = n_neg_root * n_neg_root;
    const double d_neg = t1 * t1 + 4.0 * eps * (onemu - eps) * om2;
    const double term_neg =
        d_neg > 0.0 ? -(n_neg / d_neg) * std::log(onemu / 2.0) : 0.0;

    const double p_pos_root = onepu - 2.0 * eps + 2.0 * eps * om2;
    const double n_pos = p_pos_root * p_pos_root;
    const double t2 = onepu - 2.0 * eps;
    const double d_pos = t2 * t2 + 4.0 * eps * (onepu - eps) * om2;
    const double term_pos = -(n_pos / d_pos) * std::log1p(-onemu / 2.0);

    return term_neg + term_pos;
}

double qre_single_leading(const Scenario& s) {
    s.validate();
    return s.epsilon * (-std::expm1(-s.separation * s.separation /
                                    (4.0 * s.sigma * s.sigma)));
}

}  // namespace exodet
