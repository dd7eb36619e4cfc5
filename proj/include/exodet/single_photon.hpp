#pragma once

#include <Eigen/Dense>
#include <utility>

#include "exodet/scene.hpp"

namespace exodet {

// Small real density matrix (all states in this library have real entries in
// the chosen mode basis).
struct DensityMatrix {
    Eigen::MatrixXd m;
    // Symmetric to 1e-12, unit trace to 1e-12, eigenvalues >= -1e-12.
    void validate() const;
};

// States of one detected photon in the basis {star aperture mode, its
// orthogonal complement within the two-source span}:
//   rho0 = |psi_star><psi_star|
//   rho1 = (1-eps) |psi_star><psi_star| + eps |psi_planet><psi_planet|
// expressed with the overlap omega = <psi_star|psi_planet>.
std::pair<DensityMatrix, DensityMatrix> single_photon_states(const Scenario& s);

// Quantum relative entropy D(rho0 || rho1) = Tr[rho0 (ln rho0 - ln rho1)]
// from eigendecompositions.  Eigenvalues below 1e-12 are treated as zero;
// returns +infinity when rho0 has support outside the support of rho1.
double qre_from_states(const DensityMatrix& rho0, const DensityMatrix& rho1);

// Closed-form D(rho0 || rho1) for the single-photon two-source states.
// Algebraically identical to the spectral route but evaluated through
// cancellation-free factorizations, so the two agree to ~1e-12 absolute over
// the full parameter range.  Limits: 0 at eps = 0 or omega = 1;
// -ln(1 - eps) as omega -> 0; eps (1 - omega^2) when eps (1 - omega^2) is
// below 1e-14.
double qre_single_closed(const Scenario& s);

// Leading small-eps behaviour eps * (1 - omega^2).
double qre_single_leading(const Scenario& s);

}  // namespace exodet
