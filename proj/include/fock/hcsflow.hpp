#ifndef FOCK_HCSFLOW_HPP
#define FOCK_HCSFLOW_HPP

#include "fock/connection.hpp"

namespace fock {

/// Hamiltonian H = w p^{ell-1}.
struct HamiltonianTerm {
  int ell = 2;
  ScalarField w;
};

/// Tensor form of mu-holomorphicity; entry k-2 holds the residual paired with t_k.
std::vector<ScalarField> mu_holo_residual(const BeltramiField& mu, const CovectorField& t);

/// tr(Phi_1^{k-1} (d A^{-sigma} + [A^sigma ^ A^{-sigma}])) for k = 2..n, dz^dzb coefficient.
std::vector<ScalarField> gauge_muholo_residual(const LieForm& Phi, const LieForm& A);

/// X = sum_l dmu_l / (2l - 2) [F^{l-1}, E].
LieForm solve_X(const BeltramiField& mu);

/// dQ(F) with Q(F) = sum mu_l F^{l-1}, the left side of the X-equation.
LieForm dQ_of_F(const BeltramiField& mu);

/// Poisson-bracket variation of mu under H, collected per power of p up to p^{n-1}.
BeltramiField hamiltonian_variation_mu(const BeltramiField& mu, const HamiltonianTerm& ham);

/// xi = w Phi_1^{ell-1}.
LieForm hamiltonian_xi(const LieForm& Phi, const HamiltonianTerm& ham);

/// d xi + [A ^ xi].
LieForm gauge_variation_phi(const LieForm& Phi, const LieForm& A, const HamiltonianTerm& ham);

/// delta t_k = (k+l-2) t_{k+l-2} dw + (l-1) w d t_{k+l-2}; zero past t_n.
CovectorField covector_variation(const CovectorField& t, const HamiltonianTerm& ham);

struct EtaCorrection {
  LieForm eta;
  double defect = 0;             // sup |[A^{-sigma}, xi] + [Phi, eta]|
  double precondition_defect = 0;  // sup |[A^{-sigma} ^ Phi]|
  bool warning = false;
  std::string message;
};

/// eta = w sum_j Phi_1^j B Phi_1^{ell-2-j} with B the dz part of A^{-sigma}.
EtaCorrection eta_correction(const LieForm& Phi, const LieForm& Aminus, const HamiltonianTerm& ham,
                             double tol = 1e-8);

struct FlowState {
  LieForm Phi;
  LieForm A;
};

/// One explicit Euler step of the gauge generator xi/lambda + eta + lambda xi*.
FlowState euler_step(const LieForm& Phi, const LieForm& A, const HermitianField& h, const HamiltonianTerm& ham,
                     double eps);

}  // namespace fock

#endif
