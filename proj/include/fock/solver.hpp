#ifndef FOCK_SOLVER_HPP
#define FOCK_SOLVER_HPP

#include "fock/connection.hpp"

#include <functional>

namespace fock {

struct FuchsianData {
  Chart chart;
  int n = 0;
  double c0 = 1.0;
  ScalarField g;  // c0 / (1 - |z|^2)^2
  std::vector<double> kappa;
  LieForm Phi;
  HermitianField h;
  ConnectionField A;
  double residual = 0;  // curvature sup-norm
};

struct NewtonConfig {
  int continuation_steps = 2;
  double newton_tol = 1e-10;
  int max_newton = 8;
  double cg_tol = 1e-12;
  int max_cg = 4000;
  bool fd_check = false;
};

/// Diagonal harmonic metric kappa_i g^{p_i}; c0 from a one-dimensional residual search.
FuchsianData fuchsian_reference(int n, const Chart& chart);

/// kappa_{i+1}/kappa_i = i(n-i), product one.
std::vector<double> fuchsian_kappa(int n);

/// Curvature of the Fuchsian data for a given c0 (sup-norm).
double fuchsian_residual(int n, const Chart& chart, double c0);

/// Per-point factored L = d_A Q d_A + zero-order terms, for fixed (Phi, Phi*, A).
class LinearizedOperator {
 public:
  LinearizedOperator(const LieForm& Phi, const LieForm& PhiStar, const LieForm& A);
  LieForm apply(const LieForm& eta) const;
  int n() const { return n_; }
  const Chart& chart() const { return chart_; }
  /// Q-split of d_A eta: the Im ad_Phi part.
  LieForm im_phi_part(const LieForm& omega) const;

 private:
  Chart chart_;
  int n_;
  std::vector<Mat> adA1_, adA2_, Q_, Pim_, Z0_, adP1_, adP2_;
};

/// L eta for h-hermitian sigma-invariant eta vanishing off the interior.
LieForm linearized_operator(const LieForm& eta, const LieForm& Phi, const LieForm& A, const HermitianField& h);

/// Throws DomainError unless eta is sigma-invariant, h-hermitian and zero off the interior.
void check_admissible(const LieForm& eta, const HermitianField& h, double tol = 1e-9);

struct CGReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // relative
  double min_rayleigh = 0;
  double max_rayleigh = 0;
  bool all_rayleigh_positive = true;
};

struct NonConvergence : std::runtime_error {
  std::vector<double> history;
  NonConvergence(const std::string& m, std::vector<double> h) : std::runtime_error(m), history(std::move(h)) {}
};

/// CG on -L eta = -rhs over h-hermitian sigma-invariant fields; eta = 0 off the interior.
LieForm solve_linear(const LieForm& Phi, const LieForm& A, const HermitianField& h, const LieForm& rhs,
                     const NewtonConfig& cfg, CGReport* rep = nullptr);
LieForm solve_linear(const LinearizedOperator& L, const HermitianField& h, const LieForm& rhs,
                     const NewtonConfig& cfg, CGReport* rep = nullptr);

Mat expm(const Mat& X);

/// e^{-eta} Phi e^{eta} pointwise.
LieForm conjugate_field(const LieForm& Phi, const LieForm& eta);

struct EnergyIdentity {
  double lhs = 0, rhs = 0, lhs_imag = 0, rel_err = 0;
};

/// -(i/2) int tr(eta L eta) against 2|pi_Im(d_A eta)|^2 + 2|[Phi, eta]|^2 (identity metric).
EnergyIdentity energy_identity(const LieForm& eta, const LieForm& Phi, const LieForm& A);

/// Curvature of (Phi, Phi^dag) with the joint fill-in, identity metric.
LieForm discrete_curvature_map(const LieForm& Phi);

struct FdCheck {
  double rel_err = 0;
  double scale = 0;
};

/// Central difference of discrete_curvature_map along Phi -> e^{-eps eta} Phi e^{eps eta}.
FdCheck fd_check_linearization(const LieForm& Phi, const LieForm& eta, double eps = 1e-5);

struct NewtonStep {
  double s = 0;
  int newton_iters = 0;
  std::vector<double> residuals;
  std::vector<int> cg_iters;
  std::vector<double> projection;
  double min_rayleigh = 0;
  double fd_rel_err = -1;
};

struct SolveReport {
  std::vector<NewtonStep> per_step;
  double final_residual = 0;
  double eta_norm = 0;  // sup-norm of eta in the unitary frame
  double wall_time_s = 0;
  bool converged = false;
  std::string message;
};

/// Newton on eta for fixed unitary-frame Phi; warm start eta (modified in place).
NewtonStep newton_solve(const LieForm& Phi_u, LieForm& eta, const NewtonConfig& cfg, bool* converged);

/// Frame s = h^{1/2}: Phi_u = s Phi s^{-1}.
LieForm to_unitary_frame(const LieForm& Phi, const HermitianField& h);

/// Continuation from the Fuchsian base to mu_target; eta returned in the original frame.
LieForm newton_continuation(const FuchsianData& base, const BeltramiField& mu_target, const NewtonConfig& cfg,
                            SolveReport& report, LieForm* eta_unitary = nullptr);

/// h-hermitian sigma-invariant projection; returns the change norm.
double project_admissible(LieForm& eta, const HermitianField& h);

}  // namespace fock

#endif
