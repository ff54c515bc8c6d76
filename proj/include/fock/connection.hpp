#ifndef FOCK_CONNECTION_HPP
#define FOCK_CONNECTION_HPP

#include "fock/chart.hpp"
#include "fock/fockpoint.hpp"

namespace fock {

struct HermitianField {
  Chart chart;
  int n = 0;
  std::vector<Mat> h;

  HermitianField() = default;
  HermitianField(const Chart& c, int n);  // identity
  /// Throws DomainError naming the first non-hermitian / non-positive point.
  void validate(double tol = 1e-10) const;
  /// Divides each h by det(h)^{1/n}.
  void normalize_det();
  bool is_constant() const;
};

/// Fields mu_2..mu_n (index 0 is mu_2).
struct BeltramiField {
  Chart chart;
  int n = 0;
  std::vector<ScalarField> mu;
  BeltramiField() = default;
  BeltramiField(const Chart& c, int n);
};

/// Fields t_2..t_n (index 0 is t_2).
struct CovectorField {
  Chart chart;
  int n = 0;
  std::vector<ScalarField> t;
  CovectorField() = default;
  CovectorField(const Chart& c, int n);
};

struct ConnectionField {
  LieForm A;
  bool sigma_invariant = false;
  bool unitary = false;
  double sigma_defect = 0;
  double unitarity_defect = -1;  // negative when no metric was supplied
  double residual_phi = 0;       // sup-norm of d_A Phi over interior points
  double residual_psi = 0;
  int worst_point = -1;
};

enum class FillInMethod {
  Constructive,  // A0 from the Phi equation, then the R = R1 + R2 correction
  Joint          // least squares on both equations at once
};

struct FillInOptions {
  FillInMethod method = FillInMethod::Constructive;
  /// Shift A0 by this multiple of a fixed kernel element (alternate initialization).
  double init_shift = 0.0;
  /// Transversality threshold on the relative smallest singular value.
  double transversality_tol = 1e-10;
};

/// dz component h^-1 (Phi_dzb)^dag h, dzb component h^-1 (Phi_dz)^dag h.
LieForm hermitian_adjoint_field(const LieForm& Phi, const HermitianField& h);
LieForm hermitian_adjoint_field(const LieForm& Phi);

/// Unique sigma-invariant A with d_A Phi = d_A Psi = 0 in least squares, pointwise.
ConnectionField fill_in(const LieForm& Phi, const LieForm& Psi, const FillInOptions& opt = {});

/// fill_in(Phi, Phi*) with the unitarity flag evaluated against h.
ConnectionField fill_in_unitary(const LieForm& Phi, const HermitianField& h, const FillInOptions& opt = {});

/// dh - (A^dag h + h A) sup-norm, the discrete unitarity defect.
double unitarity_defect(const LieForm& A, const HermitianField& h);
/// 1e-10 for constant h, otherwise a bound on the stencil error of dh.
double unitarity_tolerance(const HermitianField& h);

/// d alpha + [A ^ alpha] for degree 0 or 1.
LieForm covariant_d(const LieForm& A, const LieForm& alpha);

/// dA + [A1, A2] + [Phi ^ Psi].
LieForm curvature_total(const LieForm& A, const LieForm& Phi, const LieForm& Psi);

/// Pointwise sigma split of forms or matrices.
LieForm sigma_part(const LieForm& a);
LieForm sigma_anti_part(const LieForm& a);

/// t_k = tr(Phi_1^{k-1} A_1^{-sigma}), k = 2..n.
CovectorField covector_extract(const LieForm& A, const LieForm& Phi);

struct InjectReport {
  double pairing_residual = 0;  // sup over points of |t(A) - t|
  double constraint_residual = 0;
};

/// Unitary Phi-compatible A with prescribed covector.
ConnectionField inject_covector(const LieForm& Phi, const HermitianField& h, const CovectorField& t,
                                InjectReport* rep = nullptr);

/// Phi = F dz + sum mu_k F^{k-1} dzb.
LieForm beltrami_phi(const BeltramiField& mu);

/// Least-squares mu with Phi_2 = sum mu_k Phi_1^{k-1} at every point.
BeltramiField extract_beltrami(const LieForm& Phi);

}  // namespace fock

#endif
