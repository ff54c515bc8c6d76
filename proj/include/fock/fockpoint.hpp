#ifndef FOCK_FOCKPOINT_HPP
#define FOCK_FOCKPOINT_HPP

#include "fock/fiber.hpp"

#include <array>
#include <random>

namespace fock {

/// A 1-form fiber a dz + b dzb.
struct FormFiber {
  Mat a, b;
};

struct FockPoint {
  int n = 0;
  Mat phi1, phi2;
  std::vector<cplx> mu;  // mu_2 ... mu_n
  FormFiber form() const { return {phi1, phi2}; }
};

/// phi1 = F, phi2 = sum mu_k F^{k-1}. Throws when |mu_2| is within tol of 1.
FockPoint fock_point(int n, const std::vector<cplx>& mu, double tol = 1e-6);

/// tr(a^dag a) - tr(b^dag b)
double pseudo_norm(const FormFiber& w);

struct PositivityInfo {
  bool positive = false;
  double min_eig = 0;  // smallest Gram eigenvalue divided by the largest in magnitude
  double max_eig = 0;
};

PositivityInfo positivity(const FormFiber& phi, double eps = 1e-8);
bool is_positive(const FockPoint& p, double eps = 1e-8);
bool is_positive(const FormFiber& phi, double eps = 1e-8);

/// Operator norm of [phi1, X] -> [phi2, X] on Im ad_phi1 (Frobenius norms).
double contraction_norm(const FormFiber& phi);

/// Norm of the fixed-point map on Im ad_phi1 that produces the decomposition.
double fixed_point_map_norm(const FormFiber& phi, const FormFiber& phiStar);

/// phi* for the identity metric.
FormFiber adjoint_fiber(const FormFiber& phi);

struct FourWay {
  FormFiber im_phi, im_phistar, z_phi, z_phistar;
};

/// Factored splitting T* x g = Im ad_Phi + Im ad_Phi* + Z(Phi) dzb + Z(Phi*) dz.
class FourWayDecomposer {
 public:
  FourWayDecomposer(const FormFiber& phi, const FormFiber& phiStar);

  int n() const { return n_; }
  FourWay decompose(const FormFiber& omega) const;
  /// -omega_ImPhi + omega_ImPhi* (Z parts passed through).
  FormFiber q(const FormFiber& omega) const;
  /// Matrices acting on the stacked column-major vector (vec a, vec b).
  const Mat& q_matrix() const { return Qm_; }
  const Mat& projector_im_phi() const { return Pim_; }
  /// Smallest singular value of the stacked basis.
  double conditioning() const { return smin_; }

 private:
  int n_;
  Mat basis_;   // 2n^2 x 2(n^2-1)
  Mat pinv_;    // 2(n^2-1) x 2n^2
  std::array<int, 5> offs_{};
  Mat Qm_, Pim_;
  double smin_ = 0;
};

FourWay four_way_decompose(const FormFiber& omega, const FockPoint& phi, const FormFiber& phiStar);

/// Throws DomainError when omega is not sigma-invariant.
FormFiber q_involution(const FormFiber& omega, const FockPoint& phi, const FormFiber& phiStar);

struct CohomologyDims {
  int d0, d1, d2;
};

CohomologyDims phi_cohomology_dims(const FockPoint& phi);
CohomologyDims phi_cohomology_dims(const Mat& phi1, const Mat& phi2);

Vec stack(const FormFiber& w);
FormFiber unstack(const Vec& v, int n);

/// Uniform draws from a fixed generator; identical across platforms.
double uniform01(std::mt19937_64& rng);
cplx random_disc(std::mt19937_64& rng, double radius);

/// Rejection-sampled positive point with |mu_k| <= radius.
FockPoint random_positive_point(int n, std::mt19937_64& rng, double radius = 0.4);

}  // namespace fock

#endif
