#ifndef FOCK_FIBER_HPP
#define FOCK_FIBER_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fock {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Subdiagonal of ones.
Mat principal_nilpotent(int n);

struct Sl2Triple {
  Mat F, H, E;
};

/// F subdiagonal, H = diag(n-1, ..., 1-n), E_{i,i+1} = i(n-i).
Sl2Triple complete_sl2_triple(int n);

struct GElement {
  int i, j;
  Mat G;
};

/// G_{i,j} = ad_F^{i-j}(E^i), i = 1..n-1, j = -i..i.
std::vector<GElement> weight_basis_G(int n);

cplx trace_pairing(const Mat& X, const Mat& Y);

inline Mat bracket(const Mat& X, const Mat& Y) { return X * Y - Y * X; }

/// Fixed basis of sl_n: E_ab (a != b, row-major), then E_ii - E_{i+1,i+1}.
std::vector<Mat> sl_basis(int n);

/// Coordinates of a traceless matrix against sl_basis.
Vec sl_coords(const Mat& Y);
Mat sl_from_coords(const Vec& c, int n);

class AdOperator {
 public:
  explicit AdOperator(const Mat& X, double tol = 1e-8);

  const Mat& source() const { return X_; }
  /// Matrix of ad_X against sl_basis, (n^2-1) x (n^2-1).
  const Mat& matrix() const { return M_; }
  Mat apply(const Mat& Y) const { return bracket(X_, Y); }
  std::vector<Mat> kernel_basis() const;
  std::vector<Mat> image_basis() const;
  int rank() const { return rank_; }

 private:
  Mat X_;
  Mat M_;
  Eigen::JacobiSVD<Mat> svd_;
  int rank_;
  int n_;
};

inline AdOperator adjoint_operator(const Mat& X) { return AdOperator(X); }

std::vector<Mat> centralizer_basis(const Mat& X, double tol = 1e-8);

/// Singular values below tol * sigma_max count as zero.
int numerical_rank(const Mat& X, double tol = 1e-8);

struct NilpotencyDiagnostic {
  bool near_threshold = false;
  double power_norm = 0;
  double gap_ratio = 0;
};

bool is_principal_nilpotent(const Mat& X, double tol = 1e-8,
                            NilpotencyDiagnostic* diag = nullptr);

class InvolutionSet {
 public:
  explicit InvolutionSet(int n);
  int n() const { return n_; }
  const Mat& J() const { return J_; }
  Mat sigma(const Mat& X) const { return -J_ * X.transpose() * J_; }
  Mat rho(const Mat& X) const { return -X.adjoint(); }
  Mat tau(const Mat& X) const { return sigma(rho(X)); }

 private:
  int n_;
  Mat J_;
};

inline InvolutionSet involutions(int n) { return InvolutionSet(n); }

/// Column-major vec of [X, .] acting on n x n matrices.
Mat ad_vec(const Mat& X);

/// Real basis (over C) of the sigma-invariant part of sl_n.
std::vector<Mat> sigma_invariant_basis(int n);

/// Basis of hermitian sigma-invariant matrices, orthonormal for tr(XY).
std::vector<Mat> hermitian_sigma_basis(int n);

}  // namespace fock

#endif
