#include "fock/fiber.hpp"

#include <cmath>

namespace fock {

namespace {

void check_dim(int n) {
  if (n < 2) throw DimensionError("dimension must be at least 2, got " + std::to_string(n));
}

Mat mat_power(const Mat& X, int k) {
  Mat P = Mat::Identity(X.rows(), X.cols());
  for (int i = 0; i < k; ++i) P = P * X;
  return P;
}

// Orthonormal real-span basis of the columns of a real matrix.
Eigen::MatrixXd real_range(const Eigen::MatrixXd& V, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

Mat principal_nilpotent(int n) {
  check_dim(n);
  Mat F = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) F(i + 1, i) = 1.0;
  return F;
}

Sl2Triple complete_sl2_triple(int n) {
  check_dim(n);
  Sl2Triple t;
  t.F = principal_nilpotent(n);
  t.H = Mat::Zero(n, n);
  t.E = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) t.H(i, i) = double(n - 1 - 2 * i);
  for (int i = 1; i < n; ++i) t.E(i - 1, i) = double(i * (n - i));
  return t;
}

std::vector<GElement> weight_basis_G(int n) {
  const auto t = complete_sl2_triple(n);
  std::vector<GElement> out;
  Mat Ei = Mat::Identity(n, n);
  for (int i = 1; i < n; ++i) {
    Ei = Ei * t.E;
    Mat cur = Ei;
    // j runs from i down to -i, one ad_F application per step
    for (int j = i; j >= -i; --j) {
      out.push_back({i, j, cur});
      cur = bracket(t.F, cur);
    }
  }
  return out;
}

cplx trace_pairing(const Mat& X, const Mat& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw DimensionError("trace_pairing: dimension mismatch");
  return (X * Y).trace();
}

std::vector<Mat> sl_basis(int n) {
  std::vector<Mat> B;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) {
        Mat M = Mat::Zero(n, n);
        M(a, b) = 1.0;
        B.push_back(M);
      }
  for (int i = 0; i + 1 < n; ++i) {
    Mat M = Mat::Zero(n, n);
    M(i, i) = 1.0;
    M(i + 1, i + 1) = -1.0;
    B.push_back(M);
  }
  return B;
}

Vec sl_coords(const Mat& Y) {
  const int n = int(Y.rows());
  Vec c(n * n - 1);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) c(k++) = Y(a, b);
  cplx acc = 0;
  for (int i = 0; i + 1 < n; ++i) {
    acc += Y(i, i);
    c(k++) = acc;
  }
  return c;
}

Mat sl_from_coords(const Vec& c, int n) {
  Mat Y = Mat::Zero(n, n);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) Y(a, b) = c(k++);
  for (int i = 0; i + 1 < n; ++i) {
    Y(i, i) += c(k);
    Y(i + 1, i + 1) -= c(k);
    ++k;
  }
  return Y;
}

AdOperator::AdOperator(const Mat& X, double tol) : X_(X), n_(int(X.rows())) {
  const auto B = sl_basis(n_);
  const int d = int(B.size());
  M_.resize(d, d);
  for (int k = 0; k < d; ++k) M_.col(k) = sl_coords(bracket(X_, B[k]));
  svd_.compute(M_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd_.singularValues();
  rank_ = 0;
  const double smax = s.size() ? s(0) : 0.0;
  for (int k = 0; k < s.size(); ++k)
    if (smax > 0 && s(k) > tol * smax) ++rank_;
}

std::vector<Mat> AdOperator::kernel_basis() const {
  std::vector<Mat> out;
  const Mat& V = svd_.matrixV();
  for (int k = rank_; k < V.cols(); ++k) out.push_back(sl_from_coords(V.col(k), n_));
  return out;
}

std::vector<Mat> AdOperator::image_basis() const {
  std::vector<Mat> out;
  const Mat& U = svd_.matrixU();
  for (int k = 0; k < rank_; ++k) out.push_back(sl_from_coords(U.col(k), n_));
  return out;
}

std::vector<Mat> centralizer_basis(const Mat& X, double tol) {
  return AdOperator(X, tol).kernel_basis();
}

int numerical_rank(const Mat& X, double tol) {
  Eigen::JacobiSVD<Mat> svd(X);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > tol * s(0)) ++r;
  return r;
}

bool is_principal_nilpotent(const Mat& X, double tol, NilpotencyDiagnostic* diag) {
  const int n = int(X.rows());
  Eigen::JacobiSVD<Mat> svd(X);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  if (smax == 0.0) {
    if (diag) *diag = {};
    return false;
  }
  const double scale = std::pow(smax, n);
  const double pw = mat_power(X, n).cwiseAbs().maxCoeff();
  const double gap = n >= 2 ? s(n - 2) / smax : 1.0;
  const double last = s(n - 1) / smax;
  const bool nil = pw <= tol * scale;
  const bool rank_ok = gap > tol && last <= tol;
  if (diag) {
    diag->power_norm = pw / scale;
    diag->gap_ratio = gap;
    diag->near_threshold = (gap > tol && gap < 10 * tol) || (last > 0.1 * tol && last <= tol) ||
                           (pw / scale > 0.1 * tol && pw / scale <= tol);
  }
  return nil && rank_ok;
}

InvolutionSet::InvolutionSet(int n) : n_(n) {
  check_dim(n);
  J_ = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) J_(i, n - 1 - i) = 1.0;
}

Mat ad_vec(const Mat& X) {
  const int n = int(X.rows());
  const Mat I = Mat::Identity(n, n);
  Mat out(n * n, n * n);
  // vec(XY - YX) = (I (x) X - X^T (x) I) vec(Y), column-major
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out.block(a * n, b * n, n, n) = I(a, b) * X - X(b, a) * I;
  return out;
}

std::vector<Mat> sigma_invariant_basis(int n) {
  const InvolutionSet inv(n);
  Eigen::MatrixXd V(n * n, n * n);
  int k = 0;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      Mat E = Mat::Zero(n, n);
      E(a, b) = 1.0;
      if (a == b) E(n - 1, n - 1) -= 1.0;
      Mat P = 0.5 * (E + inv.sigma(E));
      V.col(k++) = Eigen::Map<Vec>(P.data(), n * n).real();
    }
  const Eigen::MatrixXd R = real_range(V, 1e-10);
  std::vector<Mat> out;
  for (int c = 0; c < R.cols(); ++c) {
    Eigen::MatrixXd M = Eigen::Map<const Eigen::MatrixXd>(R.col(c).data(), n, n);
    out.push_back(M.cast<cplx>());
  }
  return out;
}

std::vector<Mat> hermitian_sigma_basis(int n) {
  const auto S = sigma_invariant_basis(n);
  Eigen::MatrixXd V(2 * n * n, 2 * S.size());
  int k = 0;
  for (const auto& B : S) {
    const Mat cands[2] = {0.5 * (B + B.adjoint()), cplx(0, 0.5) * (B - B.adjoint())};
    for (const auto& C : cands) {
      Vec v = Eigen::Map<const Vec>(C.data(), n * n);
      V.col(k).head(n * n) = v.real();
      V.col(k).tail(n * n) = v.imag();
      ++k;
    }
  }
  const Eigen::MatrixXd R = real_range(V, 1e-10);
  std::vector<Mat> out;
  for (int c = 0; c < R.cols(); ++c) {
    Mat M(n, n);
    for (int q = 0; q < n * n; ++q) M.data()[q] = cplx(R(q, c), R(n * n + q, c));
    out.push_back(M);
  }
  return out;
}

}  // namespace fock
