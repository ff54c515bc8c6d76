#include "fock/fockpoint.hpp"

#include <cmath>

namespace fock {

namespace {

// Orthonormal basis (columns) of the range of M, relative tolerance.
Mat range_basis(const Mat& M, double tol = 1e-8) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int r = 0;
  if (s.size() && s(0) > 0)
    for (int k = 0; k < s.size(); ++k)
      if (s(k) > tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Kernel basis of ad_{X} and ad_{Y} jointly, as sl_n matrices.
std::vector<Mat> joint_centralizer(const Mat& X, const Mat& Y, double tol = 1e-8) {
  const AdOperator ax(X), ay(Y);
  const int d = int(ax.matrix().cols());
  Mat M(2 * d, d);
  M << ax.matrix(), ay.matrix();
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int r = 0;
  if (s(0) > 0)
    for (int k = 0; k < s.size(); ++k)
      if (s(k) > tol * s(0)) ++r;
  std::vector<Mat> out;
  for (int k = r; k < d; ++k) out.push_back(sl_from_coords(svd.matrixV().col(k), int(X.rows())));
  return out;
}

// Columns ([p1,B], [p2,B]) for B running over sl_basis.
Mat ad_form_matrix(const FormFiber& phi) {
  const int n = int(phi.a.rows());
  const auto B = sl_basis(n);
  Mat M(2 * n * n, B.size());
  for (size_t k = 0; k < B.size(); ++k) M.col(k) = stack({bracket(phi.a, B[k]), bracket(phi.b, B[k])});
  return M;
}

int rank_of(const Mat& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > tol * s(0)) ++r;
  return r;
}

}  // namespace

Vec stack(const FormFiber& w) {
  const int n2 = int(w.a.size());
  Vec v(2 * n2);
  v.head(n2) = Eigen::Map<const Vec>(w.a.data(), n2);
  v.tail(n2) = Eigen::Map<const Vec>(w.b.data(), n2);
  return v;
}

FormFiber unstack(const Vec& v, int n) {
  FormFiber w;
  w.a = Eigen::Map<const Mat>(v.data(), n, n);
  w.b = Eigen::Map<const Mat>(v.data() + n * n, n, n);
  return w;
}

FockPoint fock_point(int n, const std::vector<cplx>& mu, double tol) {
  if (n < 2) throw DimensionError("fock_point: n must be at least 2");
  if (int(mu.size()) != n - 1)
    throw DimensionError("fock_point: expected " + std::to_string(n - 1) + " Beltrami coefficients, got " +
                         std::to_string(mu.size()));
  if (std::abs(std::abs(mu[0]) - 1.0) < tol)
    throw DomainError("fock_point: degenerate structure, |mu_2| = 1");
  FockPoint p;
  p.n = n;
  p.mu = mu;
  p.phi1 = principal_nilpotent(n);
  p.phi2 = Mat::Zero(n, n);
  Mat Fk = p.phi1;
  for (int k = 2; k <= n; ++k) {
    p.phi2 += mu[k - 2] * Fk;
    Fk = Fk * p.phi1;
  }
  // v phi1 + conj(v) phi2 on 16 directions and the mu_2-critical one
  std::vector<double> thetas;
  for (int k = 0; k < 16; ++k) thetas.push_back(2 * M_PI * k / 16.0);
  thetas.push_back(0.5 * (std::arg(mu[0]) - M_PI));
  for (double th : thetas) {
    const cplx v = std::polar(1.0, th);
    if (!is_principal_nilpotent(v * p.phi1 + std::conj(v) * p.phi2, 1e-8))
      throw DomainError("fock_point: nilpotency certification failed at direction " + std::to_string(th));
  }
  return p;
}

double pseudo_norm(const FormFiber& w) { return w.a.squaredNorm() - w.b.squaredNorm(); }

PositivityInfo positivity(const FormFiber& phi, double eps) {
  const int n = int(phi.a.rows());
  const Mat U = range_basis(ad_form_matrix(phi));
  const int n2 = n * n;
  Mat SU = U;
  SU.bottomRows(n2) *= -1.0;
  const Mat G = U.adjoint() * SU;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()));
  const auto& ev = es.eigenvalues();
  PositivityInfo info;
  const double scale = ev.cwiseAbs().maxCoeff();
  info.max_eig = ev(ev.size() - 1);
  info.min_eig = scale > 0 ? ev(0) / scale : 0.0;
  info.positive = info.min_eig > eps && U.cols() > 0;
  return info;
}

bool is_positive(const FormFiber& phi, double eps) { return positivity(phi, eps).positive; }
bool is_positive(const FockPoint& p, double eps) { return is_positive(p.form(), eps); }

double contraction_norm(const FormFiber& phi) {
  const Mat A1 = ad_vec(phi.a), A2 = ad_vec(phi.b);
  Eigen::JacobiSVD<Mat> svd(A1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > 1e-8 * s(0)) ++r;
  // preimages of the orthonormal image basis
  Mat pre = svd.matrixV().leftCols(r);
  for (int k = 0; k < r; ++k) pre.col(k) /= s(k);
  Eigen::JacobiSVD<Mat> c(A2 * pre);
  return c.singularValues()(0);
}

double fixed_point_map_norm(const FormFiber& phi, const FormFiber& phiStar) {
  // c_Phi : Im ad_phi1 -> g,  c_Phi* : Im ad_psi2 -> g
  auto image_data = [](const Mat& X, const Mat& Y, Mat& Ub, Mat& C) {
    const Mat A1 = ad_vec(X), A2 = ad_vec(Y);
    Eigen::JacobiSVD<Mat> svd(A1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int r = 0;
    for (int k = 0; k < s.size(); ++k)
      if (s(k) > 1e-8 * s(0)) ++r;
    Ub = svd.matrixU().leftCols(r);
    Mat pre = svd.matrixV().leftCols(r);
    for (int k = 0; k < r; ++k) pre.col(k) /= s(k);
    C = A2 * pre;  // g-valued, applied to coordinates in Ub
  };
  Mat U1, C1, U2, C2;
  image_data(phi.a, phi.b, U1, C1);          // [phi1,A] -> [phi2,A]
  image_data(phiStar.b, phiStar.a, U2, C2);  // [psi2,A] -> [psi1,A]
  // x in Im ad_phi1 -> c_Phi x -> -pi onto Im ad_psi2 -> c_Phi* -> -pi onto Im ad_phi1
  const Mat T = U1.adjoint() * C2 * (U2.adjoint() * C1);
  Eigen::JacobiSVD<Mat> svd(T);
  return svd.singularValues()(0);
}

FormFiber adjoint_fiber(const FormFiber& phi) { return {phi.b.adjoint(), phi.a.adjoint()}; }

FourWayDecomposer::FourWayDecomposer(const FormFiber& phi, const FormFiber& phiStar)
    : n_(int(phi.a.rows())) {
  const int n2 = n_ * n_;
  const Mat Ui = range_basis(ad_form_matrix(phi));
  const Mat Us = range_basis(ad_form_matrix(phiStar));
  const auto Zp = joint_centralizer(phi.a, phi.b);
  const auto Zs = joint_centralizer(phiStar.a, phiStar.b);
  const int total = int(Ui.cols() + Us.cols() + Zp.size() + Zs.size());
  if (total != 2 * (n2 - 1))
    throw DomainError("four_way_decompose: summand dimensions add to " + std::to_string(total) +
                      ", expected " + std::to_string(2 * (n2 - 1)));
  basis_.resize(2 * n2, total);
  offs_ = {0, int(Ui.cols()), int(Ui.cols() + Us.cols()), int(Ui.cols() + Us.cols() + Zp.size()), total};
  basis_.leftCols(Ui.cols()) = Ui;
  basis_.middleCols(offs_[1], Us.cols()) = Us;
  const Mat Z0 = Mat::Zero(n_, n_);
  for (size_t k = 0; k < Zp.size(); ++k) basis_.col(offs_[2] + k) = stack({Z0, Zp[k]}).normalized();
  for (size_t k = 0; k < Zs.size(); ++k) basis_.col(offs_[3] + k) = stack({Zs[k], Z0}).normalized();
  Eigen::JacobiSVD<Mat> svd(basis_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  smin_ = s(s.size() - 1);
  if (smin_ < 1e-10 * s(0)) throw DomainError("four_way_decompose: singular decomposition matrix");
  pinv_ = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  Eigen::VectorXcd sign = Eigen::VectorXcd::Ones(total);
  sign.head(offs_[1]).setConstant(-1.0);
  Qm_ = basis_ * sign.asDiagonal() * pinv_;
  Pim_ = basis_.leftCols(offs_[1]) * pinv_.topRows(offs_[1]);
}

FourWay FourWayDecomposer::decompose(const FormFiber& omega) const {
  const Vec c = pinv_ * stack(omega);
  auto part = [&](int k) {
    return unstack(basis_.middleCols(offs_[k], offs_[k + 1] - offs_[k]) * c.segment(offs_[k], offs_[k + 1] - offs_[k]), n_);
  };
  return {part(0), part(1), part(2), part(3)};
}

FormFiber FourWayDecomposer::q(const FormFiber& omega) const { return unstack(Qm_ * stack(omega), n_); }

FourWay four_way_decompose(const FormFiber& omega, const FockPoint& phi, const FormFiber& phiStar) {
  return FourWayDecomposer(phi.form(), phiStar).decompose(omega);
}

FormFiber q_involution(const FormFiber& omega, const FockPoint& phi, const FormFiber& phiStar) {
  const InvolutionSet inv(phi.n);
  const double scale = std::max(1.0, std::sqrt(omega.a.squaredNorm() + omega.b.squaredNorm()));
  const double defect = std::sqrt((inv.sigma(omega.a) - omega.a).squaredNorm() +
                                  (inv.sigma(omega.b) - omega.b).squaredNorm());
  if (defect > 1e-8 * scale) throw DomainError("q_involution: omega is not sigma-invariant");
  const FourWay p = FourWayDecomposer(phi.form(), phiStar).decompose(omega);
  return {p.im_phistar.a - p.im_phi.a, p.im_phistar.b - p.im_phi.b};
}

CohomologyDims phi_cohomology_dims(const Mat& phi1, const Mat& phi2) {
  const int n = int(phi1.rows());
  const int d = n * n - 1;
  const auto B = sl_basis(n);
  const FormFiber phi{phi1, phi2};
  // C^0 -> C^1 in sl coordinates
  Mat D0(2 * d, d);
  for (int k = 0; k < d; ++k) {
    D0.col(k).head(d) = sl_coords(bracket(phi1, B[k]));
    D0.col(k).tail(d) = sl_coords(bracket(phi2, B[k]));
  }
  // C^1 -> C^2: (a, b) -> [phi1, b] - [phi2, a]
  Mat D1(d, 2 * d);
  for (int k = 0; k < d; ++k) {
    D1.col(k) = sl_coords(-bracket(phi2, B[k]));
    D1.col(d + k) = sl_coords(bracket(phi1, B[k]));
  }
  const int r0 = rank_of(D0, 1e-8), r1 = rank_of(D1, 1e-8);
  return {d - r0, 2 * d - r1 - r0, d - r1};
}

CohomologyDims phi_cohomology_dims(const FockPoint& phi) { return phi_cohomology_dims(phi.phi1, phi.phi2); }

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

cplx random_disc(std::mt19937_64& rng, double radius) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double th = 2 * M_PI * uniform01(rng);
  return std::polar(r, th);
}

FockPoint random_positive_point(int n, std::mt19937_64& rng, double radius) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<cplx> mu(n - 1);
    for (auto& m : mu) m = random_disc(rng, radius);
    try {
      FockPoint p = fock_point(n, mu);
      if (is_positive(p)) return p;
    } catch (const DomainError&) {
    }
  }
  throw DomainError("random_positive_point: no positive sample found");
}

}  // namespace fock
