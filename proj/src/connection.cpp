#include "fock/connection.hpp"

#include <cmath>

namespace fock {

HermitianField::HermitianField(const Chart& c, int n_) : chart(c), n(n_), h(c.npts(), Mat::Identity(n_, n_)) {}

void HermitianField::validate(double tol) const {
  for (int p = 0; p < chart.npts(); ++p) {
    const Mat& H = h[p];
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
      throw DomainError("hermitian field not hermitian at point " + std::to_string(p));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0)
      throw DomainError("hermitian field not positive definite at point " + std::to_string(p));
  }
}

void HermitianField::normalize_det() {
  for (auto& H : h) {
    const double d = H.determinant().real();
    if (!(d > 0)) throw DomainError("hermitian field with non-positive determinant");
    H /= std::pow(d, 1.0 / n);
  }
}

bool HermitianField::is_constant() const {
  for (const auto& H : h)
    if ((H - h[0]).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, h[0].cwiseAbs().maxCoeff())) return false;
  return true;
}

BeltramiField::BeltramiField(const Chart& c, int n_) : chart(c), n(n_), mu(n_ - 1, ScalarField(c)) {}
CovectorField::CovectorField(const Chart& c, int n_) : chart(c), n(n_), t(n_ - 1, ScalarField(c)) {}

LieForm hermitian_adjoint_field(const LieForm& Phi, const HermitianField& h) {
  if (Phi.degree != 1) throw DomainError("hermitian_adjoint_field: expects a 1-form");
  if (h.n != Phi.n || !h.chart.same_grid(Phi.chart)) throw DimensionError("hermitian_adjoint_field: shape mismatch");
  LieForm out(Phi.chart, Phi.n, 1);
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    Eigen::LLT<Mat> llt(h.h[p]);
    if (llt.info() != Eigen::Success)
      throw DomainError("hermitian_adjoint_field: h not positive at point " + std::to_string(p));
    out.at(p, 0) = llt.solve(Phi.at(p, 1).adjoint() * h.h[p]);
    out.at(p, 1) = llt.solve(Phi.at(p, 0).adjoint() * h.h[p]);
  }
  return out;
}

LieForm hermitian_adjoint_field(const LieForm& Phi) {
  LieForm out(Phi.chart, Phi.n, 1);
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    out.at(p, 0) = Phi.at(p, 1).adjoint();
    out.at(p, 1) = Phi.at(p, 0).adjoint();
  }
  return out;
}

namespace {

Vec vec(const Mat& M) { return Eigen::Map<const Vec>(M.data(), M.size()); }

// Columns: A1 = S_k then A2 = S_k; value [A ^ X] = [A1, X2] - [A2, X1].
Mat wedge_matrix(const std::vector<Mat>& S, const Mat& X1, const Mat& X2) {
  const int m = int(S.size());
  const int n2 = int(X1.size());
  Mat M(n2, 2 * m);
  for (int k = 0; k < m; ++k) {
    M.col(k) = vec(bracket(S[k], X2));
    M.col(m + k) = vec(-bracket(S[k], X1));
  }
  return M;
}

int rank_rel(const Eigen::VectorXd& s, double tol) {
  int r = 0;
  if (s.size() && s(0) > 0)
    for (int k = 0; k < s.size(); ++k)
      if (s(k) > tol * s(0)) ++r;
  return r;
}

Mat pinv_apply(const Eigen::JacobiSVD<Mat>& svd, int r, const Vec& b) {
  const Vec c = svd.matrixU().leftCols(r).adjoint() * b;
  return svd.matrixV().leftCols(r) * (c.array() / svd.singularValues().head(r).array().cast<cplx>()).matrix();
}

}  // namespace

ConnectionField fill_in(const LieForm& Phi, const LieForm& Psi, const FillInOptions& opt) {
  if (Phi.degree != 1 || Psi.degree != 1) throw DomainError("fill_in: expects 1-forms");
  if (Phi.n != Psi.n || !Phi.chart.same_grid(Psi.chart)) throw DimensionError("fill_in: shape mismatch");
  const Chart& c = Phi.chart;
  const int n = Phi.n;
  const auto S = sigma_invariant_basis(n);
  const int m = int(S.size());
  const LieForm dPhi = exterior_d(Phi), dPsi = exterior_d(Psi);
  ConnectionField out;
  out.A = LieForm(c, n, 1);
  for (int p = 0; p < c.npts(); ++p) {
    const Mat Mp = wedge_matrix(S, Phi.at(p, 0), Phi.at(p, 1));
    const Mat Ms = wedge_matrix(S, Psi.at(p, 0), Psi.at(p, 1));
    const Vec e1 = -vec(dPhi.at(p)), e2 = -vec(dPsi.at(p));
    Vec z;
    if (opt.method == FillInMethod::Joint) {
      Mat M(Mp.rows() + Ms.rows(), 2 * m);
      M << Mp, Ms;
      Vec rhs(e1.size() + e2.size());
      rhs << e1, e2;
      Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& s = svd.singularValues();
      if (s(2 * m - 1) <= opt.transversality_tol * s(0))
        throw DomainError("fill_in: transversality fails at point " + std::to_string(p) + " (i=" +
                          std::to_string(c.ix(p)) + ", j=" + std::to_string(c.jy(p)) + ")");
      z = pinv_apply(svd, 2 * m, rhs);
    } else {
      Eigen::JacobiSVD<Mat> sp(Mp, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::JacobiSVD<Mat> ss(Ms, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const int rp = rank_rel(sp.singularValues(), 1e-9), rs = rank_rel(ss.singularValues(), 1e-9);
      // kernels are Im ad_Phi^sigma and Im ad_Psi^sigma
      const Mat P = sp.matrixV().rightCols(2 * m - rp);
      const Mat Q = ss.matrixV().rightCols(2 * m - rs);
      Mat PQ(2 * m, P.cols() + Q.cols());
      PQ << P, Q;
      Eigen::JacobiSVD<Mat> spq(PQ, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = spq.singularValues();
      if (PQ.cols() != 2 * m || sv(2 * m - 1) <= opt.transversality_tol * sv(0))
        throw DomainError("fill_in: transversality fails at point " + std::to_string(p) + " (i=" +
                          std::to_string(c.ix(p)) + ", j=" + std::to_string(c.jy(p)) + ")");
      Vec z0 = pinv_apply(sp, rp, e1);
      if (opt.init_shift != 0.0 && P.cols() > 0) z0 += opt.init_shift * P.col(0);
      // R sigma-invariant with [R ^ Psi] = d_{A0} Psi
      const Vec target = Ms * z0 - e2;
      const Vec r = pinv_apply(ss, rs, target);
      const Vec cc = pinv_apply(spq, 2 * m, r);
      z = z0 - P * cc.head(P.cols());
    }
    Mat A1 = Mat::Zero(n, n), A2 = Mat::Zero(n, n);
    for (int k = 0; k < m; ++k) {
      A1 += z(k) * S[k];
      A2 += z(m + k) * S[k];
    }
    out.A.at(p, 0) = A1;
    out.A.at(p, 1) = A2;
  }
  const LieForm r1 = covariant_d(out.A, Phi), r2 = covariant_d(out.A, Psi);
  out.residual_phi = sup_norm(r1);
  out.residual_psi = sup_norm(r2);
  double worst = -1;
  for (int p = 0; p < c.npts(); ++p) {
    if (!c.interior(p)) continue;
    const double v = r1.at(p).norm() + r2.at(p).norm();
    if (v > worst) {
      worst = v;
      out.worst_point = p;
    }
  }
  const LieForm d = out.A - sigma_part(out.A);
  out.sigma_defect = sup_norm(d);
  out.sigma_invariant = out.sigma_defect <= 1e-10 * std::max(1.0, sup_norm(out.A));
  return out;
}

double unitarity_defect(const LieForm& A, const HermitianField& h) {
  const Chart& c = A.chart;
  std::vector<Mat> hz, hzb;
  dz_dzb(c, h.h, hz, hzb);
  double worst = 0;
  for (int p = 0; p < c.npts(); ++p) {
    if (!c.interior(p)) continue;
    const Mat& H = h.h[p];
    const Mat e1 = hz[p] - (A.at(p, 1).adjoint() * H + H * A.at(p, 0));
    const Mat e2 = hzb[p] - (A.at(p, 0).adjoint() * H + H * A.at(p, 1));
    worst = std::max(worst, std::sqrt(e1.squaredNorm() + e2.squaredNorm()));
  }
  return worst;
}

double unitarity_tolerance(const HermitianField& h) {
  if (h.is_constant()) return 1e-10;
  // second differences bound the stencil error of dh
  const Chart& c = h.chart;
  double m = 0;
  for (int p = 0; p < c.npts(); ++p) {
    if (!c.interior(p)) continue;
    const int i = c.ix(p), j = c.jy(p);
    auto at = [&](int a, int b) -> const Mat& {
      if (c.periodic_kind()) return h.h[c.index((a + c.nx) % c.nx, (b + c.ny) % c.ny)];
      return h.h[c.index(a, b)];
    };
    m = std::max(m, (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)).norm());
    m = std::max(m, (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)).norm());
  }
  return 1e-10 + 10.0 * m;
}

ConnectionField fill_in_unitary(const LieForm& Phi, const HermitianField& h, const FillInOptions& opt) {
  ConnectionField a = fill_in(Phi, hermitian_adjoint_field(Phi, h), opt);
  a.unitarity_defect = unitarity_defect(a.A, h);
  a.unitary = a.unitarity_defect <= unitarity_tolerance(h);
  return a;
}

LieForm covariant_d(const LieForm& A, const LieForm& alpha) {
  return exterior_d(alpha) + wedge_bracket(A, alpha);
}

LieForm curvature_total(const LieForm& A, const LieForm& Phi, const LieForm& Psi) {
  LieForm F = exterior_d(A);
  for (int p = 0; p < A.chart.npts(); ++p)
    F.at(p) += bracket(A.at(p, 0), A.at(p, 1)) + bracket(Phi.at(p, 0), Psi.at(p, 1)) -
               bracket(Phi.at(p, 1), Psi.at(p, 0));
  return F;
}

LieForm sigma_part(const LieForm& a) {
  const InvolutionSet inv(a.n);
  LieForm out = a;
  for (auto& M : out.data) M = 0.5 * (M + inv.sigma(M));
  return out;
}

LieForm sigma_anti_part(const LieForm& a) {
  const InvolutionSet inv(a.n);
  LieForm out = a;
  for (auto& M : out.data) M = 0.5 * (M - inv.sigma(M));
  return out;
}

CovectorField covector_extract(const LieForm& A, const LieForm& Phi) {
  const int n = Phi.n;
  const InvolutionSet inv(n);
  CovectorField t(Phi.chart, n);
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    const Mat Am = 0.5 * (A.at(p, 0) - inv.sigma(A.at(p, 0)));
    Mat Pk = Phi.at(p, 0);
    for (int k = 2; k <= n; ++k) {
      t.t[k - 2].v[p] = (Pk * Am).trace();
      Pk = Pk * Phi.at(p, 0);
    }
  }
  return t;
}

namespace {

// Real-linear map x -> constraints, evaluated column by column.
struct InjectSystem {
  int n;
  Mat phi1, phi2, psi1, psi2, h, hinv;
  InvolutionSet inv;

  InjectSystem(int n_) : n(n_), inv(n_) {}

  // x = (x1, x2) from a real vector of length 4 n^2
  void unpack(const Eigen::VectorXd& u, Mat& x1, Mat& x2) const {
    const int n2 = n * n;
    x1.resize(n, n);
    x2.resize(n, n);
    for (int q = 0; q < n2; ++q) {
      x1.data()[q] = cplx(u(q), u(2 * n2 + q));
      x2.data()[q] = cplx(u(n2 + q), u(3 * n2 + q));
    }
  }

  // returns complex constraint vector (without the target)
  Vec eval(const Mat& x1, const Mat& x2) const {
    const int n2 = n * n;
    Vec out(3 * n2 + (n - 1) + 2);
    const Mat c1 = bracket(x1, phi2) - bracket(x2, phi1);
    const Mat c2 = bracket(x1, psi2) - bracket(x2, psi1);
    const Mat c3 = x2 + hinv * x1.adjoint() * h;
    out.segment(0, n2) = Eigen::Map<const Vec>(c1.data(), n2);
    out.segment(n2, n2) = Eigen::Map<const Vec>(c2.data(), n2);
    out.segment(2 * n2, n2) = Eigen::Map<const Vec>(c3.data(), n2);
    const Mat xm = 0.5 * (x1 - inv.sigma(x1));
    Mat Pk = phi1;
    for (int k = 2; k <= n; ++k) {
      out(3 * n2 + k - 2) = (Pk * xm).trace();
      Pk = Pk * phi1;
    }
    out(3 * n2 + n - 1) = x1.trace();
    out(3 * n2 + n) = x2.trace();
    return out;
  }
};

Eigen::VectorXd split_re_im(const Vec& v) {
  Eigen::VectorXd r(2 * v.size());
  r.head(v.size()) = v.real();
  r.tail(v.size()) = v.imag();
  return r;
}

}  // namespace

ConnectionField inject_covector(const LieForm& Phi, const HermitianField& h, const CovectorField& t,
                                InjectReport* rep) {
  const Chart& c = Phi.chart;
  const int n = Phi.n;
  if (!h.chart.same_grid(c) || !t.chart.same_grid(c) || h.n != n || t.n != n)
    throw DimensionError("inject_covector: inconsistent chart or rank");
  for (int p = 0; p < c.npts(); ++p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h.h[p]);
    const Mat s = es.operatorSqrt(), si = es.operatorInverseSqrt();
    const FormFiber fu{s * Phi.at(p, 0) * si, s * Phi.at(p, 1) * si};
    if (!is_positive(fu))
      throw DomainError("inject_covector: positivity fails at point " + std::to_string(p) + " (i=" +
                        std::to_string(c.ix(p)) + ", j=" + std::to_string(c.jy(p)) + ")");
  }
  const LieForm PhiStar = hermitian_adjoint_field(Phi, h);
  FillInOptions fo;
  fo.method = FillInMethod::Joint;
  ConnectionField base = fill_in(Phi, PhiStar, fo);
  const CovectorField t0 = covector_extract(base.A, Phi);
  const int n2 = n * n;
  InjectReport r;
  InjectSystem sys(n);
  for (int p = 0; p < c.npts(); ++p) {
    sys.phi1 = Phi.at(p, 0);
    sys.phi2 = Phi.at(p, 1);
    sys.psi1 = PhiStar.at(p, 0);
    sys.psi2 = PhiStar.at(p, 1);
    sys.h = h.h[p];
    sys.hinv = h.h[p].inverse();
    const int nc = 3 * n2 + n + 1;
    Eigen::MatrixXd M(2 * nc, 4 * n2);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(4 * n2);
    Mat x1, x2;
    for (int k = 0; k < 4 * n2; ++k) {
      u.setZero();
      u(k) = 1.0;
      sys.unpack(u, x1, x2);
      M.col(k) = split_re_im(sys.eval(x1, x2));
    }
    Vec target = Vec::Zero(nc);
    for (int k = 2; k <= n; ++k) target(3 * n2 + k - 2) = t.t[k - 2].v[p] - t0.t[k - 2].v[p];
    const Eigen::VectorXd b = split_re_im(target);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    const Eigen::VectorXd sol = cod.solve(b);
    const Eigen::VectorXd res = M * sol - b;
    double pr = 0, cr = 0;
    for (int k = 0; k < nc; ++k) {
      const double v = std::hypot(res(k), res(nc + k));
      if (k >= 3 * n2 && k < 3 * n2 + n - 1) pr = std::max(pr, v);
      else cr = std::max(cr, v);
    }
    r.pairing_residual = std::max(r.pairing_residual, pr);
    r.constraint_residual = std::max(r.constraint_residual, cr);
    sys.unpack(sol, x1, x2);
    base.A.at(p, 0) += x1;
    base.A.at(p, 1) += x2;
  }
  if (r.pairing_residual > 1e-8)
    throw DomainError("inject_covector: covector not attainable, pairing residual " +
                      std::to_string(r.pairing_residual));
  base.residual_phi = sup_norm(covariant_d(base.A, Phi));
  base.residual_psi = sup_norm(covariant_d(base.A, PhiStar));
  base.sigma_defect = sup_norm(base.A - sigma_part(base.A));
  base.sigma_invariant = base.sigma_defect <= 1e-10 * std::max(1.0, sup_norm(base.A));
  base.unitarity_defect = unitarity_defect(base.A, h);
  base.unitary = base.unitarity_defect <= unitarity_tolerance(h);
  if (rep) *rep = r;
  return base;
}

LieForm beltrami_phi(const BeltramiField& mu) {
  const int n = mu.n;
  const Mat F = principal_nilpotent(n);
  std::vector<Mat> Fp(n + 1, Mat::Identity(n, n));
  for (int k = 1; k <= n; ++k) Fp[k] = Fp[k - 1] * F;
  LieForm Phi(mu.chart, n, 1);
  for (int p = 0; p < mu.chart.npts(); ++p) {
    Phi.at(p, 0) = F;
    Mat b = Mat::Zero(n, n);
    for (int k = 2; k <= n; ++k) b += mu.mu[k - 2].v[p] * Fp[k - 1];
    Phi.at(p, 1) = b;
  }
  return Phi;
}

BeltramiField extract_beltrami(const LieForm& Phi) {
  const int n = Phi.n;
  BeltramiField mu(Phi.chart, n);
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    Mat B(n * n, n - 1);
    Mat Pk = Phi.at(p, 0);
    for (int k = 2; k <= n; ++k) {
      B.col(k - 2) = Eigen::Map<const Vec>(Pk.data(), n * n);
      Pk = Pk * Phi.at(p, 0);
    }
    const Vec c = B.colPivHouseholderQr().solve(Eigen::Map<const Vec>(Phi.at(p, 1).data(), n * n));
    for (int k = 2; k <= n; ++k) mu.mu[k - 2].v[p] = c(k - 2);
  }
  return mu;
}

}  // namespace fock
