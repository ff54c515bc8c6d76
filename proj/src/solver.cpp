#include "fock/solver.hpp"

#include <chrono>
#include <cmath>

namespace fock {

namespace {

Mat diag_D(int n) {
  Mat D = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) D(i, i) = (2.0 * i + 1 - n) / 2.0;
  return D;
}

ScalarField hyperbolic_factor(const Chart& c, double c0) {
  ScalarField g(c);
  for (int p = 0; p < c.npts(); ++p) {
    const double r2 = std::norm(c.z(p));
    g.v[p] = c0 / ((1 - r2) * (1 - r2));
  }
  return g;
}

HermitianField fuchsian_metric(int n, const ScalarField& g, const std::vector<double>& kappa) {
  HermitianField h(g.chart, n);
  for (int p = 0; p < g.chart.npts(); ++p)
    for (int i = 0; i < n; ++i) h.h[p](i, i) = kappa[i] * std::pow(g.v[p].real(), (2.0 * i + 1 - n) / 2.0);
  return h;
}

// A_dz = D dg/g with the stencil derivative, A_dzb = 0.
LieForm fuchsian_connection(int n, const ScalarField& g) {
  const ScalarField gz = partial_z(g);
  const Mat D = diag_D(n);
  LieForm A(g.chart, n, 1);
  for (int p = 0; p < g.chart.npts(); ++p) A.at(p, 0) = (gz.v[p] / g.v[p]) * D;
  return A;
}

LieForm constant_form(const Chart& c, const Mat& a, const Mat& b) {
  LieForm f(c, int(a.rows()), 1);
  for (int p = 0; p < c.npts(); ++p) {
    f.at(p, 0) = a;
    f.at(p, 1) = b;
  }
  return f;
}

Vec vec(const Mat& M) { return Eigen::Map<const Vec>(M.data(), M.size()); }
Mat unvec(const Vec& v, int n) { return Eigen::Map<const Mat>(v.data(), n, n); }

double l2_interior(const LieForm& a) {
  double s = 0;
  for (int p = 0; p < a.chart.npts(); ++p)
    if (a.chart.interior(p))
      for (int k = 0; k < a.ncomp(); ++k) s += a.at(p, k).squaredNorm();
  return std::sqrt(s * a.chart.hx * a.chart.hy);
}

}  // namespace

std::vector<double> fuchsian_kappa(int n) {
  std::vector<double> lk(n, 0.0);
  for (int i = 1; i < n; ++i) lk[i] = lk[i - 1] + std::log(double(i * (n - i)));
  double mean = 0;
  for (double v : lk) mean += v / n;
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = std::exp(lk[i] - mean);
  return k;
}

double fuchsian_residual(int n, const Chart& chart, double c0) {
  const ScalarField g = hyperbolic_factor(chart, c0);
  const HermitianField h = fuchsian_metric(n, g, fuchsian_kappa(n));
  const LieForm Phi = constant_form(chart, principal_nilpotent(n), Mat::Zero(n, n));
  return sup_norm(curvature_total(fuchsian_connection(n, g), Phi, hermitian_adjoint_field(Phi, h)));
}

FuchsianData fuchsian_reference(int n, const Chart& chart) {
  if (chart.periodic_kind())
    throw DomainError("fuchsian_reference: periodic charts carry no Fuchsian solution (Gauss-Bonnet)");
  const auto kappa = fuchsian_kappa(n);
  const LieForm Phi = constant_form(chart, principal_nilpotent(n), Mat::Zero(n, n));
  // curvature is affine in c0: sample at two values
  auto curv = [&](double c0) {
    const ScalarField g = hyperbolic_factor(chart, c0);
    const HermitianField h = fuchsian_metric(n, g, kappa);
    return curvature_total(fuchsian_connection(n, g), Phi, hermitian_adjoint_field(Phi, h));
  };
  const LieForm R1 = curv(1.0), R2 = curv(2.0);
  const LieForm dR = R2 - R1;
  auto objective = [&](double c0) {
    double m = 0;
    for (int p = 0; p < chart.npts(); ++p)
      if (chart.interior(p)) m = std::max(m, (R1.at(p) + (c0 - 1.0) * dR.at(p)).norm());
    return m;
  };
  // golden section on a convex function
  double a = 0.05, b = 20.0;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    }
  }
  FuchsianData d;
  d.chart = chart;
  d.n = n;
  d.c0 = 0.5 * (a + b);
  d.kappa = kappa;
  d.g = hyperbolic_factor(chart, d.c0);
  d.Phi = Phi;
  d.h = fuchsian_metric(n, d.g, kappa);
  d.A.A = fuchsian_connection(n, d.g);
  const LieForm Ps = hermitian_adjoint_field(Phi, d.h);
  d.A.residual_phi = sup_norm(covariant_d(d.A.A, Phi));
  d.A.residual_psi = sup_norm(covariant_d(d.A.A, Ps));
  d.A.sigma_defect = sup_norm(d.A.A - sigma_part(d.A.A));
  d.A.sigma_invariant = d.A.sigma_defect <= 1e-12;
  d.A.unitarity_defect = unitarity_defect(d.A.A, d.h);
  d.A.unitary = d.A.unitarity_defect <= unitarity_tolerance(d.h);
  d.residual = sup_norm(curvature_total(d.A.A, Phi, Ps));
  return d;
}

LinearizedOperator::LinearizedOperator(const LieForm& Phi, const LieForm& PhiStar, const LieForm& A)
    : chart_(Phi.chart), n_(Phi.n) {
  const int N = chart_.npts();
  adA1_.resize(N);
  adA2_.resize(N);
  Q_.resize(N);
  Pim_.resize(N);
  Z0_.resize(N);
  adP1_.resize(N);
  adP2_.resize(N);
  for (int p = 0; p < N; ++p) {
    adA1_[p] = ad_vec(A.at(p, 0));
    adA2_[p] = ad_vec(A.at(p, 1));
    const FormFiber phi{Phi.at(p, 0), Phi.at(p, 1)}, ps{PhiStar.at(p, 0), PhiStar.at(p, 1)};
    FourWayDecomposer dec(phi, ps);
    Q_[p] = dec.q_matrix();
    Pim_[p] = dec.projector_im_phi();
    const Mat a1 = ad_vec(phi.a), a2 = ad_vec(phi.b), s1 = ad_vec(ps.a), s2 = ad_vec(ps.b);
    Z0_[p] = -s2 * a1 + s1 * a2 - a1 * s2 + a2 * s1;
    adP1_[p] = a1;
    adP2_[p] = a2;
  }
}

LieForm LinearizedOperator::apply(const LieForm& eta) const {
  const int N = chart_.npts(), n2 = n_ * n_;
  std::vector<Vec> e(N), ez, ezb;
  for (int p = 0; p < N; ++p) e[p] = vec(eta.at(p));
  dz_dzb(chart_, e, ez, ezb);
  std::vector<Vec> qa(N), qb(N);
  Vec g(2 * n2);
  for (int p = 0; p < N; ++p) {
    g.head(n2) = ez[p] + adA1_[p] * e[p];
    g.tail(n2) = ezb[p] + adA2_[p] * e[p];
    const Vec q = Q_[p] * g;
    qa[p] = q.head(n2);
    qb[p] = q.tail(n2);
  }
  std::vector<Vec> qaz, qazb, qbz, qbzb;
  dz_dzb(chart_, qa, qaz, qazb);
  dz_dzb(chart_, qb, qbz, qbzb);
  LieForm out(chart_, n_, 2);
  for (int p = 0; p < N; ++p) {
    const Vec v = qbz[p] - qazb[p] + adA1_[p] * qb[p] - adA2_[p] * qa[p] + Z0_[p] * e[p];
    out.at(p) = unvec(v, n_);
  }
  return out;
}

LieForm LinearizedOperator::im_phi_part(const LieForm& omega) const {
  LieForm out(chart_, n_, 1);
  const int n2 = n_ * n_;
  for (int p = 0; p < chart_.npts(); ++p) {
    Vec g(2 * n2);
    g << vec(omega.at(p, 0)), vec(omega.at(p, 1));
    const Vec r = Pim_[p] * g;
    out.at(p, 0) = unvec(r.head(n2), n_);
    out.at(p, 1) = unvec(r.tail(n2), n_);
  }
  return out;
}

void check_admissible(const LieForm& eta, const HermitianField& h, double tol) {
  if (eta.degree != 0) throw DomainError("eta must be a degree-0 form");
  const InvolutionSet inv(eta.n);
  const double scale = std::max(1.0, sup_norm(eta));
  for (int p = 0; p < eta.chart.npts(); ++p) {
    const Mat& X = eta.at(p);
    if (!eta.chart.interior(p)) {
      if (X.norm() > tol * scale)
        throw DomainError("eta nonzero off the interior at point " + std::to_string(p));
      continue;
    }
    if ((inv.sigma(X) - X).norm() > tol * scale)
      throw DomainError("eta not sigma-invariant at point " + std::to_string(p));
    const Mat hadj = h.h[p].inverse() * X.adjoint() * h.h[p];
    if ((hadj - X).norm() > tol * scale)
      throw DomainError("eta not h-hermitian at point " + std::to_string(p));
  }
}

LieForm linearized_operator(const LieForm& eta, const LieForm& Phi, const LieForm& A, const HermitianField& h) {
  check_admissible(eta, h);
  const LinearizedOperator L(Phi, hermitian_adjoint_field(Phi, h), A);
  return L.apply(eta);
}

namespace {

// Coordinates of h-hermitian sigma-invariant fields on interior points.
struct FieldCoords {
  const Chart& c;
  int n, m;
  std::vector<int> pts;
  std::vector<std::vector<Mat>> T;  // per interior point, frame-transported basis

  FieldCoords(const Chart& c_, const HermitianField& h) : c(c_), n(h.n) {
    const auto B = hermitian_sigma_basis(n);
    m = int(B.size());
    const bool ident = h.is_constant() && (h.h[0] - Mat::Identity(n, n)).norm() < 1e-14;
    for (int p = 0; p < c.npts(); ++p) {
      if (!c.interior(p)) continue;
      pts.push_back(p);
      std::vector<Mat> t;
      if (ident) {
        t = B;
      } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(h.h[p]);
        const Mat s = es.operatorSqrt(), si = es.operatorInverseSqrt();
        const InvolutionSet inv(n);
        for (const auto& b : B) {
          t.push_back(si * b * s);
          if ((inv.sigma(t.back()) - t.back()).norm() > 1e-9)
            throw DomainError("solve_linear: metric not compatible with sigma at point " + std::to_string(p));
        }
      }
      T.push_back(std::move(t));
    }
  }
  int size() const { return int(pts.size()) * m; }
  Eigen::VectorXd coords(const LieForm& X) const {
    Eigen::VectorXd v(size());
    for (size_t q = 0; q < pts.size(); ++q)
      for (int k = 0; k < m; ++k) v(q * m + k) = (T[q][k] * X.at(pts[q])).trace().real();
    return v;
  }
  LieForm field(const Eigen::VectorXd& v) const {
    LieForm e(c, n, 0);
    for (size_t q = 0; q < pts.size(); ++q) {
      Mat M = Mat::Zero(n, n);
      for (int k = 0; k < m; ++k) M += v(q * m + k) * T[q][k];
      e.at(pts[q]) = M;
    }
    return e;
  }
};

}  // namespace

LieForm solve_linear(const LinearizedOperator& L, const HermitianField& h, const LieForm& rhs,
                     const NewtonConfig& cfg, CGReport* rep) {
  const FieldCoords fc(L.chart(), h);
  CGReport r;
  const Eigen::VectorXd b = -fc.coords(rhs);
  const double bn = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(fc.size());
  if (bn == 0.0) {
    r.converged = true;
    if (rep) *rep = r;
    return fc.field(x);
  }
  auto M = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(-fc.coords(L.apply(fc.field(v)))); };
  Eigen::VectorXd res = b, p = res;
  double rr = res.squaredNorm();
  r.min_rayleigh = std::numeric_limits<double>::infinity();
  r.max_rayleigh = 0;
  for (int it = 0; it < cfg.max_cg; ++it) {
    const Eigen::VectorXd Ap = M(p);
    const double pAp = p.dot(Ap);
    const double ray = pAp / p.squaredNorm();
    r.min_rayleigh = std::min(r.min_rayleigh, ray);
    r.max_rayleigh = std::max(r.max_rayleigh, ray);
    if (!(ray > 0)) r.all_rayleigh_positive = false;
    const double alpha = rr / pAp;
    x += alpha * p;
    res -= alpha * Ap;
    const double rr_new = res.squaredNorm();
    r.iterations = it + 1;
    r.residuals.push_back(std::sqrt(rr_new) / bn);
    if (std::sqrt(rr_new) <= cfg.cg_tol * bn) {
      r.converged = true;
      break;
    }
    p = res + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (rep) *rep = r;
  if (!r.converged)
    throw NonConvergence("solve_linear: CG did not reach tolerance in " + std::to_string(cfg.max_cg) +
                             " iterations",
                         r.residuals);
  return fc.field(x);
}

LieForm solve_linear(const LieForm& Phi, const LieForm& A, const HermitianField& h, const LieForm& rhs,
                     const NewtonConfig& cfg, CGReport* rep) {
  const LinearizedOperator L(Phi, hermitian_adjoint_field(Phi, h), A);
  return solve_linear(L, h, rhs, cfg, rep);
}

Mat expm(const Mat& X) {
  const double nrm = X.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (nrm > 0.5) s = int(std::ceil(std::log2(nrm / 0.5)));
  const Mat Y = X / std::pow(2.0, s);
  Mat term = Mat::Identity(X.rows(), X.cols()), sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * Y / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

LieForm conjugate_field(const LieForm& Phi, const LieForm& eta) {
  LieForm out = Phi;
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    const Mat& e = eta.at(p);
    if (e.norm() == 0.0) continue;
    const Mat em = expm(-e), ep = expm(e);
    for (int k = 0; k < Phi.ncomp(); ++k) out.at(p, k) = em * Phi.at(p, k) * ep;
  }
  return out;
}

EnergyIdentity energy_identity(const LieForm& eta, const LieForm& Phi, const LieForm& A) {
  const LieForm Ps = hermitian_adjoint_field(Phi);
  const LinearizedOperator L(Phi, Ps, A);
  const LieForm Le = L.apply(eta);
  const Chart& c = eta.chart;
  const LieForm dAe = covariant_d(A, eta);
  const LieForm xi = L.im_phi_part(dAe);
  const LieForm pe = wedge_bracket(Phi, eta);  // [Phi, eta]
  cplx lhs = 0;
  double rhs = 0;
  auto reach = [&](int p) {
    if (c.periodic_kind()) return true;
    const int i = c.ix(p), j = c.jy(p);
    return i > 0 && j > 0 && i < c.nx - 1 && j < c.ny - 1;
  };
  for (int p = 0; p < c.npts(); ++p) {
    if (c.interior(p)) lhs += (eta.at(p) * Le.at(p)).trace();
    if (reach(p)) {
      rhs += 2 * pseudo_norm({xi.at(p, 0), xi.at(p, 1)});
      rhs += 2 * pseudo_norm({pe.at(p, 0), pe.at(p, 1)});
    }
  }
  const double w = c.hx * c.hy;
  // -(i/2) * (-2i) * w * sum = -w * sum
  EnergyIdentity r;
  r.lhs = -w * lhs.real();
  r.lhs_imag = -w * lhs.imag();
  r.rhs = w * rhs;
  r.rel_err = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
  return r;
}

LieForm discrete_curvature_map(const LieForm& Phi) {
  const LieForm Ps = hermitian_adjoint_field(Phi);
  FillInOptions fo;
  fo.method = FillInMethod::Joint;
  const ConnectionField A = fill_in(Phi, Ps, fo);
  return curvature_total(A.A, Phi, Ps);
}

FdCheck fd_check_linearization(const LieForm& Phi, const LieForm& eta, double eps) {
  const LieForm Fp = discrete_curvature_map(conjugate_field(Phi, eps * eta));
  const LieForm Fm = discrete_curvature_map(conjugate_field(Phi, -eps * eta));
  const LieForm fd = (1.0 / (2 * eps)) * (Fp - Fm);
  const LieForm Ps = hermitian_adjoint_field(Phi);
  FillInOptions fo;
  fo.method = FillInMethod::Joint;
  const ConnectionField A = fill_in(Phi, Ps, fo);
  const LieForm Le = LinearizedOperator(Phi, Ps, A.A).apply(eta);
  FdCheck r;
  r.scale = sup_norm(Le);
  r.rel_err = sup_norm(fd - Le) / std::max(r.scale, 1e-300);
  return r;
}

double project_admissible(LieForm& eta, const HermitianField& h) {
  const InvolutionSet inv(eta.n);
  const bool ident = h.is_constant() && (h.h[0] - Mat::Identity(eta.n, eta.n)).norm() < 1e-14;
  double change = 0;
  for (int p = 0; p < eta.chart.npts(); ++p) {
    Mat& X = eta.at(p);
    if (!eta.chart.interior(p)) {
      change = std::max(change, X.norm());
      X.setZero();
      continue;
    }
    Mat Y = 0.5 * (X + inv.sigma(X));
    if (ident) {
      Y = 0.5 * (Y + Y.adjoint());
    } else {
      Y = 0.5 * (Y + h.h[p].inverse() * Y.adjoint() * h.h[p]);
    }
    change = std::max(change, (Y - X).norm());
    X = Y;
  }
  return change;
}

LieForm to_unitary_frame(const LieForm& Phi, const HermitianField& h) {
  LieForm out = Phi;
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h.h[p]);
    const Mat s = es.operatorSqrt(), si = es.operatorInverseSqrt();
    for (int k = 0; k < Phi.ncomp(); ++k) out.at(p, k) = s * Phi.at(p, k) * si;
  }
  return out;
}

namespace {

struct Eval {
  LieForm Phi, Ps, A, R;
};

Eval evaluate(const LieForm& Phi_u, const LieForm& eta) {
  Eval e;
  e.Phi = conjugate_field(Phi_u, eta);
  e.Ps = hermitian_adjoint_field(e.Phi);
  FillInOptions fo;
  fo.method = FillInMethod::Joint;
  e.A = fill_in(e.Phi, e.Ps, fo).A;
  e.R = curvature_total(e.A, e.Phi, e.Ps);
  return e;
}

}  // namespace

NewtonStep newton_solve(const LieForm& Phi_u, LieForm& eta, const NewtonConfig& cfg, bool* converged) {
  NewtonStep st;
  const HermitianField I(Phi_u.chart, Phi_u.n);
  st.min_rayleigh = std::numeric_limits<double>::infinity();
  Eval cur = evaluate(Phi_u, eta);
  bool ok = false;
  for (int it = 0;; ++it) {
    const double r = sup_norm(cur.R);
    st.residuals.push_back(r);
    if (r <= cfg.newton_tol) {
      ok = true;
      break;
    }
    if (it >= cfg.max_newton) break;
    const LinearizedOperator L(cur.Phi, cur.Ps, cur.A);
    if (cfg.fd_check && it == 0) {
      // probe the Jacobian along the unit residual direction
      LieForm dir = cur.R;
      project_admissible(dir, I);
      const double nd = sup_norm(dir);
      if (nd > 0) st.fd_rel_err = fd_check_linearization(cur.Phi, (1.0 / nd) * dir).rel_err;
    }
    CGReport cg;
    const LieForm delta = solve_linear(L, I, -1.0 * cur.R, cfg, &cg);
    st.cg_iters.push_back(cg.iterations);
    st.min_rayleigh = std::min(st.min_rayleigh, cg.min_rayleigh);
    const double r2 = l2_interior(cur.R);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      LieForm trial = eta + alpha * delta;
      const double pj = project_admissible(trial, I);
      Eval e = evaluate(Phi_u, trial);
      if (l2_interior(e.R) < r2) {
        eta = std::move(trial);
        cur = std::move(e);
        st.projection.push_back(pj);
        accepted = true;
        break;
      }
    }
    ++st.newton_iters;
    if (!accepted) break;
  }
  if (converged) *converged = ok;
  return st;
}

LieForm newton_continuation(const FuchsianData& base, const BeltramiField& mu_target, const NewtonConfig& cfg,
                            SolveReport& report, LieForm* eta_unitary) {
  const auto t0 = std::chrono::steady_clock::now();
  const Chart& c = base.chart;
  const int n = base.n;
  if (mu_target.n != n || !mu_target.chart.same_grid(c))
    throw DimensionError("newton_continuation: Beltrami field does not match the base");
  for (int p = 0; p < c.npts(); ++p)
    if (std::abs(mu_target.mu[0].v[p]) > 0)
      throw DomainError("newton_continuation: the scaled path starts at mu_2 = 0; mu_2 must vanish");
  for (int p : c.boundary_band())
    for (int k = 0; k < n - 1; ++k)
      if (std::abs(mu_target.mu[k].v[p]) > 1e-14)
        throw DomainError("newton_continuation: mu not compactly supported, nonzero at band point " +
                          std::to_string(p));
  LieForm eta(c, n, 0);
  report = SolveReport{};
  report.converged = true;
  for (int step = 1; step <= cfg.continuation_steps; ++step) {
    const double s = double(step) / cfg.continuation_steps;
    BeltramiField ms(c, n);
    for (int k = 3; k <= n; ++k) ms.mu[k - 2] = std::pow(s, k - 2) * mu_target.mu[k - 2];
    const LieForm Phi_u = to_unitary_frame(beltrami_phi(ms), base.h);
    const LieForm trial = conjugate_field(Phi_u, eta);
    for (int p = 0; p < c.npts(); ++p)
      if (!is_positive(FormFiber{trial.at(p, 0), trial.at(p, 1)})) {
        report.converged = false;
        report.message = "positivity lost at s=" + std::to_string(s) + " point " + std::to_string(p);
        throw DomainError("newton_continuation: " + report.message);
      }
    bool ok = false;
    NewtonStep st = newton_solve(Phi_u, eta, cfg, &ok);
    st.s = s;
    report.per_step.push_back(st);
    if (!ok) {
      report.converged = false;
      report.final_residual = st.residuals.back();
      report.message = "Newton did not converge at s=" + std::to_string(s);
      break;
    }
  }
  if (report.converged) report.final_residual = report.per_step.back().residuals.back();
  report.eta_norm = sup_norm(eta);
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (eta_unitary) *eta_unitary = eta;
  // back to the holomorphic frame: eta = s^{-1} eta_u s
  LieForm out = eta;
  for (int p = 0; p < c.npts(); ++p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(base.h.h[p]);
    out.at(p) = es.operatorInverseSqrt() * eta.at(p) * es.operatorSqrt();
  }
  return out;
}

}  // namespace fock
