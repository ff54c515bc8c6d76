#include "fock/hcsflow.hpp"

namespace fock {

namespace {

void require_same(const Chart& a, const Chart& b, const char* what) {
  if (!a.same_grid(b)) throw DimensionError(std::string(what) + ": chart mismatch");
}

Mat mat_pow(const Mat& X, int k) {
  Mat r = Mat::Identity(X.rows(), X.cols());
  for (int i = 0; i < k; ++i) r = r * X;
  return r;
}

}  // namespace

std::vector<ScalarField> mu_holo_residual(const BeltramiField& mu, const CovectorField& t) {
  require_same(mu.chart, t.chart, "mu_holo_residual");
  if (mu.n != t.n) throw DimensionError("mu_holo_residual: rank mismatch");
  const int n = mu.n;
  std::vector<ScalarField> dmu, dt, dbt;
  for (int k = 2; k <= n; ++k) {
    dmu.push_back(partial_z(mu.mu[k - 2]));
    dt.push_back(partial_z(t.t[k - 2]));
    dbt.push_back(partial_zbar(t.t[k - 2]));
  }
  std::vector<ScalarField> out;
  for (int k = 2; k <= n; ++k) {
    ScalarField r(mu.chart);
    for (int p = 0; p < mu.chart.npts(); ++p) {
      cplx v = -dbt[k - 2][p] + mu.mu[0][p] * dt[k - 2][p] + double(k) * t.t[k - 2][p] * dmu[0][p];
      for (int l = 1; l <= n - k; ++l)
        v += double(l + k) * t.t[k + l - 2][p] * dmu[l][p] + double(l + 1) * mu.mu[l][p] * dt[k + l - 2][p];
      r[p] = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScalarField> gauge_muholo_residual(const LieForm& Phi, const LieForm& A) {
  require_same(Phi.chart, A.chart, "gauge_muholo_residual");
  const LieForm Ap = sigma_part(A), Am = sigma_anti_part(A);
  const LieForm w = exterior_d(Am) + wedge_bracket(Ap, Am);
  std::vector<ScalarField> out;
  for (int k = 2; k <= Phi.n; ++k) {
    ScalarField r(Phi.chart);
    for (int p = 0; p < Phi.chart.npts(); ++p) r[p] = (mat_pow(Phi.at(p, 0), k - 1) * w.at(p)).trace();
    out.push_back(std::move(r));
  }
  return out;
}

LieForm solve_X(const BeltramiField& mu) {
  const int n = mu.n;
  const Sl2Triple tr = complete_sl2_triple(n);
  std::vector<Mat> G;
  std::vector<ScalarField> d;
  for (int l = 2; l <= n; ++l) {
    G.push_back(bracket(mat_pow(tr.F, l - 1), tr.E) / double(2 * l - 2));
    d.push_back(partial_z(mu.mu[l - 2]));
  }
  LieForm X(mu.chart, n, 0);
  for (int p = 0; p < mu.chart.npts(); ++p) {
    Mat M = Mat::Zero(n, n);
    for (int l = 2; l <= n; ++l) M += d[l - 2][p] * G[l - 2];
    X.at(p) = M;
  }
  return X;
}

LieForm dQ_of_F(const BeltramiField& mu) {
  const int n = mu.n;
  const Mat F = principal_nilpotent(n);
  LieForm Q(mu.chart, n, 0);
  std::vector<ScalarField> d;
  for (int l = 2; l <= n; ++l) d.push_back(partial_z(mu.mu[l - 2]));
  for (int p = 0; p < mu.chart.npts(); ++p) {
    Mat M = Mat::Zero(n, n);
    for (int l = 2; l <= n; ++l) M += d[l - 2][p] * mat_pow(F, l - 1);
    Q.at(p) = M;
  }
  return Q;
}

BeltramiField hamiltonian_variation_mu(const BeltramiField& mu, const HamiltonianTerm& ham) {
  require_same(mu.chart, ham.w.chart, "hamiltonian_variation_mu");
  const int n = mu.n, k = ham.ell - 1;
  if (ham.ell < 2 || ham.ell > n) throw DomainError("hamiltonian_variation_mu: ell out of range");
  const ScalarField dw = partial_z(ham.w), dbw = partial_zbar(ham.w);
  BeltramiField out(mu.chart, n);
  // coefficient of p^j is delta mu_{j+1}
  for (int p = 0; p < mu.chart.npts(); ++p) out.mu[k - 1][p] += dbw[p];
  for (int m = 2; m <= n; ++m) {
    const int j = k + m - 2;
    if (j > n - 1) continue;
    const ScalarField dm = partial_z(mu.mu[m - 2]);
    for (int p = 0; p < mu.chart.npts(); ++p)
      out.mu[j - 1][p] += double(k) * ham.w[p] * dm[p] - double(m - 1) * dw[p] * mu.mu[m - 2][p];
  }
  return out;
}

LieForm hamiltonian_xi(const LieForm& Phi, const HamiltonianTerm& ham) {
  require_same(Phi.chart, ham.w.chart, "hamiltonian_xi");
  if (ham.ell < 2 || ham.ell > Phi.n) throw DomainError("hamiltonian_xi: ell out of range");
  LieForm xi(Phi.chart, Phi.n, 0);
  for (int p = 0; p < Phi.chart.npts(); ++p) xi.at(p) = ham.w[p] * mat_pow(Phi.at(p, 0), ham.ell - 1);
  return xi;
}

LieForm gauge_variation_phi(const LieForm& Phi, const LieForm& A, const HamiltonianTerm& ham) {
  return covariant_d(A, hamiltonian_xi(Phi, ham));
}

CovectorField covector_variation(const CovectorField& t, const HamiltonianTerm& ham) {
  require_same(t.chart, ham.w.chart, "covector_variation");
  const int n = t.n, l = ham.ell;
  if (l < 2 || l > n) throw DomainError("covector_variation: ell out of range");
  const ScalarField dw = partial_z(ham.w);
  CovectorField out(t.chart, n);
  for (int k = 2; k <= n; ++k) {
    const int m = k + l - 2;
    if (m > n) continue;
    const ScalarField dt = partial_z(t.t[m - 2]);
    for (int p = 0; p < t.chart.npts(); ++p)
      out.t[k - 2][p] = double(m) * t.t[m - 2][p] * dw[p] + double(l - 1) * ham.w[p] * dt[p];
  }
  return out;
}

EtaCorrection eta_correction(const LieForm& Phi, const LieForm& Aminus, const HamiltonianTerm& ham, double tol) {
  require_same(Phi.chart, Aminus.chart, "eta_correction");
  const int l = ham.ell;
  const LieForm xi = hamiltonian_xi(Phi, ham);
  EtaCorrection r;
  r.eta = LieForm(Phi.chart, Phi.n, 0);
  const LieForm pre = wedge_bracket(Aminus, Phi);
  int worst = -1;
  for (int p = 0; p < Phi.chart.npts(); ++p) {
    const Mat& F = Phi.at(p, 0);
    const Mat& B = Aminus.at(p, 0);
    Mat e = Mat::Zero(Phi.n, Phi.n);
    for (int j = 0; j <= l - 2; ++j) e += mat_pow(F, j) * B * mat_pow(F, l - 2 - j);
    r.eta.at(p) = ham.w[p] * e;
    for (int c = 0; c < 2; ++c) {
      const double d = (bracket(Aminus.at(p, c), xi.at(p)) + bracket(Phi.at(p, c), r.eta.at(p))).norm();
      r.defect = std::max(r.defect, d);
    }
    const double pd = pre.at(p).norm();
    if (pd > r.precondition_defect) {
      r.precondition_defect = pd;
      worst = p;
    }
  }
  if (r.precondition_defect > tol) {
    r.warning = true;
    r.message = "A^{-sigma} not in ker ad_Phi: defect " + std::to_string(r.precondition_defect) + " at point " +
                std::to_string(worst);
  }
  return r;
}

FlowState euler_step(const LieForm& Phi, const LieForm& A, const HermitianField& h, const HamiltonianTerm& ham,
                     double eps) {
  const LieForm Ps = hermitian_adjoint_field(Phi, h);
  const LieForm xi = hamiltonian_xi(Phi, ham);
  const LieForm Am = sigma_anti_part(A);
  const LieForm eta = eta_correction(Phi, Am, ham).eta;
  LieForm xis(Phi.chart, Phi.n, 0);
  for (int p = 0; p < Phi.chart.npts(); ++p) xis.at(p) = h.h[p].inverse() * xi.at(p).adjoint() * h.h[p];
  // dPhi = d_A xi + [Phi, eta] = d_{A^sigma} xi
  const LieForm dPhi = covariant_d(A, xi) + wedge_bracket(Phi, eta);
  // dA = d_A eta + [Phi, xi*] + [Phi*, xi]
  const LieForm dA = covariant_d(A, eta) + wedge_bracket(Phi, xis) + wedge_bracket(Ps, xi);
  return {Phi + eps * dPhi, A + eps * dA};
}

}  // namespace fock
