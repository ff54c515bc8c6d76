#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fock/hcsflow.hpp"
#include "test_util.hpp"

using namespace fock;
using fock::testing::smooth_field;

namespace {

struct Config {
  Chart c;
  BeltramiField mu;
  CovectorField t;
  LieForm Phi;
  ConnectionField A;
};

Config make_config(int n, int N, std::uint64_t seed, double L = 2 * M_PI) {
  std::mt19937_64 g(seed);
  Config s;
  s.c = Chart::periodic(N, N, L, L);
  s.mu = BeltramiField(s.c, n);
  s.t = CovectorField(s.c, n);
  for (int k = 0; k < n - 1; ++k) {
    s.mu.mu[k] = smooth_field(s.c, g, 0.1);
    s.t.t[k] = smooth_field(s.c, g, 0.5);
  }
  s.Phi = beltrami_phi(s.mu);
  s.A = inject_covector(s.Phi, HermitianField(s.c, n), s.t);
  return s;
}

double max_diff(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b) {
  double m = 0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max(m, sup_norm(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("holomorphic covector with mu = 0 has zero residual") {
  const Chart c = Chart::disk(33, 33, 0.8);
  const int n = 3;
  BeltramiField mu(c, n);
  CovectorField t(c, n);
  for (int p = 0; p < c.npts(); ++p) {
    const cplx z = c.z(p);
    t.t[0][p] = 1.0 + 2.0 * z * z;
    t.t[1][p] = cplx(0, 1) * z;
  }
  for (const auto& r : mu_holo_residual(mu, t)) CHECK(sup_norm(r) <= 1e-12);
}

TEST_CASE("n = 2 tensor residual closed form") {
  std::mt19937_64 g(1);
  const Chart c = Chart::periodic(16, 16, 1, 1);
  BeltramiField mu(c, 2);
  CovectorField t(c, 2);
  mu.mu[0] = smooth_field(c, g, 0.2);
  t.t[0] = smooth_field(c, g, 1.0);
  const ScalarField closed = (-1.0 * partial_zbar(t.t[0])) + mu.mu[0] * partial_z(t.t[0]) +
                             2.0 * (t.t[0] * partial_z(mu.mu[0]));
  CHECK(sup_norm(mu_holo_residual(mu, t)[0] - closed) <= 1e-13);
}

TEST_CASE("tensor residual agrees with an independent evaluator") {
  std::mt19937_64 g(2);
  const Chart c = Chart::periodic(12, 12, 1, 1);
  const int n = 4;
  BeltramiField mu(c, n);
  CovectorField t(c, n);
  for (int k = 0; k < n - 1; ++k) {
    mu.mu[k] = smooth_field(c, g, 0.2);
    t.t[k] = smooth_field(c, g, 1.0);
  }
  const auto r = mu_holo_residual(mu, t);
  // sum over m = k + l as the pair (mu_{m-k+2}, t_m), m = k..n
  for (int k = 2; k <= n; ++k) {
    ScalarField e = -1.0 * partial_zbar(t.t[k - 2]);
    for (int m = k; m <= n; ++m) {
      const int l = m - k;
      const ScalarField& M = mu.mu[l];  // mu_{l+2}
      e = e + double(m) * (t.t[m - 2] * partial_z(M)) + double(l + 1) * (M * partial_z(t.t[m - 2]));
    }
    CHECK(sup_norm(r[k - 2] - e) <= 1e-12);
  }
}

TEST_CASE("gauge residual vanishes without a covector part") {
  std::mt19937_64 g(3);
  const Chart c = Chart::periodic(12, 12, 1, 1);
  BeltramiField mu(c, 3);
  for (auto& m : mu.mu) m = smooth_field(c, g, 0.1);
  const LieForm P = beltrami_phi(mu);
  const ConnectionField A = fill_in(P, hermitian_adjoint_field(P));
  for (const auto& r : gauge_muholo_residual(P, A.A)) CHECK(sup_norm(r) <= 1e-12);
}

TEST_CASE("gauge and tensor residuals agree to second order") {
  for (int n = 2; n <= 3; ++n) {
    const Config a = make_config(n, 24, 10 + n), b = make_config(n, 48, 10 + n);
    const auto da = max_diff(gauge_muholo_residual(a.Phi, a.A.A),
                             mu_holo_residual(extract_beltrami(a.Phi), covector_extract(a.A.A, a.Phi)));
    const auto db = max_diff(gauge_muholo_residual(b.Phi, b.A.A),
                             mu_holo_residual(extract_beltrami(b.Phi), covector_extract(b.A.A, b.Phi)));
    CHECK(da / db >= 3.0);
    CHECK(da / db <= 5.3);
  }
}

TEST_CASE("X-equation") {
  std::mt19937_64 g(4);
  for (int n = 2; n <= 5; ++n) {
    const Chart c = Chart::periodic(12, 12, 1, 1);
    BeltramiField mu(c, n);
    for (auto& m : mu.mu) m = smooth_field(c, g, 0.3);
    const LieForm X = solve_X(mu);
    LieForm F(c, n, 0);
    for (int p = 0; p < c.npts(); ++p) F.at(p) = principal_nilpotent(n);
    const LieForm lhs = dQ_of_F(mu);
    CHECK(sup_norm(lhs - wedge_bracket(X, F)) <= 1e-12 * sup_norm(lhs));
  }
  // constant mu gives X = 0
  const Chart c = Chart::periodic(8, 8, 1, 1);
  BeltramiField cm(c, 3);
  cm.mu[0] = ScalarField(c, 0.2);
  cm.mu[1] = ScalarField(c, cplx(0, 0.1));
  CHECK(sup_norm(solve_X(cm)) <= 1e-14);
  // n = 2: X = -(dmu_2 / 2) H
  std::mt19937_64 g2(5);
  BeltramiField m2(c, 2);
  m2.mu[0] = smooth_field(c, g2, 0.3);
  const LieForm X2 = solve_X(m2);
  const ScalarField d = partial_z(m2.mu[0]);
  const Mat H = complete_sl2_triple(2).H;
  for (int p = 0; p < c.npts(); ++p) CHECK((X2.at(p) + 0.5 * d[p] * H).norm() <= 1e-14);
}

TEST_CASE("Hamiltonian variation of mu: closed forms") {
  std::mt19937_64 g(6);
  const Chart c = Chart::periodic(16, 16, 1, 1);
  // n = 2, H = w p
  BeltramiField mu(c, 2);
  mu.mu[0] = smooth_field(c, g, 0.2);
  HamiltonianTerm H{2, smooth_field(c, g, 1.0)};
  const ScalarField closed =
      partial_zbar(H.w) - mu.mu[0] * partial_z(H.w) + H.w * partial_z(mu.mu[0]);
  CHECK(sup_norm(hamiltonian_variation_mu(mu, H).mu[0] - closed) <= 1e-13);
  // mu = 0: only delta mu_{k+1} = dbar w
  for (int ell = 2; ell <= 4; ++ell) {
    const BeltramiField z(c, 4);
    const HamiltonianTerm Hl{ell, smooth_field(c, g, 1.0)};
    const BeltramiField d = hamiltonian_variation_mu(z, Hl);
    for (int k = 2; k <= 4; ++k) {
      if (k == ell)
        CHECK(sup_norm(d.mu[k - 2] - partial_zbar(Hl.w)) <= 1e-14);
      else
        CHECK(sup_norm(d.mu[k - 2]) == 0.0);
    }
  }
  // constant w and mu
  BeltramiField cm(c, 3);
  cm.mu[0] = ScalarField(c, 0.1);
  cm.mu[1] = ScalarField(c, 0.2);
  const BeltramiField d = hamiltonian_variation_mu(cm, HamiltonianTerm{2, ScalarField(c, 1.5)});
  for (const auto& f : d.mu) CHECK(sup_norm(f) <= 1e-14);
}

TEST_CASE("covector variation: closed forms") {
  std::mt19937_64 g(7);
  const Chart c = Chart::periodic(16, 16, 1, 1);
  CovectorField t(c, 2);
  t.t[0] = smooth_field(c, g, 1.0);
  HamiltonianTerm H{2, smooth_field(c, g, 1.0)};
  const ScalarField closed = H.w * partial_z(t.t[0]) + 2.0 * (t.t[0] * partial_z(H.w));
  CHECK(sup_norm(covector_variation(t, H).t[0] - closed) <= 1e-13);
  // constant w
  CovectorField t4(c, 4);
  for (auto& f : t4.t) f = smooth_field(c, g, 1.0);
  const HamiltonianTerm Hc{3, ScalarField(c, 0.7)};
  const CovectorField d = covector_variation(t4, Hc);
  for (int k = 2; k <= 4; ++k) {
    const int m = k + 1;
    if (m > 4)
      CHECK(sup_norm(d.t[k - 2]) == 0.0);
    else
      CHECK(sup_norm(d.t[k - 2] - 2.0 * 0.7 * partial_z(t4.t[m - 2])) <= 1e-13);
  }
}

TEST_CASE("eta correction") {
  for (int n = 2; n <= 4; ++n) {
    const Config s = make_config(n, 16, 20 + n);
    std::mt19937_64 g(30 + n);
    for (int ell = 2; ell <= n; ++ell) {
      const HamiltonianTerm H{ell, smooth_field(s.c, g, 1.0)};
      const LieForm Am = sigma_anti_part(s.A.A);
      const EtaCorrection e = eta_correction(s.Phi, Am, H);
      CHECK_FALSE(e.warning);
      CHECK(e.defect <= 1e-10);
      CHECK(sup_norm(eta_correction(s.Phi, LieForm(s.c, n, 1), H).eta) == 0.0);
    }
    // order independence for xi = Phi(v1) Phi(v2) with v1 = d/dz, v2 = d/dzb
    const LieForm Am = sigma_anti_part(s.A.A);
    double m = 0;
    for (int p = 0; p < s.c.npts(); ++p) {
      const Mat e12 = Am.at(p, 0) * s.Phi.at(p, 1) + s.Phi.at(p, 0) * Am.at(p, 1);
      const Mat e21 = Am.at(p, 1) * s.Phi.at(p, 0) + s.Phi.at(p, 1) * Am.at(p, 0);
      m = std::max(m, (e12 - e21).norm());
    }
    CHECK(m <= 1e-10);
  }
  // a non-compatible A^{-sigma} triggers the warning
  const Config s = make_config(3, 12, 40);
  LieForm bad(s.c, 3, 1);
  for (int p = 0; p < s.c.npts(); ++p) bad.at(p, 0) = complete_sl2_triple(3).E;
  const EtaCorrection e = eta_correction(s.Phi, bad, HamiltonianTerm{2, ScalarField(s.c, 1.0)});
  CHECK(e.warning);
  CHECK(e.message.find("point") != std::string::npos);
}

TEST_CASE("gauge variation is a cocycle and matches the Hamiltonian action") {
  const double eps = 1e-4;
  for (int n = 2; n <= 3; ++n) {
    const Config s = make_config(n, 64, 50 + n);
    std::mt19937_64 g(60 + n);
    const double h2 = s.c.hx * s.c.hx;
    for (int ell = 2; ell <= n; ++ell) {
      const HamiltonianTerm H{ell, smooth_field(s.c, g, 0.5)};
      CHECK(sup_norm(gauge_variation_phi(s.Phi, s.A.A, HamiltonianTerm{ell, ScalarField(s.c)})) == 0.0);
      const LieForm dP = gauge_variation_phi(s.Phi, s.A.A, H);
      CHECK(sup_norm(wedge_bracket(s.Phi, dP)) <= 10 * h2);
      const BeltramiField m1 = extract_beltrami(s.Phi + eps * dP);
      const BeltramiField dm = hamiltonian_variation_mu(s.mu, H);
      for (int k = 0; k < n - 1; ++k)
        CHECK(sup_norm((1.0 / eps) * (m1.mu[k] - s.mu.mu[k]) - dm.mu[k]) <= 10 * (eps + h2));
      const FlowState st = euler_step(s.Phi, s.A.A, HermitianField(s.c, n), H, eps);
      const CovectorField t0 = covector_extract(s.A.A, s.Phi), t1 = covector_extract(st.A, st.Phi);
      const CovectorField dt = covector_variation(t0, H);
      for (int k = 0; k < n - 1; ++k)
        CHECK(sup_norm((1.0 / eps) * (t1.t[k] - t0.t[k]) - dt.t[k]) <= 10 * (eps + h2));
    }
  }
}
