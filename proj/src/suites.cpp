#include "fock/suites.hpp"

#include <cmath>

namespace fock {

namespace {

Check make(const std::string& name, double value, double tol) { return {name, value, tol, value <= tol}; }

Mat random_traceless(int n, std::mt19937_64& rng) {
  Mat X(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) X(a, b) = cplx(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
  X -= (X.trace() / double(n)) * Mat::Identity(n, n);
  return X;
}

}  // namespace

std::vector<Check> fiber_suite(int n, double tol) {
  std::vector<Check> out;
  const Sl2Triple t = complete_sl2_triple(n);
  const double s = std::max({t.E.norm(), t.H.norm(), 1.0});
  out.push_back(make("[H,E]=2E", (bracket(t.H, t.E) - 2.0 * t.E).norm() / (s * s), tol));
  out.push_back(make("[H,F]=-2F", (bracket(t.H, t.F) + 2.0 * t.F).norm() / (s * s), tol));
  out.push_back(make("[E,F]=H", (bracket(t.E, t.F) - t.H).norm() / (s * s), tol));
  out.push_back(make("F principal nilpotent", is_principal_nilpotent(t.F) ? 0.0 : 1.0, 0.0));

  const auto G = weight_basis_G(n);
  double off = 0, on = std::numeric_limits<double>::infinity();
  for (const auto& a : G)
    for (const auto& b : G) {
      const double r = std::abs(trace_pairing(a.G, b.G)) / (a.G.norm() * b.G.norm());
      if (b.i == a.i && b.j == -a.j)
        on = std::min(on, r);
      else
        off = std::max(off, r);
    }
  out.push_back(make("tr(G_ij G_kl) = 0 off the dual pair", off, tol));
  // the dual pairing must be bounded away from zero
  out.push_back({"tr(G_ij G_i,-j) != 0", on, tol, on > tol});

  const auto Z = centralizer_basis(t.F);
  out.push_back(make("dim Z(F) - (n-1)", std::abs(double(Z.size()) - (n - 1)), 0.0));

  const InvolutionSet inv(n);
  out.push_back(make("sigma(F) = -F", (inv.sigma(t.F) + t.F).norm(), tol));
  double zneg = 0;
  for (const auto& z : Z) zneg = std::max(zneg, (inv.sigma(z) + z).norm() / z.norm());
  out.push_back(make("sigma negates Z(F)", zneg, tol));
  double comm = 0;
  for (const auto& X : sl_basis(n))
    for (const cplx c : {cplx(1, 0), cplx(0, 1)}) {
      const Mat Y = c * X;
      comm = std::max(comm, (inv.sigma(inv.rho(Y)) - inv.rho(inv.sigma(Y))).norm());
    }
  out.push_back(make("sigma rho = rho sigma", comm, tol));
  return out;
}

PointSuiteResult point_suite(int n, int samples, std::uint64_t seed, double tol) {
  PointSuiteResult r;
  std::mt19937_64 rng(seed);
  double recon = 0;
  int dims_bad = 0, crit_bad_positive = 0;
  for (int s = 0; s < samples; ++s) {
    const FockPoint p = random_positive_point(n, rng);
    const FormFiber phi = p.form(), ps = adjoint_fiber(phi);
    const FourWayDecomposer dec(phi, ps);
    const FormFiber om{random_traceless(n, rng), random_traceless(n, rng)};
    const FourWay w = dec.decompose(om);
    const Vec sum = stack(w.im_phi) + stack(w.im_phistar) + stack(w.z_phi) + stack(w.z_phistar);
    recon = std::max(recon, (sum - stack(om)).norm() / stack(om).norm());
    const CohomologyDims d = phi_cohomology_dims(p);
    if (d.d0 != n - 1 || d.d1 != 2 * (n - 1) || d.d2 != n - 1) ++dims_bad;
    if (!(contraction_norm(phi) < 1.0)) ++crit_bad_positive;
  }
  r.samples = samples;
  r.checks.push_back(make("four-way reconstruction", recon, tol));
  r.checks.push_back(make("cohomology dims (n-1, 2(n-1), n-1) failures", dims_bad, 0));
  r.checks.push_back(make("contraction norm >= 1 on positive samples", crit_bad_positive, 0));

  // unrestricted draws, both sides of the positivity boundary
  int compared = 0, mismatch = 0;
  for (int s = 0; s < samples; ++s) {
    std::vector<cplx> mu(n - 1);
    for (auto& m : mu) m = random_disc(rng, 1.2);
    FockPoint p;
    try {
      p = fock_point(n, mu);
    } catch (const DomainError&) {
      continue;
    }
    const double c = contraction_norm(p.form());
    if (std::abs(c - 1.0) < 1e-6) continue;
    ++compared;
    if ((c < 1.0) != is_positive(p)) ++mismatch;
  }
  r.criterion_compared = compared + samples;
  r.criterion_mismatch = mismatch + crit_bad_positive;
  r.checks.push_back(make("contraction vs Gram mismatches (unrestricted)", mismatch, 0));
  return r;
}

}  // namespace fock
