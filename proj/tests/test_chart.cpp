#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fock/chart.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <fstream>

using namespace fock;
using fock::testing::smooth_field;

TEST_CASE("periodic plane wave: exact discrete derivative") {
  const Chart c = Chart::periodic(32, 16, 2.0, 1.0);
  const double k = 2 * M_PI * 3 / c.Lx;
  ScalarField f(c);
  for (int p = 0; p < c.npts(); ++p) f[p] = std::exp(cplx(0, k * c.x(c.ix(p))));
  const ScalarField dz = partial_z(f), dzb = partial_zbar(f);
  const cplx factor = 0.5 * cplx(0, std::sin(k * c.hx) / c.hx);
  for (int p = 0; p < c.npts(); ++p) {
    CHECK(std::abs(dz[p] - factor * f[p]) <= 1e-12);
    CHECK(std::abs(dzb[p] - factor * f[p]) <= 1e-12);
  }
}

TEST_CASE("disk stencils differentiate quadratics exactly") {
  const Chart c = Chart::disk(21, 21, 0.8);
  ScalarField z2(c), zzb(c);
  for (int p = 0; p < c.npts(); ++p) {
    z2[p] = c.z(p) * c.z(p);
    zzb[p] = std::norm(c.z(p));
  }
  const ScalarField a = partial_z(z2), b = partial_zbar(z2), d = partial_z(zzb);
  for (int p = 0; p < c.npts(); ++p) {
    CHECK(std::abs(a[p] - 2.0 * c.z(p)) <= 1e-12);
    CHECK(std::abs(b[p]) <= 1e-12);
    CHECK(std::abs(d[p] - std::conj(c.z(p))) <= 1e-12);
  }
}

TEST_CASE("disk grid layout and interior") {
  const Chart c = Chart::disk(33, 33, 0.5);
  CHECK(c.hx == doctest::Approx(1.0 / 32));
  CHECK(c.x(0) == doctest::Approx(-0.5));
  CHECK(c.x(32) == doctest::Approx(0.5));
  int interior = 0;
  for (int p = 0; p < c.npts(); ++p) {
    if (!c.interior(p)) continue;
    ++interior;
    CHECK(std::abs(c.z(p)) <= 0.5 + 1e-12);
    CHECK(c.ix(p) >= 2);
    CHECK(c.ix(p) <= c.nx - 3);
  }
  CHECK(interior > 0);
  const auto band = c.boundary_band();
  CHECK(!band.empty());
  for (int p : band) CHECK_FALSE(c.interior(p));
}

TEST_CASE("integration") {
  const Chart c = Chart::periodic(16, 8, 2.0, 3.0);
  const ScalarField one(c, 1.0);
  CHECK(std::abs(integrate(one) - 6.0) <= 1e-12);
  CHECK(std::abs(integrate_two_form(one) - cplx(0, -12.0)) <= 1e-12);
}

TEST_CASE("summation by parts on periodic charts") {
  std::mt19937_64 g(1);
  const Chart c = Chart::periodic(24, 20, 1.0, 1.3);
  const ScalarField f = smooth_field(c, g, 1.0), h = smooth_field(c, g, 1.0);
  const cplx lhs = integrate(f * partial_z(h)), rhs = -integrate(h * partial_z(f));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
}

TEST_CASE("d squared vanishes on periodic charts") {
  std::mt19937_64 g(2);
  const Chart c = Chart::periodic(16, 16, 1.0, 1.0);
  LieForm f(c, 2, 0);
  for (int p = 0; p < c.npts(); ++p) f.at(p) = smooth_field(c, g, 1.0)[p] * Mat::Identity(2, 2);
  CHECK(sup_norm(exterior_d(exterior_d(f))) <= 1e-10);
}

TEST_CASE("wedge bracket convention") {
  const Chart c = Chart::periodic(8, 8, 1.0, 1.0);
  std::mt19937_64 g(3);
  LieForm a(c, 2, 1), b(c, 2, 1);
  const Mat A1 = testing::random_matrix(2, g), A2 = testing::random_matrix(2, g);
  const Mat B1 = testing::random_matrix(2, g), B2 = testing::random_matrix(2, g);
  for (int p = 0; p < c.npts(); ++p) {
    a.at(p, 0) = A1;
    a.at(p, 1) = A2;
    b.at(p, 0) = B1;
    b.at(p, 1) = B2;
  }
  const LieForm w = wedge_bracket(a, b);
  CHECK((w.at(0) - (bracket(A1, B2) - bracket(A2, B1))).norm() <= 1e-14);
  CHECK_THROWS_AS(wedge_bracket(w, a), DomainError);
}

TEST_CASE("exterior derivative of a 1-form") {
  // alpha = zbar dz has d alpha = -dz^dzb... coefficient d(0)/dz - d(zbar)/dzb = -1
  const Chart c = Chart::disk(17, 17, 0.9);
  LieForm a(c, 2, 1);
  for (int p = 0; p < c.npts(); ++p) {
    a.at(p, 0) = std::conj(c.z(p)) * Mat::Identity(2, 2);
    a.at(p, 1) = Mat::Zero(2, 2);
  }
  const LieForm d = exterior_d(a);
  for (int p = 0; p < c.npts(); ++p) CHECK((d.at(p) + Mat::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 g(4);
  const Chart c = Chart::periodic(8, 10, 1.0, 1.0);
  LieForm a(c, 3, 1);
  for (auto& M : a.data) M = testing::random_matrix(3, g) * 1e-7;
  const std::string path = "/tmp/fock_chart_test_form.csv";
  write_csv(a, path);
  const LieForm b = read_lieform_csv(path, c, 3, 1);
  for (size_t k = 0; k < a.data.size(); ++k) CHECK((a.data[k] - b.data[k]).norm() == 0.0);
  const ScalarField f = smooth_field(c, g, 3.0);
  write_csv(f, "/tmp/fock_chart_test_scalar.csv");
  const ScalarField f2 = read_scalar_csv("/tmp/fock_chart_test_scalar.csv", c);
  for (int p = 0; p < c.npts(); ++p) CHECK(f[p] == f2[p]);
  {
    std::ofstream os("/tmp/fock_chart_test_bad.csv");
    os << "x,y\n1,2\n";
  }
  CHECK_THROWS_AS(read_scalar_csv("/tmp/fock_chart_test_bad.csv", c), IoError);
  CHECK_THROWS_AS(read_scalar_csv("/tmp/does/not/exist.csv", c), IoError);
  std::remove(path.c_str());
}

TEST_CASE("sup norm ignores non-interior points") {
  const Chart c = Chart::disk(17, 17, 0.5);
  ScalarField f(c);
  for (int p = 0; p < c.npts(); ++p) f[p] = c.interior(p) ? 1.0 : 100.0;
  CHECK(sup_norm(f) == doctest::Approx(1.0));
}
