#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fock/fiber.hpp"
#include "test_util.hpp"

using namespace fock;
using fock::testing::random_matrix;
using fock::testing::random_traceless;

TEST_CASE("principal nilpotent is the subdiagonal of ones") {
  const Mat F = principal_nilpotent(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(F(a, b) == cplx(a == b + 1 ? 1.0 : 0.0));
  CHECK_THROWS_AS(principal_nilpotent(1), DimensionError);
}

TEST_CASE("sl2 triple relations hold exactly") {
  for (int n = 2; n <= 6; ++n) {
    const Sl2Triple t = complete_sl2_triple(n);
    CHECK((bracket(t.H, t.E) - 2.0 * t.E).norm() == 0.0);
    CHECK((bracket(t.H, t.F) + 2.0 * t.F).norm() == 0.0);
    CHECK((bracket(t.E, t.F) - t.H).norm() == 0.0);
  }
}

TEST_CASE("n = 3 triple entries") {
  const Sl2Triple t = complete_sl2_triple(3);
  CHECK(t.E(0, 1) == cplx(2.0));
  CHECK(t.E(1, 2) == cplx(2.0));
  CHECK(t.H(0, 0) == cplx(2.0));
  CHECK(t.H(1, 1) == cplx(0.0));
  CHECK(t.H(2, 2) == cplx(-2.0));
}

TEST_CASE("weight basis: size, weights and trace duality") {
  for (int n = 2; n <= 5; ++n) {
    const Sl2Triple t = complete_sl2_triple(n);
    const auto G = weight_basis_G(n);
    CHECK(int(G.size()) == n * n - 1);
    for (const auto& g : G) {
      CHECK((bracket(t.H, g.G) - double(2 * g.j) * g.G).norm() <= 1e-12 * g.G.norm());
      if (g.j == g.i) {
        Mat Ei = Mat::Identity(n, n);
        for (int k = 0; k < g.i; ++k) Ei = Ei * t.E;
        CHECK((g.G - Ei).norm() == 0.0);
      }
    }
    for (const auto& a : G)
      for (const auto& b : G) {
        const double r = std::abs(trace_pairing(a.G, b.G)) / (a.G.norm() * b.G.norm());
        if (b.i == a.i && b.j == -a.j)
          CHECK(r > 1e-6);
        else
          CHECK(r <= 1e-12);
      }
  }
}

TEST_CASE("centralizer of F is spanned by its powers") {
  for (int n = 2; n <= 6; ++n) {
    const Mat F = principal_nilpotent(n);
    const auto Z = centralizer_basis(F);
    REQUIRE(int(Z.size()) == n - 1);
    Mat basis(n * n, Z.size());
    for (size_t k = 0; k < Z.size(); ++k) basis.col(k) = Eigen::Map<const Vec>(Z[k].data(), n * n);
    Mat Fk = F;
    for (int k = 1; k < n; ++k) {
      const Vec v = Eigen::Map<const Vec>(Fk.data(), n * n);
      const Vec res = v - basis * basis.completeOrthogonalDecomposition().solve(v);
      CHECK(res.norm() <= 1e-10 * v.norm());
      Fk = Fk * F;
    }
  }
}

TEST_CASE("involutions") {
  std::mt19937_64 g(3);
  for (int n = 2; n <= 5; ++n) {
    const InvolutionSet inv(n);
    const Mat F = principal_nilpotent(n);
    CHECK((inv.sigma(F) + F).norm() == 0.0);
    for (const auto& z : centralizer_basis(F)) CHECK((inv.sigma(z) + z).norm() <= 1e-12);
    const Mat X = random_traceless(n, g), Y = random_traceless(n, g);
    CHECK((inv.sigma(inv.sigma(X)) - X).norm() <= 1e-13);
    CHECK((inv.sigma(bracket(X, Y)) - bracket(inv.sigma(X), inv.sigma(Y))).norm() <= 1e-12);
    CHECK((inv.rho(bracket(X, Y)) - bracket(inv.rho(X), inv.rho(Y))).norm() <= 1e-12);
    CHECK((inv.sigma(inv.rho(X)) - inv.rho(inv.sigma(X))).norm() <= 1e-13);
  }
}

TEST_CASE("ad_vec is the matrix of the bracket on column-major vec") {
  std::mt19937_64 g(5);
  const Mat X = random_matrix(3, g), Y = random_matrix(3, g);
  const Mat B = bracket(X, Y);
  const Vec v = ad_vec(X) * Eigen::Map<const Vec>(Y.data(), 9);
  CHECK((v - Eigen::Map<const Vec>(B.data(), 9)).norm() <= 1e-13);
}

TEST_CASE("adjoint operator rank and kernel") {
  const AdOperator ad(principal_nilpotent(4));
  CHECK(ad.rank() == 16 - 1 - 3);
  CHECK(ad.kernel_basis().size() == 3);
  CHECK(ad.image_basis().size() == 12);
}

TEST_CASE("sl coordinates round trip") {
  std::mt19937_64 g(9);
  const Mat X = random_traceless(4, g);
  CHECK((sl_from_coords(sl_coords(X), 4) - X).norm() <= 1e-13);
  CHECK(sl_basis(4).size() == 15);
}

TEST_CASE("principal nilpotency test") {
  CHECK(is_principal_nilpotent(principal_nilpotent(4)));
  Mat E12 = Mat::Zero(3, 3);
  E12(0, 1) = 1;
  CHECK_FALSE(is_principal_nilpotent(E12));
  std::mt19937_64 g(11);
  const Mat S = random_matrix(4, g) + 4.0 * Mat::Identity(4, 4);
  CHECK(is_principal_nilpotent(S * principal_nilpotent(4) * S.inverse(), 1e-8));
  CHECK_FALSE(is_principal_nilpotent(Mat::Identity(3, 3)));
}

TEST_CASE("sigma-invariant bases") {
  for (int n = 2; n <= 5; ++n) {
    const InvolutionSet inv(n);
    const auto S = sigma_invariant_basis(n);
    CHECK(int(S.size()) == n * (n - 1) / 2);
    for (const auto& s : S) CHECK((inv.sigma(s) - s).norm() <= 1e-12);
    const auto B = hermitian_sigma_basis(n);
    CHECK(int(B.size()) == n * (n - 1) / 2);
    for (size_t a = 0; a < B.size(); ++a) {
      CHECK((B[a] - B[a].adjoint()).norm() <= 1e-12);
      CHECK((inv.sigma(B[a]) - B[a]).norm() <= 1e-12);
      for (size_t b = 0; b < B.size(); ++b)
        CHECK(std::abs((B[a] * B[b]).trace() - (a == b ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}
