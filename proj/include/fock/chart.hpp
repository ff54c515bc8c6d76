#ifndef FOCK_CHART_HPP
#define FOCK_CHART_HPP

#include "fock/fiber.hpp"

#include <string>
#include <vector>

namespace fock {

enum class ChartKind { PeriodicRect, DirichletDisk };

/// Uniform Cartesian grid, point p = j * nx + i at (x_i, y_j).
struct Chart {
  ChartKind kind = ChartKind::PeriodicRect;
  int nx = 0, ny = 0;
  double Lx = 0, Ly = 0;  // periodic periods
  double R = 0;           // disk radius
  double hx = 0, hy = 0;
  std::vector<char> interior_mask;

  static Chart periodic(int nx, int ny, double Lx, double Ly);
  static Chart disk(int nx, int ny, double R);

  int npts() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  int ix(int p) const { return p % nx; }
  int jy(int p) const { return p / nx; }
  double x(int i) const;
  double y(int j) const;
  cplx z(int p) const { return {x(ix(p)), y(jy(p))}; }
  bool periodic_kind() const { return kind == ChartKind::PeriodicRect; }
  /// Points carrying unknowns and entering integrals and sup-norms.
  bool interior(int p) const { return interior_mask[p] != 0; }
  /// Non-interior points with an interior 8-neighbour.
  std::vector<int> boundary_band() const;
  bool same_grid(const Chart& o) const;
};

struct ScalarField {
  Chart chart;
  std::vector<cplx> v;

  ScalarField() = default;
  explicit ScalarField(const Chart& c, cplx value = 0.0) : chart(c), v(c.npts(), value) {}
  cplx& operator[](int p) { return v[p]; }
  const cplx& operator[](int p) const { return v[p]; }
};

/// Degree 0 and 2 store one matrix per point; degree 1 stores (dz, dzb).
struct LieForm {
  Chart chart;
  int n = 0;
  int degree = 0;
  std::vector<Mat> data;

  LieForm() = default;
  LieForm(const Chart& c, int n, int degree);

  int ncomp() const { return degree == 1 ? 2 : 1; }
  Mat& at(int p, int comp = 0) { return data[p * ncomp() + comp]; }
  const Mat& at(int p, int comp = 0) const { return data[p * ncomp() + comp]; }
  /// Largest |tr| over all entries relative to entry magnitudes.
  double trace_defect() const;
};

LieForm operator+(const LieForm& a, const LieForm& b);
LieForm operator-(const LieForm& a, const LieForm& b);
LieForm operator*(cplx s, const LieForm& a);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(cplx s, const ScalarField& a);

// Stencil primitives at grid point (i, j); one-sided only at the outer grid edge.
template <class T, class Get>
T diff_x(const Chart& c, int i, int j, Get get) {
  if (c.periodic_kind()) {
    const int ip = (i + 1) % c.nx, im = (i + c.nx - 1) % c.nx;
    return (get(ip, j) - get(im, j)) * (0.5 / c.hx);
  }
  if (i == 0) return (-3.0 * get(0, j) + 4.0 * get(1, j) - get(2, j)) * (0.5 / c.hx);
  if (i == c.nx - 1) return (3.0 * get(i, j) - 4.0 * get(i - 1, j) + get(i - 2, j)) * (0.5 / c.hx);
  return (get(i + 1, j) - get(i - 1, j)) * (0.5 / c.hx);
}

template <class T, class Get>
T diff_y(const Chart& c, int i, int j, Get get) {
  if (c.periodic_kind()) {
    const int jp = (j + 1) % c.ny, jm = (j + c.ny - 1) % c.ny;
    return (get(i, jp) - get(i, jm)) * (0.5 / c.hy);
  }
  if (j == 0) return (-3.0 * get(i, 0) + 4.0 * get(i, 1) - get(i, 2)) * (0.5 / c.hy);
  if (j == c.ny - 1) return (3.0 * get(i, j) - 4.0 * get(i, j - 1) + get(i, j - 2)) * (0.5 / c.hy);
  return (get(i, j + 1) - get(i, j - 1)) * (0.5 / c.hy);
}

/// d/dz and d/dzb of a per-point array (values indexed by chart point).
template <class T>
void dz_dzb(const Chart& c, const std::vector<T>& f, std::vector<T>& dz, std::vector<T>& dzb,
            int stride = 1, int offset = 0) {
  const int N = c.npts();
  dz.resize(N);
  dzb.resize(N);
  auto get = [&](int i, int j) -> const T& { return f[c.index(i, j) * stride + offset]; };
  const cplx I(0, 1);
  for (int j = 0; j < c.ny; ++j)
    for (int i = 0; i < c.nx; ++i) {
      const T gx = diff_x<T>(c, i, j, get);
      const T gy = diff_y<T>(c, i, j, get);
      const int p = c.index(i, j);
      dz[p] = 0.5 * (gx - I * gy);
      dzb[p] = 0.5 * (gx + I * gy);
    }
}

ScalarField partial_z(const ScalarField& f);
ScalarField partial_zbar(const ScalarField& f);

/// Degree 0 -> 1, degree 1 -> 2 (dz^dzb coefficient db/dz - da/dzb).
LieForm exterior_d(const LieForm& alpha);

/// Pointwise graded bracket; for 1-forms [a dz + b dzb ^ c dz + e dzb] = [a,e] - [b,c].
LieForm wedge_bracket(const LieForm& alpha, const LieForm& beta);

/// Midpoint rule over interior points.
cplx integrate(const ScalarField& f);
/// Integral of c dz^dzb = -2i c dx dy.
cplx integrate_two_form(const ScalarField& c);

/// Max over interior points of the Frobenius norm (both components for degree 1).
double sup_norm(const LieForm& a);
double sup_norm(const ScalarField& f);

/// tr of the matrix at each point (component comp).
ScalarField trace_field(const LieForm& a, int comp = 0);

void write_csv(const LieForm& a, const std::string& path);
void write_csv(const ScalarField& f, const std::string& path);
LieForm read_lieform_csv(const std::string& path, const Chart& c, int n, int degree);
ScalarField read_scalar_csv(const std::string& path, const Chart& c);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fock

#endif
