#include "fock/chart.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fock {

Chart Chart::periodic(int nx, int ny, double Lx, double Ly) {
  if (nx < 8 || ny < 8) throw DimensionError("chart: nx, ny must be at least 8");
  if (!(Lx > 0 && Ly > 0)) throw DomainError("chart: periods must be positive");
  Chart c;
  c.kind = ChartKind::PeriodicRect;
  c.nx = nx;
  c.ny = ny;
  c.Lx = Lx;
  c.Ly = Ly;
  c.hx = Lx / nx;
  c.hy = Ly / ny;
  c.interior_mask.assign(c.npts(), 1);
  return c;
}

Chart Chart::disk(int nx, int ny, double R) {
  if (nx < 8 || ny < 8) throw DimensionError("chart: nx, ny must be at least 8");
  if (!(R > 0 && R < 1)) throw DomainError("chart: disk radius must lie in (0, 1)");
  Chart c;
  c.kind = ChartKind::DirichletDisk;
  c.nx = nx;
  c.ny = ny;
  c.R = R;
  c.hx = 2 * R / (nx - 1);
  c.hy = 2 * R / (ny - 1);
  c.interior_mask.assign(c.npts(), 0);
  // two grid lines of margin keep every stencil used by interior points central
  for (int j = 2; j <= ny - 3; ++j)
    for (int i = 2; i <= nx - 3; ++i) {
      const double x = c.x(i), y = c.y(j);
      if (x * x + y * y <= R * R * (1 + 1e-12)) c.interior_mask[c.index(i, j)] = 1;
    }
  return c;
}

double Chart::x(int i) const { return kind == ChartKind::PeriodicRect ? i * hx : -R + i * hx; }
double Chart::y(int j) const { return kind == ChartKind::PeriodicRect ? j * hy : -R + j * hy; }

std::vector<int> Chart::boundary_band() const {
  std::vector<int> out;
  for (int p = 0; p < npts(); ++p) {
    if (interior(p)) continue;
    const int i = ix(p), j = jy(p);
    bool adj = false;
    for (int dj = -1; dj <= 1 && !adj; ++dj)
      for (int di = -1; di <= 1 && !adj; ++di) {
        const int a = i + di, b = j + dj;
        if (a >= 0 && a < nx && b >= 0 && b < ny && interior(index(a, b))) adj = true;
      }
    if (adj) out.push_back(p);
  }
  return out;
}

bool Chart::same_grid(const Chart& o) const {
  return kind == o.kind && nx == o.nx && ny == o.ny && hx == o.hx && hy == o.hy;
}

LieForm::LieForm(const Chart& c, int n_, int degree_) : chart(c), n(n_), degree(degree_) {
  if (degree < 0 || degree > 2) throw DomainError("LieForm: degree must be 0, 1 or 2");
  data.assign(size_t(c.npts()) * ncomp(), Mat::Zero(n, n));
}

double LieForm::trace_defect() const {
  double worst = 0;
  for (const auto& M : data) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(M.trace()) / scale);
  }
  return worst;
}

namespace {
void check_same(const LieForm& a, const LieForm& b) {
  if (a.degree != b.degree || a.n != b.n || !a.chart.same_grid(b.chart))
    throw DimensionError("LieForm: shape mismatch");
}
void check_same(const ScalarField& a, const ScalarField& b) {
  if (!a.chart.same_grid(b.chart)) throw DimensionError("ScalarField: chart mismatch");
}
}  // namespace

LieForm operator+(const LieForm& a, const LieForm& b) {
  check_same(a, b);
  LieForm r = a;
  for (size_t k = 0; k < r.data.size(); ++k) r.data[k] += b.data[k];
  return r;
}

LieForm operator-(const LieForm& a, const LieForm& b) {
  check_same(a, b);
  LieForm r = a;
  for (size_t k = 0; k < r.data.size(); ++k) r.data[k] -= b.data[k];
  return r;
}

LieForm operator*(cplx s, const LieForm& a) {
  LieForm r = a;
  for (auto& M : r.data) M *= s;
  return r;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  check_same(a, b);
  ScalarField r = a;
  for (size_t k = 0; k < r.v.size(); ++k) r.v[k] += b.v[k];
  return r;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  check_same(a, b);
  ScalarField r = a;
  for (size_t k = 0; k < r.v.size(); ++k) r.v[k] -= b.v[k];
  return r;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  check_same(a, b);
  ScalarField r = a;
  for (size_t k = 0; k < r.v.size(); ++k) r.v[k] *= b.v[k];
  return r;
}

ScalarField operator*(cplx s, const ScalarField& a) {
  ScalarField r = a;
  for (auto& x : r.v) x *= s;
  return r;
}

ScalarField partial_z(const ScalarField& f) {
  ScalarField dz(f.chart), dzb(f.chart);
  dz_dzb(f.chart, f.v, dz.v, dzb.v);
  return dz;
}

ScalarField partial_zbar(const ScalarField& f) {
  ScalarField dz(f.chart), dzb(f.chart);
  dz_dzb(f.chart, f.v, dz.v, dzb.v);
  return dzb;
}

LieForm exterior_d(const LieForm& alpha) {
  const Chart& c = alpha.chart;
  if (alpha.degree == 0) {
    LieForm out(c, alpha.n, 1);
    std::vector<Mat> dz, dzb;
    dz_dzb(c, alpha.data, dz, dzb);
    for (int p = 0; p < c.npts(); ++p) {
      out.at(p, 0) = dz[p];
      out.at(p, 1) = dzb[p];
    }
    return out;
  }
  if (alpha.degree == 1) {
    LieForm out(c, alpha.n, 2);
    std::vector<Mat> adz, adzb, bdz, bdzb;
    dz_dzb(c, alpha.data, adz, adzb, 2, 0);
    dz_dzb(c, alpha.data, bdz, bdzb, 2, 1);
    for (int p = 0; p < c.npts(); ++p) out.at(p) = bdz[p] - adzb[p];
    return out;
  }
  throw DomainError("exterior_d: degree-2 input");
}

LieForm wedge_bracket(const LieForm& alpha, const LieForm& beta) {
  if (alpha.degree + beta.degree > 2) throw DomainError("wedge_bracket: degree overflow");
  if (alpha.n != beta.n || !alpha.chart.same_grid(beta.chart))
    throw DimensionError("wedge_bracket: shape mismatch");
  const Chart& c = alpha.chart;
  LieForm out(c, alpha.n, alpha.degree + beta.degree);
  for (int p = 0; p < c.npts(); ++p) {
    if (alpha.degree == 1 && beta.degree == 1) {
      out.at(p) = bracket(alpha.at(p, 0), beta.at(p, 1)) - bracket(alpha.at(p, 1), beta.at(p, 0));
    } else if (alpha.degree == 0) {
      for (int k = 0; k < out.ncomp(); ++k) out.at(p, k) = bracket(alpha.at(p), beta.at(p, k));
    } else {
      for (int k = 0; k < out.ncomp(); ++k) out.at(p, k) = bracket(alpha.at(p, k), beta.at(p));
    }
  }
  return out;
}

cplx integrate(const ScalarField& f) {
  const Chart& c = f.chart;
  cplx s = 0;
  for (int p = 0; p < c.npts(); ++p)
    if (c.interior(p)) s += f.v[p];
  return s * c.hx * c.hy;
}

cplx integrate_two_form(const ScalarField& c) { return cplx(0, -2) * integrate(c); }

double sup_norm(const LieForm& a) {
  double m = 0;
  for (int p = 0; p < a.chart.npts(); ++p) {
    if (!a.chart.interior(p)) continue;
    double s = 0;
    for (int k = 0; k < a.ncomp(); ++k) s += a.at(p, k).squaredNorm();
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

double sup_norm(const ScalarField& f) {
  double m = 0;
  for (int p = 0; p < f.chart.npts(); ++p)
    if (f.chart.interior(p)) m = std::max(m, std::abs(f.v[p]));
  return m;
}

ScalarField trace_field(const LieForm& a, int comp) {
  ScalarField t(a.chart);
  for (int p = 0; p < a.chart.npts(); ++p) t.v[p] = a.at(p, comp).trace();
  return t;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

}  // namespace

void write_csv(const LieForm& a, const std::string& path) {
  auto os = open_out(path);
  os << "i,j,row,col,comp,re,im\n";
  const Chart& c = a.chart;
  for (int p = 0; p < c.npts(); ++p)
    for (int k = 0; k < a.ncomp(); ++k) {
      const char* comp = a.degree == 1 ? (k == 0 ? "dz" : "dzb") : "0";
      const Mat& M = a.at(p, k);
      for (int r = 0; r < a.n; ++r)
        for (int q = 0; q < a.n; ++q)
          os << c.ix(p) << ',' << c.jy(p) << ',' << r << ',' << q << ',' << comp << ','
             << num(M(r, q).real()) << ',' << num(M(r, q).imag()) << '\n';
    }
  if (!os) throw IoError("write failed: " + path);
}

void write_csv(const ScalarField& f, const std::string& path) {
  auto os = open_out(path);
  os << "i,j,re,im\n";
  const Chart& c = f.chart;
  for (int p = 0; p < c.npts(); ++p)
    os << c.ix(p) << ',' << c.jy(p) << ',' << num(f.v[p].real()) << ',' << num(f.v[p].imag()) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

LieForm read_lieform_csv(const std::string& path, const Chart& c, int n, int degree) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("i,j,row,col,comp,re,im", 0) != 0) throw IoError("bad header in " + path);
  LieForm a(c, n, degree);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t = split(line);
    if (t.size() != 7) throw IoError(path + ":" + std::to_string(lineno) + ": expected 7 fields");
    try {
      const int i = std::stoi(t[0]), j = std::stoi(t[1]), r = std::stoi(t[2]), q = std::stoi(t[3]);
      int k = 0;
      if (t[4] == "dzb") k = 1;
      else if (t[4] != "dz" && t[4] != "0") throw IoError("bad component label");
      if (i < 0 || i >= c.nx || j < 0 || j >= c.ny || r < 0 || r >= n || q < 0 || q >= n || k >= a.ncomp())
        throw IoError("index out of range");
      a.at(c.index(i, j), k)(r, q) = cplx(std::stod(t[5]), std::stod(t[6]));
    } catch (const std::logic_error& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const IoError& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return a;
}

ScalarField read_scalar_csv(const std::string& path, const Chart& c) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("i,j,re,im", 0) != 0) throw IoError("bad header in " + path);
  ScalarField f(c);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t = split(line);
    if (t.size() != 4) throw IoError(path + ":" + std::to_string(lineno) + ": expected 4 fields");
    try {
      const int i = std::stoi(t[0]), j = std::stoi(t[1]);
      if (i < 0 || i >= c.nx || j < 0 || j >= c.ny) throw IoError("index out of range");
      f.v[c.index(i, j)] = cplx(std::stod(t[2]), std::stod(t[3]));
    } catch (const std::logic_error& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const IoError& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return f;
}

}  // namespace fock
