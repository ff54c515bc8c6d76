#include "fock/config.hpp"

#include <cmath>
#include <fstream>

namespace fock {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_req(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

cplx parse_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(std::string(what) + ": expected a number or [re, im]");
}

std::map<int, FieldSpec> parse_family(const json& j, int n, const char* what) {
  std::map<int, FieldSpec> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object keyed by k");
  for (auto it = j.begin(); it != j.end(); ++it) {
    int k = 0;
    try {
      k = std::stoi(it.key());
    } catch (...) {
      throw ConfigError(std::string(what) + ": key '" + it.key() + "' is not an integer");
    }
    if (k < 2 || k > n) throw ConfigError(std::string(what) + ": index " + it.key() + " outside 2..n");
    out[k] = parse_field_spec(it.value());
  }
  return out;
}

}  // namespace

Chart parse_chart(const json& j) {
  if (!j.is_object()) throw ConfigError("chart: expected an object");
  const auto kind = get_req<std::string>(j, "kind");
  const int nx = get_req<int>(j, "nx");
  const int ny = get_or<int>(j, "ny", nx);
  if (nx < 8 || ny < 8) throw ConfigError("chart: nx and ny must be at least 8");
  if (kind == "periodic") {
    const double Lx = get_or<double>(j, "Lx", 1.0), Ly = get_or<double>(j, "Ly", Lx);
    if (!(Lx > 0 && Ly > 0)) throw ConfigError("chart: periods must be positive");
    return Chart::periodic(nx, ny, Lx, Ly);
  }
  if (kind == "disk") {
    const double R = get_req<double>(j, "R");
    if (!(R > 0 && R < 1)) throw ConfigError("chart: disk radius must lie in (0, 1)");
    return Chart::disk(nx, ny, R);
  }
  throw ConfigError("chart: unknown kind '" + kind + "'");
}

FieldSpec parse_field_spec(const json& j) {
  FieldSpec s;
  if (j.is_number() || j.is_array()) {
    s.value = parse_complex(j, "constant");
    return s;
  }
  if (!j.is_object()) throw ConfigError("field spec: expected a number, [re, im] or an object");
  const auto type = get_req<std::string>(j, "type");
  if (type == "constant") {
    s.kind = FieldSpec::Kind::Constant;
    s.value = parse_complex(j.contains("value") ? j.at("value") : json(0.0), "constant value");
  } else if (type == "bump") {
    s.kind = FieldSpec::Kind::Bump;
    const auto c = get_or<std::vector<double>>(j, "center", {0.0, 0.0});
    if (c.size() != 2) throw ConfigError("bump: center must have two entries");
    s.cx = c[0];
    s.cy = c[1];
    s.radius = get_req<double>(j, "radius");
    if (!(s.radius > 0)) throw ConfigError("bump: radius must be positive");
    s.amplitude = parse_complex(j.contains("amplitude") ? j.at("amplitude") : json(nullptr), "bump amplitude");
  } else if (type == "file") {
    s.kind = FieldSpec::Kind::File;
    s.path = get_req<std::string>(j, "path");
  } else if (type == "random") {
    s.kind = FieldSpec::Kind::Random;
    s.amplitude = parse_complex(j.contains("amplitude") ? j.at("amplitude") : json(0.1), "random amplitude");
  } else {
    throw ConfigError("field spec: unknown type '" + type + "'");
  }
  return s;
}

NewtonConfig parse_newton(const json& j) {
  NewtonConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError("solver: expected an object");
  c.continuation_steps = get_or<int>(j, "continuation_steps", c.continuation_steps);
  c.newton_tol = get_or<double>(j, "newton_tol", c.newton_tol);
  c.max_newton = get_or<int>(j, "max_newton", c.max_newton);
  c.cg_tol = get_or<double>(j, "cg_tol", c.cg_tol);
  c.max_cg = get_or<int>(j, "max_cg", c.max_cg);
  c.fd_check = get_or<bool>(j, "fd_check", c.fd_check);
  if (c.continuation_steps <= 0 || c.max_newton <= 0 || c.max_cg <= 0)
    throw ConfigError("solver: counts must be positive");
  if (!(c.newton_tol > 0 && c.newton_tol < 1 && c.cg_tol > 0 && c.cg_tol < 1))
    throw ConfigError("solver: tolerances must lie in (0, 1)");
  return c;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig c;
  c.raw = j;
  c.n = get_req<int>(j, "n");
  if (c.n < 2 || c.n > 8) throw ConfigError("n must lie in 2..8");
  c.chart = parse_chart(j.contains("chart") ? j.at("chart") : json(nullptr));
  c.beltrami = parse_family(j.contains("beltrami") ? j.at("beltrami") : json(nullptr), c.n, "beltrami");
  c.covector = parse_family(j.contains("covector") ? j.at("covector") : json(nullptr), c.n, "covector");
  c.solver = parse_newton(j.contains("solver") ? j.at("solver") : json(nullptr));
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.output_dir = get_or<std::string>(j, "output_dir", ".");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ScalarField bump_field(const Chart& c, double cx, double cy, double rho, cplx amp) {
  ScalarField f(c);
  for (int p = 0; p < c.npts(); ++p) {
    const double q = std::norm(c.z(p) - cplx(cx, cy)) / (rho * rho);
    if (q < 1) f[p] = amp * std::pow(1 - q, 3);
  }
  return f;
}

ScalarField random_field(const Chart& c, cplx amp, std::mt19937_64& rng) {
  static const int modes[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  double a[4][4];
  for (auto& row : a)
    for (double& v : row) v = 2 * uniform01(rng) - 1;
  const double kx = c.periodic_kind() ? 2 * M_PI / c.Lx : M_PI / c.R;
  const double ky = c.periodic_kind() ? 2 * M_PI / c.Ly : M_PI / c.R;
  ScalarField f(c);
  for (int p = 0; p < c.npts(); ++p) {
    const double x = c.x(c.ix(p)), y = c.y(c.jy(p));
    cplx v = 0;
    for (int m = 0; m < 4; ++m) {
      const double th = modes[m][0] * kx * x + modes[m][1] * ky * y;
      v += cplx(a[m][0] * std::cos(th) + a[m][1] * std::sin(th), a[m][2] * std::cos(th) + a[m][3] * std::sin(th));
    }
    f[p] = 0.25 * amp * v;
  }
  if (!c.periodic_kind()) {
    const ScalarField w = bump_field(c, 0, 0, c.R, 1.0);
    f = f * w;
  }
  return f;
}

ScalarField build_field(const FieldSpec& s, const Chart& c, std::mt19937_64& rng) {
  switch (s.kind) {
    case FieldSpec::Kind::Constant:
      return ScalarField(c, s.value);
    case FieldSpec::Kind::Bump:
      return bump_field(c, s.cx, s.cy, s.radius, s.amplitude);
    case FieldSpec::Kind::File:
      return read_scalar_csv(s.path, c);
    case FieldSpec::Kind::Random:
      return random_field(c, s.amplitude, rng);
  }
  return ScalarField(c);
}

BeltramiField build_beltrami(const RunConfig& cfg, std::mt19937_64& rng) {
  BeltramiField mu(cfg.chart, cfg.n);
  for (const auto& [k, s] : cfg.beltrami) mu.mu[k - 2] = build_field(s, cfg.chart, rng);
  return mu;
}

CovectorField build_covector(const RunConfig& cfg, std::mt19937_64& rng) {
  CovectorField t(cfg.chart, cfg.n);
  for (const auto& [k, s] : cfg.covector) t.t[k - 2] = build_field(s, cfg.chart, rng);
  return t;
}

void Report::warn(const std::string& m) {
  messages.push_back("warn: " + m);
  if (status == Status::Ok) status = Status::Warn;
}

void Report::fail(const std::string& m) {
  messages.push_back("fail: " + m);
  status = Status::Fail;
}

std::string status_name(Status s) {
  switch (s) {
    case Status::Ok:
      return "ok";
    case Status::Warn:
      return "warn";
    case Status::Fail:
      return "fail";
  }
  return "fail";
}

json Report::to_json() const {
  json j;
  j["command"] = command;
  j["config_echo"] = config_echo;
  j["residual_norms"] = residual_norms;
  j["iteration_traces"] = iteration_traces;
  j["timings"] = timings;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  j["status"] = status_name(status);
  j["messages"] = messages;
  return j;
}

}  // namespace fock
