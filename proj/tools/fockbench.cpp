// fockbench: command-line driver for the Fock field toolkit.
#include "fock/config.hpp"
#include "fock/hcsflow.hpp"
#include "fock/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace fock;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kWarn = 1, kFail = 2, kUsage = 3, kConfig = 4, kIo = 5 };

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

int emit(const Report& r, const std::string& dir) {
  const json j = r.to_json();
  std::cout << j.dump(2) << "\n";
  if (!dir.empty()) {
    ensure_dir(dir);
    std::ofstream os(join(dir, "report.json"));
    if (!os) throw IoError("cannot write report in '" + dir + "'");
    os << j.dump(2) << "\n";
  }
  return int(r.status);
}

json check_json(const std::vector<Check>& cs, Report& r) {
  json out = json::array();
  for (const auto& c : cs) {
    out.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"status", c.ok ? "ok" : "fail"}});
    if (!c.ok) r.fail(c.name + " = " + std::to_string(c.value));
  }
  return out;
}

json sup_list(const std::vector<ScalarField>& v) {
  json a = json::array();
  for (const auto& f : v) a.push_back(sup_norm(f));
  return a;
}

double sup_diff(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b) {
  double m = 0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max(m, sup_norm(a[k] - b[k]));
  return m;
}

RunConfig with_chart(RunConfig c, const Chart& ch) {
  c.chart = ch;
  return c;
}

Chart refined(const Chart& c) {
  return c.periodic_kind() ? Chart::periodic(2 * c.nx, 2 * c.ny, c.Lx, c.Ly) : Chart::disk(2 * c.nx, 2 * c.ny, c.R);
}

// ---- subcommands ----

int cmd_fiber_verify(int n, const std::string& out) {
  Report r;
  r.command = "fiber-verify";
  r.config_echo = {{"n", n}};
  const auto t0 = std::chrono::steady_clock::now();
  if (n < 2) throw DimensionError("fiber-verify: n must be at least 2");
  r.extra["checks"] = check_json(fiber_suite(n), r);
  r.timings["total_s"] = seconds_since(t0);
  return emit(r, out);
}

int cmd_point_verify(int n, int samples, std::uint64_t seed, const std::string& out) {
  Report r;
  r.command = "point-verify";
  r.config_echo = {{"n", n}, {"samples", samples}, {"seed", seed}};
  const auto t0 = std::chrono::steady_clock::now();
  if (n < 2) throw DimensionError("point-verify: n must be at least 2");
  const PointSuiteResult s = point_suite(n, samples, seed);
  r.extra["checks"] = check_json(s.checks, r);
  r.extra["criterion_compared"] = s.criterion_compared;
  r.timings["total_s"] = seconds_since(t0);
  return emit(r, out);
}

int cmd_fillin(const RunConfig& cfg, Report& r) {
  std::mt19937_64 rng(cfg.seed);
  const auto& raw = cfg.raw;
  LieForm Phi = raw.contains("phi_file") ? read_lieform_csv(raw.at("phi_file").get<std::string>(), cfg.chart, cfg.n, 1)
                                         : beltrami_phi(build_beltrami(cfg, rng));
  HermitianField h(cfg.chart, cfg.n);
  std::string metric = "identity";
  std::optional<FuchsianData> fd;
  if (raw.contains("metric")) {
    const json& m = raw.at("metric");
    if (m.is_string() && m.get<std::string>() == "fuchsian") {
      fd = fuchsian_reference(cfg.n, cfg.chart);
      h = fd->h;
      metric = "fuchsian";
    } else if (m.is_object() && m.contains("file")) {
      const LieForm hf = read_lieform_csv(m.at("file").get<std::string>(), cfg.chart, cfg.n, 0);
      h.h = hf.data;
      h.validate();
      metric = "file";
    } else if (!(m.is_string() && m.get<std::string>() == "identity")) {
      throw ConfigError("metric: expected \"identity\", \"fuchsian\" or {\"file\": path}");
    }
  }
  FillInOptions opt;
  const std::string method = raw.value("method", std::string("constructive"));
  if (method == "joint")
    opt.method = FillInMethod::Joint;
  else if (method != "constructive")
    throw ConfigError("method: expected constructive or joint");
  const ConnectionField A = fill_in_unitary(Phi, h, opt);
  ensure_dir(cfg.output_dir);
  write_csv(A.A, join(cfg.output_dir, "A.csv"));
  r.residual_norms = {{"d_A Phi", A.residual_phi},
                      {"d_A Phi*", A.residual_psi},
                      {"sigma_defect", A.sigma_defect},
                      {"unitarity_defect", A.unitarity_defect},
                      {"unitarity_tolerance", unitarity_tolerance(h)}};
  r.extra["metric"] = metric;
  r.extra["sigma_invariant"] = A.sigma_invariant;
  r.extra["unitary"] = A.unitary;
  if (fd) r.residual_norms["chern_difference"] = sup_norm(A.A - fd->A.A);
  if (A.residual_phi > 1e-8 || A.residual_psi > 1e-8)
    r.warn("compatibility residual above 1e-8 (worst point " + std::to_string(A.worst_point) + ")");
  if (!A.sigma_invariant) r.warn("connection not sigma-invariant");
  if (!A.unitary) r.warn("connection not unitary for the supplied metric");
  return 0;
}

int cmd_fuchsian(const RunConfig& cfg, Report& r) {
  std::vector<int> grids = cfg.raw.value("grids", std::vector<int>{cfg.chart.nx, 2 * cfg.chart.nx});
  if (grids.size() < 2) throw ConfigError("grids: need at least two grid sizes");
  json per = json::array();
  std::vector<double> res;
  ensure_dir(cfg.output_dir);
  for (int N : grids) {
    if (N < 8) throw ConfigError("grids: sizes must be at least 8");
    const auto t0 = std::chrono::steady_clock::now();
    const FuchsianData d = fuchsian_reference(cfg.n, Chart::disk(N, N, cfg.chart.R));
    res.push_back(d.residual);
    per.push_back({{"grid", N}, {"residual", d.residual}, {"c0", d.c0}, {"unitarity_defect", d.A.unitarity_defect},
                   {"time_s", seconds_since(t0)}});
    write_csv(d.A.A, join(cfg.output_dir, "A_" + std::to_string(N) + ".csv"));
    LieForm hf(d.chart, d.n, 0);
    hf.data = d.h.h;
    write_csv(hf, join(cfg.output_dir, "h_" + std::to_string(N) + ".csv"));
  }
  json ratios = json::array();
  for (size_t k = 0; k + 1 < res.size(); ++k) {
    const double q = res[k] / res[k + 1];
    ratios.push_back(q);
    if (q < 3.0 || q > 5.3) r.warn("refinement ratio " + std::to_string(q) + " outside [3, 5.3] at grid index " +
                                   std::to_string(k));
  }
  r.iteration_traces["grids"] = per;
  r.residual_norms["residuals"] = res;
  r.residual_norms["ratios"] = ratios;
  return 0;
}

int cmd_solve(const RunConfig& cfg, Report& r) {
  std::mt19937_64 rng(cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const FuchsianData base = fuchsian_reference(cfg.n, cfg.chart);
  r.timings["fuchsian_s"] = seconds_since(t0);
  const BeltramiField mu = build_beltrami(cfg, rng);
  SolveReport rep;
  LieForm eta_u;
  LieForm eta;
  try {
    eta = newton_continuation(base, mu, cfg.solver, rep, &eta_u);
  } catch (const DomainError& e) {
    r.fail(e.what());
    return 0;
  }
  json steps = json::array();
  for (const auto& s : rep.per_step) {
    json j = {{"s", s.s},
              {"newton_iters", s.newton_iters},
              {"residuals", s.residuals},
              {"cg_iters", s.cg_iters},
              {"projection", s.projection},
              {"min_rayleigh", s.min_rayleigh}};
    if (s.fd_rel_err >= 0) j["fd_rel_err"] = s.fd_rel_err;
    steps.push_back(j);
  }
  r.iteration_traces["per_step"] = steps;
  r.residual_norms["final_residual"] = rep.final_residual;
  r.residual_norms["eta_sup_norm_unitary_frame"] = rep.eta_norm;
  r.residual_norms["fuchsian_base_residual"] = base.residual;
  r.timings["wall_time_s"] = rep.wall_time_s;
  r.extra["per_step"] = steps;
  r.extra["final_residual"] = rep.final_residual;
  r.extra["wall_time_s"] = rep.wall_time_s;

  ensure_dir(cfg.output_dir);
  write_csv(eta, join(cfg.output_dir, "eta.csv"));
  // final fields in the unitary frame h = 1
  const LieForm Phi_u = conjugate_field(to_unitary_frame(beltrami_phi(mu), base.h), eta_u);
  FillInOptions fo;
  fo.method = FillInMethod::Joint;
  const ConnectionField A = fill_in(Phi_u, hermitian_adjoint_field(Phi_u), fo);
  write_csv(Phi_u, join(cfg.output_dir, "phi_unitary.csv"));
  write_csv(A.A, join(cfg.output_dir, "A_unitary.csv"));
  if (!rep.converged) r.fail(rep.message);
  return 0;
}

struct MuholoState {
  BeltramiField mu;
  CovectorField t;
  LieForm Phi;
  ConnectionField A;
};

MuholoState muholo_state(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  MuholoState s;
  s.mu = build_beltrami(cfg, rng);
  s.t = build_covector(cfg, rng);
  s.Phi = beltrami_phi(s.mu);
  s.A = inject_covector(s.Phi, HermitianField(cfg.chart, cfg.n), s.t);
  return s;
}

int cmd_muholo(const RunConfig& cfg, Report& r) {
  const bool refine = cfg.raw.value("refine", true);
  std::vector<Chart> charts{cfg.chart};
  if (refine) charts.push_back(refined(cfg.chart));
  json per = json::array();
  std::vector<double> diffs;
  ensure_dir(cfg.output_dir);
  for (size_t g = 0; g < charts.size(); ++g) {
    const MuholoState s = muholo_state(with_chart(cfg, charts[g]));
    const auto tensor = mu_holo_residual(extract_beltrami(s.Phi), covector_extract(s.A.A, s.Phi));
    const auto gauge = gauge_muholo_residual(s.Phi, s.A.A);
    const double d = sup_diff(tensor, gauge);
    diffs.push_back(d);
    per.push_back({{"grid", charts[g].nx}, {"tensor", sup_list(tensor)}, {"gauge", sup_list(gauge)}, {"difference", d}});
    if (g == 0)
      for (int k = 2; k <= cfg.n; ++k) {
        write_csv(tensor[k - 2], join(cfg.output_dir, "tensor_residual_" + std::to_string(k) + ".csv"));
        write_csv(gauge[k - 2], join(cfg.output_dir, "gauge_residual_" + std::to_string(k) + ".csv"));
      }
  }
  r.iteration_traces["grids"] = per;
  r.residual_norms["difference"] = diffs;
  if (diffs.size() == 2) {
    const double q = diffs[0] / diffs[1];
    r.residual_norms["ratio"] = q;
    if (q < 3.0 || q > 5.3) r.warn("equivalence difference ratio " + std::to_string(q) + " outside [3, 5.3]");
  }
  return 0;
}

json flow_table(const LieForm& Phi, const LieForm& A) {
  const auto gauge = gauge_muholo_residual(Phi, A);
  const auto tensor = mu_holo_residual(extract_beltrami(Phi), covector_extract(A, Phi));
  return {{"curvature", sup_norm(curvature_total(A, Phi, hermitian_adjoint_field(Phi)))},
          {"gauge_muholo", sup_list(gauge)},
          {"tensor_muholo", sup_list(tensor)}};
}

int cmd_flow(const RunConfig& cfg, Report& r) {
  if (!cfg.raw.contains("hamiltonian")) throw ConfigError("flow: missing field 'hamiltonian'");
  const json& hj = cfg.raw.at("hamiltonian");
  if (!hj.is_object() || !hj.contains("ell") || !hj.contains("w"))
    throw ConfigError("hamiltonian: expected {\"ell\": l, \"w\": spec}");
  const double eps = cfg.raw.value("eps", 1e-4);
  const int steps = cfg.raw.value("steps", 1);
  if (!(eps > 0) || steps < 1) throw ConfigError("flow: eps and steps must be positive");
  MuholoState s = muholo_state(cfg);
  std::mt19937_64 rng(cfg.seed + 1);
  HamiltonianTerm H;
  H.ell = hj.at("ell").get<int>();
  if (H.ell < 2 || H.ell > cfg.n) throw ConfigError("hamiltonian: ell must lie in 2..n");
  H.w = build_field(parse_field_spec(hj.at("w")), cfg.chart, rng);
  const HermitianField I(cfg.chart, cfg.n);

  r.iteration_traces["before"] = flow_table(s.Phi, s.A.A);
  // first variation against the closed formulas
  const LieForm dPhi = gauge_variation_phi(s.Phi, s.A.A, H);
  const BeltramiField m1 = extract_beltrami(s.Phi + eps * dPhi), m0 = extract_beltrami(s.Phi);
  const BeltramiField dm = hamiltonian_variation_mu(m0, H);
  FlowState st = euler_step(s.Phi, s.A.A, I, H, eps);
  const CovectorField t0 = covector_extract(s.A.A, s.Phi), t1 = covector_extract(st.A, st.Phi);
  const CovectorField dt = covector_variation(t0, H);
  double emu = 0, et = 0;
  for (int k = 0; k < cfg.n - 1; ++k) {
    emu = std::max(emu, sup_norm((1.0 / eps) * (m1.mu[k] - m0.mu[k]) - dm.mu[k]));
    et = std::max(et, sup_norm((1.0 / eps) * (t1.t[k] - t0.t[k]) - dt.t[k]));
  }
  for (int k = 1; k < steps; ++k) st = euler_step(st.Phi, st.A, I, H, eps);
  r.iteration_traces["after"] = flow_table(st.Phi, st.A);
  const double hh = std::max(cfg.chart.hx, cfg.chart.hy);
  const double bound = 10 * (eps + hh * hh);
  r.residual_norms = {{"mu_variation_error", emu}, {"covector_variation_error", et}, {"bound", bound}};
  if (emu > bound) r.warn("mu first variation error " + std::to_string(emu) + " above " + std::to_string(bound));
  if (et > bound) r.warn("covector first variation error " + std::to_string(et) + " above " + std::to_string(bound));

  ensure_dir(cfg.output_dir);
  write_csv(st.Phi, join(cfg.output_dir, "phi.csv"));
  write_csv(st.A, join(cfg.output_dir, "A.csv"));
  const BeltramiField mf = extract_beltrami(st.Phi);
  const CovectorField tf = covector_extract(st.A, st.Phi);
  for (int k = 2; k <= cfg.n; ++k) {
    write_csv(mf.mu[k - 2], join(cfg.output_dir, "mu_" + std::to_string(k) + ".csv"));
    write_csv(tf.t[k - 2], join(cfg.output_dir, "t_" + std::to_string(k) + ".csv"));
  }
  return 0;
}

using ConfigCommand = int (*)(const RunConfig&, Report&);

int run_config_command(const std::string& name, ConfigCommand fn, const std::string& path,
                       const std::string& out_override) {
  RunConfig cfg = load_config(path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  Report r;
  r.command = name;
  r.config_echo = cfg.raw;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(cfg, r);
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const NonConvergence& e) {
    r.iteration_traces["nonconvergence_history"] = e.history;
    r.fail(e.what());
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
  r.timings["total_s"] = seconds_since(t0);
  return emit(r, cfg.output_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fockbench: Fock field numerics driver"};
  app.require_subcommand(1);
  int n = 3, samples = 100;
  std::uint64_t seed = 1;
  std::string config, out;

  auto* fv = app.add_subcommand("fiber-verify", "Lie-theoretic identity suite");
  fv->add_option("--n", n, "rank")->required();
  fv->add_option("--output-dir", out, "directory for report.json");
  auto* pv = app.add_subcommand("point-verify", "randomized pointwise decomposition suite");
  pv->add_option("--n", n, "rank")->required();
  pv->add_option("--samples", samples, "number of random points");
  pv->add_option("--seed", seed, "generator seed");
  pv->add_option("--output-dir", out, "directory for report.json");

  struct Cfg {
    const char* name;
    const char* help;
    ConfigCommand fn;
  };
  const Cfg cfgs[] = {{"fillin", "filling-in connection for a given Phi and metric", cmd_fillin},
                      {"fuchsian", "Fuchsian reference and grid refinement", cmd_fuchsian},
                      {"solve", "Newton continuation from the Fuchsian locus", cmd_solve},
                      {"muholo", "mu-holomorphicity residuals and equivalence", cmd_muholo},
                      {"flow", "explicit Euler steps of a Hamiltonian gauge flow", cmd_flow}};
  std::vector<CLI::App*> subs;
  for (const auto& c : cfgs) {
    auto* s = app.add_subcommand(c.name, c.help);
    s->add_option("--config", config, "JSON run configuration")->required();
    s->add_option("--output-dir", out, "overrides output_dir");
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (fv->parsed()) return cmd_fiber_verify(n, out);
    if (pv->parsed()) return cmd_point_verify(n, samples, seed, out);
    for (size_t k = 0; k < subs.size(); ++k)
      if (subs[k]->parsed()) return run_config_command(cfgs[k].name, cfgs[k].fn, config, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
