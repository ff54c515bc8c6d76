#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bench() {
  const char* p = std::getenv("FOCKBENCH");
  return p ? p : "fockbench";
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fockbench_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = bench() + " " + args + " > /dev/null 2>&1";
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  REQUIRE(in);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fiber-verify and point-verify succeed") {
  const fs::path d = scratch("fiber");
  CHECK(run("fiber-verify --n 4 --output-dir " + d.string()) == 0);
  CHECK(report(d)["status"] == "ok");
  CHECK(run("point-verify --n 3 --samples 20 --seed 7 --output-dir " + d.string()) == 0);
  CHECK(report(d)["command"] == "point-verify");
}

TEST_CASE("exit codes for usage, config and i/o errors") {
  const fs::path d = scratch("errors");
  CHECK(run("no-such-command") == 3);
  CHECK(run("solve") == 3);
  std::ofstream(d / "bad.json") << "{ not json";
  CHECK(run("solve --config " + (d / "bad.json").string()) == 4);
  const std::string missing_n = write_config(d, {{"chart", {{"kind", "disk"}, {"nx", 16}, {"R", 0.5}}}});
  CHECK(run("solve --config " + missing_n) == 4);
  const std::string bad_r = write_config(d, {{"n", 2}, {"chart", {{"kind", "disk"}, {"nx", 16}, {"R", 1.5}}}});
  CHECK(run("fuchsian --config " + bad_r) == 4);
  CHECK(run("solve --config " + (d / "missing.json").string()) == 5);
}

TEST_CASE("fuchsian refinement ratio") {
  const fs::path d = scratch("fuchsian");
  const std::string cfg = write_config(
      d, {{"n", 2}, {"chart", {{"kind", "disk"}, {"nx", 32}, {"R", 0.5}}}, {"grids", {32, 64}}, {"output_dir", d}});
  CHECK(run("fuchsian --config " + cfg) == 0);
  const json r = report(d);
  const double q = r["residual_norms"]["ratios"][0];
  CHECK(q >= 3.0);
  CHECK(q <= 5.3);
  CHECK(fs::exists(d / "A_64.csv"));
  CHECK(fs::exists(d / "h_32.csv"));
}

TEST_CASE("fillin with the Fuchsian metric reproduces Chern") {
  const fs::path d = scratch("fillin");
  const std::string cfg = write_config(
      d, {{"n", 3}, {"chart", {{"kind", "disk"}, {"nx", 24}, {"R", 0.5}}}, {"metric", "fuchsian"}, {"output_dir", d}});
  CHECK(run("fillin --config " + cfg) == 0);
  const json r = report(d);
  CHECK(r["residual_norms"]["chern_difference"].get<double>() <= 1e-8);
  CHECK(fs::exists(d / "A.csv"));
}

TEST_CASE("solve converges on a small bump") {
  const fs::path d = scratch("solve");
  const json bump = {{"type", "bump"}, {"center", {0.0, 0.0}}, {"radius", 0.3}, {"amplitude", 0.01}};
  const std::string cfg = write_config(d, {{"n", 3},
                                           {"chart", {{"kind", "disk"}, {"nx", 32}, {"R", 0.5}}},
                                           {"beltrami", {{"3", bump}}},
                                           {"output_dir", d}});
  CHECK(run("solve --config " + cfg) == 0);
  const json r = report(d);
  CHECK(r["status"] == "ok");
  CHECK(r["final_residual"].get<double>() < 1e-9);
  CHECK(r["per_step"].size() >= 1);
  CHECK(fs::exists(d / "eta.csv"));
  CHECK(fs::exists(d / "phi_unitary.csv"));
}

TEST_CASE("solve rejects a nonzero mu_2") {
  const fs::path d = scratch("solve_bad");
  const std::string cfg = write_config(d, {{"n", 3},
                                           {"chart", {{"kind", "disk"}, {"nx", 16}, {"R", 0.5}}},
                                           {"beltrami", {{"2", 0.01}}},
                                           {"output_dir", d}});
  CHECK(run("solve --config " + cfg) == 2);
  CHECK(report(d)["status"] == "fail");
}

TEST_CASE("muholo is deterministic") {
  const fs::path a = scratch("muholo_a"), b = scratch("muholo_b");
  const json base = {{"n", 3},
                     {"chart", {{"kind", "periodic"}, {"nx", 32}, {"Lx", 6.283185307179586}, {"Ly", 6.283185307179586}}},
                     {"beltrami", {{"2", {{"type", "random"}, {"amplitude", 0.05}}}, {"3", {{"type", "random"}, {"amplitude", 0.05}}}}},
                     {"covector", {{"2", {{"type", "random"}, {"amplitude", 0.3}}}, {"3", {{"type", "random"}, {"amplitude", 0.3}}}}},
                     {"seed", 11}};
  json ja = base, jb = base;
  ja["output_dir"] = a;
  jb["output_dir"] = b;
  CHECK(run("muholo --config " + write_config(a, ja)) == 0);
  CHECK(run("muholo --config " + write_config(b, jb)) == 0);
  for (const char* f : {"tensor_residual_2.csv", "gauge_residual_3.csv"}) {
    const std::string sa = slurp(a / f), sb = slurp(b / f);
    CHECK(!sa.empty());
    CHECK(sa == sb);
  }
  const double q = report(a)["residual_norms"]["ratio"];
  CHECK(q >= 3.0);
  CHECK(q <= 5.3);
}

TEST_CASE("flow writes its outputs") {
  const fs::path d = scratch("flow");
  const std::string cfg =
      write_config(d, {{"n", 2},
                       {"chart", {{"kind", "periodic"}, {"nx", 32}, {"Lx", 6.283185307179586}, {"Ly", 6.283185307179586}}},
                       {"beltrami", {{"2", {{"type", "random"}, {"amplitude", 0.05}}}}},
                       {"covector", {{"2", {{"type", "random"}, {"amplitude", 0.3}}}}},
                       {"hamiltonian", {{"ell", 2}, {"w", {{"type", "random"}, {"amplitude", 0.3}}}}},
                       {"eps", 1e-4},
                       {"steps", 2},
                       {"output_dir", d}});
  const int code = run("flow --config " + cfg);
  CHECK((code == 0 || code == 1));
  const json r = report(d);
  CHECK(r["iteration_traces"].contains("before"));
  CHECK(r["iteration_traces"].contains("after"));
  CHECK(fs::exists(d / "mu_2.csv"));
  CHECK(fs::exists(d / "t_2.csv"));
  json bad = json::parse(slurp(d / "config.json"));
  bad["hamiltonian"]["ell"] = 5;
  CHECK(run("flow --config " + write_config(d, bad)) == 4);
}
