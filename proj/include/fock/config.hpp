#ifndef FOCK_CONFIG_HPP
#define FOCK_CONFIG_HPP

#include "fock/solver.hpp"

#include <json.hpp>
#include <map>

namespace fock {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One scalar field description: constant, polynomial bump, CSV file or smooth random modes.
struct FieldSpec {
  enum class Kind { Constant, Bump, File, Random } kind = Kind::Constant;
  cplx value = 0.0;      // constant
  double cx = 0, cy = 0;  // bump center
  double radius = 0;
  cplx amplitude = 0.0;  // bump and random
  std::string path;
};

struct RunConfig {
  int n = 2;
  Chart chart;
  std::map<int, FieldSpec> beltrami;  // keyed by k = 2..n
  std::map<int, FieldSpec> covector;
  NewtonConfig solver;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  nlohmann::json raw;
};

Chart parse_chart(const nlohmann::json& j);
FieldSpec parse_field_spec(const nlohmann::json& j);
NewtonConfig parse_newton(const nlohmann::json& j);
RunConfig parse_config(const nlohmann::json& j);
/// IoError when unreadable, ConfigError when malformed.
RunConfig load_config(const std::string& path);

/// amp (1 - r^2/rho^2)^3 inside the disk of radius rho, zero outside.
ScalarField bump_field(const Chart& c, double cx, double cy, double rho, cplx amp);
/// Low Fourier modes with uniform random coefficients; tapered by a bump on disk charts.
ScalarField random_field(const Chart& c, cplx amp, std::mt19937_64& rng);
ScalarField build_field(const FieldSpec& s, const Chart& c, std::mt19937_64& rng);

BeltramiField build_beltrami(const RunConfig& cfg, std::mt19937_64& rng);
CovectorField build_covector(const RunConfig& cfg, std::mt19937_64& rng);

enum class Status { Ok = 0, Warn = 1, Fail = 2 };

/// Single JSON report per command.
struct Report {
  std::string command;
  nlohmann::json config_echo;
  nlohmann::json residual_norms = nlohmann::json::object();
  nlohmann::json iteration_traces = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
  Status status = Status::Ok;
  std::vector<std::string> messages;

  void warn(const std::string& m);
  void fail(const std::string& m);
  nlohmann::json to_json() const;
};

std::string status_name(Status s);

}  // namespace fock

#endif
