#ifndef FOCK_SUITES_HPP
#define FOCK_SUITES_HPP

#include "fock/fockpoint.hpp"

#include <string>
#include <vector>

namespace fock {

struct Check {
  std::string name;
  double value = 0;
  double tol = 0;
  bool ok = false;
};

/// sl2 relations, G-basis trace orthogonality, centralizer dimension and involution identities.
std::vector<Check> fiber_suite(int n, double tol = 1e-12);

struct PointSuiteResult {
  std::vector<Check> checks;
  int samples = 0;
  int criterion_compared = 0;  // points where both positivity tests were compared
  int criterion_mismatch = 0;
};

/// Random positive points: four-way reconstruction, cohomology dimensions and
/// contraction norm versus the Gram positivity test (also on unrestricted draws).
PointSuiteResult point_suite(int n, int samples, std::uint64_t seed, double tol = 1e-10);

}  // namespace fock

#endif
