#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfs/core.hpp"
#include "mfs/runner.hpp"
#include "mfs/surfaces.hpp"

namespace mfs::cli {

/// One row of a suite's pass/fail table.
struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", ">", "<=", ">=", "~" (within threshold of target)
  double threshold = 0.0;
  bool pass = false;
};

Check make_check(std::string group, std::string name, double value, std::string relation,
                 double threshold);

std::vector<std::string> suite_names();

/// Throws ValidationError for an unknown name.
std::vector<Check> suite_checks(const std::string& name, std::uint64_t seed, const Tolerances& tol = {});

/// Runs a suite, prints its table to `out`, and writes the table as CSV or
/// JSON when opts.out is set. Exit status: 0 all pass, 1 unknown suite,
/// 2 any failing check or a hash mismatch in the emitted file.
int run_suite(const std::string& name, const RunOptions& opts, std::ostream& out, std::ostream& err);

// Seeded corpora shared by the suites and the acceptance tests.

/// Random ellipsoid norms.
std::vector<Norm3> ellipsoid_corpus(std::uint64_t seed, int count);

/// The sum of the Euclidean norm and the diag(1, 2, 3) ellipsoid norm.
Norm3 reference_sum2_body();

/// Euclidean norm plus a rotated, strongly anisotropic ellipsoid norm.
std::vector<Norm3> perturbed_corpus(std::uint64_t seed, int count);

/// Random norms of every built-in family (ellipsoid, randers, sum2).
Norm3 random_norm(std::uint64_t seed);

struct GraphCase {
  std::string height;
  Vector2d point;
  SFFClass expected;
};

/// Graph surfaces with the class of their height Hessian at one point,
/// worked out by hand from the polynomial.
std::vector<GraphCase> gauss_corpus();

struct MonoCase {
  std::string label;
  Immersion3 f;
  Norm3 norm;
  std::vector<Vector2d> points;
};

/// Graph surfaces (catalog and random polynomials) paired with random norms,
/// each with three base points near the origin.
std::vector<MonoCase> mono_corpus(std::uint64_t seed, int count);

}  // namespace mfs::cli
