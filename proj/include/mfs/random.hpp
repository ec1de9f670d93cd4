#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mfs {

// Seeded generator with a fixed double conversion, so sampled sets do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes two uniforms per call.
  double normal();

  Eigen::Vector3d unit_vector3();
  Eigen::Vector2d unit_vector2();

  // Random SPD matrix R diag(exp(u)) R' with u uniform in [-spread, spread].
  Eigen::Matrix3d spd3(double spread = 1.0);
  Eigen::Matrix2d spd2(double spread = 1.0);

  // Random invertible 2x2 matrix with condition number at most max_cond.
  Eigen::Matrix2d gl2(double max_cond);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mfs
