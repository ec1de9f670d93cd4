#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfs/core.hpp"
#include "mfs/planar.hpp"
#include "mfs/tolerances.hpp"

namespace mfs {

enum class ScanVerdict { consistent_with_ellipsoid, equivalence_fails, ellipse_fails };
std::string to_string(ScanVerdict v);

struct ScanReport {
  std::vector<Plane3> planes;
  bool pairwise = false;
  /// Symmetric count x count. In center mode only row and column 0 are
  /// computed; the other entries stay 0.
  Eigen::MatrixXd defect_matrix;
  double max_defect = 0.0;
  std::vector<double> ellipse_defects;
  ScanVerdict verdict = ScanVerdict::consistent_with_ellipsoid;
};

/// Restricts the norm to `count` planes around `center` and measures how far
/// the sections are from being linearly equivalent (to the center section,
/// or pairwise) and from being ellipses.
ScanReport amu_scan(const Norm3& norm, const Vector2d& center, double radius, int count, int n,
                    std::uint64_t seed, bool pairwise = false, const Tolerances& tol = {});

struct TauResult {
  Vector3d tau;
  double sigma_ratio = 0.0;
  bool feasible = false;
  /// max_i |grad(v_i) . tau|, i.e. how tangent tau actually is.
  double max_pairing = 0.0;
};

/// Looks for a direction tangent to the unit sphere at every point of the
/// section: the right singular vector of the stacked unit-sphere gradients.
/// tau is oriented so that its pairing with the plane's conormal is >= 0.
TauResult kakutani_tau(const Norm3& norm, const Plane3& plane, int m, const Tolerances& tol = {});

struct QuadraticFit {
  Matrix3d Q;
  /// max over fitting samples of |v'Qv - norm(v)^2|, samples on the unit sphere.
  double residual = 0.0;
  bool positive_definite = false;
  int rank = 0;
  bool rank_deficient = false;
};

/// Least-squares quadratic form matching the squared norm on the listed
/// planes. When the planes do not determine all six entries the
/// minimum-norm solution is returned and rank_deficient is set.
QuadraticFit quadratic_fit(const Norm3& norm, const std::vector<Plane3>& planes,
                           int per_plane_samples);

/// max |v'Qv - 1| over `per_plane_samples` unit vectors of the norm per
/// plane, at angles offset by half a step from the fitting grid.
double quadratic_validation_residual(const Norm3& norm, const Matrix3d& Q,
                                     const std::vector<Plane3>& planes, int per_plane_samples);

enum class LocalVerdict { ellipsoid_locally, not_ellipsoid };
std::string to_string(LocalVerdict v);

struct LocalCheck {
  LocalVerdict verdict = LocalVerdict::not_ellipsoid;
  /// "equivalence", "ellipse" or "quadratic"; empty when the check passes.
  std::string failing_stage;
  ScanReport scan;
  std::optional<QuadraticFit> fit;
  double validation_residual = 0.0;
};

LocalCheck local_ellipsoid_check(const Norm3& norm, const Vector2d& center, double radius,
                                 int count, int n = 512, std::uint64_t seed = 0,
                                 const Tolerances& tol = {});

}  // namespace mfs
