#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfs/planar.hpp"
#include "mfs/surfaces.hpp"

namespace mfs {

/// phi(x, y, v) = phi0(R^y v), R^y the counterclockwise rotation by y.
MetricOracle2 rotation_metric(const PlanarNorm& phi0);

struct GeodesicState {
  Vector2d x;
  Vector2d v;
};

/// Right-hand side of the Euler-Lagrange system of the energy L = phi^2 / 2
/// solved for the acceleration. Throws DomainError for v = 0 and
/// DegeneracyError when d^2 L / dv^2 is not positive definite.
GeodesicState geodesic_rhs(const MetricOracle2& metric, const GeodesicState& s);

struct GeodesicTrajectory {
  std::vector<double> times;
  std::vector<GeodesicState> states;
  /// max |phi(x, v) - phi(x0, v0)| over stored states.
  double speed_drift = 0.0;
  /// max deviation of dL/dv_1 = phi * dphi/dv_1; only for metrics that do
  /// not depend on x_1, otherwise 0 and noether_tracked is false.
  double noether_drift = 0.0;
  /// Same for dphi/dv_1 itself.
  double noether_phi_drift = 0.0;
  bool noether_tracked = false;
  /// False when integration stopped early on a non-finite state; the
  /// arrays then hold the trajectory up to the last finite state.
  bool completed = true;
  std::string failure;
};

/// Classical fixed-step RK4 on [0, T] with T / steps per step.
GeodesicTrajectory integrate_geodesic(const MetricOracle2& metric, const Vector2d& x0,
                                      const Vector2d& v0, double T, int steps);

enum class HorizontalVelocity { e1, e2 };

/// -d/dy phi0(R^y u) with u = (1, 0) by default: the residual of the
/// second Euler-Lagrange equation along the horizontal line at height y.
/// e2 evaluates the same expression with u = (0, 1).
double horizontal_residual(const PlanarNorm& phi0, double y,
                           HorizontalVelocity u = HorizontalVelocity::e1);

/// max - min of phi0 on n + 1 equally spaced angles of [theta_lo, theta_hi].
double euclidean_arc_defect(const PlanarNorm& phi0, double theta_lo, double theta_hi, int n);

}  // namespace mfs
