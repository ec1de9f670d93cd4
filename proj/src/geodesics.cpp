#include "mfs/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "mfs/errors.hpp"

namespace mfs {

namespace {

const Matrix2d kRot90 = (Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();

bool finite(const GeodesicState& s) { return s.x.allFinite() && s.v.allFinite(); }

GeodesicState axpy(const GeodesicState& s, double h, const GeodesicState& k) {
  return {s.x + h * k.x, s.v + h * k.v};
}

}  // namespace

MetricOracle2 rotation_metric(const PlanarNorm& phi0) { return MetricOracle2::rotation(phi0); }

GeodesicState geodesic_rhs(const MetricOracle2& metric, const GeodesicState& s) {
  if (s.v.isZero(0.0)) throw DomainError("geodesic_rhs needs a nonzero velocity");
  const double phi = metric.eval(s.x, s.v);
  const Vector2d px = metric.dx(s.x, s.v);
  const Vector2d pv = metric.dv(s.x, s.v);

  const Matrix2d M = pv * pv.transpose() + phi * metric.dvv(s.x, s.v);
  const Vector2d Lx = phi * px;
  const Matrix2d Lxv = px * pv.transpose() + phi * metric.dxv(s.x, s.v);

  // Non-finite oracle output is passed through for the integrator to report.
  if (!M.allFinite() || !Lx.allFinite() || !Lxv.allFinite())
    return {s.v, Vector2d::Constant(std::numeric_limits<double>::quiet_NaN())};
  Eigen::LLT<Matrix2d> llt(M);
  if (llt.info() != Eigen::Success || !(M.determinant() > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "velocity Hessian of the energy is not positive definite at x = (" << s.x.x() << ", "
       << s.x.y() << "), v = (" << s.v.x() << ", " << s.v.y() << ")";
    throw DegeneracyError(os.str());
  }
  return {s.v, llt.solve(Lx - Lxv.transpose() * s.v)};
}

GeodesicTrajectory integrate_geodesic(const MetricOracle2& metric, const Vector2d& x0,
                                      const Vector2d& v0, double T, int steps) {
  if (steps < 16) throw DomainError("integrate_geodesic needs steps >= 16");
  if (v0.isZero(0.0)) throw DomainError("integrate_geodesic needs a nonzero initial velocity");

  GeodesicTrajectory tr;
  tr.noether_tracked = metric.x_invariant();
  const double h = T / steps;
  const double phi_start = metric.eval(x0, v0);
  const double p_start = metric.dv(x0, v0).x();

  auto record = [&](double t, const GeodesicState& s) {
    tr.times.push_back(t);
    tr.states.push_back(s);
    const double phi = metric.eval(s.x, s.v);
    tr.speed_drift = std::max(tr.speed_drift, std::abs(phi - phi_start));
    if (tr.noether_tracked) {
      const double p = metric.dv(s.x, s.v).x();
      tr.noether_drift = std::max(tr.noether_drift, std::abs(phi * p - phi_start * p_start));
      tr.noether_phi_drift = std::max(tr.noether_phi_drift, std::abs(p - p_start));
    }
  };

  tr.times.reserve(static_cast<std::size_t>(steps) + 1);
  tr.states.reserve(static_cast<std::size_t>(steps) + 1);
  GeodesicState s{x0, v0};
  record(0.0, s);
  // Stages evaluated at a non-finite state would otherwise surface as a
  // spurious degeneracy.
  auto stage = [&](const GeodesicState& at) -> std::optional<GeodesicState> {
    if (!finite(at)) return std::nullopt;
    GeodesicState d = geodesic_rhs(metric, at);
    if (!finite(d)) return std::nullopt;
    return d;
  };
  for (int k = 0; k < steps; ++k) {
    std::optional<GeodesicState> k1, k2, k3, k4;
    std::optional<GeodesicState> next;
    if ((k1 = stage(s)) && (k2 = stage(axpy(s, 0.5 * h, *k1))) && (k3 = stage(axpy(s, 0.5 * h, *k2))) &&
        (k4 = stage(axpy(s, h, *k3)))) {
      next = GeodesicState{s.x + h / 6.0 * (k1->x + 2.0 * k2->x + 2.0 * k3->x + k4->x),
                           s.v + h / 6.0 * (k1->v + 2.0 * k2->v + 2.0 * k3->v + k4->v)};
    }
    if (!next || !finite(*next)) {
      tr.completed = false;
      std::ostringstream os;
      os << "non-finite state in step " << k + 1;
      tr.failure = os.str();
      break;
    }
    s = *next;
    record(h * (k + 1), s);
  }
  return tr;
}

double horizontal_residual(const PlanarNorm& phi0, double y, HorizontalVelocity u) {
  const Vector2d dir = u == HorizontalVelocity::e1 ? Vector2d::UnitX() : Vector2d::UnitY();
  const Vector2d w = rotation2(y) * dir;
  return -phi0.grad(w).dot(kRot90 * w);
}

double euclidean_arc_defect(const PlanarNorm& phi0, double theta_lo, double theta_hi, int n) {
  if (!(theta_lo < theta_hi)) throw DomainError("euclidean_arc_defect needs theta_lo < theta_hi");
  if (n < 32) throw DomainError("euclidean_arc_defect needs n >= 32");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k <= n; ++k) {
    const double v = phi0.eval_at_angle(theta_lo + (theta_hi - theta_lo) * k / n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

}  // namespace mfs
