#include "mfs/planar.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfs/errors.hpp"

namespace mfs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using Root2 = detail::QuadraticRoot<2>;
const Matrix2d kPhi0Second = Vector2d(1.0, 2.0).asDiagonal();

}  // namespace

std::string to_string(PlanarFamily f) {
  switch (f) {
    case PlanarFamily::euclidean: return "euclidean";
    case PlanarFamily::scaled_ellipse: return "scaled_ellipse";
    case PlanarFamily::paper_phi0: return "paper_phi0";
    case PlanarFamily::randers2: return "randers2";
    case PlanarFamily::sum2: return "sum2";
    case PlanarFamily::restriction: return "restriction";
    case PlanarFamily::pullback: return "pullback";
    case PlanarFamily::custom: return "custom";
  }
  return "unknown";
}

Matrix2d rotation2(double theta) {
  Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

PlanarNorm PlanarNorm::compose(const Matrix2d& A) const {
  return PlanarNorm(Pullback{std::make_shared<const PlanarNorm>(*this), A});
}

PlanarNorm PlanarNorm::rotated(double theta) const { return compose(rotation2(theta)); }

double PlanarNorm::eval(const Vector2d& w) const {
  return std::visit(
      overloaded{
          [&](const Euclidean&) { return w.norm(); },
          [&](const ScaledEllipse& p) { return Root2{p.M}.value(w); },
          [&](const ModelPhi0&) { return w.norm() + Root2{kPhi0Second}.value(w); },
          [&](const Randers2& p) { return Root2{p.M}.value(w) + p.b.dot(w); },
          [&](const Sum2& p) { return Root2{p.M1}.value(w) + Root2{p.M2}.value(w); },
          [&](const Restriction& p) { return p.norm.eval(p.plane.embed(w)); },
          [&](const Pullback& p) { return p.inner->eval(p.A * w); },
          [&](const Custom& p) { return p.value(w); },
      },
      params_);
}

Vector2d PlanarNorm::grad(const Vector2d& w) const {
  return std::visit(
      overloaded{
          [&](const Euclidean&) -> Vector2d { return w / w.norm(); },
          [&](const ScaledEllipse& p) -> Vector2d { return Root2{p.M}.grad(w); },
          [&](const ModelPhi0&) -> Vector2d {
            return w / w.norm() + Root2{kPhi0Second}.grad(w);
          },
          [&](const Randers2& p) -> Vector2d { return Root2{p.M}.grad(w) + p.b; },
          [&](const Sum2& p) -> Vector2d { return Root2{p.M1}.grad(w) + Root2{p.M2}.grad(w); },
          [&](const Restriction& p) -> Vector2d {
            return p.plane.basis().transpose() * p.norm.grad(p.plane.embed(w));
          },
          [&](const Pullback& p) -> Vector2d { return p.A.transpose() * p.inner->grad(p.A * w); },
          [&](const Custom& p) -> Vector2d { return p.grad(w); },
      },
      params_);
}

Matrix2d PlanarNorm::hess(const Vector2d& w) const {
  return std::visit(
      overloaded{
          [&](const Euclidean&) -> Matrix2d { return Root2{Matrix2d::Identity()}.hess(w); },
          [&](const ScaledEllipse& p) -> Matrix2d { return Root2{p.M}.hess(w); },
          [&](const ModelPhi0&) -> Matrix2d {
            return Root2{Matrix2d::Identity()}.hess(w) + Root2{kPhi0Second}.hess(w);
          },
          [&](const Randers2& p) -> Matrix2d { return Root2{p.M}.hess(w); },
          [&](const Sum2& p) -> Matrix2d { return Root2{p.M1}.hess(w) + Root2{p.M2}.hess(w); },
          [&](const Restriction& p) -> Matrix2d {
            const Matrix32d b = p.plane.basis();
            return b.transpose() * p.norm.hess(p.plane.embed(w)) * b;
          },
          [&](const Pullback& p) -> Matrix2d {
            return p.A.transpose() * p.inner->hess(p.A * w) * p.A;
          },
          [&](const Custom& p) -> Matrix2d { return p.hess(w); },
      },
      params_);
}

double PlanarNorm::eval_at_angle(double theta) const {
  return eval(Vector2d(std::cos(theta), std::sin(theta)));
}

PlanarFamily PlanarNorm::family() const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return PlanarFamily::euclidean; },
                        [](const ScaledEllipse&) { return PlanarFamily::scaled_ellipse; },
                        [](const ModelPhi0&) { return PlanarFamily::paper_phi0; },
                        [](const Randers2&) { return PlanarFamily::randers2; },
                        [](const Sum2&) { return PlanarFamily::sum2; },
                        [](const Restriction&) { return PlanarFamily::restriction; },
                        [](const Pullback&) { return PlanarFamily::pullback; },
                        [](const Custom&) { return PlanarFamily::custom; },
                    },
                    params_);
}

double RadialProfile::theta(int k) const { return 2.0 * std::numbers::pi * k / n; }

Vector2d RadialProfile::point(int k) const {
  const double t = theta(k);
  return r[static_cast<std::size_t>(k)] * Vector2d(std::cos(t), std::sin(t));
}

bool RadialProfile::is_convex() const {
  int sign = 0;
  for (int k = 0; k < n; ++k) {
    const Vector2d e1 = point((k + 1) % n) - point(k);
    const Vector2d e2 = point((k + 2) % n) - point((k + 1) % n);
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    const int s = cross > 0.0 ? 1 : (cross < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

PlanarNorm restrict_norm(const Norm3& norm, const Plane3& plane) {
  return PlanarNorm::restriction(norm, plane);
}

RadialProfile radial_profile(const PlanarNorm& pn, int n) {
  if (n < 64 || n % 2 != 0) throw DomainError("radial_profile needs an even n >= 64");
  RadialProfile prof;
  prof.n = n;
  prof.r.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = prof.theta(k);
    const double f = pn.eval_at_angle(t);
    if (!std::isfinite(f) || f <= 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "planar norm evaluates to " << f << " at angle " << t;
      throw EvaluationError(os.str());
    }
    prof.r[static_cast<std::size_t>(k)] = 1.0 / f;
  }
  return prof;
}

}  // namespace mfs
