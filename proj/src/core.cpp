#include "mfs/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mfs/errors.hpp"
#include "mfs/random.hpp"

namespace mfs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using Root3 = detail::QuadraticRoot<3>;

std::string describe(const Vector3d& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << v.x() << ", " << v.y() << ", " << v.z() << ")";
  return os.str();
}

bool finite(const Vector3d& v) { return v.allFinite(); }

}  // namespace

std::string to_string(Norm3Family f) {
  switch (f) {
    case Norm3Family::ellipsoid: return "ellipsoid";
    case Norm3Family::randers: return "randers";
    case Norm3Family::sum2: return "sum2";
    case Norm3Family::custom: return "custom";
  }
  return "unknown";
}

Norm3 Norm3::ellipsoid(const Matrix3d& Q) { return Norm3(Ellipsoid{Q}); }
Norm3 Norm3::randers(const Matrix3d& Q, const Vector3d& b) { return Norm3(Randers{Q, b}); }
Norm3 Norm3::sum2(const Matrix3d& Q1, const Matrix3d& Q2) { return Norm3(Sum2{Q1, Q2}); }
Norm3 Norm3::custom(Custom fns) { return Norm3(std::move(fns)); }

double Norm3::eval(const Vector3d& v) const {
  return std::visit(
      overloaded{
          [&](const Ellipsoid& p) { return Root3{p.Q}.value(v); },
          [&](const Randers& p) { return Root3{p.Q}.value(v) + p.b.dot(v); },
          [&](const Sum2& p) { return Root3{p.Q1}.value(v) + Root3{p.Q2}.value(v); },
          [&](const Custom& p) { return p.value(v); },
      },
      params_);
}

Vector3d Norm3::grad(const Vector3d& v) const {
  return std::visit(
      overloaded{
          [&](const Ellipsoid& p) -> Vector3d { return Root3{p.Q}.grad(v); },
          [&](const Randers& p) -> Vector3d { return Root3{p.Q}.grad(v) + p.b; },
          [&](const Sum2& p) -> Vector3d { return Root3{p.Q1}.grad(v) + Root3{p.Q2}.grad(v); },
          [&](const Custom& p) -> Vector3d { return p.grad(v); },
      },
      params_);
}

Matrix3d Norm3::hess(const Vector3d& v) const {
  return std::visit(
      overloaded{
          [&](const Ellipsoid& p) -> Matrix3d { return Root3{p.Q}.hess(v); },
          [&](const Randers& p) -> Matrix3d { return Root3{p.Q}.hess(v); },
          [&](const Sum2& p) -> Matrix3d { return Root3{p.Q1}.hess(v) + Root3{p.Q2}.hess(v); },
          [&](const Custom& p) -> Matrix3d { return p.hess(v); },
      },
      params_);
}

Matrix3d Norm3::hess_sq(const Vector3d& v) const {
  const Vector3d g = grad(v);
  return 2.0 * (g * g.transpose() + eval(v) * hess(v));
}

Norm3Family Norm3::family() const {
  return std::visit(overloaded{
                        [](const Ellipsoid&) { return Norm3Family::ellipsoid; },
                        [](const Randers&) { return Norm3Family::randers; },
                        [](const Sum2&) { return Norm3Family::sum2; },
                        [](const Custom&) { return Norm3Family::custom; },
                    },
                    params_);
}

Plane3 Plane3::from_alpha(double a, double b) {
  return Plane3(Vector2d(a, b), Vector3d(1.0, 0.0, -a), Vector3d(0.0, 1.0, -b));
}

Plane3 Plane3::with_basis(double a, double b, const Vector3d& u1, const Vector3d& u2) {
  const Vector3d pi(a, b, 1.0);
  for (const Vector3d* u : {&u1, &u2}) {
    if (std::abs(pi.dot(*u)) > 1e-12 * pi.norm() * std::max(1.0, u->norm()))
      throw DomainError("basis vector " + describe(*u) + " is not in the plane");
  }
  return Plane3(Vector2d(a, b), u1, u2);
}

Vector2d Plane3::alpha_from_conormal(const Vector3d& pi) {
  if (pi.z() == 0.0) throw DomainError("plane contains e3 and lies outside the chart");
  return {pi.x() / pi.z(), pi.y() / pi.z()};
}

Matrix32d Plane3::basis() const {
  Matrix32d b;
  b.col(0) = u1_;
  b.col(1) = u2_;
  return b;
}

std::vector<Vector3d> quasi_uniform_directions(int n, std::uint64_t seed) {
  Rng rng(seed);
  // Uniform random rotation from a normalized quaternion.
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  const Matrix3d rot = q.toRotationMatrix();

  std::vector<Vector3d> out;
  out.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden * i;
    out.push_back(rot * Vector3d(r * std::cos(t), r * std::sin(t), z));
  }
  return out;
}

ValidityReport check_banach_minkowski(const Norm3& norm, int n_samples, std::uint64_t seed,
                                      const Tolerances& tol) {
  if (n_samples < 16) throw DomainError("check_banach_minkowski needs at least 16 samples");

  const auto dirs = quasi_uniform_directions(n_samples, seed);
  Rng scales(seed ^ 0x9e3779b97f4a7c15ULL);

  ValidityReport rep;
  rep.min_hess_eig = std::numeric_limits<double>::infinity();
  rep.min_eval = std::numeric_limits<double>::infinity();

  for (const Vector3d& v : dirs) {
    const double lambda = std::exp(scales.uniform(std::log(0.1), std::log(10.0)));
    const double f = norm.eval(v);
    const double fl = norm.eval(lambda * v);
    const Vector3d g = norm.grad(v);
    const Vector3d gl = norm.grad(lambda * v);
    const Matrix3d h2 = norm.hess_sq(v);
    if (!std::isfinite(f) || !std::isfinite(fl) || !finite(g) || !finite(gl) || !h2.allFinite())
      throw EvaluationError("non-finite norm oracle output at direction " + describe(v));

    rep.min_eval = std::min(rep.min_eval, f);
    const double scale = std::max(std::abs(f), 1e-300);
    rep.homogeneity_residual =
        std::max({rep.homogeneity_residual, std::abs(fl - lambda * f) / (lambda * scale),
                  (gl - g).norm() / std::max(g.norm(), 1e-300)});
    rep.euler_residual = std::max(rep.euler_residual, std::abs(g.dot(v) - f) / scale);

    Eigen::SelfAdjointEigenSolver<Matrix3d> es(0.5 * (h2 + h2.transpose()),
                                               Eigen::EigenvaluesOnly);
    rep.min_hess_eig = std::min(rep.min_hess_eig, es.eigenvalues()(0));

    const double h = 1e-5 * v.norm();
    Vector3d fd;
    for (int i = 0; i < 3; ++i) {
      Vector3d e = Vector3d::Zero();
      e(i) = h;
      fd(i) = (norm.eval(v + e) - norm.eval(v - e)) / (2.0 * h);
    }
    rep.grad_fd_residual =
        std::max(rep.grad_fd_residual, (fd - g).norm() / std::max(g.norm(), 1e-300));
  }

  rep.verdict = rep.min_eval > 0.0 && rep.min_hess_eig > 0.0 &&
                rep.homogeneity_residual < tol.homogeneity && rep.euler_residual < tol.euler &&
                rep.grad_fd_residual < tol.grad_fd;
  return rep;
}

Plane3 plane_from_alpha(double a, double b) { return Plane3::from_alpha(a, b); }

std::vector<Plane3> sample_plane_neighborhood(const Vector2d& center, double radius, int count,
                                              std::uint64_t seed) {
  if (count < 2) throw DomainError("sample_plane_neighborhood needs count >= 2");
  if (radius < 0.0) throw DomainError("sample_plane_neighborhood needs radius >= 0");
  Rng rng(seed);
  std::vector<Plane3> planes;
  planes.reserve(static_cast<std::size_t>(count));
  planes.push_back(Plane3::from_alpha(center));
  for (int i = 1; i < count; ++i) {
    const double r = radius * std::sqrt(rng.uniform());
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    planes.push_back(Plane3::from_alpha(center + r * Vector2d(std::cos(t), std::sin(t))));
  }
  return planes;
}

Vector3d unit_vector(const Norm3& norm, const Vector3d& v) {
  if (v.squaredNorm() == 0.0) throw DomainError("unit_vector of the zero vector");
  return v / norm.eval(v);
}

}  // namespace mfs
