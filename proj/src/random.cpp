#include "mfs/random.hpp"

#include <cmath>
#include <numbers>

namespace mfs {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::Vector3d Rng::unit_vector3() {
  Eigen::Vector3d v;
  do {
    v = {normal(), normal(), normal()};
  } while (v.norm() < 1e-8);
  return v.normalized();
}

Eigen::Vector2d Rng::unit_vector2() {
  const double t = uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(t), std::sin(t)};
}

namespace {

Eigen::Matrix3d random_rotation3(Rng& rng) {
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
  Eigen::Matrix3d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace

Eigen::Matrix3d Rng::spd3(double spread) {
  const Eigen::Matrix3d r = random_rotation3(*this);
  Eigen::Vector3d d;
  for (int i = 0; i < 3; ++i) d(i) = std::exp(uniform(-spread, spread));
  Eigen::Matrix3d q = r * d.asDiagonal() * r.transpose();
  return 0.5 * (q + q.transpose());
}

Eigen::Matrix2d Rng::spd2(double spread) {
  const double t = uniform(0.0, std::numbers::pi);
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const Eigen::Vector2d d(std::exp(uniform(-spread, spread)), std::exp(uniform(-spread, spread)));
  Eigen::Matrix2d q = r * d.asDiagonal() * r.transpose();
  return 0.5 * (q + q.transpose());
}

Eigen::Matrix2d Rng::gl2(double max_cond) {
  // U diag(s1, s2) V' with s1/s2 <= max_cond and a random orientation.
  auto rot = [](double t) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
  };
  const double s1 = std::exp(uniform(-0.5, 0.5));
  const double s2 = s1 / uniform(1.0, max_cond);
  Eigen::Matrix2d u = rot(uniform(0.0, 2.0 * std::numbers::pi));
  const Eigen::Matrix2d v = rot(uniform(0.0, 2.0 * std::numbers::pi));
  if (uniform() < 0.5) u.col(1) *= -1.0;
  return u * Eigen::Vector2d(s1, s2).asDiagonal() * v.transpose();
}

}  // namespace mfs
