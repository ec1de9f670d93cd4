#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mfs/quadratic_root.hpp"
#include "mfs/tolerances.hpp"

namespace mfs {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Matrix32d = Eigen::Matrix<double, 3, 2>;

enum class Norm3Family { ellipsoid, randers, sum2, custom };

std::string to_string(Norm3Family f);

/// A Banach-Minkowski norm on R^3 given as a smooth evaluation oracle.
///
/// The built-in families carry closed-form first and second derivatives;
/// `custom` wraps caller-supplied callables. Norms are immutable values and
/// may be shared freely between threads.
class Norm3 {
 public:
  struct Ellipsoid {
    Matrix3d Q;
  };
  struct Randers {
    Matrix3d Q;
    Vector3d b;
  };
  struct Sum2 {
    Matrix3d Q1, Q2;
  };
  struct Custom {
    std::function<double(const Vector3d&)> value;
    std::function<Vector3d(const Vector3d&)> grad;
    std::function<Matrix3d(const Vector3d&)> hess;
  };
  using Params = std::variant<Ellipsoid, Randers, Sum2, Custom>;

  static Norm3 ellipsoid(const Matrix3d& Q);
  static Norm3 euclidean() { return ellipsoid(Matrix3d::Identity()); }
  static Norm3 randers(const Matrix3d& Q, const Vector3d& b);
  static Norm3 sum2(const Matrix3d& Q1, const Matrix3d& Q2);
  static Norm3 custom(Custom fns);

  double eval(const Vector3d& v) const;
  Vector3d grad(const Vector3d& v) const;
  /// Hessian of the norm itself.
  Matrix3d hess(const Vector3d& v) const;
  /// Hessian of the squared norm: 2 (g g' + eval * hess).
  Matrix3d hess_sq(const Vector3d& v) const;

  Norm3Family family() const;
  const Params& params() const { return params_; }

 private:
  explicit Norm3(Params p) : params_(std::move(p)) {}
  Params params_;
};

/// Element of Gr_2(R^3) in the chart (a, b) -> {a x + b y + z = 0}.
class Plane3 {
 public:
  /// Plane with the default basis u1 = (1, 0, -a), u2 = (0, 1, -b).
  static Plane3 from_alpha(double a, double b);
  static Plane3 from_alpha(const Vector2d& alpha) { return from_alpha(alpha.x(), alpha.y()); }

  /// Same plane with a caller-chosen spanning pair. Throws DomainError if
  /// either vector leaves the plane by more than 1e-12 (relative).
  /// Linear dependence is not rejected here; consumers check it.
  static Plane3 with_basis(double a, double b, const Vector3d& u1, const Vector3d& u2);

  /// Chart coordinates of the plane whose conormal is `pi` (pi.z() != 0).
  static Vector2d alpha_from_conormal(const Vector3d& pi);

  const Vector2d& alpha() const { return alpha_; }
  const Vector3d& u1() const { return u1_; }
  const Vector3d& u2() const { return u2_; }
  Matrix32d basis() const;
  /// The covector (a, b, 1): vanishes on the plane, equals 1 on e3.
  Vector3d conormal() const { return {alpha_.x(), alpha_.y(), 1.0}; }

  Vector3d embed(const Vector2d& st) const { return st.x() * u1_ + st.y() * u2_; }

 private:
  Plane3(Vector2d alpha, Vector3d u1, Vector3d u2)
      : alpha_(std::move(alpha)), u1_(std::move(u1)), u2_(std::move(u2)) {}
  Vector2d alpha_;
  Vector3d u1_, u2_;
};

struct ValidityReport {
  double homogeneity_residual = 0.0;
  double euler_residual = 0.0;
  double min_hess_eig = 0.0;
  double grad_fd_residual = 0.0;
  double min_eval = 0.0;
  bool verdict = false;
};

/// Samples n_samples quasi-uniform unit directions (seeded rotation of a
/// Fibonacci lattice) and checks homogeneity, the Euler identity, positivity,
/// strict convexity of the squared norm and the analytic gradient against
/// central differences.
ValidityReport check_banach_minkowski(const Norm3& norm, int n_samples, std::uint64_t seed,
                                      const Tolerances& tol = {});

Plane3 plane_from_alpha(double a, double b);

/// Planes with chart coordinates uniform in the disk of `radius` about
/// `center`; element 0 is always the center plane.
std::vector<Plane3> sample_plane_neighborhood(const Vector2d& center, double radius, int count,
                                              std::uint64_t seed);

Vector3d unit_vector(const Norm3& norm, const Vector3d& v);

/// n quasi-uniform unit vectors on S^2: a Fibonacci lattice rotated by a
/// rotation drawn from `seed`.
std::vector<Vector3d> quasi_uniform_directions(int n, std::uint64_t seed);

}  // namespace mfs
