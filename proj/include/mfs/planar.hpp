#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mfs/core.hpp"

namespace mfs {

enum class PlanarFamily {
  euclidean,
  scaled_ellipse,
  paper_phi0,
  randers2,
  sum2,
  restriction,
  pullback,
  custom
};

std::string to_string(PlanarFamily f);

/// A norm on a 2-plane, either standalone or the restriction of a Norm3 to
/// a Plane3 in the plane's stored basis. Value type; cheap to copy.
class PlanarNorm {
 public:
  struct Euclidean {};
  struct ScaledEllipse {
    Matrix2d M;
  };
  /// sqrt(xi^2 + eta^2) + sqrt(xi^2 + 2 eta^2)
  struct ModelPhi0 {};
  struct Randers2 {
    Matrix2d M;
    Vector2d b;
  };
  struct Sum2 {
    Matrix2d M1, M2;
  };
  struct Restriction {
    Norm3 norm;
    Plane3 plane;
  };
  /// w -> inner(A w)
  struct Pullback {
    std::shared_ptr<const PlanarNorm> inner;
    Matrix2d A;
  };
  struct Custom {
    std::function<double(const Vector2d&)> value;
    std::function<Vector2d(const Vector2d&)> grad;
    std::function<Matrix2d(const Vector2d&)> hess;
    std::string label;
  };
  using Params =
      std::variant<Euclidean, ScaledEllipse, ModelPhi0, Randers2, Sum2, Restriction, Pullback, Custom>;

  static PlanarNorm euclidean() { return PlanarNorm(Euclidean{}); }
  static PlanarNorm scaled_ellipse(const Matrix2d& M) { return PlanarNorm(ScaledEllipse{M}); }
  static PlanarNorm paper_phi0() { return PlanarNorm(ModelPhi0{}); }
  static PlanarNorm randers2(const Matrix2d& M, const Vector2d& b) {
    return PlanarNorm(Randers2{M, b});
  }
  static PlanarNorm sum2(const Matrix2d& M1, const Matrix2d& M2) {
    return PlanarNorm(Sum2{M1, M2});
  }
  static PlanarNorm restriction(const Norm3& norm, const Plane3& plane) {
    return PlanarNorm(Restriction{norm, plane});
  }
  static PlanarNorm custom(Custom fns) { return PlanarNorm(std::move(fns)); }

  /// The norm w -> this(A w).
  PlanarNorm compose(const Matrix2d& A) const;
  /// The norm w -> this(R^theta w).
  PlanarNorm rotated(double theta) const;

  double eval(const Vector2d& w) const;
  Vector2d grad(const Vector2d& w) const;
  Matrix2d hess(const Vector2d& w) const;

  /// eval at the Euclidean unit vector of angle theta.
  double eval_at_angle(double theta) const;

  PlanarFamily family() const;
  const Params& params() const { return params_; }

 private:
  explicit PlanarNorm(Params p) : params_(std::move(p)) {}
  Params params_;
};

Matrix2d rotation2(double theta);

/// Samples of the unit circle in polar form: r[k] = 1 / eval(cos t_k, sin t_k)
/// with t_k = 2 pi k / n.
struct RadialProfile {
  int n = 0;
  std::vector<double> r;

  double theta(int k) const;
  Vector2d point(int k) const;
  /// All cross products of consecutive edge vectors share one sign.
  bool is_convex() const;
};

struct Ellipse2 {
  /// Body {w : w' M w <= 1}.
  Matrix2d M;
  /// Distinct contact constraints at the reported optimum.
  int active_count = 0;
  /// Largest |1 - p' M p| over contact points.
  double active_residual = 0.0;
  /// Norm of grad log det M - sum_k lambda_k a_k over contacts.
  double kkt_residual = 0.0;
  std::vector<Vector2d> contacts;
};

struct EquivalenceResult {
  double defect = 0.0;
  /// Maps the unit ball of the first norm onto (approximately) the unit
  /// ball of the second: pn2(best_map w) ~ pn1(w).
  Matrix2d best_map = Matrix2d::Identity();
  double best_angle = 0.0;
  bool reflected = false;
};

PlanarNorm restrict_norm(const Norm3& norm, const Plane3& plane);

RadialProfile radial_profile(const PlanarNorm& pn, int n);

/// Minimum-area origin-centred ellipse containing the unit ball of pn.
///
/// Stage one maximises log det M under the sampled constraints with a damped
/// Newton log-barrier method (at most 200 iterations). Stage two refines the
/// contact points on the continuous unit circle and solves the active
/// constraint system exactly, so the result does not depend on where the
/// sample grid happens to fall.
Ellipse2 min_circumscribed_ellipse(const PlanarNorm& pn, int n);

/// Symmetric square root of M: the normalising map for the ellipse gauge.
Matrix2d ellipse_gauge(const Ellipse2& e);

/// Linear-equivalence defect between two planar norms. Both are normalised
/// so their minimal circumscribed ellipse is the unit disk; the remaining
/// O(2) freedom is searched over n rotation angles and both orientations,
/// then the best candidates are polished by golden-section search.
EquivalenceResult equivalence_defect(const PlanarNorm& pn1, const PlanarNorm& pn2, int n);

double ellipse_defect(const PlanarNorm& pn, int n);

/// A norm brought to the ellipse gauge, with its radial profile cached so
/// one normalisation can serve many comparisons.
struct NormalizedNorm {
  PlanarNorm norm = PlanarNorm::euclidean();  // w -> pn(S^{-1} w)
  Matrix2d S;
  std::vector<double> r;
};

NormalizedNorm normalize_norm(const PlanarNorm& pn, int n);
EquivalenceResult equivalence_defect(const NormalizedNorm& g1, const NormalizedNorm& g2);
double ellipse_defect(const NormalizedNorm& g);

std::vector<std::pair<double, double>> self_rotation_defect(const PlanarNorm& pn, int n_angles);

/// Normalised norm w -> pn(S^{-1} w), S = ellipse_gauge(min ellipse of pn).
PlanarNorm normalized(const PlanarNorm& pn, int n);

}  // namespace mfs
