#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "mfs/core.hpp"
#include "mfs/planar.hpp"
#include "mfs/tolerances.hpp"

namespace mfs {

/// Second derivatives of a map R^2 -> R^3: d2[i][j] = d^2 f / dx_i dx_j.
using Second3 = std::array<std::array<Vector3d, 2>, 2>;
/// Third derivatives: d3[i][j][k].
using Third3 = std::array<std::array<std::array<Vector3d, 2>, 2>, 2>;

/// Polynomial in two variables, sum of c * x^i * y^j.
struct Poly2 {
  struct Term {
    int i, j;
    double c;
  };
  std::vector<Term> terms;

  /// d^(dx+dy) / dx^dx dy^dy at (x, y).
  double derivative(int dx, int dy, const Vector2d& p) const;
  double operator()(const Vector2d& p) const { return derivative(0, 0, p); }
  int degree() const;
};

/// Named height functions for graph surfaces: plane, paraboloid, saddle,
/// cylinder, monkey_saddle, quartic_bowl, quartic_saddle, cubic_cylinder,
/// tilted_bowl, mixed_quartic. Throws DomainError for other names.
Poly2 height_function(const std::string& name);
std::vector<std::string> height_function_names();

/// A smooth map from a planar chart into R^3 with derivative oracles.
class Immersion3 {
 public:
  struct Graph {
    Poly2 h;
  };
  struct Parametric {
    std::function<Vector3d(const Vector2d&)> map;
    std::function<Matrix32d(const Vector2d&)> jac;
    std::function<Second3(const Vector2d&)> d2;
    /// Optional. When empty, third derivatives come from central
    /// differences of d2.
    std::function<Third3(const Vector2d&)> d3;
  };
  using Params = std::variant<Graph, Parametric>;

  /// (x, y) -> (x, y, h(x, y))
  static Immersion3 graph(Poly2 h) { return Immersion3(Graph{std::move(h)}); }
  static Immersion3 parametric(Parametric p) { return Immersion3(std::move(p)); }

  /// The immersion p -> f(A p).
  Immersion3 compose(const Matrix2d& A) const;

  Vector3d map(const Vector2d& p) const;
  Matrix32d jac(const Vector2d& p) const;
  Second3 d2(const Vector2d& p) const;
  Third3 d3(const Vector2d& p) const;

  bool is_graph() const { return std::holds_alternative<Graph>(params_); }
  const Params& params() const { return params_; }

 private:
  explicit Immersion3(Params p) : params_(std::move(p)) {}
  Params params_;
};

/// Throws ImmersionError when the smallest singular value of jac(p) is
/// at most 1e-10.
void require_immersion(const Immersion3& f, const Vector2d& p);

enum class MetricFamily { frozen, induced, rotation, custom };
std::string to_string(MetricFamily f);

/// A Finsler metric phi(x, v) on a planar chart.
///
/// dxv(x, v)(i, j) = d^2 phi / dx_i dv_j; dxx and dvv are symmetric.
class MetricOracle2 {
 public:
  struct Frozen {
    PlanarNorm norm;
  };
  struct Induced {
    Immersion3 f;
    Norm3 norm;
  };
  /// phi(x, y, v) = phi0(R^y v)
  struct Rotation {
    PlanarNorm phi0;
  };
  struct Custom {
    std::function<double(const Vector2d&, const Vector2d&)> eval;
    std::function<Vector2d(const Vector2d&, const Vector2d&)> dx, dv;
    std::function<Matrix2d(const Vector2d&, const Vector2d&)> dxx, dxv, dvv;
    /// Declares that phi does not depend on the first coordinate.
    bool x_invariant = false;
  };
  using Params = std::variant<Frozen, Induced, Rotation, Custom>;

  static MetricOracle2 frozen(PlanarNorm pn) { return MetricOracle2(Frozen{std::move(pn)}); }
  static MetricOracle2 induced(Immersion3 f, Norm3 norm) {
    return MetricOracle2(Induced{std::move(f), std::move(norm)});
  }
  static MetricOracle2 rotation(PlanarNorm phi0) { return MetricOracle2(Rotation{std::move(phi0)}); }
  static MetricOracle2 custom(Custom c) { return MetricOracle2(std::move(c)); }

  double eval(const Vector2d& x, const Vector2d& v) const;
  Vector2d dx(const Vector2d& x, const Vector2d& v) const;
  Vector2d dv(const Vector2d& x, const Vector2d& v) const;
  Matrix2d dxx(const Vector2d& x, const Vector2d& v) const;
  Matrix2d dxv(const Vector2d& x, const Vector2d& v) const;
  Matrix2d dvv(const Vector2d& x, const Vector2d& v) const;

  /// True when phi is known not to depend on x_1 (frozen, rotation, or a
  /// custom metric that declares it).
  bool x_invariant() const;
  MetricFamily family() const;
  const Params& params() const { return params_; }

 private:
  explicit MetricOracle2(Params p) : params_(std::move(p)) {}
  Params params_;
};

MetricOracle2 induced_metric(const Immersion3& f, const Norm3& norm);

/// The tangent norm v -> phi(p, v).
PlanarNorm freeze(const MetricOracle2& metric, const Vector2d& p);

struct SFF2 {
  Matrix2d matrix;
  Vector3d conormal;
  /// Eigenvalues of matrix, descending.
  Vector2d eigenvalues;
  /// Frobenius norm of the second derivative of f at p; the scale the
  /// classifier measures against.
  double hess_norm = 0.0;

  /// A bare form with no surface behind it; hess_norm defaults to the
  /// Frobenius norm of the matrix.
  static SFF2 from_matrix(const Matrix2d& m);
  static SFF2 from_matrix(const Matrix2d& m, double hess_norm);
};

SFF2 second_fundamental_form(const Immersion3& f, const Vector2d& p);

enum class SFFClass { definite, indefinite, degenerate_rank1, zero };
std::string to_string(SFFClass c);

SFFClass classify_sff(const SFF2& s, double scale_tol = 1e-7);

struct MonoDefect {
  double max_defect = 0.0;
  /// Indices into the point list; the first is always 0.
  std::pair<int, int> argmax{0, 0};
  /// Defect of every point against point 0.
  std::vector<double> defects;
};

MonoDefect monochromatic_defect(const MetricOracle2& metric, const std::vector<Vector2d>& points,
                                int n = 512);

double euclidean_defect(const MetricOracle2& metric, const Vector2d& p, int n = 512);

struct Flatness {
  double first = 0.0;   // max_v |dx(p, v)|
  double second = 0.0;  // max_v ||dxx(p, v)||_2
};

/// Sufficient-condition check for second-order flatness at p in the given
/// chart, over n_dirs Euclidean unit velocities.
Flatness flatness_defect(const MetricOracle2& metric, const Vector2d& p, int n_dirs);

struct MonoRecord {
  Vector2d point;
  double mono_defect = 0.0;
  double euclidean_defect = 0.0;
  SFF2 sff;
  SFFClass sff_class = SFFClass::zero;
};

struct MonoReport {
  std::vector<MonoRecord> records;
  /// max over the records of mono_defect: how far the sampled tangent
  /// spaces are from being mutually isometric.
  double set_mono_defect = 0.0;
  /// Indices of records that contradict the theorem on monochromatic
  /// surfaces.
  std::vector<int> violations;
};

/// Per point: defect against the first point's tangent norm, defect against
/// the Euclidean norm, and the class of the second fundamental form. A point
/// is a violation when the sampled set looks monochromatic (at least two
/// points, set_mono_defect below the equivalence threshold), its tangent
/// norm is clearly not Euclidean (above ten times the threshold), and its
/// second fundamental form is nondegenerate.
MonoReport mono_theorem_report(const Immersion3& f, const Norm3& norm,
                               const std::vector<Vector2d>& points, int n = 512,
                               const Tolerances& tol = {});

}  // namespace mfs
