#include "mfs/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mfs/errors.hpp"
#include "mfs/parallel.hpp"

namespace mfs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// n! / (n - k)!, zero when k > n.
double falling(int n, int k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (int m = 0; m < k; ++m) r *= n - m;
  return r;
}

const Matrix2d kRot90 = (Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();

}  // namespace

double Poly2::derivative(int dx, int dy, const Vector2d& p) const {
  double s = 0.0;
  for (const Term& t : terms) {
    const double f = falling(t.i, dx) * falling(t.j, dy);
    if (f == 0.0) continue;
    s += t.c * f * std::pow(p.x(), t.i - dx) * std::pow(p.y(), t.j - dy);
  }
  return s;
}

int Poly2::degree() const {
  int d = 0;
  for (const Term& t : terms)
    if (t.c != 0.0) d = std::max(d, t.i + t.j);
  return d;
}

Poly2 height_function(const std::string& name) {
  static const std::map<std::string, Poly2> catalog = {
      {"plane", {{}}},
      {"paraboloid", {{{2, 0, 1.0}, {0, 2, 1.0}}}},
      {"saddle", {{{2, 0, 1.0}, {0, 2, -1.0}}}},
      {"cylinder", {{{2, 0, 1.0}}}},
      {"monkey_saddle", {{{3, 0, 1.0}, {1, 2, -3.0}}}},
      {"quartic_bowl", {{{4, 0, 1.0}, {0, 4, 1.0}}}},
      {"quartic_saddle", {{{4, 0, 1.0}, {0, 4, -1.0}}}},
      {"cubic_cylinder", {{{3, 0, 1.0}}}},
      {"tilted_bowl", {{{1, 0, 1.0}, {0, 1, 0.5}, {2, 0, 1.0}, {1, 1, 1.0}, {0, 2, 2.0}}}},
      {"mixed_quartic", {{{1, 1, 1.0}, {2, 2, 1.0}}}},
  };
  const auto it = catalog.find(name);
  if (it == catalog.end()) throw DomainError("unknown height function '" + name + "'");
  return it->second;
}

std::vector<std::string> height_function_names() {
  return {"plane",         "paraboloid",     "saddle",         "cylinder",
          "monkey_saddle", "quartic_bowl",   "quartic_saddle", "cubic_cylinder",
          "tilted_bowl",   "mixed_quartic"};
}

Vector3d Immersion3::map(const Vector2d& p) const {
  return std::visit(overloaded{
                        [&](const Graph& g) -> Vector3d { return {p.x(), p.y(), g.h(p)}; },
                        [&](const Parametric& q) -> Vector3d { return q.map(p); },
                    },
                    params_);
}

Matrix32d Immersion3::jac(const Vector2d& p) const {
  return std::visit(overloaded{
                        [&](const Graph& g) -> Matrix32d {
                          Matrix32d J;
                          J << 1.0, 0.0, 0.0, 1.0, g.h.derivative(1, 0, p), g.h.derivative(0, 1, p);
                          return J;
                        },
                        [&](const Parametric& q) -> Matrix32d { return q.jac(p); },
                    },
                    params_);
}

Second3 Immersion3::d2(const Vector2d& p) const {
  return std::visit(overloaded{
                        [&](const Graph& g) -> Second3 {
                          Second3 s;
                          for (int i = 0; i < 2; ++i)
                            for (int j = 0; j < 2; ++j)
                              s[i][j] = Vector3d(0.0, 0.0, g.h.derivative((i == 0) + (j == 0),
                                                                          (i == 1) + (j == 1), p));
                          return s;
                        },
                        [&](const Parametric& q) -> Second3 { return q.d2(p); },
                    },
                    params_);
}

Third3 Immersion3::d3(const Vector2d& p) const {
  return std::visit(
      overloaded{
          [&](const Graph& g) -> Third3 {
            Third3 t;
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                  const int nx = (i == 0) + (j == 0) + (k == 0);
                  t[i][j][k] = Vector3d(0.0, 0.0, g.h.derivative(nx, 3 - nx, p));
                }
            return t;
          },
          [&](const Parametric& q) -> Third3 {
            if (q.d3) return q.d3(p);
            Third3 t;
            const double h = 1e-4 * (1.0 + p.norm());
            for (int k = 0; k < 2; ++k) {
              const Vector2d e = h * Vector2d::Unit(k);
              const Second3 sp = q.d2(p + e), sm = q.d2(p - e);
              for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) t[i][j][k] = (sp[i][j] - sm[i][j]) / (2.0 * h);
            }
            return t;
          },
      },
      params_);
}

Immersion3 Immersion3::compose(const Matrix2d& A) const {
  const Immersion3 inner = *this;
  Parametric q;
  q.map = [inner, A](const Vector2d& p) { return inner.map(A * p); };
  q.jac = [inner, A](const Vector2d& p) -> Matrix32d { return inner.jac(A * p) * A; };
  q.d2 = [inner, A](const Vector2d& p) {
    const Second3 s = inner.d2(A * p);
    Second3 out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        out[i][j].setZero();
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) out[i][j] += A(k, i) * A(l, j) * s[k][l];
      }
    return out;
  };
  q.d3 = [inner, A](const Vector2d& p) {
    const Third3 s = inner.d3(A * p);
    Third3 out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          out[i][j][k].setZero();
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int c = 0; c < 2; ++c) out[i][j][k] += A(a, i) * A(b, j) * A(c, k) * s[a][b][c];
        }
    return out;
  };
  return parametric(std::move(q));
}

void require_immersion(const Immersion3& f, const Vector2d& p) {
  const Matrix32d J = f.jac(p);
  const Matrix2d G = J.transpose() * J;
  const double smallest_sq = Eigen::SelfAdjointEigenSolver<Matrix2d>(G).eigenvalues()(0);
  if (!(smallest_sq > 1e-20)) {
    std::ostringstream os;
    os.precision(17);
    os << "jacobian has rank < 2 at (" << p.x() << ", " << p.y() << ")";
    throw ImmersionError(os.str());
  }
}

std::string to_string(MetricFamily f) {
  switch (f) {
    case MetricFamily::frozen: return "frozen";
    case MetricFamily::induced: return "induced";
    case MetricFamily::rotation: return "rotation";
    case MetricFamily::custom: return "custom";
  }
  return "unknown";
}

double MetricOracle2::eval(const Vector2d& x, const Vector2d& v) const {
  return std::visit(overloaded{
                        [&](const Frozen& m) { return m.norm.eval(v); },
                        [&](const Induced& m) {
                          require_immersion(m.f, x);
                          return m.norm.eval(m.f.jac(x) * v);
                        },
                        [&](const Rotation& m) { return m.phi0.eval(rotation2(x.y()) * v); },
                        [&](const Custom& m) { return m.eval(x, v); },
                    },
                    params_);
}

Vector2d MetricOracle2::dv(const Vector2d& x, const Vector2d& v) const {
  return std::visit(overloaded{
                        [&](const Frozen& m) -> Vector2d { return m.norm.grad(v); },
                        [&](const Induced& m) -> Vector2d {
                          require_immersion(m.f, x);
                          const Matrix32d J = m.f.jac(x);
                          return J.transpose() * m.norm.grad(J * v);
                        },
                        [&](const Rotation& m) -> Vector2d {
                          const Matrix2d R = rotation2(x.y());
                          return R.transpose() * m.phi0.grad(R * v);
                        },
                        [&](const Custom& m) -> Vector2d { return m.dv(x, v); },
                    },
                    params_);
}

Vector2d MetricOracle2::dx(const Vector2d& x, const Vector2d& v) const {
  return std::visit(overloaded{
                        [&](const Frozen&) -> Vector2d { return Vector2d::Zero(); },
                        [&](const Induced& m) -> Vector2d {
                          require_immersion(m.f, x);
                          const Vector3d g = m.norm.grad(m.f.jac(x) * v);
                          const Second3 s = m.f.d2(x);
                          Vector2d out;
                          for (int i = 0; i < 2; ++i) out(i) = g.dot(v(0) * s[i][0] + v(1) * s[i][1]);
                          return out;
                        },
                        [&](const Rotation& m) -> Vector2d {
                          const Vector2d w = rotation2(x.y()) * v;
                          return {0.0, m.phi0.grad(w).dot(kRot90 * w)};
                        },
                        [&](const Custom& m) -> Vector2d { return m.dx(x, v); },
                    },
                    params_);
}

Matrix2d MetricOracle2::dvv(const Vector2d& x, const Vector2d& v) const {
  return std::visit(overloaded{
                        [&](const Frozen& m) -> Matrix2d { return m.norm.hess(v); },
                        [&](const Induced& m) -> Matrix2d {
                          require_immersion(m.f, x);
                          const Matrix32d J = m.f.jac(x);
                          return J.transpose() * m.norm.hess(J * v) * J;
                        },
                        [&](const Rotation& m) -> Matrix2d {
                          const Matrix2d R = rotation2(x.y());
                          return R.transpose() * m.phi0.hess(R * v) * R;
                        },
                        [&](const Custom& m) -> Matrix2d { return m.dvv(x, v); },
                    },
                    params_);
}

Matrix2d MetricOracle2::dxv(const Vector2d& x, const Vector2d& v) const {
  return std::visit(
      overloaded{
          [&](const Frozen&) -> Matrix2d { return Matrix2d::Zero(); },
          [&](const Induced& m) -> Matrix2d {
            require_immersion(m.f, x);
            const Matrix32d J = m.f.jac(x);
            const Vector3d u = J * v;
            const Vector3d g = m.norm.grad(u);
            const Matrix3d H = m.norm.hess(u);
            const Second3 s = m.f.d2(x);
            Matrix2d out;
            for (int i = 0; i < 2; ++i) {
              const Vector3d du = v(0) * s[i][0] + v(1) * s[i][1];
              for (int j = 0; j < 2; ++j) out(i, j) = du.dot(H * J.col(j)) + g.dot(s[i][j]);
            }
            return out;
          },
          [&](const Rotation& m) -> Matrix2d {
            const Matrix2d R = rotation2(x.y());
            const Vector2d w = R * v;
            const Vector2d row = R.transpose() * (m.phi0.hess(w) * (kRot90 * w)) +
                                 R.transpose() * (kRot90.transpose() * m.phi0.grad(w));
            Matrix2d out = Matrix2d::Zero();
            out.row(1) = row.transpose();
            return out;
          },
          [&](const Custom& m) -> Matrix2d { return m.dxv(x, v); },
      },
      params_);
}

Matrix2d MetricOracle2::dxx(const Vector2d& x, const Vector2d& v) const {
  return std::visit(
      overloaded{
          [&](const Frozen&) -> Matrix2d { return Matrix2d::Zero(); },
          [&](const Induced& m) -> Matrix2d {
            require_immersion(m.f, x);
            const Vector3d u = m.f.jac(x) * v;
            const Vector3d g = m.norm.grad(u);
            const Matrix3d H = m.norm.hess(u);
            const Second3 s = m.f.d2(x);
            const Third3 t = m.f.d3(x);
            std::array<Vector3d, 2> du;
            for (int i = 0; i < 2; ++i) du[i] = v(0) * s[i][0] + v(1) * s[i][1];
            Matrix2d out;
            for (int i = 0; i < 2; ++i)
              for (int k = 0; k < 2; ++k)
                out(i, k) = du[k].dot(H * du[i]) + g.dot(v(0) * t[i][0][k] + v(1) * t[i][1][k]);
            return out;
          },
          [&](const Rotation& m) -> Matrix2d {
            const Vector2d w = rotation2(x.y()) * v;
            const Vector2d jw = kRot90 * w;
            Matrix2d out = Matrix2d::Zero();
            out(1, 1) = jw.dot(m.phi0.hess(w) * jw) - m.phi0.grad(w).dot(w);
            return out;
          },
          [&](const Custom& m) -> Matrix2d { return m.dxx(x, v); },
      },
      params_);
}

bool MetricOracle2::x_invariant() const {
  return std::visit(overloaded{
                        [](const Frozen&) { return true; },
                        [](const Induced&) { return false; },
                        [](const Rotation&) { return true; },
                        [](const Custom& m) { return m.x_invariant; },
                    },
                    params_);
}

MetricFamily MetricOracle2::family() const {
  return std::visit(overloaded{
                        [](const Frozen&) { return MetricFamily::frozen; },
                        [](const Induced&) { return MetricFamily::induced; },
                        [](const Rotation&) { return MetricFamily::rotation; },
                        [](const Custom&) { return MetricFamily::custom; },
                    },
                    params_);
}

MetricOracle2 induced_metric(const Immersion3& f, const Norm3& norm) {
  return MetricOracle2::induced(f, norm);
}

PlanarNorm freeze(const MetricOracle2& metric, const Vector2d& p) {
  return std::visit(
      overloaded{
          [&](const MetricOracle2::Frozen& m) { return m.norm; },
          [&](const MetricOracle2::Rotation& m) { return m.phi0.rotated(p.y()); },
          [&](const MetricOracle2::Induced& m) {
            require_immersion(m.f, p);
            const Matrix32d J = m.f.jac(p);
            const Norm3 norm = m.norm;
            return PlanarNorm::custom({
                [norm, J](const Vector2d& v) { return norm.eval(J * v); },
                [norm, J](const Vector2d& v) -> Vector2d { return J.transpose() * norm.grad(J * v); },
                [norm, J](const Vector2d& v) -> Matrix2d {
                  return J.transpose() * norm.hess(J * v) * J;
                },
                "tangent norm",
            });
          },
          [&](const MetricOracle2::Custom&) {
            return PlanarNorm::custom({
                [metric, p](const Vector2d& v) { return metric.eval(p, v); },
                [metric, p](const Vector2d& v) { return metric.dv(p, v); },
                [metric, p](const Vector2d& v) { return metric.dvv(p, v); },
                "tangent norm",
            });
          },
      },
      metric.params());
}

SFF2 SFF2::from_matrix(const Matrix2d& m) { return from_matrix(m, m.norm()); }

SFF2 SFF2::from_matrix(const Matrix2d& m, double hess_norm) {
  SFF2 s;
  s.matrix = 0.5 * (m + m.transpose());
  s.conormal = Vector3d::UnitZ();
  const Vector2d ev = Eigen::SelfAdjointEigenSolver<Matrix2d>(s.matrix).eigenvalues();
  s.eigenvalues = Vector2d(ev(1), ev(0));
  s.hess_norm = hess_norm;
  return s;
}

SFF2 second_fundamental_form(const Immersion3& f, const Vector2d& p) {
  require_immersion(f, p);
  const Matrix32d J = f.jac(p);
  const Vector3d n = J.col(0).cross(J.col(1)).normalized();
  const Second3 d = f.d2(p);
  Matrix2d m;
  double frob = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m(i, j) = n.dot(d[i][j]);
      frob += d[i][j].squaredNorm();
    }
  SFF2 s = SFF2::from_matrix(m, std::sqrt(frob));
  s.conormal = n;
  return s;
}

std::string to_string(SFFClass c) {
  switch (c) {
    case SFFClass::definite: return "definite";
    case SFFClass::indefinite: return "indefinite";
    case SFFClass::degenerate_rank1: return "degenerate_rank1";
    case SFFClass::zero: return "zero";
  }
  return "unknown";
}

SFFClass classify_sff(const SFF2& s, double scale_tol) {
  const double a = std::abs(s.eigenvalues(0)), b = std::abs(s.eigenvalues(1));
  const double big = std::max(a, b), small = std::min(a, b);
  if (big < scale_tol * (1.0 + s.hess_norm)) return SFFClass::zero;
  if (small < scale_tol * big) return SFFClass::degenerate_rank1;
  return s.eigenvalues(0) * s.eigenvalues(1) > 0.0 ? SFFClass::definite : SFFClass::indefinite;
}

MonoDefect monochromatic_defect(const MetricOracle2& metric, const std::vector<Vector2d>& points,
                                int n) {
  if (points.size() < 2) throw DomainError("monochromatic_defect needs at least 2 points");
  const int count = static_cast<int>(points.size());
  std::vector<NormalizedNorm> tangent(points.size());
  parallel_for(count, [&](int i) {
    tangent[static_cast<std::size_t>(i)] = normalize_norm(freeze(metric, points[static_cast<std::size_t>(i)]), n);
  });
  MonoDefect out;
  out.defects.assign(points.size(), 0.0);
  parallel_for(count - 1, [&](int i) {
    const auto k = static_cast<std::size_t>(i + 1);
    out.defects[k] = equivalence_defect(tangent[0], tangent[k]).defect;
  });
  for (int i = 1; i < count; ++i) {
    if (out.defects[static_cast<std::size_t>(i)] > out.max_defect) {
      out.max_defect = out.defects[static_cast<std::size_t>(i)];
      out.argmax = {0, i};
    }
  }
  return out;
}

double euclidean_defect(const MetricOracle2& metric, const Vector2d& p, int n) {
  return equivalence_defect(freeze(metric, p), PlanarNorm::euclidean(), n).defect;
}

Flatness flatness_defect(const MetricOracle2& metric, const Vector2d& p, int n_dirs) {
  if (n_dirs < 16) throw DomainError("flatness_defect needs n_dirs >= 16");
  Flatness out;
  for (int k = 0; k < n_dirs; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n_dirs;
    const Vector2d v(std::cos(t), std::sin(t));
    out.first = std::max(out.first, metric.dx(p, v).norm());
    const Vector2d ev = Eigen::SelfAdjointEigenSolver<Matrix2d>(metric.dxx(p, v)).eigenvalues();
    out.second = std::max(out.second, ev.cwiseAbs().maxCoeff());
  }
  return out;
}

MonoReport mono_theorem_report(const Immersion3& f, const Norm3& norm,
                               const std::vector<Vector2d>& points, int n, const Tolerances& tol) {
  if (points.empty()) throw DomainError("mono_theorem_report needs at least 1 point");
  const MetricOracle2 metric = induced_metric(f, norm);
  const int count = static_cast<int>(points.size());
  const NormalizedNorm disk = normalize_norm(PlanarNorm::euclidean(), n);

  std::vector<NormalizedNorm> tangent(points.size());
  MonoReport rep;
  rep.records.resize(points.size());
  parallel_for(count, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    MonoRecord& r = rep.records[k];
    r.point = points[k];
    tangent[k] = normalize_norm(freeze(metric, points[k]), n);
    r.euclidean_defect = equivalence_defect(tangent[k], disk).defect;
    r.sff = second_fundamental_form(f, points[k]);
    r.sff_class = classify_sff(r.sff, tol.sff_scale);
  });
  parallel_for(count - 1, [&](int i) {
    const auto k = static_cast<std::size_t>(i + 1);
    rep.records[k].mono_defect = equivalence_defect(tangent[0], tangent[k]).defect;
  });

  for (const MonoRecord& r : rep.records) rep.set_mono_defect = std::max(rep.set_mono_defect, r.mono_defect);
  if (count >= 2 && rep.set_mono_defect < tol.equivalence) {
    for (int i = 0; i < count; ++i) {
      const MonoRecord& r = rep.records[static_cast<std::size_t>(i)];
      const bool nondegenerate =
          r.sff_class == SFFClass::definite || r.sff_class == SFFClass::indefinite;
      if (r.euclidean_defect > 10.0 * tol.equivalence && nondegenerate) rep.violations.push_back(i);
    }
  }
  return rep;
}

}  // namespace mfs
