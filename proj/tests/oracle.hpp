#pragma once

// Test-only reference computations. Nothing here calls into the library's
// ellipse solver or defect search: norms are plain closures, the ellipse
// comes from the dual (weights) problem solved by Frank-Wolfe with away
// steps, and the defect is an exhaustive angle scan with exact evaluations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Fn2 = std::function<double(double, double)>;

inline double phi0(double x, double y) {
  return std::sqrt(x * x + y * y) + std::sqrt(x * x + 2.0 * y * y);
}

/// Minimum-area origin-centred ellipse {w : w' M w <= 1} containing the
/// points, from the dual problem max log det(sum u_i p_i p_i'), sum u = 1.
inline Eigen::Matrix2d mvee_centered(const std::vector<Eigen::Vector2d>& pts, double eps = 1e-9,
                                     int max_iter = 200000) {
  const std::size_t n = pts.size();
  std::vector<double> u(n, 1.0 / static_cast<double>(n));
  Eigen::Matrix2d X = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < n; ++i) X += u[i] * pts[i] * pts[i].transpose();
  const double d = 2.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Matrix2d Xi = X.inverse();
    std::size_t jmax = 0, jmin = 0;
    double gmax = -1.0, gmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = pts[i].dot(Xi * pts[i]);
      if (g > gmax) gmax = g, jmax = i;
      if (u[i] > 0.0 && g < gmin) gmin = g, jmin = i;
    }
    if (gmax <= d * (1.0 + eps) && gmin >= d * (1.0 - eps)) break;
    if (gmax - d >= d - gmin) {
      const double a = (gmax / d - 1.0) / (gmax - 1.0);
      for (auto& w : u) w *= (1.0 - a);
      u[jmax] += a;
      X = (1.0 - a) * X + a * pts[jmax] * pts[jmax].transpose();
    } else {
      // Away step, clipped so the weight stays nonnegative.
      double a = (1.0 - gmin / d) / (gmin - 1.0);
      a = std::min(a, u[jmin] / (1.0 - u[jmin]));
      for (auto& w : u) w *= (1.0 + a);
      u[jmin] -= a;
      if (u[jmin] < 1e-18) u[jmin] = 0.0;
      X = (1.0 + a) * X - a * pts[jmin] * pts[jmin].transpose();
    }
  }
  return (d * X).inverse();
}

inline std::vector<Eigen::Vector2d> boundary(const Fn2& f, int count) {
  std::vector<Eigen::Vector2d> pts;
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * k / count;
    const double c = std::cos(t), s = std::sin(t);
    pts.emplace_back(c / f(c, s), s / f(c, s));
  }
  return pts;
}

inline Eigen::Matrix2d sqrtm(const Eigen::Matrix2d& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  return es.operatorSqrt();
}

/// Radial function of the normalised unit ball of f.
struct NormalizedRadial {
  Fn2 f;
  Eigen::Matrix2d Sinv;
  double operator()(double t) const {
    const Eigen::Vector2d w = Sinv * Eigen::Vector2d(std::cos(t), std::sin(t));
    return 1.0 / f(w.x(), w.y());
  }
};

inline NormalizedRadial normalize(const Fn2& f, int boundary_count = 1000) {
  const Eigen::Matrix2d M = mvee_centered(boundary(f, boundary_count));
  return {f, sqrtm(M).inverse()};
}

/// min over rotations/reflections of max over `samples` directions of the
/// radial mismatch: an exhaustive scan of `grid` angles, then a second
/// exhaustive scan of `grid` angles across the best cell.
inline double brute_defect(const Fn2& f1, const Fn2& f2, int grid = 10000, int samples = 1000) {
  const NormalizedRadial r1 = normalize(f1), r2 = normalize(f2);
  std::vector<double> r2s(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) r2s[static_cast<std::size_t>(k)] = r2(2.0 * std::numbers::pi * k / samples);
  auto mismatch = [&](double theta, int sigma) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / samples;
      worst = std::max(worst, std::abs(r2s[static_cast<std::size_t>(k)] - r1(sigma * phi + theta)));
    }
    return worst;
  };
  double best = std::numeric_limits<double>::infinity();
  const double step = 2.0 * std::numbers::pi / grid;
  for (int sigma : {1, -1}) {
    double best_t = 0.0, best_s = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j) {
      const double d = mismatch(j * step, sigma);
      if (d < best_s) best_s = d, best_t = j * step;
    }
    for (int j = -grid / 2; j <= grid / 2; ++j) {
      const double d = mismatch(best_t + 2.0 * step * j / grid, sigma);
      best_s = std::min(best_s, d);
    }
    best = std::min(best, best_s);
  }
  return best;
}

/// max over `samples` directions of |r_hat - 1| for the normalised ball.
inline double brute_ellipse_defect(const Fn2& f, int samples = 100000) {
  const NormalizedRadial r = normalize(f);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k)
    worst = std::max(worst, std::abs(r(2.0 * std::numbers::pi * k / samples) - 1.0));
  return worst;
}

}  // namespace oracle

namespace oracle {

using Metric = std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&)>;

/// Acceleration of the phi-geodesic through (x, v), from the discrete action
/// sum h L((x_k + x_{k+1}) / 2, (x_{k+1} - x_k) / h), L = phi^2 / 2, with
/// nodes x -+ h v + h^2 a / 2. The stationarity residual at the middle node
/// is solved for a by Newton, with every derivative of L taken by five-point
/// differences of phi; two node spacings are then Richardson-combined.
inline Eigen::Vector2d discrete_acceleration(const Metric& phi, const Eigen::Vector2d& x,
                                             const Eigen::Vector2d& v) {
  using V2 = Eigen::Vector2d;
  const auto L = [&](const V2& p, const V2& w) { return 0.5 * std::pow(phi(p, w), 2); };
  const double d = 1e-3;
  const auto diff = [&](auto&& g, const V2& at, int i) {
    V2 e = V2::Zero();
    e(i) = d * std::max(1.0, at.norm());
    const double s = e(i);
    return (-g(at + 2 * e) + 8 * g(at + e) - 8 * g(at - e) + g(at - 2 * e)) / (12 * s);
  };
  const auto Lx = [&](const V2& p, const V2& w) {
    const auto g = [&](const V2& q) { return L(q, w); };
    return V2(diff(g, p, 0), diff(g, p, 1));
  };
  const auto Lv = [&](const V2& p, const V2& w) {
    const auto g = [&](const V2& q) { return L(p, q); };
    return V2(diff(g, w, 0), diff(g, w, 1));
  };
  const auto solve = [&](double h) {
    const auto residual = [&](const V2& a) {
      const V2 xm = x - h * v + 0.5 * h * h * a, xp = x + h * v + 0.5 * h * h * a;
      const V2 mm = 0.5 * (xm + x), mp = 0.5 * (x + xp);
      const V2 vm = (x - xm) / h, vp = (xp - x) / h;
      return V2(0.5 * (Lx(mm, vm) + Lx(mp, vp)) - (Lv(mp, vp) - Lv(mm, vm)) / h);
    };
    V2 a = V2::Zero();
    for (int it = 0; it < 8; ++it) {
      const V2 r = residual(a);
      Eigen::Matrix2d J;
      for (int j = 0; j < 2; ++j) {
        V2 e = V2::Zero();
        e(j) = 1e-4 * std::max(1.0, a.norm());
        J.col(j) = (residual(a + e) - residual(a - e)) / (2 * e(j));
      }
      const V2 step = J.fullPivLu().solve(r);
      a -= step;
      if (step.norm() < 1e-13 * std::max(1.0, a.norm())) break;
    }
    return a;
  };
  const double h = 1e-2;
  return (4.0 * solve(0.5 * h) - solve(h)) / 3.0;
}

}  // namespace oracle
