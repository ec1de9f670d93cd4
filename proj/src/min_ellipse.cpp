#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfs/errors.hpp"
#include "mfs/golden.hpp"
#include "mfs/planar.hpp"

namespace mfs {

namespace {

// The ellipse {w : w'Mw <= 1} is parametrised by m = (M00, M01, M11); the
// constraint "p inside" reads lift(p) . m <= 1.
Vector3d lift(const Vector2d& p) { return {p.x() * p.x(), 2.0 * p.x() * p.y(), p.y() * p.y()}; }

double det_of(const Vector3d& m) { return m(0) * m(2) - m(1) * m(1); }

Vector3d grad_logdet(const Vector3d& m) { return Vector3d(m(2), -2.0 * m(1), m(0)) / det_of(m); }

Matrix3d hess_neg_logdet(const Vector3d& m) {
  const Vector3d g = grad_logdet(m);
  Matrix3d d2;
  d2 << 0, 0, 1, 0, -2, 0, 1, 0, 0;
  return g * g.transpose() - d2 / det_of(m);
}

bool interior(const Vector3d& m) { return m(0) > 0.0 && det_of(m) > 0.0; }

Matrix2d to_matrix(const Vector3d& m) {
  Matrix2d M;
  M << m(0), m(1), m(1), m(2);
  return M;
}

constexpr int kNewtonCap = 200;

// Damped Newton on -log det M - mu sum log(1 - a_k.m), mu driven to 0.
Vector3d barrier_solve(const std::vector<Vector3d>& a) {
  double max_r2 = 0.0;
  for (const auto& ak : a) max_r2 = std::max(max_r2, ak(0) + ak(2));
  Vector3d m = (0.5 / max_r2) * Vector3d(1.0, 0.0, 1.0);

  const auto n = static_cast<double>(a.size());
  auto objective = [&](const Vector3d& x, double mu) {
    double f = -std::log(det_of(x));
    for (const auto& ak : a) f -= mu * std::log(1.0 - ak.dot(x));
    return f;
  };
  auto feasible = [&](const Vector3d& x) {
    if (!interior(x)) return false;
    for (const auto& ak : a)
      if (ak.dot(x) >= 1.0) return false;
    return true;
  };

  int iterations = 0;
  double mu = 1.0;
  for (;;) {
    for (;;) {
      Vector3d grad = -grad_logdet(m);
      Matrix3d hess = hess_neg_logdet(m);
      for (const auto& ak : a) {
        const double s = 1.0 - ak.dot(m);
        grad += (mu / s) * ak;
        hess += (mu / (s * s)) * ak * ak.transpose();
      }
      const Vector3d step = -hess.ldlt().solve(grad);
      const double decrement2 = -grad.dot(step);
      if (!(decrement2 > 0.0) || decrement2 / 2.0 < 1e-12) break;
      if (++iterations > kNewtonCap)
        throw ConvergenceError("min_circumscribed_ellipse: barrier Newton hit the iteration cap",
                               grad.norm());
      double t = 1.0;
      while (!feasible(m + t * step) && t > 1e-20) t *= 0.5;
      const double f0 = objective(m, mu);
      while (objective(m + t * step, mu) > f0 - 0.25 * t * decrement2 && t > 1e-20) t *= 0.5;
      m += t * step;
    }
    if (n * mu < 1e-8) break;
    mu *= 0.05;
  }
  return m;
}

// Boundary of the unit ball in polar form, with the lift and its angular
// derivative.
struct Boundary {
  const PlanarNorm& pn;

  Vector2d point(double t) const {
    const Vector2d u(std::cos(t), std::sin(t));
    return u / pn.eval(u);
  }
  Vector3d a(double t) const { return lift(point(t)); }
  Vector3d da(double t) const {
    const Vector2d u(std::cos(t), std::sin(t));
    const Vector2d du(-std::sin(t), std::cos(t));
    const double f = pn.eval(u);
    const Vector2d p = u / f;
    const Vector2d dp = du / f - u * pn.grad(u).dot(du) / (f * f);
    return {2.0 * p.x() * dp.x(), 2.0 * (dp.x() * p.y() + p.x() * dp.y()), 2.0 * p.y() * dp.y()};
  }
};

struct Contact {
  double theta;
  Vector3d a;
  double q;
};

// Newton on the first-order conditions of the continuous problem with a
// fixed active set: grad log det(m) = sum_j lambda_j a(t_j), a(t_j).m = 1
// and d/dt [a(t).m](t_j) = 0. Jacobian by central differences.
bool kkt_newton(const Boundary& bd, Vector3d& m, std::vector<double>& theta,
                Eigen::VectorXd& lambda) {
  const int J = static_cast<int>(theta.size());
  const int dim = 3 + 2 * J;
  auto pack = [&]() {
    Eigen::VectorXd z(dim);
    z.head<3>() = m;
    z.segment(3, J) = lambda;
    for (int j = 0; j < J; ++j) z(3 + J + j) = theta[static_cast<std::size_t>(j)];
    return z;
  };
  auto residual = [&](const Eigen::VectorXd& z) {
    const Vector3d mm = z.head<3>();
    Eigen::VectorXd r(dim);
    if (!interior(mm)) {
      r.setConstant(std::numeric_limits<double>::infinity());
      return r;
    }
    Vector3d stat = grad_logdet(mm);
    for (int j = 0; j < J; ++j) {
      const double t = z(3 + J + j);
      const Vector3d aj = bd.a(t);
      stat -= z(3 + j) * aj;
      r(3 + j) = aj.dot(mm) - 1.0;
      r(3 + J + j) = bd.da(t).dot(mm);
    }
    r.head<3>() = stat;
    return r;
  };

  Eigen::VectorXd z = pack();
  Eigen::VectorXd r = residual(z);
  for (int it = 0; it < 40 && r.norm() > 1e-15; ++it) {
    Eigen::MatrixXd jac(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const double h = 1e-7 * (1.0 + std::abs(z(i)));
      Eigen::VectorXd zp = z, zm = z;
      zp(i) += h;
      zm(i) -= h;
      jac.col(i) = (residual(zp) - residual(zm)) / (2.0 * h);
    }
    if (!jac.allFinite()) return false;
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
    double s = 1.0;
    Eigen::VectorXd zn = z + step;
    Eigen::VectorXd rn = residual(zn);
    while (!(rn.norm() < r.norm()) && s > 1e-6) {
      s *= 0.5;
      zn = z + s * step;
      rn = residual(zn);
    }
    if (!(rn.norm() < r.norm())) break;
    z = zn;
    r = rn;
  }
  if (!(r.norm() < 1e-11)) return false;
  m = z.head<3>();
  lambda = z.segment(3, J);
  for (int j = 0; j < J; ++j) theta[static_cast<std::size_t>(j)] = z(3 + J + j);
  return lambda.minCoeff() >= -1e-12;
}

}  // namespace

Ellipse2 min_circumscribed_ellipse(const PlanarNorm& pn, int n) {
  if (n < 64) throw DomainError("min_circumscribed_ellipse needs n >= 64");
  const RadialProfile prof = radial_profile(pn, n);
  std::vector<Vector3d> grid(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = lift(prof.point(k));

  Ellipse2 out;

  // An exact ellipse makes every sample active; the linear system a_k.m = 1
  // is then consistent and the fit is the answer.
  {
    Eigen::MatrixXd A(n, 3);
    for (int k = 0; k < n; ++k) A.row(k) = grid[static_cast<std::size_t>(k)].transpose();
    const Vector3d m = A.colPivHouseholderQr().solve(Eigen::VectorXd::Ones(n));
    const double res = (A * m - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
    if (interior(m) && res < 1e-11) {
      out.M = to_matrix(m);
      out.active_count = n;
      out.active_residual = res;
      const Eigen::VectorXd lambda = A.transpose().colPivHouseholderQr().solve(grad_logdet(m));
      out.kkt_residual = (A.transpose() * lambda - grad_logdet(m)).norm();
      return out;
    }
  }

  const Boundary bd{pn};
  const double h = 2.0 * std::numbers::pi / n;

  // Local maxima of q(t) = a(t).m near the grid maxima, largest first.
  auto find_contacts = [&](const Vector3d& mm) {
    std::vector<double> q(static_cast<std::size_t>(n));
    double qmax = 0.0;
    for (int k = 0; k < n; ++k) {
      q[static_cast<std::size_t>(k)] = grid[static_cast<std::size_t>(k)].dot(mm);
      qmax = std::max(qmax, q[static_cast<std::size_t>(k)]);
    }
    std::vector<Contact> cs;
    for (int k = 0; k < n; ++k) {
      const double qk = q[static_cast<std::size_t>(k)];
      const double qp = q[static_cast<std::size_t>((k + n - 1) % n)];
      const double qn = q[static_cast<std::size_t>((k + 1) % n)];
      if (qk < qp || qk <= qn || qk < 0.95 * qmax) continue;
      const double t0 = prof.theta(k);
      auto [t, qt] =
          detail::golden_maximize([&](double t) { return bd.a(t).dot(mm); }, t0 - h, t0 + h);
      cs.push_back({t, bd.a(t), qt});
    }
    std::sort(cs.begin(), cs.end(), [](const Contact& x, const Contact& y) { return x.q > y.q; });
    if (cs.size() > 12) cs.resize(12);
    return cs;
  };

  auto feasible = [&](const Vector3d& mm, const std::vector<Contact>& cs, double tol) {
    for (const auto& c : cs)
      if (c.a.dot(mm) > 1.0 + tol) return false;
    for (const auto& g : grid)
      if (g.dot(mm) > 1.0 + tol) return false;
    return true;
  };

  Vector3d m = barrier_solve(grid);
  std::vector<double> active_theta;
  Eigen::VectorXd lambda;
  bool polished = false;

  {
    const std::vector<Contact> contacts = find_contacts(m);
    // Symmetric norms produce each contact twice (p and -p share a lift).
    std::vector<Contact> distinct;
    for (const auto& c : contacts) {
      bool dup = false;
      for (const auto& d : distinct) dup = dup || (c.a - d.a).norm() <= 1e-6 * d.a.norm();
      if (!dup && distinct.size() < 6) distinct.push_back(c);
    }

    // Every active set of size two or three is polished from the barrier
    // solution; the feasible one with the largest log det wins.
    double best_logdet = -std::numeric_limits<double>::infinity();
    const Vector3d start = m;
    const std::size_t nd = distinct.size();
    for (std::size_t i = 0; i < nd; ++i)
      for (std::size_t j = i + 1; j < nd; ++j)
        for (std::size_t k = j + 1; k <= nd; ++k) {
          std::vector<std::size_t> set{i, j};
          if (k < nd) set.push_back(k);
          Vector3d mm = start;
          std::vector<double> th;
          Eigen::MatrixXd At(3, static_cast<Eigen::Index>(set.size()));
          for (std::size_t s = 0; s < set.size(); ++s) {
            th.push_back(distinct[set[s]].theta);
            At.col(static_cast<Eigen::Index>(s)) = distinct[set[s]].a;
          }
          Eigen::VectorXd lam = At.colPivHouseholderQr().solve(grad_logdet(mm));
          if (!kkt_newton(bd, mm, th, lam) || !feasible(mm, find_contacts(mm), 1e-11)) continue;
          const double ld = std::log(det_of(mm));
          if (ld > best_logdet) {
            best_logdet = ld;
            m = mm;
            active_theta = th;
            lambda = lam;
            polished = true;
          }
        }
  }

  if (!polished)
    throw ConvergenceError("min_circumscribed_ellipse: active-set polish did not converge",
                           lambda.size() ? lambda.norm() : std::numeric_limits<double>::infinity());

  out.M = to_matrix(m);
  Vector3d stat = grad_logdet(m);
  for (std::size_t j = 0; j < active_theta.size(); ++j) {
    const Vector3d aj = bd.a(active_theta[j]);
    stat -= lambda(static_cast<Eigen::Index>(j)) * aj;
    out.active_residual = std::max(out.active_residual, std::abs(1.0 - aj.dot(m)));
    out.contacts.push_back(bd.point(active_theta[j]));
  }
  out.kkt_residual = stat.norm();
  out.active_count = static_cast<int>(active_theta.size());
  return out;
}

Matrix2d ellipse_gauge(const Ellipse2& e) {
  Eigen::SelfAdjointEigenSolver<Matrix2d> es(e.M);
  return es.operatorSqrt();
}

PlanarNorm normalized(const PlanarNorm& pn, int n) {
  const Ellipse2 e = min_circumscribed_ellipse(pn, n);
  return pn.compose(ellipse_gauge(e).inverse());
}

}  // namespace mfs
