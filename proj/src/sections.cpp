#include "mfs/sections.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfs/errors.hpp"
#include "mfs/parallel.hpp"

namespace mfs {

namespace {

// Row of the linear map q -> v'Qv for q = (Q00, Q01, Q02, Q11, Q12, Q22).
Eigen::Matrix<double, 1, 6> quadratic_row(const Vector3d& v) {
  Eigen::Matrix<double, 1, 6> row;
  row << v.x() * v.x(), 2.0 * v.x() * v.y(), 2.0 * v.x() * v.z(), v.y() * v.y(),
      2.0 * v.y() * v.z(), v.z() * v.z();
  return row;
}

Matrix3d unpack(const Eigen::Matrix<double, 6, 1>& q) {
  Matrix3d Q;
  Q << q(0), q(1), q(2), q(1), q(3), q(4), q(2), q(4), q(5);
  return Q;
}

// Unit vectors of the norm along the section, at uniform basis angles.
std::vector<Vector3d> section_points(const Norm3& norm, const Plane3& plane, int m,
                                     double offset = 0.0) {
  std::vector<Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + offset) / m;
    pts.push_back(unit_vector(norm, plane.embed(Vector2d(std::cos(t), std::sin(t)))));
  }
  return pts;
}

}  // namespace

std::string to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::consistent_with_ellipsoid: return "consistent_with_ellipsoid";
    case ScanVerdict::equivalence_fails: return "equivalence_fails";
    case ScanVerdict::ellipse_fails: return "ellipse_fails";
  }
  return "unknown";
}

std::string to_string(LocalVerdict v) {
  return v == LocalVerdict::ellipsoid_locally ? "ellipsoid_locally" : "not_ellipsoid";
}

ScanReport amu_scan(const Norm3& norm, const Vector2d& center, double radius, int count, int n,
                    std::uint64_t seed, bool pairwise, const Tolerances& tol) {
  if (count < 5) throw DomainError("amu_scan needs count >= 5");
  ScanReport rep;
  rep.pairwise = pairwise;
  rep.planes = sample_plane_neighborhood(center, radius, count, seed);

  std::vector<NormalizedNorm> sections(static_cast<std::size_t>(count));
  rep.ellipse_defects.assign(static_cast<std::size_t>(count), 0.0);
  parallel_for(count, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    sections[k] = normalize_norm(restrict_norm(norm, rep.planes[k]), n);
    rep.ellipse_defects[k] = ellipse_defect(sections[k]);
  });

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j)
      if (pairwise || i == 0) pairs.emplace_back(i, j);
  std::vector<double> d(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int p) {
    const auto [i, j] = pairs[static_cast<std::size_t>(p)];
    d[static_cast<std::size_t>(p)] =
        equivalence_defect(sections[static_cast<std::size_t>(i)], sections[static_cast<std::size_t>(j)]).defect;
  });

  rep.defect_matrix = Eigen::MatrixXd::Zero(count, count);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    rep.defect_matrix(i, j) = rep.defect_matrix(j, i) = d[p];
    rep.max_defect = std::max(rep.max_defect, d[p]);
  }

  const double worst_ellipse = *std::max_element(rep.ellipse_defects.begin(), rep.ellipse_defects.end());
  if (rep.max_defect >= tol.equivalence)
    rep.verdict = ScanVerdict::equivalence_fails;
  else if (worst_ellipse >= tol.equivalence)
    rep.verdict = ScanVerdict::ellipse_fails;
  else
    rep.verdict = ScanVerdict::consistent_with_ellipsoid;
  return rep;
}

TauResult kakutani_tau(const Norm3& norm, const Plane3& plane, int m, const Tolerances& tol) {
  if (m < 8) throw DomainError("kakutani_tau needs m >= 8");
  const Vector3d cross = plane.u1().cross(plane.u2());
  if (cross.norm() <= 1e-12 * plane.u1().norm() * plane.u2().norm())
    throw DomainError("plane basis vectors are linearly dependent");

  Eigen::MatrixXd A(m, 3);
  const auto pts = section_points(norm, plane, m);
  for (int k = 0; k < m; ++k) A.row(k) = norm.grad(pts[static_cast<std::size_t>(k)]).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  TauResult res;
  res.tau = svd.matrixV().col(2).normalized();
  const double pairing = res.tau.dot(plane.conormal());
  if (pairing < 0.0 || (pairing == 0.0 && res.tau.z() < 0.0)) res.tau = -res.tau;
  res.sigma_ratio = s(2) / s(0);
  res.feasible = res.sigma_ratio < tol.tau;
  res.max_pairing = (A * res.tau).cwiseAbs().maxCoeff();
  return res;
}

QuadraticFit quadratic_fit(const Norm3& norm, const std::vector<Plane3>& planes,
                           int per_plane_samples) {
  if (planes.size() < 2) throw DomainError("quadratic_fit needs at least 2 planes");
  if (per_plane_samples < 6) throw DomainError("quadratic_fit needs per_plane_samples >= 6");

  const int rows = static_cast<int>(planes.size()) * per_plane_samples;
  Eigen::MatrixXd A(rows, 6);
  std::vector<Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(rows));
  for (const Plane3& pl : planes)
    for (const Vector3d& v : section_points(norm, pl, per_plane_samples)) pts.push_back(v);
  for (int r = 0; r < rows; ++r) A.row(r) = quadratic_row(pts[static_cast<std::size_t>(r)]);

  // Points lie on the unit sphere, so every right-hand side is 1.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  cod.setThreshold(1e-10);
  const Eigen::Matrix<double, 6, 1> q = cod.solve(Eigen::VectorXd::Ones(rows));

  QuadraticFit fit;
  fit.Q = unpack(q);
  fit.rank = static_cast<int>(cod.rank());
  fit.rank_deficient = fit.rank < 6;
  for (const Vector3d& v : pts) {
    const double phi = norm.eval(v);
    fit.residual = std::max(fit.residual, std::abs(v.dot(fit.Q * v) - phi * phi));
  }
  fit.positive_definite = Eigen::SelfAdjointEigenSolver<Matrix3d>(fit.Q).eigenvalues()(0) > 0.0;
  return fit;
}

double quadratic_validation_residual(const Norm3& norm, const Matrix3d& Q,
                                     const std::vector<Plane3>& planes, int per_plane_samples) {
  double worst = 0.0;
  for (const Plane3& pl : planes)
    for (const Vector3d& v : section_points(norm, pl, per_plane_samples, 0.5))
      worst = std::max(worst, std::abs(v.dot(Q * v) - 1.0));
  return worst;
}

LocalCheck local_ellipsoid_check(const Norm3& norm, const Vector2d& center, double radius,
                                 int count, int n, std::uint64_t seed, const Tolerances& tol) {
  LocalCheck out;
  out.scan = amu_scan(norm, center, radius, count, n, seed, false, tol);
  if (out.scan.verdict == ScanVerdict::equivalence_fails) {
    out.failing_stage = "equivalence";
    return out;
  }
  if (out.scan.verdict == ScanVerdict::ellipse_fails) {
    out.failing_stage = "ellipse";
    return out;
  }
  out.fit = quadratic_fit(norm, out.scan.planes, 64);
  out.validation_residual = quadratic_validation_residual(norm, out.fit->Q, out.scan.planes, 256);
  if (out.validation_residual < tol.equivalence && out.fit->positive_definite) {
    out.verdict = LocalVerdict::ellipsoid_locally;
  } else {
    out.failing_stage = "quadratic";
  }
  return out;
}

}  // namespace mfs
