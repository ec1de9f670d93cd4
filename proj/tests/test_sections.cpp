#include <doctest.h>

#include "near.hpp"

#include <cmath>
#include <numbers>

#include "derivative_sweep.hpp"
#include "mfs/errors.hpp"
#include "mfs/parallel.hpp"
#include "mfs/sections.hpp"
#include "mfs/suites.hpp"
#include "oracle.hpp"

using namespace mfs;

namespace {

const Matrix3d kDiag123 = Vector3d(1, 2, 3).asDiagonal();

Norm3 sum2_body() { return Norm3::sum2(Matrix3d::Identity(), kDiag123); }

// The same body written out by hand, for the oracles.
double body_eval(const Vector3d& v) { return v.norm() + std::sqrt(v.dot(kDiag123 * v)); }
Vector3d body_grad(const Vector3d& v) { return v / v.norm() + kDiag123 * v / std::sqrt(v.dot(kDiag123 * v)); }

oracle::Fn2 body_section(double a, double b) {
  return [=](double s, double t) { return body_eval({s, t, -a * s - b * t}); };
}

}  // namespace

TEST_CASE("ellipsoid scans are consistent") {
  const ScanReport r = amu_scan(Norm3::ellipsoid(Vector3d(1, 2, 5).asDiagonal()), {0, 0}, 0.3, 20, 512, 0);
  CHECK(r.max_defect < 1e-6);
  CHECK(r.verdict == ScanVerdict::consistent_with_ellipsoid);
  CHECK(r.planes.size() == 20);
  for (double e : r.ellipse_defects) CHECK(e < 1e-6);

  const ScanReport pw = amu_scan(Norm3::ellipsoid(Vector3d(1, 2, 5).asDiagonal()), {0.1, 0}, 0.3, 8, 512, 4, true);
  CHECK(pw.pairwise);
  CHECK(pw.max_defect < 1e-6);
  CHECK((pw.defect_matrix - pw.defect_matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sum2 body sections are not mutually equivalent") {
  // Oracle: exhaustive exact-evaluation defect between the center section and
  // the section at (0.3, 0); recorded 1.4454095262e-3.
  const double ref = oracle::brute_defect(body_section(0, 0), body_section(0.3, 0));
  CHECK(ref == rel(1.4454095262e-3, 1e-6));
  const Norm3 body = sum2_body();
  const double pair = equivalence_defect(restrict_norm(body, Plane3::from_alpha(0, 0)),
                                         restrict_norm(body, Plane3::from_alpha(0.3, 0)), 512).defect;
  CHECK(pair == rel(ref, 0.01));

  const ScanReport r = amu_scan(body, {0, 0}, 0.3, 20, 512, 0);
  CHECK(r.max_defect >= 1e-3);
  CHECK(r.verdict != ScanVerdict::consistent_with_ellipsoid);
  CHECK(r.max_defect == r.defect_matrix.row(0).maxCoeff());
}

TEST_CASE("zero radius scans compare a plane with itself") {
  const ScanReport r = amu_scan(sum2_body(), {0.1, 0.2}, 0.0, 6, 512, 0, true);
  CHECK(r.max_defect < 1e-12);
  CHECK_THROWS_AS(amu_scan(sum2_body(), {0, 0}, 0.1, 4, 512, 0), DomainError);
}

TEST_CASE("scan verdict follows the stored defects") {
  const Tolerances tol;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Norm3 n = cli::random_norm(seed);
    const ScanReport r = amu_scan(n, {0, 0}, 0.25, 6, 512, seed, false, tol);
    double worst = 0.0, worst_ellipse = 0.0;
    for (Eigen::Index j = 0; j < r.defect_matrix.cols(); ++j) worst = std::max(worst, r.defect_matrix(0, j));
    for (double e : r.ellipse_defects) worst_ellipse = std::max(worst_ellipse, e);
    CHECK(r.max_defect == worst);
    CHECK((r.verdict == ScanVerdict::consistent_with_ellipsoid) ==
          (worst < tol.equivalence && worst_ellipse < tol.equivalence));
  }
}

TEST_CASE("scans do not depend on the worker count") {
  const ScanReport one = amu_scan(sum2_body(), {0, 0}, 0.3, 8, 512, 2, true);
  set_thread_count(4);
  const ScanReport four = amu_scan(sum2_body(), {0, 0}, 0.3, 8, 512, 2, true);
  set_thread_count(1);
  CHECK((one.defect_matrix - four.defect_matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tangent direction of an ellipsoid section") {
  const Matrix3d Q = Vector3d(1, 4, 9).asDiagonal();
  const TauResult t = kakutani_tau(Norm3::ellipsoid(Q), Plane3::from_alpha(0, 0), 32);
  CHECK((t.tau - Vector3d(0, 0, 1)).norm() < 1e-12);
  CHECK(t.sigma_ratio < 1e-12);
  CHECK(t.feasible);

  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const Plane3 p = Plane3::from_alpha(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const TauResult e = kakutani_tau(Norm3::euclidean(), p, 32);
    CHECK(e.feasible);
    CHECK((e.tau - p.conormal().normalized()).norm() < 1e-10);
  }
}

TEST_CASE("tangent direction is Q-orthogonal to the plane for ellipsoids") {
  Rng rng(4);
  for (int k = 0; k < 30; ++k) {
    const Matrix3d Q = rng.spd3(1.0);
    const Plane3 p = Plane3::from_alpha(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const TauResult t = kakutani_tau(Norm3::ellipsoid(Q), p, 32);
    CHECK(t.feasible);
    CHECK(std::abs(t.tau.norm() - 1.0) < 1e-14);
    CHECK(t.tau.dot(p.conormal()) >= 0.0);
    for (int j = 0; j < 16; ++j) {
      const Vector3d v = p.embed({std::cos(0.4 * j), std::sin(0.4 * j)}).normalized();
      CHECK(std::abs(v.dot(Q * t.tau)) < 1e-10);
    }
  }
}

TEST_CASE("sum2 body has no common tangent direction") {
  // Oracle: hand-written gradients at 64 unit vectors of the section, SVD of
  // the stacked rows. Recorded ratio 6.5096903566e-3.
  const Plane3 p = Plane3::from_alpha(0.3, 0.1);
  Eigen::MatrixXd rows(64, 3);
  for (int i = 0; i < 64; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 64;
    Vector3d v = std::cos(a) * Vector3d(1, 0, -0.3) + std::sin(a) * Vector3d(0, 1, -0.1);
    v /= body_eval(v);
    rows.row(i) = body_grad(v).transpose();
  }
  const Vector3d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(rows).singularValues();
  const double ref = sv(2) / sv(0);
  CHECK(ref == rel(6.5096903566e-3, 1e-8));

  const TauResult t = kakutani_tau(sum2_body(), p, 64);
  CHECK(t.sigma_ratio == rel(ref, 1e-10));
  CHECK(t.sigma_ratio >= 1e-4);
  CHECK_FALSE(t.feasible);
  CHECK_THROWS_AS(kakutani_tau(sum2_body(), p, 7), DomainError);
  CHECK_THROWS_AS(kakutani_tau(sum2_body(), Plane3::with_basis(0.3, 0.1, {1, 0, -0.3}, {2, 0, -0.6}), 16), DomainError);
}

TEST_CASE("consistent neighborhoods have feasible tangent directions") {
  Rng rng(5);
  for (int k = 0; k < 4; ++k) {
    const Norm3 e = Norm3::ellipsoid(rng.spd3(1.0));
    const ScanReport r = amu_scan(e, {0, 0}, 0.3, 10, 512, static_cast<std::uint64_t>(k));
    REQUIRE(r.verdict == ScanVerdict::consistent_with_ellipsoid);
    for (const Plane3& p : r.planes) CHECK(kakutani_tau(e, p, 32).feasible);
  }
  bool any_infeasible = false;
  for (const Plane3& p : amu_scan(sum2_body(), {0, 0}, 0.3, 10, 512, 0).planes)
    any_infeasible = any_infeasible || !kakutani_tau(sum2_body(), p, 64).feasible;
  CHECK(any_infeasible);
}

TEST_CASE("quadratic fit recovers ellipsoids") {
  const auto five = sample_plane_neighborhood({0, 0}, 1.0, 5, 11);
  const QuadraticFit f = quadratic_fit(Norm3::ellipsoid(kDiag123), five, 32);
  CHECK((f.Q - kDiag123).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(f.residual < 1e-10);
  CHECK(f.positive_definite);
  CHECK_FALSE(f.rank_deficient);

  // Two planes with orthogonal conormals: the minimum-norm solution is the form itself.
  const QuadraticFit two = quadratic_fit(Norm3::euclidean(), {Plane3::from_alpha(1, 0), Plane3::from_alpha(-1, 0)}, 32);
  CHECK((two.Q - Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-8);

  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const Matrix3d Q0 = rng.spd3(1.0);
    std::vector<Plane3> planes;
    for (int j = 0; j < 3; ++j) planes.push_back(Plane3::from_alpha(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    CHECK((quadratic_fit(Norm3::ellipsoid(Q0), planes, 16).Q - Q0).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("two planes leave one quadratic direction free") {
  // On two planes a form is pinned on 5 of its 6 entries: anything proportional
  // to the product of the two conormals vanishes on both.
  const Plane3 a = Plane3::from_alpha(0.3, 0.1), b = Plane3::from_alpha(-0.2, 0.4);
  const QuadraticFit f = quadratic_fit(Norm3::ellipsoid(kDiag123), {a, b}, 32);
  CHECK(f.rank == 5);
  CHECK(f.rank_deficient);
  CHECK(f.residual < 1e-10);
  const Matrix3d diff = f.Q - kDiag123;
  const Matrix3d kernel = a.conormal() * b.conormal().transpose() + b.conormal() * a.conormal().transpose();
  CHECK((diff - diff.cwiseProduct(kernel).sum() / kernel.squaredNorm() * kernel).norm() < 1e-8);
}

TEST_CASE("repeated planes are flagged rank deficient") {
  const Plane3 p = Plane3::from_alpha(0.2, 0.2);
  const QuadraticFit f = quadratic_fit(sum2_body(), {p, p, p}, 16);
  CHECK(f.rank_deficient);
  CHECK(f.rank == 3);
  CHECK_THROWS_AS(quadratic_fit(sum2_body(), {p}, 16), DomainError);
  CHECK_THROWS_AS(quadratic_fit(sum2_body(), {p, p}, 5), DomainError);
}

TEST_CASE("quadratic fit of the sum2 body misses off the fitting grid") {
  const std::vector<Plane3> planes = {Plane3::from_alpha(0, 0), Plane3::from_alpha(0.3, 0), Plane3::from_alpha(0, 0.3),
                                      Plane3::from_alpha(-0.3, 0.2), Plane3::from_alpha(0.2, -0.3)};
  const QuadraticFit f = quadratic_fit(sum2_body(), planes, 64);
  // Oracle: max |v'Qv - 1| on 1000 fresh unit vectors of the body spread over
  // the five planes, with the body written out by hand. Recorded 5.69248e-3.
  double ref = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Plane3& p = planes[static_cast<std::size_t>(i % 5)];
    const double a = 2.0 * std::numbers::pi * (i / 5 + 0.37) / 200.0;
    Vector3d v = std::cos(a) * p.u1() + std::sin(a) * p.u2();
    v /= body_eval(v);
    ref = std::max(ref, std::abs(v.dot(f.Q * v) - 1.0));
  }
  MESSAGE("validation residual oracle: " << ref);
  CHECK(ref == rel(5.69248e-3, 1e-5));
  CHECK(ref >= 1e-3);
  CHECK(quadratic_validation_residual(sum2_body(), f.Q, planes, 200) == rel(ref, 0.05));
}

TEST_CASE("local ellipsoid check") {
  const Matrix3d Q0 = Vector3d(1, 2, 5).asDiagonal();
  const LocalCheck e = local_ellipsoid_check(Norm3::ellipsoid(Q0), {0, 0}, 0.3, 10);
  CHECK(e.verdict == LocalVerdict::ellipsoid_locally);
  CHECK(e.failing_stage.empty());
  REQUIRE(e.fit);
  CHECK((e.fit->Q - Q0).cwiseAbs().maxCoeff() < 1e-7);

  const LocalCheck u = local_ellipsoid_check(Norm3::euclidean(), {0.2, 0.1}, 0.3, 10);
  CHECK(u.verdict == LocalVerdict::ellipsoid_locally);
  REQUIRE(u.fit);
  CHECK((u.fit->Q / u.fit->Q(0, 0) - Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-7);

  const LocalCheck s = local_ellipsoid_check(sum2_body(), {0, 0}, 0.3, 20);
  CHECK(s.verdict == LocalVerdict::not_ellipsoid);
  CHECK(s.failing_stage == "equivalence");
  CHECK_FALSE(s.fit);
}
