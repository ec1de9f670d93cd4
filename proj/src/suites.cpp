#include "mfs/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Geometry>

#include "mfs/errors.hpp"
#include "mfs/geodesics.hpp"
#include "mfs/random.hpp"
#include "mfs/sections.hpp"

namespace mfs::cli {

namespace {

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

std::vector<Check> theorem1(std::uint64_t seed, const Tolerances& tol) {
  std::vector<Check> out;
  const auto ellipsoids = ellipsoid_corpus(seed, 5);
  for (std::size_t i = 0; i < ellipsoids.size(); ++i) {
    const ScanReport rep = amu_scan(ellipsoids[i], {0.0, 0.0}, 0.3, 20, 512, seed + i, true, tol);
    const std::string label = "ellipsoid " + std::to_string(i);
    out.push_back(make_check("positive", label + " max pairwise defect", rep.max_defect, "<", 1e-6));
    out.push_back(make_check("positive", label + " max ellipse defect", max_of(rep.ellipse_defects), "<", 1e-6));
  }

  const Norm3 body = reference_sum2_body();
  const ScanReport example = amu_scan(body, {0.0, 0.0}, 0.3, 20, 512, seed, false, tol);
  out.push_back(make_check("example", "sum2 body r=0.3 max defect", example.max_defect, ">=", 1e-3));
  out.push_back(make_check("example", "sum2 body r=0.3 not consistent",
                           example.verdict == ScanVerdict::consistent_with_ellipsoid ? 0.0 : 1.0, ">", 0.5));
  const ScanReport still = amu_scan(body, {0.0, 0.0}, 0.0, 5, 512, seed, false, tol);
  out.push_back(make_check("example", "sum2 body r=0 max defect", still.max_defect, "<", 1e-12));

  std::vector<std::pair<std::string, Norm3>> bodies = {{"sum2 body", body}};
  const auto perturbed = perturbed_corpus(seed, 5);
  for (std::size_t i = 0; i < perturbed.size(); ++i) bodies.emplace_back("perturbed " + std::to_string(i), perturbed[i]);
  for (const auto& [label, norm] : bodies)
    for (double radius : {0.2, 0.3}) {
      const ScanReport rep = amu_scan(norm, {0.0, 0.0}, radius, 20, 512, seed, false, tol);
      std::ostringstream name;
      name << label << " r=" << radius << " max defect";
      out.push_back(make_check("negative", name.str(), rep.max_defect, ">", 1e-3));
    }
  return out;
}

std::vector<Check> kakutani(std::uint64_t seed, const Tolerances& tol) {
  std::vector<Check> out;
  Rng rng(seed ^ 0x6b616b75ULL);
  const auto ellipsoids = ellipsoid_corpus(seed, 5);
  double worst = 0.0, worst_orth = 0.0;
  for (const Norm3& e : ellipsoids) {
    const Matrix3d Q = std::get<Norm3::Ellipsoid>(e.params()).Q;
    for (int k = 0; k < 5; ++k) {
      const Plane3 pl = Plane3::from_alpha(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      const TauResult t = kakutani_tau(e, pl, 32, tol);
      worst = std::max(worst, t.sigma_ratio);
      for (int j = 0; j < 16; ++j) {
        const double a = 2.0 * std::numbers::pi * j / 16;
        const Vector3d v = pl.embed({std::cos(a), std::sin(a)});
        worst_orth = std::max(worst_orth, std::abs(v.dot(Q * t.tau)) / v.norm());
      }
    }
  }
  out.push_back(make_check("ellipsoid", "max sigma ratio over 25 pairs", worst, "<", 1e-10));
  out.push_back(make_check("ellipsoid", "max |v'Q tau| over 25 pairs", worst_orth, "<", 1e-10));

  const TauResult euc = kakutani_tau(Norm3::euclidean(), Plane3::from_alpha(0.4, -0.3), 32, tol);
  const Vector3d normal = Vector3d(0.4, -0.3, 1.0).normalized();
  out.push_back(make_check("euclidean", "tau vs plane normal", (euc.tau - normal).norm(), "<", 1e-10));

  std::vector<std::pair<std::string, Norm3>> bodies = {{"sum2 body", reference_sum2_body()}};
  const auto perturbed = perturbed_corpus(seed, 5);
  for (std::size_t i = 0; i < perturbed.size(); ++i) bodies.emplace_back("perturbed " + std::to_string(i), perturbed[i]);
  for (const auto& [label, norm] : bodies) {
    double best = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Plane3 pl = k == 0 ? Plane3::from_alpha(0.3, 0.1)
                               : Plane3::from_alpha(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      best = std::max(best, kakutani_tau(norm, pl, 64, tol).sigma_ratio);
    }
    out.push_back(make_check("non-ellipsoid", label + " max sigma ratio over 5 planes", best, ">", 1e-4));
  }
  return out;
}

std::vector<Check> mono(std::uint64_t seed, const Tolerances& tol) {
  std::vector<Check> out;
  int wrong = 0;
  for (const GraphCase& g : gauss_corpus()) {
    const SFF2 s = second_fundamental_form(Immersion3::graph(height_function(g.height)), g.point);
    if (classify_sff(s, tol.sff_scale) != g.expected) ++wrong;
  }
  out.push_back(make_check("sff", "gauss corpus misclassifications", wrong, "<=", 0.0));

  int violations = 0;
  const auto cases = mono_corpus(seed, 100);
  for (const MonoCase& c : cases)
    violations += static_cast<int>(mono_theorem_report(c.f, c.norm, c.points, 512, tol).violations.size());
  out.push_back(make_check("theorem", "violations over 100 cases", violations, "<=", 0.0));

  Rng rng(seed ^ 0x6d6f6e6fULL);
  std::vector<Vector2d> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
  out.push_back(make_check("mono", "rotation metric over phi0, 10 points",
                           monochromatic_defect(rotation_metric(PlanarNorm::paper_phi0()), pts).max_defect, "<", 1e-6));
  out.push_back(make_check("mono", "frozen metric, 10 points",
                           monochromatic_defect(MetricOracle2::frozen(PlanarNorm::paper_phi0()), pts).max_defect, "<", 1e-12));
  const MetricOracle2 bowl = induced_metric(Immersion3::graph(height_function("paraboloid")), reference_sum2_body());
  out.push_back(make_check("mono", "paraboloid over sum2 body, (0,0) vs (0.5,0)",
                           monochromatic_defect(bowl, {{0.0, 0.0}, {0.5, 0.0}}).max_defect, ">=", 1e-3));
  return out;
}

std::vector<Check> flatness(std::uint64_t, const Tolerances&) {
  std::vector<Check> out;
  const Flatness frozen = flatness_defect(MetricOracle2::frozen(PlanarNorm::paper_phi0()), {0.7, -0.2}, 64);
  out.push_back(make_check("frozen", "F1", frozen.first, "<", 1e-10));
  out.push_back(make_check("frozen", "F2", frozen.second, "<", 1e-10));
  const Flatness rot = flatness_defect(rotation_metric(PlanarNorm::paper_phi0()), {0.0, 0.0}, 64);
  out.push_back(make_check("rotation", "phi0 F1 at origin", rot.first, ">=", 0.4));
  const Flatness bowl = flatness_defect(
      induced_metric(Immersion3::graph(height_function("paraboloid")), Norm3::euclidean()), {0.0, 0.0}, 64);
  out.push_back(make_check("induced", "paraboloid F1 at origin", bowl.first, "<", 1e-10));
  out.push_back(make_check("induced", "paraboloid F2 at origin", bowl.second, ">", 0.0));
  return out;
}

std::vector<Check> section5(std::uint64_t seed, const Tolerances&) {
  std::vector<Check> out;
  const PlanarNorm phi0 = PlanarNorm::paper_phi0();
  out.push_back(make_check("closed form", "horizontal residual at pi/4 + 1/sqrt(6)",
                           std::abs(horizontal_residual(phi0, std::numbers::pi / 4) + 1.0 / std::sqrt(6.0)), "<", 1e-6));
  out.push_back(make_check("closed form", "arc defect on [0, pi/2] - (sqrt2 - 1)",
                           std::abs(euclidean_arc_defect(phi0, 0.0, std::numbers::pi / 2, 256) - (std::sqrt(2.0) - 1.0)),
                           "<", 1e-9));

  double worst_res = 0.0;
  for (int k = 0; k <= 512; ++k)
    worst_res = std::max(worst_res, std::abs(horizontal_residual(phi0, std::numbers::pi * k / 512)));
  out.push_back(make_check("consistency", "max horizontal residual on [0, pi]", worst_res, ">", 0.4));
  double weakest_arc = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 64; ++k) {
    const double lo = 2.0 * std::numbers::pi * k / 64;
    weakest_arc = std::min(weakest_arc, euclidean_arc_defect(phi0, lo, lo + 0.2, 64));
  }
  out.push_back(make_check("consistency", "min arc defect over width-0.2 arcs", weakest_arc, ">", 1e-3));

  const MetricOracle2 metric = rotation_metric(phi0);
  Rng rng(seed ^ 0x67656fULL);
  double speed = 0.0, noether = 0.0, noether_phi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vector2d x0(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const Vector2d v0 = rng.uniform(0.5, 1.5) * rng.unit_vector2();
    const GeodesicTrajectory tr = integrate_geodesic(metric, x0, v0, 1.0, 1024);
    speed = std::max(speed, tr.speed_drift);
    noether = std::max(noether, tr.noether_drift);
    noether_phi = std::max(noether_phi, tr.noether_phi_drift);
  }
  out.push_back(make_check("geodesics", "max speed drift over 50", speed, "<", 1e-6));
  out.push_back(make_check("geodesics", "max noether drift over 50", noether, "<", 1e-6));
  out.push_back(make_check("geodesics", "max dphi/dxi drift over 50", noether_phi, "<", 1e-6));

  auto endpoint = [&](int steps) {
    const GeodesicState s = integrate_geodesic(metric, {0.0, 0.0}, {0.0, 1.0}, 1.0, steps).states.back();
    return (Eigen::Vector4d() << s.x, s.v).finished();
  };
  const Eigen::Vector4d ref = endpoint(8192);
  double prev = (endpoint(16) - ref).norm();
  double weakest = std::numeric_limits<double>::infinity();
  for (int steps : {32, 64, 128}) {
    const double err = (endpoint(steps) - ref).norm();
    weakest = std::min(weakest, prev / err);
    prev = err;
  }
  out.push_back(make_check("geodesics", "min error reduction per halving, 16..128 steps", weakest, ">=", 8.0));
  return out;
}

}  // namespace

Check make_check(std::string group, std::string name, double value, std::string relation, double threshold) {
  bool pass = false;
  if (relation == "<") pass = value < threshold;
  else if (relation == "<=") pass = value <= threshold;
  else if (relation == ">") pass = value > threshold;
  else if (relation == ">=") pass = value >= threshold;
  return {std::move(group), std::move(name), value, std::move(relation), threshold, pass};
}

std::vector<std::string> suite_names() { return {"theorem1", "kakutani", "mono", "flatness", "section5"}; }

std::vector<Check> suite_checks(const std::string& name, std::uint64_t seed, const Tolerances& tol) {
  if (name == "theorem1") return theorem1(seed, tol);
  if (name == "kakutani") return kakutani(seed, tol);
  if (name == "mono") return mono(seed, tol);
  if (name == "flatness") return flatness(seed, tol);
  if (name == "section5") return section5(seed, tol);
  throw ValidationError("suite: unknown suite \"" + name + "\"");
}

int run_suite(const std::string& name, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    err << "unknown suite \"" << name << "\"; expected one of";
    for (const auto& n : names) err << " " << n;
    err << "\n";
    return kValidation;
  }
  if (opts.format && *opts.format != "csv" && *opts.format != "json") {
    err << "invalid format \"" << *opts.format << "\"\n";
    return kValidation;
  }
  const std::uint64_t seed = opts.seed.value_or(0);
  const Tolerances tol;

  Artifact a;
  a.config = {{"suite", name}, {"seed", seed}, {"tolerances", tolerances_to_json(tol)}};
  a.config_hash = hash_hex(config_hash(a.config));
  a.seed = seed;
  std::vector<Check> checks;
  try {
    checks = suite_checks(name, seed, tol);
  } catch (const Error& e) {
    err << "numerical failure (" << e.kind() << "): " << e.what() << "\n";
    return kNumerical;
  }

  a.columns = {"group", "check", "value", "relation", "threshold", "pass"};
  int failed = 0;
  for (const Check& c : checks) {
    a.rows.push_back({c.group, c.name, c.value, c.relation, c.threshold, c.pass});
    failed += !c.pass;
  }
  a.summary = {{"checks", static_cast<int>(checks.size())}, {"failed", failed}};

  out << "suite " << name << " (seed " << seed << ")\n";
  for (const Check& c : checks) {
    std::ostringstream val;
    val << std::setprecision(6) << c.value << " " << c.relation << " " << c.threshold;
    out << (c.pass ? "  PASS  " : "  FAIL  ") << std::left << std::setw(14) << c.group << std::setw(52)
        << c.name << val.str() << "\n";
  }
  out << (failed ? "FAILED " : "PASSED ") << checks.size() - static_cast<std::size_t>(failed) << "/"
      << checks.size() << "\n";

  if (opts.out) {
    {
      std::ofstream f(*opts.out, std::ios::binary);
      if (!f) {
        err << "cannot write " << *opts.out << "\n";
        return kValidation;
      }
      f << (opts.format.value_or("csv") == "json" ? to_json(a) : to_csv(a));
    }
    const auto written = read_config_hash(*opts.out);
    if (!written || *written != a.config_hash) {
      err << "config hash mismatch in " << *opts.out << "\n";
      return kNumerical;
    }
  }
  return failed ? kNumerical : kOk;
}

std::vector<Norm3> ellipsoid_corpus(std::uint64_t seed, int count) {
  Rng rng(seed ^ 0x656c6c69ULL);
  std::vector<Norm3> out;
  for (int i = 0; i < count; ++i) out.push_back(Norm3::ellipsoid(rng.spd3(1.0)));
  return out;
}

Norm3 reference_sum2_body() {
  return Norm3::sum2(Matrix3d::Identity(), Vector3d(1.0, 2.0, 3.0).asDiagonal());
}

std::vector<Norm3> perturbed_corpus(std::uint64_t seed, int count) {
  Rng rng(seed ^ 0x70657274ULL);
  std::vector<Norm3> out;
  for (int i = 0; i < count; ++i) {
    // Euclidean plus a randomly rotated ellipsoid with axis ratios 1 : k : k^2.
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    const Matrix3d R = q.normalized().toRotationMatrix();
    const double k = rng.uniform(4.0, 8.0);
    out.push_back(Norm3::sum2(Matrix3d::Identity(), R * Vector3d(1.0, k, k * k).asDiagonal() * R.transpose()));
  }
  return out;
}

Norm3 random_norm(std::uint64_t seed) {
  Rng rng(seed ^ 0x6e6f726dULL);
  switch (rng.next_u64() % 3) {
    case 0: return Norm3::ellipsoid(rng.spd3(1.0));
    case 1: {
      const Matrix3d Q = rng.spd3(0.7);
      // Scale b so that b' Q^{-1} b = s^2 with s < 0.6.
      const Vector3d dir = rng.unit_vector3();
      const double s = rng.uniform(0.05, 0.6);
      return Norm3::randers(Q, s * dir / std::sqrt(dir.dot(Q.inverse() * dir)));
    }
    default: return Norm3::sum2(rng.spd3(1.0), rng.spd3(1.0));
  }
}

std::vector<GraphCase> gauss_corpus() {
  return {
      {"plane", {0.3, 0.2}, SFFClass::zero},
      {"paraboloid", {0.0, 0.0}, SFFClass::definite},
      {"saddle", {0.5, 0.5}, SFFClass::indefinite},
      {"cylinder", {0.2, -0.4}, SFFClass::degenerate_rank1},
      {"monkey_saddle", {1.0, 0.0}, SFFClass::indefinite},
      {"monkey_saddle", {0.0, 0.0}, SFFClass::zero},
      {"quartic_bowl", {0.5, 0.5}, SFFClass::definite},
      {"quartic_bowl", {0.0, 0.0}, SFFClass::zero},
      {"quartic_saddle", {0.5, 0.0}, SFFClass::degenerate_rank1},
      {"cubic_cylinder", {1.0, 0.5}, SFFClass::degenerate_rank1},
      {"tilted_bowl", {0.2, -0.3}, SFFClass::definite},
      {"mixed_quartic", {0.0, 0.0}, SFFClass::indefinite},
  };
}

std::vector<MonoCase> mono_corpus(std::uint64_t seed, int count) {
  Rng rng(seed ^ 0x636f7270ULL);
  const auto names = height_function_names();
  std::vector<MonoCase> out;
  for (int i = 0; i < count; ++i) {
    MonoCase c{"", Immersion3::graph({}), Norm3::euclidean(), {}};
    if (i % 3 == 0) {
      const std::string& h = names[static_cast<std::size_t>(i / 3) % names.size()];
      c.label = h;
      c.f = Immersion3::graph(height_function(h));
    } else {
      Poly2 p;
      for (int deg = 2; deg <= 4; ++deg)
        for (int a = 0; a <= deg; ++a) p.terms.push_back({a, deg - a, rng.uniform(-1.0, 1.0) / deg});
      c.label = "random polynomial";
      c.f = Immersion3::graph(std::move(p));
    }
    c.norm = i % 5 == 4 ? Norm3::ellipsoid(rng.spd3(1.0)) : random_norm(rng.next_u64());
    // Base points whose tangent planes sit close to the origin's compare
    // nearly equal sections, so the defect says nothing about the norm there.
    // Draw until the unit normal has turned by at least kMinTurn (planes have
    // a constant normal and keep the last draw).
    constexpr double kMinTurn = 0.15;
    const auto normal = [&](const Vector2d& q) {
      const Matrix32d J = c.f.jac(q);
      return Vector3d(J.col(0).cross(J.col(1)).normalized());
    };
    const Vector3d n0 = normal(Vector2d::Zero());
    c.points = {{0.0, 0.0}};
    for (int k = 0; k < 2; ++k) {
      Vector2d q;
      for (int attempt = 0; attempt < 64; ++attempt) {
        q = 0.8 * std::sqrt(rng.uniform()) * rng.unit_vector2();
        if (std::acos(std::clamp(normal(q).dot(n0), -1.0, 1.0)) >= kMinTurn) break;
      }
      c.points.push_back(q);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mfs::cli
