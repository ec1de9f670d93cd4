// Runs the nine acceptance criteria at their stated tolerances and budgets
// and prints one PASS/FAIL line per criterion. The exit status is 0 once
// every criterion has run, whatever the verdicts; it is nonzero only when a
// criterion could not be evaluated at all.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "derivative_sweep.hpp"
#include "mfs/geodesics.hpp"
#include "mfs/sections.hpp"
#include "mfs/suites.hpp"
#include "oracle.hpp"

using namespace mfs;
using mfs::cli::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects sub-checks; the first few failures are kept for the summary line.
struct Ledger {
  bool pass = true;
  std::ostringstream notes;
  int failures = 0;
  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures++ < 4) notes << (failures > 1 ? "; " : "") << what;
  }
  Outcome done(const std::string& summary) {
    std::ostringstream os;
    os << summary;
    if (!pass) os << " | failing: " << notes.str() << (failures > 4 ? "; ..." : "");
    return {pass, os.str()};
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::vector<std::pair<std::string, Norm3>> non_ellipsoid_bodies() {
  std::vector<std::pair<std::string, Norm3>> bodies = {{"sum2 body", cli::reference_sum2_body()}};
  const auto perturbed = cli::perturbed_corpus(kSeed, 5);
  for (std::size_t i = 0; i < perturbed.size(); ++i) bodies.emplace_back("perturbed " + std::to_string(i), perturbed[i]);
  return bodies;
}

Outcome ellipsoid_control() {
  Ledger l;
  double worst_pair = 0.0, worst_ellipse = 0.0;
  const auto ellipsoids = cli::ellipsoid_corpus(kSeed, 5);
  for (std::size_t i = 0; i < ellipsoids.size(); ++i) {
    const ScanReport rep = amu_scan(ellipsoids[i], {0.0, 0.0}, 0.3, 20, 512, kSeed + i, true);
    double e = 0.0;
    for (double d : rep.ellipse_defects) e = std::max(e, d);
    worst_pair = std::max(worst_pair, rep.max_defect);
    worst_ellipse = std::max(worst_ellipse, e);
    l.require(rep.max_defect < 1e-6, "ellipsoid " + std::to_string(i) + " pairwise " + num(rep.max_defect));
    l.require(e < 1e-6, "ellipsoid " + std::to_string(i) + " ellipse " + num(e));
  }
  return l.done("max pairwise defect " + num(worst_pair) + ", max ellipse defect " + num(worst_ellipse) +
                " (need < 1e-6)");
}

Outcome non_ellipsoid_control() {
  Ledger l;
  double smallest = 1e300, worst_gap = 0.0;
  for (const auto& [label, norm] : non_ellipsoid_bodies())
    for (double radius : {0.2, 0.3}) {
      const ScanReport rep = amu_scan(norm, {0.0, 0.0}, radius, 20, 512, kSeed, false);
      const std::string tag = label + " r=" + num(radius);
      smallest = std::min(smallest, rep.max_defect);
      l.require(rep.max_defect > 1e-3, tag + " defect " + num(rep.max_defect));

      // Cross-check the worst pair against the exhaustive oracle.
      Eigen::Index j = 0;
      rep.defect_matrix.row(0).maxCoeff(&j);
      const PlanarNorm a = restrict_norm(norm, rep.planes[0]), b = restrict_norm(norm, rep.planes[static_cast<std::size_t>(j)]);
      const double brute = oracle::brute_defect([&](double x, double y) { return a.eval({x, y}); },
                                                [&](double x, double y) { return b.eval({x, y}); }, 1000, 720);
      const double gap = std::abs(rep.max_defect - brute) / brute;
      worst_gap = std::max(worst_gap, gap);
      l.require(gap <= 0.10, tag + " oracle " + num(brute) + " vs " + num(rep.max_defect));
    }
  return l.done("smallest max defect " + num(smallest) + " (need > 1e-3), worst oracle gap " +
                num(100 * worst_gap) + "% (need <= 10%)");
}

Outcome kakutani_split() {
  Ledger l;
  Rng rng(kSeed ^ 0x6b616b75ULL);
  double worst = 0.0;
  for (const Norm3& e : cli::ellipsoid_corpus(kSeed, 5))
    for (int k = 0; k < 5; ++k) {
      const Plane3 pl = Plane3::from_alpha(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      worst = std::max(worst, kakutani_tau(e, pl, 32).sigma_ratio);
    }
  l.require(worst < 1e-10, "ellipsoid sigma ratio " + num(worst));
  double weakest = 1e300;
  for (const auto& [label, norm] : non_ellipsoid_bodies()) {
    double best = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Plane3 pl = k == 0 ? Plane3::from_alpha(0.3, 0.1)
                               : Plane3::from_alpha(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      best = std::max(best, kakutani_tau(norm, pl, 64).sigma_ratio);
    }
    weakest = std::min(weakest, best);
    l.require(best > 1e-4, label + " best sigma ratio " + num(best));
  }
  return l.done("max ellipsoid sigma ratio " + num(worst) + " over 25 pairs (need < 1e-10), weakest body " +
                num(weakest) + " (need > 1e-4)");
}

Outcome quadratic_extension() {
  Ledger l;
  const std::vector<Plane3> planes = {Plane3::from_alpha(0.0, 0.0), Plane3::from_alpha(0.3, 0.0),
                                      Plane3::from_alpha(0.0, 0.3), Plane3::from_alpha(-0.3, 0.2),
                                      Plane3::from_alpha(0.2, -0.3)};
  Rng rng(kSeed ^ 0x71756164ULL);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Matrix3d Q0 = rng.spd3(1.0);
    const QuadraticFit f = quadratic_fit(Norm3::ellipsoid(Q0), planes, 64);
    const double err = (f.Q - Q0).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    l.require(err < 1e-8, "case " + std::to_string(k) + " error " + num(err));
  }
  double weakest = 1e300;
  for (const auto& [label, norm] : non_ellipsoid_bodies()) {
    const QuadraticFit f = quadratic_fit(norm, planes, 64);
    const double v = quadratic_validation_residual(norm, f.Q, planes, 40);
    weakest = std::min(weakest, v);
    l.require(v > 1e-3, label + " validation " + num(v));
  }
  return l.done("max recovery error " + num(worst) + " over 10 cases (need < 1e-8), smallest non-ellipsoid "
                "validation residual " + num(weakest) + " (need > 1e-3)");
}

Outcome gauss_corpus() {
  Ledger l;
  const auto corpus = cli::gauss_corpus();
  int wrong = 0;
  for (const cli::GraphCase& g : corpus) {
    const SFFClass got = classify_sff(second_fundamental_form(Immersion3::graph(height_function(g.height)), g.point));
    if (got != g.expected) ++wrong;
    l.require(got == g.expected, g.height + " gave " + to_string(got));
  }
  std::set<std::string> surfaces;
  for (const cli::GraphCase& g : corpus) surfaces.insert(g.height);
  l.require(surfaces.size() >= 10, "corpus has " + std::to_string(surfaces.size()) + " surfaces");
  return l.done(std::to_string(wrong) + " misclassifications over " + std::to_string(corpus.size()) + " points on " +
                std::to_string(surfaces.size()) + " surfaces");
}

Outcome mono_theorem() {
  Ledger l;
  const auto cases = cli::mono_corpus(kSeed, 100);
  std::size_t violations = 0;
  for (const cli::MonoCase& c : cases) {
    const MonoReport r = mono_theorem_report(c.f, c.norm, c.points, 512);
    violations += r.violations.size();
    l.require(r.violations.empty(), c.label);
  }
  return l.done(std::to_string(violations) + " violations over " + std::to_string(cases.size()) + " cases");
}

Outcome geodesic_diagnostics() {
  Ledger l;
  const PlanarNorm phi0 = PlanarNorm::paper_phi0();
  const double res = horizontal_residual(phi0, kPi / 4);
  const double closed = -std::sin(kPi / 4) * std::cos(kPi / 4) / std::sqrt(1 + std::pow(std::sin(kPi / 4), 2));
  l.require(std::abs(res - closed) < 1e-6 && std::abs(res + 0.40824829) < 1e-6, "horizontal residual " + num(res));
  const double arc = euclidean_arc_defect(phi0, 0.0, kPi / 2, 256);
  l.require(std::abs(arc - (std::numbers::sqrt2 - 1.0)) < 1e-9, "arc defect " + num(arc));

  const MetricOracle2 rot = rotation_metric(phi0);
  Rng rng(kSeed ^ 0x67656f64ULL);
  double drift = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector2d x0(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vector2d v0 = rng.uniform(0.5, 2.0) * rng.unit_vector2();
    const GeodesicTrajectory t = integrate_geodesic(rot, x0, v0, 1.0, 1024);
    drift = std::max({drift, t.noether_drift, t.speed_drift});
    l.require(t.completed && t.noether_drift < 1e-6 && t.speed_drift < 1e-6, "geodesic " + std::to_string(k));
  }

  auto end = [&](int steps) { return integrate_geodesic(rot, {0, 0}, {0, 1}, 1.0, steps).states.back().x; };
  const Vector2d ref = end(8192);
  double prev = (end(16) - ref).norm(), min_ratio = 1e300;
  for (int steps = 32; steps <= 128; steps *= 2) {
    const double err = (end(steps) - ref).norm();
    min_ratio = std::min(min_ratio, prev / err);
    prev = err;
  }
  l.require(min_ratio >= 8.0, "error ratio " + num(min_ratio));
  return l.done("residual " + num(res) + ", arc defect " + num(arc) + ", max drift " + num(drift) +
                " over 50 geodesics, min error reduction per halving " + num(min_ratio) + "x");
}

Outcome derivative_oracles() {
  Ledger l;
  std::ostringstream worst;
  double ratio = 0.0;
  for (const sweep::Sweep& s : sweep::all_sweeps(kSeed, 1000)) {
    l.require(s.pass(), s.name + " " + num(s.worst) + " >= " + num(s.tol));
    ratio = std::max(ratio, s.worst / s.tol);
  }
  return l.done("15 oracles x 1000 samples, worst error at " + num(100 * ratio) + "% of its tolerance");
}

Outcome determinism() {
  Ledger l;
  const auto dir = std::filesystem::temp_directory_path() / "mfs_acceptance";
  std::filesystem::create_directories(dir);
  std::string text[2];
  for (int run = 0; run < 2; ++run) {
    const auto path = dir / ("theorem1_" + std::to_string(run) + ".csv");
    cli::RunOptions opts;
    opts.out = path.string();
    opts.seed = kSeed;
    std::ostringstream out, err;
    cli::run_suite("theorem1", opts, out, err);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    text[run] = ss.str();
  }
  l.require(!text[0].empty(), "no table written");
  l.require(text[0] == text[1], "tables differ");
  return l.done("two theorem1 tables, " + std::to_string(text[0].size()) + " bytes, " +
                (text[0] == text[1] ? "identical" : "different"));
}

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds; 0 when none is stated
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "ellipsoid positive control", 10.0, ellipsoid_control},
      {2, "non-ellipsoid negative control", 30.0, non_ellipsoid_control},
      {3, "Kakutani feasibility split", 5.0, kakutani_split},
      {4, "quadratic extension", 0.0, quadratic_extension},
      {5, "second fundamental form corpus", 0.0, gauss_corpus},
      {6, "monochromatic theorem property suite", 0.0, mono_theorem},
      {7, "rotation metric diagnostics", 20.0, geodesic_diagnostics},
      {8, "derivative oracles", 0.0, derivative_oracles},
      {9, "suite determinism", 0.0, determinism},
  };
  int passed = 0, broken = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++broken;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0 && secs > c.budget) {
      o.pass = false;
      o.detail += " | over the " + num(c.budget) + " s budget";
    }
    passed += o.pass;
    std::printf("criterion %d %s  %-38s %6.2f s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", passed, criteria.size());
  return broken ? 2 : 0;
}
