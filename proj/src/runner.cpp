#include "mfs/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mfs/errors.hpp"
#include "mfs/sections.hpp"

namespace mfs::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
}

json json_cell(const Cell& c) {
  return std::visit([](const auto& v) { return json(v); }, c);
}

std::string summary_value(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json mat(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::vector<Vector2d> points_of(const json& j) {
  std::vector<Vector2d> pts;
  for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(parse_point(j[i], "points"));
  return pts;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void scan_rows(Artifact& a, const ScanReport& rep) {
  a.columns = {"index", "a", "b", "defect_to_center", "ellipse_defect"};
  for (std::size_t i = 0; i < rep.planes.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    a.rows.push_back({static_cast<long long>(i), rep.planes[i].alpha().x(), rep.planes[i].alpha().y(),
                      rep.defect_matrix(0, k), rep.ellipse_defects[i]});
  }
  a.summary["max_defect"] = rep.max_defect;
  a.summary["max_ellipse_defect"] = max_of(rep.ellipse_defects);
  a.summary["verdict"] = to_string(rep.verdict);
  a.summary["pairwise"] = rep.pairwise;
}

}  // namespace

std::string to_csv(const Artifact& a) {
  std::ostringstream os;
  os << "# mfs " << kVersion << "\n";
  os << "# config_hash: " << a.config_hash << "\n";
  os << "# seed: " << a.seed << "\n";
  os << "# config: " << a.config.dump() << "\n";
  for (const auto& [k, v] : a.summary.items()) os << "# summary." << k << ": " << summary_value(v) << "\n";
  for (std::size_t c = 0; c < a.columns.size(); ++c) os << (c ? "," : "") << a.columns[c];
  if (!a.columns.empty()) os << "\n";
  for (const auto& row : a.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
    os << "\n";
  }
  return os.str();
}

std::string to_json(const Artifact& a) {
  json rows = json::array();
  for (const auto& row : a.rows) {
    json r = json::array();
    for (const Cell& c : row) r.push_back(json_cell(c));
    rows.push_back(r);
  }
  const json doc = {
      {"provenance", {{"tool", "mfs"}, {"version", kVersion}, {"config_hash", a.config_hash},
                      {"seed", a.seed}, {"config", a.config}}},
      {"summary", a.summary},
      {"columns", a.columns},
      {"rows", rows},
  };
  return doc.dump(2) + "\n";
}

std::optional<std::string> read_config_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string key = "# config_hash: ";
  if (const auto p = text.find(key); p != std::string::npos) return text.substr(p + key.size(), 16);
  try {
    return json::parse(text).at("provenance").at("config_hash").get<std::string>();
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Artifact execute(const json& cfg) {
  Artifact a;
  const std::string cmd = cfg["command"];
  const Tolerances tol = parse_tolerances(cfg["tolerances"]);
  const auto seed = cfg["seed"].get<std::uint64_t>();

  if (cmd == "check-norm") {
    const ValidityReport r = check_banach_minkowski(parse_norm3(cfg["norm"], "norm"), cfg["n_samples"], seed, tol);
    a.summary = {{"homogeneity_residual", r.homogeneity_residual}, {"euler_residual", r.euler_residual},
                 {"min_hess_eig", r.min_hess_eig},                 {"grad_fd_residual", r.grad_fd_residual},
                 {"min_eval", r.min_eval},                         {"verdict", r.verdict}};
  } else if (cmd == "radial-profile") {
    const RadialProfile p = radial_profile(parse_planar(cfg["norm"], "norm"), cfg["n"]);
    a.columns = {"theta", "r"};
    for (int k = 0; k < p.n; ++k) a.rows.push_back({p.theta(k), p.r[static_cast<std::size_t>(k)]});
    a.summary["convex"] = p.is_convex();
  } else if (cmd == "min-ellipse") {
    const Ellipse2 e = min_circumscribed_ellipse(parse_planar(cfg["norm"], "norm"), cfg["n"]);
    a.summary = {{"M", mat(e.M)}, {"active_count", e.active_count},
                 {"active_residual", e.active_residual}, {"kkt_residual", e.kkt_residual}};
    a.columns = {"contact_x", "contact_y"};
    for (const Vector2d& p : e.contacts) a.rows.push_back({p.x(), p.y()});
  } else if (cmd == "equivalence") {
    const EquivalenceResult r = equivalence_defect(parse_planar(cfg["first"], "first"),
                                                   parse_planar(cfg["second"], "second"), cfg["n"]);
    a.summary = {{"defect", r.defect}, {"best_angle", r.best_angle}, {"reflected", r.reflected},
                 {"best_map", mat(r.best_map)}};
  } else if (cmd == "ellipse-defect") {
    a.summary["ellipse_defect"] = ellipse_defect(parse_planar(cfg["norm"], "norm"), cfg["n"]);
  } else if (cmd == "self-rotation") {
    a.columns = {"theta", "defect"};
    for (const auto& [t, d] : self_rotation_defect(parse_planar(cfg["norm"], "norm"), cfg["n_angles"]))
      a.rows.push_back({t, d});
  } else if (cmd == "amu-scan") {
    const ScanReport rep = amu_scan(parse_norm3(cfg["norm"], "norm"), parse_point(cfg["center"], "center"),
                                    cfg["radius"], cfg["count"], cfg["n"], seed, cfg["pairwise"], tol);
    scan_rows(a, rep);
    a.summary["defect_matrix"] = mat(rep.defect_matrix);
  } else if (cmd == "kakutani-tau") {
    const Norm3 norm = parse_norm3(cfg["norm"], "norm");
    a.columns = {"a", "b", "tau_x", "tau_y", "tau_z", "sigma_ratio", "feasible", "max_pairing"};
    for (const Vector2d& al : points_of(cfg["planes"])) {
      const TauResult t = kakutani_tau(norm, Plane3::from_alpha(al), cfg["m"], tol);
      a.rows.push_back({al.x(), al.y(), t.tau.x(), t.tau.y(), t.tau.z(), t.sigma_ratio, t.feasible, t.max_pairing});
    }
  } else if (cmd == "quadratic-fit") {
    const Norm3 norm = parse_norm3(cfg["norm"], "norm");
    std::vector<Plane3> planes;
    for (const Vector2d& al : points_of(cfg["planes"])) planes.push_back(Plane3::from_alpha(al));
    const QuadraticFit f = quadratic_fit(norm, planes, cfg["per_plane_samples"]);
    const int per_plane = std::max(1, (cfg["validation_samples"].get<int>() + static_cast<int>(planes.size()) - 1) /
                                          static_cast<int>(planes.size()));
    a.summary = {{"Q", mat(f.Q)},
                 {"residual", f.residual},
                 {"validation_residual", quadratic_validation_residual(norm, f.Q, planes, per_plane)},
                 {"positive_definite", f.positive_definite},
                 {"rank", f.rank},
                 {"rank_deficient", f.rank_deficient}};
  } else if (cmd == "local-ellipsoid-check") {
    const LocalCheck c = local_ellipsoid_check(parse_norm3(cfg["norm"], "norm"), parse_point(cfg["center"], "center"),
                                               cfg["radius"], cfg["count"], cfg["n"], seed, tol);
    scan_rows(a, c.scan);
    a.summary["scan_verdict"] = a.summary["verdict"];
    a.summary["verdict"] = to_string(c.verdict);
    a.summary["failing_stage"] = c.failing_stage;
    if (c.fit) {
      a.summary["Q"] = mat(c.fit->Q);
      a.summary["validation_residual"] = c.validation_residual;
    }
  } else if (cmd == "sff") {
    const Immersion3 f = parse_immersion(cfg["immersion"], "immersion");
    a.columns = {"x", "y", "s11", "s12", "s22", "lambda1", "lambda2", "class"};
    for (const Vector2d& p : points_of(cfg["points"])) {
      const SFF2 s = second_fundamental_form(f, p);
      a.rows.push_back({p.x(), p.y(), s.matrix(0, 0), s.matrix(0, 1), s.matrix(1, 1), s.eigenvalues(0),
                        s.eigenvalues(1), to_string(classify_sff(s, tol.sff_scale))});
    }
  } else if (cmd == "mono-defect") {
    const auto pts = points_of(cfg["points"]);
    const MonoDefect m = monochromatic_defect(parse_metric(cfg["metric"], "metric"), pts, cfg["n"]);
    a.summary = {{"max_defect", m.max_defect}, {"argmax", {m.argmax.first, m.argmax.second}}};
    a.columns = {"x", "y", "defect"};
    for (std::size_t i = 0; i < pts.size(); ++i) a.rows.push_back({pts[i].x(), pts[i].y(), m.defects[i]});
  } else if (cmd == "euclidean-defect") {
    const MetricOracle2 metric = parse_metric(cfg["metric"], "metric");
    a.columns = {"x", "y", "defect"};
    for (const Vector2d& p : points_of(cfg["points"])) a.rows.push_back({p.x(), p.y(), euclidean_defect(metric, p, cfg["n"])});
  } else if (cmd == "flatness") {
    const MetricOracle2 metric = parse_metric(cfg["metric"], "metric");
    a.columns = {"x", "y", "F1", "F2"};
    for (const Vector2d& p : points_of(cfg["points"])) {
      const Flatness fl = flatness_defect(metric, p, cfg["n_dirs"]);
      a.rows.push_back({p.x(), p.y(), fl.first, fl.second});
    }
  } else if (cmd == "mono-report") {
    const MonoReport r = mono_theorem_report(parse_immersion(cfg["immersion"], "immersion"),
                                             parse_norm3(cfg["norm"], "norm"), points_of(cfg["points"]), cfg["n"], tol);
    a.columns = {"x", "y", "mono_defect", "euclidean_defect", "class"};
    for (const MonoRecord& rec : r.records)
      a.rows.push_back({rec.point.x(), rec.point.y(), rec.mono_defect, rec.euclidean_defect, to_string(rec.sff_class)});
    a.summary = {{"set_mono_defect", r.set_mono_defect}, {"violations", r.violations}};
  } else if (cmd == "horizontal-residual") {
    const PlanarNorm phi0 = parse_planar(cfg["phi0"], "phi0");
    const auto u = cfg["velocity"] == "e2" ? HorizontalVelocity::e2 : HorizontalVelocity::e1;
    a.columns = {"y", "residual"};
    for (std::size_t i = 0; i < cfg["y_grid"].size(); ++i) {
      const double y = parse_angle(cfg["y_grid"][i], "y_grid");
      a.rows.push_back({y, horizontal_residual(phi0, y, u)});
    }
  } else if (cmd == "arc-defect") {
    const PlanarNorm phi0 = parse_planar(cfg["phi0"], "phi0");
    a.columns = {"theta_lo", "theta_hi", "defect"};
    for (const json& arc : cfg["arcs"]) {
      const double lo = parse_angle(arc[0], "arcs"), hi = parse_angle(arc[1], "arcs");
      a.rows.push_back({lo, hi, euclidean_arc_defect(phi0, lo, hi, cfg["n"])});
    }
  } else if (cmd == "geodesic") {
    const MetricOracle2 metric = parse_metric(cfg["metric"], "metric");
    const GeodesicTrajectory tr = integrate_geodesic(metric, parse_point(cfg["x0"], "x0"),
                                                     parse_point(cfg["v0"], "v0"), cfg["T"], cfg["steps"]);
    a.columns = {"t", "x", "y", "vx", "vy", "phi_speed", "noether"};
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      const GeodesicState& s = tr.states[i];
      a.rows.push_back({tr.times[i], s.x.x(), s.x.y(), s.v.x(), s.v.y(), metric.eval(s.x, s.v),
                        metric.dv(s.x, s.v).x()});
    }
    a.summary = {{"speed_drift", tr.speed_drift}, {"completed", tr.completed}};
    if (tr.noether_tracked) {
      a.summary["noether_drift"] = tr.noether_drift;
      a.summary["noether_phi_drift"] = tr.noether_phi_drift;
    }
    if (!tr.completed) a.summary["failure"] = tr.failure;
  }
  return a;
}

int run_config(const json& raw_in, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  json resolved;
  try {
    json raw = raw_in;
    if (opts.seed && raw.is_object()) raw["seed"] = *opts.seed;
    if (opts.format && raw.is_object()) raw["format"] = *opts.format;
    if (opts.out && raw.is_object()) raw["output_path"] = *opts.out;
    resolved = resolve_config(raw);
  } catch (const ValidationError& e) {
    err << "invalid config: " << e.what() << "\n";
    return kValidation;
  }

  // The output location does not change the experiment, so it stays out of
  // the echoed config and the hash.
  json echoed = resolved;
  echoed.erase("output_path");
  const std::string path = resolved["output_path"];
  const bool as_json = resolved["format"] == "json";

  Artifact a;
  int status = kOk;
  try {
    a = execute(resolved);
  } catch (const DomainError& e) {
    err << "invalid input (" << e.kind() << "): " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    err << "numerical failure (" << e.kind() << "): " << e.what() << "\n";
    a = Artifact{};
    a.summary = {{"status", "failed"}, {"error", e.kind()}, {"message", e.what()}};
    status = kNumerical;
  }
  a.config = echoed;
  a.config_hash = hash_hex(config_hash(echoed));
  a.seed = resolved["seed"].get<std::uint64_t>();

  const std::string text = as_json ? to_json(a) : to_csv(a);
  if (path.empty()) {
    out << text;
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      err << "cannot write " << path << "\n";
      return kValidation;
    }
    f << text;
  }
  return status;
}

}  // namespace mfs::cli
