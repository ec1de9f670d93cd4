#include "mfs/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "mfs/errors.hpp"

namespace mfs::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

void allow_only(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.contains(k)) fail(where + "." + k, "unknown field");
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where + "." + key, "missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& where) {
  const auto v = numbers(j, where);
  if (static_cast<int>(v.size()) != N) fail(where, "expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out(i) = v[static_cast<std::size_t>(i)];
  return out;
}

// Symmetric positive definite matrix: N diagonal entries or a nested N x N array.
template <int N>
Eigen::Matrix<double, N, N> spd(const json& j, const std::string& where) {
  Eigen::Matrix<double, N, N> M = Eigen::Matrix<double, N, N>::Zero();
  if (j.is_array() && j.size() == static_cast<std::size_t>(N) && !j[0].is_array()) {
    M.diagonal() = vec<N>(j, where);
  } else if (j.is_array() && j.size() == static_cast<std::size_t>(N)) {
    for (int r = 0; r < N; ++r) M.row(r) = vec<N>(j[static_cast<std::size_t>(r)], where).transpose();
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
      fail(where, "matrix is not symmetric");
  } else {
    fail(where, "expected " + std::to_string(N) + " diagonal entries or a " + std::to_string(N) +
                    "x" + std::to_string(N) + " array");
  }
  Eigen::LLT<Eigen::Matrix<double, N, N>> llt(M);
  if (llt.info() != Eigen::Success) fail(where, "matrix is not positive definite");
  return M;
}

std::string family_of(const json& j, const std::string& where) {
  const json& f = need(j, where, "family");
  if (!f.is_string()) fail(where + ".family", "expected a string");
  return f.get<std::string>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

struct Field {
  const char* name;
  json fallback;
  bool required = false;
};

Field req(const char* name) { return {name, nullptr, true}; }

const std::map<std::string, std::vector<Field>>& command_fields() {
  static const std::map<std::string, std::vector<Field>> table = {
      {"check-norm", {req("norm"), {"n_samples", 256}}},
      {"radial-profile", {req("norm"), {"n", 256}}},
      {"min-ellipse", {req("norm"), {"n", 512}}},
      {"equivalence", {req("first"), req("second"), {"n", 512}}},
      {"ellipse-defect", {req("norm"), {"n", 512}}},
      {"self-rotation", {req("norm"), {"n_angles", 512}}},
      {"amu-scan",
       {req("norm"), {"center", {0.0, 0.0}}, {"radius", 0.3}, {"count", 20}, {"n", 512},
        {"pairwise", false}}},
      {"kakutani-tau", {req("norm"), req("planes"), {"m", 64}}},
      {"quadratic-fit",
       {req("norm"), req("planes"), {"per_plane_samples", 64}, {"validation_samples", 1000}}},
      {"local-ellipsoid-check",
       {req("norm"), {"center", {0.0, 0.0}}, {"radius", 0.3}, {"count", 20}, {"n", 512}}},
      {"sff", {req("immersion"), req("points")}},
      {"mono-defect", {req("metric"), req("points"), {"n", 512}}},
      {"euclidean-defect", {req("metric"), req("points"), {"n", 512}}},
      {"flatness", {req("metric"), req("points"), {"n_dirs", 64}}},
      {"mono-report", {req("immersion"), req("norm"), req("points"), {"n", 512}}},
      {"horizontal-residual", {req("phi0"), req("y_grid"), {"velocity", "e1"}}},
      {"arc-defect", {req("phi0"), req("arcs"), {"n", 256}}},
      {"geodesic", {req("metric"), {"x0", {0.0, 0.0}}, req("v0"), {"T", 1.0}, {"steps", 1024}}},
  };
  return table;
}

// Type and range checks for fields shared across commands.
void check_field(const std::string& command, const std::string& key, const json& v) {
  const std::string where = key;
  if (key == "norm") {
    const bool planar = command == "radial-profile" || command == "min-ellipse" ||
                        command == "ellipse-defect" || command == "self-rotation";
    planar ? (void)parse_planar(v, where) : (void)parse_norm3(v, where);
  } else if (key == "first" || key == "second" || key == "phi0") {
    parse_planar(v, where);
  } else if (key == "immersion") {
    parse_immersion(v, where);
  } else if (key == "metric") {
    parse_metric(v, where);
  } else if (key == "center" || key == "x0" || key == "v0") {
    parse_point(v, where);
  } else if (key == "planes" || key == "points") {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of [a, b] pairs");
    for (std::size_t i = 0; i < v.size(); ++i) parse_point(v[i], where + "[" + std::to_string(i) + "]");
  } else if (key == "y_grid") {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of angles");
    for (std::size_t i = 0; i < v.size(); ++i) parse_angle(v[i], where + "[" + std::to_string(i) + "]");
  } else if (key == "arcs") {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of [lo, hi] pairs");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string w = where + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) fail(w, "expected [lo, hi]");
      parse_angle(v[i][0], w + "[0]");
      parse_angle(v[i][1], w + "[1]");
    }
  } else if (key == "velocity") {
    if (!v.is_string() || (v != "e1" && v != "e2")) fail(where, "expected \"e1\" or \"e2\"");
  } else if (key == "pairwise") {
    if (!v.is_boolean()) fail(where, "expected true or false");
  } else if (key == "radius" || key == "T") {
    if (number(v, where) < 0.0) fail(where, "must be nonnegative");
  } else {
    // Grid sizes and counts.
    if (integer(v, where) < 1) fail(where, "must be positive");
  }
}

}  // namespace

double parse_angle(const json& j, const std::string& where) {
  if (j.is_number()) return number(j, where);
  if (!j.is_string()) fail(where, "expected a number or an angle string like \"pi/4\"");
  std::string s;
  for (char c : j.get<std::string>())
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  const std::string original = j.get<std::string>();
  auto bad = [&]() -> double { fail(where, "cannot parse angle \"" + original + "\""); };
  if (s.empty()) return bad();

  double sign = 1.0;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') sign = s[pos++] == '-' ? -1.0 : 1.0;
  const std::size_t pi_at = s.find("pi", pos);
  auto parse_num = [&](const std::string& t) -> double {
    if (t.empty()) return bad();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      return bad();
    }
    if (used != t.size() || !std::isfinite(v)) return bad();
    return v;
  };
  if (pi_at == std::string::npos) return sign * parse_num(s.substr(pos));

  std::string coef = s.substr(pos, pi_at - pos);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double value = std::numbers::pi * (coef.empty() ? 1.0 : parse_num(coef));
  std::string rest = s.substr(pi_at + 2);
  if (!rest.empty()) {
    if (rest[0] != '/') return bad();
    const double den = parse_num(rest.substr(1));
    if (den == 0.0) return bad();
    value /= den;
  }
  return sign * value;
}

Norm3 parse_norm3(const json& j, const std::string& where) {
  const std::string fam = family_of(j, where);
  if (fam == "euclidean") {
    allow_only(j, where, {"family"});
    return Norm3::euclidean();
  }
  if (fam == "ellipsoid") {
    allow_only(j, where, {"family", "Q"});
    return Norm3::ellipsoid(spd<3>(need(j, where, "Q"), where + ".Q"));
  }
  if (fam == "randers") {
    allow_only(j, where, {"family", "Q", "b"});
    return Norm3::randers(spd<3>(need(j, where, "Q"), where + ".Q"), vec<3>(need(j, where, "b"), where + ".b"));
  }
  if (fam == "sum2") {
    allow_only(j, where, {"family", "Q1", "Q2"});
    return Norm3::sum2(spd<3>(need(j, where, "Q1"), where + ".Q1"),
                       spd<3>(need(j, where, "Q2"), where + ".Q2"));
  }
  fail(where + ".family", "unknown norm family \"" + fam + "\"");
}

PlanarNorm parse_planar(const json& j, const std::string& where) {
  if (j.is_string()) {
    if (j == "euclidean") return PlanarNorm::euclidean();
    if (j == "paper_phi0") return PlanarNorm::paper_phi0();
    fail(where, "unknown planar norm \"" + j.get<std::string>() + "\"");
  }
  const std::string fam = family_of(j, where);
  if (fam == "euclidean" || fam == "paper_phi0") {
    allow_only(j, where, {"family"});
    return fam == "euclidean" ? PlanarNorm::euclidean() : PlanarNorm::paper_phi0();
  }
  if (fam == "scaled_ellipse") {
    allow_only(j, where, {"family", "M"});
    return PlanarNorm::scaled_ellipse(spd<2>(need(j, where, "M"), where + ".M"));
  }
  if (fam == "randers2") {
    allow_only(j, where, {"family", "M", "b"});
    return PlanarNorm::randers2(spd<2>(need(j, where, "M"), where + ".M"),
                                vec<2>(need(j, where, "b"), where + ".b"));
  }
  if (fam == "sum2") {
    allow_only(j, where, {"family", "M1", "M2"});
    return PlanarNorm::sum2(spd<2>(need(j, where, "M1"), where + ".M1"),
                            spd<2>(need(j, where, "M2"), where + ".M2"));
  }
  if (fam == "restriction") {
    allow_only(j, where, {"family", "norm", "plane"});
    return restrict_norm(parse_norm3(need(j, where, "norm"), where + ".norm"),
                         Plane3::from_alpha(parse_point(need(j, where, "plane"), where + ".plane")));
  }
  fail(where + ".family", "unknown planar norm family \"" + fam + "\"");
}

Immersion3 parse_immersion(const json& j, const std::string& where) {
  const std::string fam = family_of(j, where);
  if (fam != "graph") fail(where + ".family", "unknown immersion family \"" + fam + "\"");
  allow_only(j, where, {"family", "h", "terms", "scale"});
  if (j.contains("h") == j.contains("terms")) fail(where, "give exactly one of \"h\" and \"terms\"");

  Poly2 h;
  if (j.contains("h")) {
    if (!j["h"].is_string()) fail(where + ".h", "expected a catalog name");
    try {
      h = height_function(j["h"].get<std::string>());
    } catch (const DomainError& e) {
      fail(where + ".h", e.what());
    }
  } else {
    const json& t = j["terms"];
    if (!t.is_array()) fail(where + ".terms", "expected an array of [i, j, c]");
    for (std::size_t k = 0; k < t.size(); ++k) {
      const std::string w = where + ".terms[" + std::to_string(k) + "]";
      if (!t[k].is_array() || t[k].size() != 3) fail(w, "expected [i, j, c]");
      const int i = integer(t[k][0], w + "[0]"), jj = integer(t[k][1], w + "[1]");
      if (i < 0 || jj < 0 || i + jj > 4) fail(w, "exponents must be nonnegative with total degree <= 4");
      h.terms.push_back({i, jj, number(t[k][2], w + "[2]")});
    }
  }
  if (j.contains("scale")) {
    const double s = number(j["scale"], where + ".scale");
    for (auto& term : h.terms) term.c *= s;
  }
  return Immersion3::graph(std::move(h));
}

MetricOracle2 parse_metric(const json& j, const std::string& where) {
  const std::string fam = family_of(j, where);
  if (fam == "frozen") {
    allow_only(j, where, {"family", "norm"});
    return MetricOracle2::frozen(parse_planar(need(j, where, "norm"), where + ".norm"));
  }
  if (fam == "rotation") {
    allow_only(j, where, {"family", "phi0"});
    return rotation_metric(parse_planar(need(j, where, "phi0"), where + ".phi0"));
  }
  if (fam == "induced") {
    allow_only(j, where, {"family", "immersion", "norm"});
    return induced_metric(parse_immersion(need(j, where, "immersion"), where + ".immersion"),
                          parse_norm3(need(j, where, "norm"), where + ".norm"));
  }
  fail(where + ".family", "unknown metric family \"" + fam + "\"");
}

Vector2d parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected a pair [a, b]");
  return {parse_angle(j[0], where + "[0]"), parse_angle(j[1], where + "[1]")};
}

json tolerances_to_json(const Tolerances& t) {
  return {{"homogeneity", t.homogeneity}, {"euler", t.euler},         {"grad_fd", t.grad_fd},
          {"hess_fd", t.hess_fd},         {"equivalence", t.equivalence}, {"tau", t.tau},
          {"sff_scale", t.sff_scale},     {"metric_fd", t.metric_fd}};
}

Tolerances parse_tolerances(const json& j) {
  Tolerances t;
  if (j.is_null()) return t;
  allow_only(j, "tolerances",
             {"homogeneity", "euler", "grad_fd", "hess_fd", "equivalence", "tau", "sff_scale", "metric_fd"});
  auto get = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    slot = number(j[key], std::string("tolerances.") + key);
    if (!(slot > 0.0)) fail(std::string("tolerances.") + key, "must be positive");
  };
  get("homogeneity", t.homogeneity);
  get("euler", t.euler);
  get("grad_fd", t.grad_fd);
  get("hess_fd", t.hess_fd);
  get("equivalence", t.equivalence);
  get("tau", t.tau);
  get("sff_scale", t.sff_scale);
  get("metric_fd", t.metric_fd);
  return t;
}

json resolve_config(const json& raw) {
  if (!raw.is_object()) throw ValidationError("config: expected a JSON object");
  if (!raw.contains("command") || !raw["command"].is_string())
    throw ValidationError("command: missing or not a string");
  const std::string command = raw["command"].get<std::string>();
  const auto& table = command_fields();
  const auto it = table.find(command);
  if (it == table.end()) throw ValidationError("command: unknown command \"" + command + "\"");

  std::set<std::string> known = {"command", "seed", "format", "output_path", "tolerances"};
  for (const Field& f : it->second) known.insert(f.name);
  for (const auto& [k, v] : raw.items())
    if (!known.contains(k)) throw ValidationError(k + ": unknown field");

  json out = json::object();
  out["command"] = command;
  out["seed"] = raw.value("seed", json(0));
  if (!out["seed"].is_number_unsigned() && !(out["seed"].is_number_integer() && out["seed"].get<long long>() >= 0))
    throw ValidationError("seed: expected a nonnegative integer");
  out["format"] = raw.value("format", json("csv"));
  if (out["format"] != "csv" && out["format"] != "json")
    throw ValidationError("format: expected \"csv\" or \"json\"");
  out["output_path"] = raw.value("output_path", json(""));
  if (!out["output_path"].is_string()) throw ValidationError("output_path: expected a string");
  out["tolerances"] = tolerances_to_json(parse_tolerances(raw.value("tolerances", json(nullptr))));

  for (const Field& f : it->second) {
    if (raw.contains(f.name)) {
      out[f.name] = raw[f.name];
    } else if (f.required) {
      throw ValidationError(std::string(f.name) + ": missing required field");
    } else {
      out[f.name] = f.fallback;
    }
    check_field(command, f.name, out[f.name]);
  }
  return out;
}

std::uint64_t config_hash(const json& resolved) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : resolved.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mfs::cli
