#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mfs/core.hpp"
#include "mfs/geodesics.hpp"
#include "mfs/planar.hpp"
#include "mfs/surfaces.hpp"
#include "mfs/tolerances.hpp"

namespace mfs::cli {

using json = nlohmann::json;

/// Malformed or unknown configuration content. Maps to exit status 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

/// A number, or a string such as "pi", "-pi/2", "3pi/4", "2*pi/3", "0.25".
double parse_angle(const json& j, const std::string& where);

/// {"family": "ellipsoid"|"euclidean"|"randers"|"sum2", ...}. Matrices are
/// either three diagonal entries or a symmetric 3x3 nested array.
Norm3 parse_norm3(const json& j, const std::string& where);

/// "euclidean", "paper_phi0", or {"family": ...} with scaled_ellipse (M),
/// randers2 (M, b), sum2 (M1, M2) or restriction (norm, plane: [a, b]).
PlanarNorm parse_planar(const json& j, const std::string& where);

/// {"family": "graph", "h": <catalog name>} or {"family": "graph",
/// "terms": [[i, j, c], ...]} with total degree at most 4; optional
/// "scale" multiplies the height.
Immersion3 parse_immersion(const json& j, const std::string& where);

/// {"family": "frozen", "norm": <planar>} | {"family": "rotation",
/// "phi0": <planar>} | {"family": "induced", "immersion": ..., "norm": ...}
MetricOracle2 parse_metric(const json& j, const std::string& where);

Vector2d parse_point(const json& j, const std::string& where);

json tolerances_to_json(const Tolerances& t);
Tolerances parse_tolerances(const json& j);

/// Checks the command name and every field, fills defaults, and returns the
/// fully-resolved configuration. Throws ValidationError naming the first
/// offending field.
json resolve_config(const json& raw);

/// FNV-1a 64 of the canonical dump of a resolved configuration.
std::uint64_t config_hash(const json& resolved);
std::string hash_hex(std::uint64_t h);

}  // namespace mfs::cli
