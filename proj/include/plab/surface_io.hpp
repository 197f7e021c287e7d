#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "plab/errors.hpp"
#include "plab/surfaces.hpp"

namespace plab {

struct SurfaceFormatError : Error {
  using Error::Error;
};

/// Accepted documents:
///   {"builtin": "horned_sphere_731", "smoothing_width": 0.05}
///   {"n": 2, "equations": ["...", "..."], "lower": [...], "upper": [...], "level_axis": 2}
///   {"n": 2, "graph": {"re": "x1^2 - y1^2", "im": "2*x1*y1"}, "box_half_width": 1}
/// Expressions are polynomials in x1, y1, ..., xn, yn. Optional "name" and "euler_characteristic".
SurfaceModel surface_from_json(const nlohmann::json& doc);

/// A builtin id, or the path of a JSON surface document.
SurfaceModel load_surface(const std::string& id_or_path);

/// Euler characteristic of the surface when known (builtins, or the document's
/// "euler_characteristic"); nullopt otherwise.
std::optional<int> known_euler_characteristic(const std::string& id_or_path);

nlohmann::json to_json(const ComplexPointRecord& r);

}  // namespace plab
