#include "plab/surface_io.hpp"

#include <fstream>

#include "plab/errors.hpp"

namespace plab {

namespace {

Eigen::VectorXd vector_of(const nlohmann::json& a, int size, const char* what) {
  if (!a.is_array() || static_cast<int>(a.size()) != size)
    throw SurfaceFormatError(std::string("surface: '") + what + "' must be an array of " + std::to_string(size) + " numbers");
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = a[i].get<double>();
  return v;
}

nlohmann::json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SurfaceFormatError("surface: cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SurfaceFormatError("surface: " + path + ": " + e.what());
  }
}

}  // namespace

SurfaceModel surface_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw SurfaceFormatError("surface: document must be an object");
    if (doc.contains("builtin")) {
      auto id = builtin_from_string(doc["builtin"].get<std::string>());
      if (!id) throw SurfaceFormatError("surface: unknown builtin '" + doc["builtin"].get<std::string>() + "'");
      return make_builtin(*id, doc.value("smoothing_width", kDefaultSmoothingWidth));
    }
    const int n = doc.at("n").get<int>();
    if (n < 1) throw SurfaceFormatError("surface: n must be positive");
    auto names = real_coordinate_names(n);
    SurfaceModel s;
    if (doc.contains("graph")) {
      const auto& g = doc["graph"];
      s = make_graph(n, parse_real_polynomial(g.at("re").get<std::string>(), names),
                     parse_real_polynomial(g.value("im", std::string("0")), names), doc.value("box_half_width", 1.0));
    } else {
      const auto& eqs = doc.at("equations");
      if (!eqs.is_array() || eqs.size() != 2) throw SurfaceFormatError("surface: need exactly two equations");
      s = make_polynomial_surface(n, {eqs[0].get<std::string>(), eqs[1].get<std::string>()},
                                  vector_of(doc.at("lower"), 2 * n, "lower"), vector_of(doc.at("upper"), 2 * n, "upper"),
                                  doc.value("level_axis", -1));
    }
    if (doc.contains("name")) s.name = doc["name"].get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SurfaceFormatError(std::string("surface: ") + e.what());
  } catch (const ParseError& e) {
    throw SurfaceFormatError(std::string("surface: ") + e.what());
  }
}

SurfaceModel load_surface(const std::string& id_or_path) {
  if (auto id = builtin_from_string(id_or_path)) return make_builtin(*id);
  return surface_from_json(read_document(id_or_path));
}

std::optional<int> known_euler_characteristic(const std::string& id_or_path) {
  if (auto id = builtin_from_string(id_or_path)) return *id == BuiltinSurface::torus_742 ? 0 : 2;
  auto doc = read_document(id_or_path);
  if (doc.is_object() && doc.contains("euler_characteristic")) return doc["euler_characteristic"].get<int>();
  if (doc.is_object() && doc.contains("builtin")) return known_euler_characteristic(doc["builtin"].get<std::string>());
  return std::nullopt;
}

nlohmann::json to_json(const ComplexPointRecord& r) {
  return {{"location", std::vector<double>(r.location.data(), r.location.data() + r.location.size())},
          {"flat", r.flat},
          {"special", r.special},
          {"lambdas", r.lambdas},
          {"label", r.label.to_string()},
          {"cr_defect", r.cr_defect}};
}

}  // namespace plab
