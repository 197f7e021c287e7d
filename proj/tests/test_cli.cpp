#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "app.hpp"
#include "plab/errors.hpp"
#include "plab/surface_io.hpp"

using namespace plab;
using namespace plab::app;

namespace {

RunConfig config(const std::string& command) {
  RunConfig c;
  c.command = command;
  return c;
}

const nlohmann::json* find_check(const Report& r, const std::string& name) {
  for (const auto& c : r.doc()["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("config validation and merging") {
  auto c = config("wirtinger");
  CHECK_NOTHROW(c.validate());
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(run(c), ConfigError);
  c = config("bogus");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config("orbits");
  c.density = -5;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = config("orbits");
  c.merge({{"surface", "torus_742"}, {"levels", {0.5, -0.5}}, {"seed", 9}, {"pairs", {{2, 1}}}});
  CHECK(c.surface == "torus_742");
  CHECK(c.levels == std::vector<double>{0.5, -0.5});
  CHECK(c.seed == 9);
  CHECK(c.pairs.size() == 1);
  CHECK_THROWS_AS(c.merge({{"densty", 4}}), ConfigError);
  CHECK_THROWS_AS(c.merge({{"density", "many"}}), ConfigError);
  // Round trip through the embedded config.
  RunConfig d;
  d.merge(c.to_json());
  CHECK(d.to_json() == c.to_json());
}

TEST_CASE("wirtinger command") {
  auto c = config("wirtinger");
  c.pairs = {{1, 1}, {2, 1}};
  c.samples = 2000;
  auto r = run(c);
  CHECK(r.passed());
  const auto& rows = r.doc()["results"]["sweeps"];
  CHECK(std::abs(rows[0]["optimizer_value"].get<double>() - 1.0) < 1e-12);
  CHECK(rows[1]["violations"] == 0);
  CHECK(rows[1]["optimizer_value"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.doc()["version"] == version());
  CHECK(r.doc()["seed"] == c.seed);
  CHECK(r.doc()["config"]["samples"] == 2000);
}

TEST_CASE("classify command") {
  for (auto [surface, records, count] : {std::tuple{"horned_sphere_731", 4, 2}, std::tuple{"elliptic_sphere_721", 2, 2},
                                         std::tuple{"torus_742", 4, 0}}) {
    auto c = config("classify");
    c.surface = surface;
    auto r = run(c);
    CHECK(r.passed());
    CHECK(r.doc()["results"]["records"].size() == static_cast<std::size_t>(records));
    CHECK(r.doc()["results"]["signed_count"] == count);
  }
}

TEST_CASE("surface documents") {
  const auto dir = std::filesystem::temp_directory_path() / "plab_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "paraboloid.json").string();
  std::ofstream(path) << R"({"n": 2, "graph": {"re": "x1^2 + y1^2"}, "name": "paraboloid"})";
  auto s = load_surface(path);
  CHECK(s.name == "paraboloid");
  CHECK(!known_euler_characteristic(path));

  auto c = config("classify");
  c.surface = path;
  auto r = run(c);
  CHECK(r.passed());
  REQUIRE(r.doc()["results"]["records"].size() == 1);
  CHECK(r.doc()["results"]["records"][0]["label"] == "special_elliptic");
  CHECK(r.doc()["warnings"].size() == 1);

  const auto implicit = (dir / "sphere.json").string();
  std::ofstream(implicit) << R"({"n": 2, "equations": ["x1^2 + y1^2 + x2^2 - 1", "y2"],
                                 "lower": [-2, -2, -2, -2], "upper": [2, 2, 2, 2], "level_axis": 2,
                                 "euler_characteristic": 2})";
  CHECK(load_surface(implicit).level_axis == 2);
  CHECK(known_euler_characteristic(implicit) == 2);

  CHECK_THROWS_AS(surface_from_json({{"n", 2}, {"equations", {"x1"}}}), SurfaceFormatError);
  CHECK_THROWS_AS(surface_from_json({{"builtin", "klein_bottle"}}), SurfaceFormatError);
  CHECK_THROWS_AS(surface_from_json({{"n", 2}, {"graph", {{"re", "x1 +* y"}}}}), SurfaceFormatError);
  CHECK_THROWS_AS(load_surface((dir / "missing.json").string()), SurfaceFormatError);
}

TEST_CASE("orbits command edge cases") {
  auto c = config("orbits");
  c.levels = std::vector<double>{};
  auto r = run(c);
  CHECK(r.doc()["results"]["fiber_table"].empty());
  CHECK(r.doc()["results"]["L_candidates"].empty());

  c.levels = std::vector<double>{0.0, 0.5};
  r = run(c);
  const auto& table = r.doc()["results"]["fiber_table"];
  REQUIRE(table.size() == 2);
  CHECK(table[0]["near_critical"] == true);
  CHECK(table[0]["components"].is_null());
  CHECK(table[1]["components"] == 1);
  CHECK(r.doc()["warnings"].size() == 1);
  CHECK(r.passed());

  c.surface = "elliptic_sphere_721";
  c.levels = std::vector<double>{-0.5, 0.5};
  r = run(c);
  CHECK(r.passed());
  CHECK(find_check(r, "L_candidates_are_endpoints")->at("passed") == true);
}

TEST_CASE("moment command") {
  const auto dir = std::filesystem::temp_directory_path() / "plab_cli_moment";
  std::filesystem::remove_all(dir);
  auto c = config("moment");
  c.out = dir.string();
  auto r = run(c);
  CHECK(r.passed());
  CHECK(std::filesystem::exists(dir / "moment_G.csv"));
  CHECK(r.doc()["results"]["G_sweep"].size() == 20);
}
