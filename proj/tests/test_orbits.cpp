#include "doctest.h"

#include <set>
#include <sstream>

#include "plab/orbits.hpp"

using namespace plab;

namespace {

bool approx_equal(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-8) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

SurfaceModel cone_quadric() {
  // w = 4 x1^2 - 2 y1^2 + x2^2 + y2^2: the normal form at a 1-hyperbolic point with lambda = (3, 0).
  auto names = real_coordinate_names(3);
  return make_graph(3, parse_real_polynomial("4*x1^2 - 2*y1^2 + x2^2 + y2^2", names), RealPolynomial(6), 1.0);
}

int count_at(const SurfaceModel& s, double level, int density = 1500) {
  return stable_component_count(s, level, density, 17).count;
}

}  // namespace

TEST_CASE("slice_sample examples") {
  auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
  auto c = slice_sample(horn, 0.5, 300, 1);
  CHECK(c.points.size() == 300);
  for (const auto& p : c.points) {
    CHECK(horn.residual(p).norm() < 1e-6);
    CHECK(p(4) == 0.5);
  }
  auto empty = slice_sample(horn, 1.5, 300, 1);
  CHECK(empty.empty());
  CHECK(empty.outside_box);

  auto sphere = make_builtin(BuiltinSurface::elliptic_sphere_721);
  auto s0 = slice_sample(sphere, 0.0, 300, 2);
  for (const auto& p : s0.points) CHECK(p.head<4>().norm() == doctest::Approx(1.0).epsilon(1e-9));

  // In-box level with no solutions: certified by the number of seeds tried.
  auto names = real_coordinate_names(2);
  auto ball = make_polynomial_surface(2, {"y2", "x1^2 + y1^2 + x2^2 - 1"}, Eigen::VectorXd::Constant(4, -2),
                                      Eigen::VectorXd::Constant(4, 2), 2);
  auto none = slice_sample(ball, 1.5, 20, 3);
  CHECK(none.empty());
  CHECK(!none.outside_box);
  CHECK(none.seeds_tried == 400);
}

TEST_CASE("component labels on a toy cloud") {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(Eigen::Vector2d(0.1 * i, 0));
  for (int i = 0; i < 10; ++i) pts.push_back(Eigen::Vector2d(0.1 * i, 5));
  auto labels = component_labels(pts, 0.15);
  CHECK(std::set<int>(labels.begin(), labels.end()).size() == 2);
  CHECK(labels[0] == 0);
  CHECK(labels[19] == 1);
  CHECK(median_nearest_neighbor(pts) == doctest::Approx(0.1));
}

TEST_CASE("horned sphere slice topology") {
  auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
  // Eight levels on each side; closer to 0 the two lower pieces pinch together
  // faster than a few-thousand-point cloud can resolve.
  for (int k = 2; k <= 9; ++k) {
    const double level = k / 10.0;
    CHECK_MESSAGE(count_at(horn, level) == 1, "level ", level);
    CHECK_MESSAGE(count_at(horn, -level) == 2, "level ", -level);
  }
}

TEST_CASE("component counts are stable under density doubling") {
  auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
  for (double level : {0.5, -0.5}) CHECK(count_at(horn, level, 1000) == count_at(horn, level, 2000));
}

TEST_CASE("components on the lower half are separated by the sign of y1") {
  auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
  SliceCloud c;
  auto cc = stable_component_count(horn, -0.5, 1500, 5, 3, &c);
  REQUIRE(cc.count == 2);
  std::set<std::pair<int, bool>> sides;
  for (std::size_t i = 0; i < c.points.size(); ++i) sides.insert({cc.labels[i], c.points[i](1) > 0});
  CHECK(sides.size() == 2);
}

TEST_CASE("quadric orbits are level sets of Q") {
  auto q = cone_quadric();
  CHECK(count_at(q, 0.3) == 1);
  CHECK(count_at(q, -0.3) == 2);
  auto c = slice_sample(q, -0.3, 500, 4);
  for (const auto& p : c.points) {
    const double v = 4 * p(0) * p(0) - 2 * p(1) * p(1) + p(2) * p(2) + p(3) * p(3);
    CHECK(std::abs(v - p(4)) < 1e-6);
    CHECK(std::abs(p(5)) < 1e-6);
  }
}

TEST_CASE("sigma components") {
  SUBCASE("horned sphere") {
    auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
    auto r = sigma_components(horn, Eigen::VectorXd::Zero(6));
    CHECK(r.components == 2);
    CHECK(r.closures_sphere_like);
    // Each component lies on one side of y1 = 0.
    std::set<std::pair<int, bool>> sides;
    for (std::size_t i = 0; i < r.labels.size(); ++i) sides.insert({r.labels[i], r.cloud.points[i](1) > 0});
    CHECK(sides.size() == 2);
  }
  SUBCASE("torus, both hyperbolic points") {
    auto torus = make_builtin(BuiltinSurface::torus_742);
    for (double level : {0.0, -1.0}) {
      Eigen::VectorXd h = Eigen::VectorXd::Zero(6);
      h(4) = level;
      CHECK(sigma_components(torus, h).components == 2);
    }
  }
  SUBCASE("quadric cone") {
    CHECK(sigma_components(cone_quadric(), Eigen::VectorXd::Zero(6)).components == 2);
  }
  SUBCASE("elliptic point is rejected") {
    auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
    Eigen::VectorXd e3 = Eigen::VectorXd::Zero(6);
    e3(4) = 1.0;
    CHECK_THROWS_AS(sigma_components(horn, e3), NotHyperbolic);
  }
}

TEST_CASE("build_nu and graph_lift") {
  SUBCASE("elliptic sphere") {
    auto s = make_builtin(BuiltinSurface::elliptic_sphere_721);
    auto nu = build_nu(s, 200);
    CHECK(approx_equal(nu.critical_values, std::vector<double>{-1.0, 1.0}));
    CHECK(nu.singular_levels.empty());
    for (std::size_t i = 0; i < nu.mesh.size(); ++i) CHECK(nu.values[i] == nu.mesh[i](4));
    auto lift = graph_lift(s, nu);
    CHECK(lift.graph.rows() == static_cast<Eigen::Index>(nu.mesh.size()));
    CHECK((lift.k() - Eigen::Map<const Eigen::VectorXd>(nu.values.data(), nu.values.size())).norm() == 0.0);
    CHECK(approx_equal(lift.tau_values, std::vector<double>{-1.0, 1.0}));
  }
  SUBCASE("horned sphere has a single singular level at h") {
    auto s = make_builtin(BuiltinSurface::horned_sphere_731);
    auto nu = build_nu(s, 200);
    REQUIRE(nu.singular_levels.size() == 1);
    CHECK(std::abs(nu.singular_levels[0]) < 1e-9);
    CHECK(nu.critical_set.size() == 4);
    // sigma_1 and sigma_2 both lie in the level of h, so nu agrees on them.
    auto sig = sigma_components(s, Eigen::VectorXd::Zero(6), 1000);
    for (const auto& p : sig.cloud.points) CHECK(std::abs(nu.value(p) - nu.singular_levels[0]) < 1e-8);
  }
  SUBCASE("torus has two singular levels") {
    auto nu = build_nu(make_builtin(BuiltinSurface::torus_742), 200);
    REQUIRE(nu.singular_levels.size() == 2);
    CHECK(nu.singular_levels[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(nu.singular_levels[1]) < 1e-6);
  }
  SUBCASE("constant nu is rejected") {
    auto s = make_builtin(BuiltinSurface::elliptic_sphere_721);
    auto nu = nu_from_function(s, [](const Eigen::VectorXd&) { return 0.25; }, 50);
    CHECK_THROWS_AS(graph_lift(s, nu), DegenerateNu);
  }
}

TEST_CASE("condition (H) audit") {
  SUBCASE("elliptic sphere") {
    auto s = make_builtin(BuiltinSurface::elliptic_sphere_721);
    auto lift = graph_lift(s, build_nu(s, 200));
    auto rep = condition_H_audit(lift, {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75}, 1000);
    CHECK(approx_equal(rep.L_candidates, std::vector<double>{-1.0, 1.0}));
    for (const auto& row : rep.fiber_table) {
      CHECK(row.connected);
      CHECK(!row.tau_intersect);
    }
  }
  SUBCASE("horned sphere") {
    auto s = make_builtin(BuiltinSurface::horned_sphere_731);
    auto lift = graph_lift(s, build_nu(s, 200));
    const std::vector<double> levels{-0.75, -0.5, -0.25, 0.25, 0.5, 0.75};
    auto rep = condition_H_audit(lift, levels, 1000);
    for (const auto& row : rep.fiber_table) CHECK(row.components == (row.level < 0 ? 2 : 1));
    CHECK(approx_equal(rep.L_candidates, std::vector<double>{-1.0, -0.75, -0.5, -0.25, 0.0, 1.0}));
  }
  SUBCASE("near-critical and empty") {
    auto s = make_builtin(BuiltinSurface::elliptic_sphere_721);
    auto lift = graph_lift(s, build_nu(s, 100));
    CHECK(condition_H_audit(lift, {}).fiber_table.empty());
    CHECK(condition_H_audit(lift, {}).L_candidates.empty());
    auto rep = condition_H_audit(lift, {0.9995}, 500);
    CHECK(rep.fiber_table[0].near_critical);
  }
}

TEST_CASE("slice CSV export") {
  auto horn = make_builtin(BuiltinSurface::horned_sphere_731);
  SliceCloud c;
  auto cc = stable_component_count(horn, -0.5, 200, 3, 3, &c);
  std::ostringstream os;
  write_slice_csv(os, horn, {c}, {cc.labels});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x1,y1,x2,y2,x3,level,component_id");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == static_cast<int>(c.points.size()));
}
