// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "plab/errors.hpp"
#include "plab/moment.hpp"
#include "plab/multivector.hpp"
#include "plab/orbits.hpp"
#include "plab/plateau.hpp"
#include "plab/surfaces.hpp"

using namespace plab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Eigen::VectorXd pt(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  int k = 0;
  for (double c : v) x(k++) = c;
  return x;
}

bool has_point(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& p, double tol) {
  for (const auto& q : pts)
    if ((q - p).norm() < tol) return true;
  return false;
}

void wirtinger(Outcome& o) {
  for (auto [n, p] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    KahlerData k(n, p);
    std::mt19937_64 rng(100 * n + p);
    std::normal_distribution<double> g;
    int violations = 0;
    double max_v = -1;
    for (int s = 0; s < 10000; ++s) {
      Eigen::MatrixXd f(2 * n, 2 * p);
      for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
      const double v = kahler_eval(k, blade_from_frame(f).unit().expansion());
      violations += v > 1 + 1e-9;
      max_v = std::max(max_v, v);
    }
    auto opt = comass_estimate(k, 32, 7);
    const double dist = wirtinger_check(k, opt.argmax.unit()).complex_distance;
    o.detail << " (" << n << "," << p << "): viol=" << violations << " max=" << max_v << " opt=" << opt.value
             << " dist=" << dist << ";";
    o.require(violations == 0, "violations");
    o.require(opt.value >= 1 - 1e-5 && opt.value <= 1 + 1e-9, "optimizer value");
    o.require(dist < 1e-3, "argmax complex distance");
  }
}

struct Tally {
  int elliptic = 0, hyperbolic1 = 0, other = 0;
};

Tally tally(const std::vector<ComplexPointRecord>& recs) {
  Tally t;
  for (const auto& r : recs) {
    if (r.label.kind == PointKind::special_elliptic) ++t.elliptic;
    else if (r.label == PointLabel{PointKind::special_hyperbolic, 1}) ++t.hyperbolic1;
    else ++t.other;
  }
  return t;
}

void horned_classification(Outcome& o) {
  auto s = make_builtin(BuiltinSurface::horned_sphere_731);
  auto search = find_complex_points(s, 5);
  o.require(search.points.size() == 4, "four complex points");
  for (const auto& p : {pt({0, 0, 0, 0, 1, 0}), pt({0, 0, 0, 0, 0, 0}), pt({0, 1, 0, 0, -1, 0}), pt({0, -1, 0, 0, -1, 0})})
    o.require(has_point(search.points, p, 1e-6), "point at expected coordinates");
  auto recs = classify_surface(s);
  auto t = tally(recs);
  for (const auto& r : recs)
    if (r.location.norm() < 1e-6) {
      o.detail << " lambda(h)=(" << r.lambdas[0] << "," << r.lambdas[1] << ")";
      o.require(std::abs(r.lambdas[0] - 3) < 1e-6 && std::abs(r.lambdas[1]) < 1e-6, "lambda at h = (3, 0)");
    }
  const auto count = euler_signed_count(recs, 2);
  o.detail << " elliptic=" << t.elliptic << " 1-hyperbolic=" << t.hyperbolic1 << " count=" << count.count;
  o.require(t.elliptic == 3 && t.hyperbolic1 == 1 && t.other == 0, "labels");
  o.require(count.count == 2, "signed count 2");
}

void torus_classification(Outcome& o) {
  auto recs = classify_surface(make_builtin(BuiltinSurface::torus_742));
  auto t = tally(recs);
  const auto count = euler_signed_count(recs, 0);
  o.detail << " elliptic=" << t.elliptic << " 1-hyperbolic=" << t.hyperbolic1 << " count=" << count.count;
  o.require(t.elliptic == 2 && t.hyperbolic1 == 2 && t.other == 0, "labels");
  o.require(count.count == 0, "signed count 0");
}

void orbit_topology(Outcome& o) {
  auto s = make_builtin(BuiltinSurface::horned_sphere_731);
  std::uint64_t seed = 3;
  for (double level : {0.25, 0.5, 0.75, -0.25, -0.5, -0.75}) {
    // Density is doubled until the count survives doubling the adjacency radius.
    auto cc = stable_component_count(s, level, kDefaultSliceDensity, seed++);
    o.detail << " " << level << ":" << cc.count << "/" << cc.count_doubled;
    o.require(cc.count == (level > 0 ? 1 : 2), "count at level " + std::to_string(level));
    o.require(cc.count == cc.count_doubled, "stable at level " + std::to_string(level));
  }
  auto sigma = sigma_components(s, Eigen::VectorXd::Zero(6));
  o.detail << " sigma=" << sigma.components;
  o.require(sigma.components == 2, "sigma components");
}

void mixed_plateau(Outcome& o) {
  auto fam = unit_ball_family();
  auto base = mixed_volume(fam);
  const double oracle = 8 * kPi * kPi / 15;
  const double rel = std::abs(base.volume - oracle) / oracle;
  o.detail << " vol=" << base.volume << " rel.err=" << rel;
  o.require(rel < 1e-4, "mixed volume oracle");
  double prev = base.volume;
  for (double a : {0.05, 0.1, 0.2}) {
    Perturbation p;
    p.amplitude = a;
    auto m = mixed_volume(competitor_perturb(fam, p));
    const double de = std::abs(m.energy - base.energy) / base.energy;
    o.detail << " a=" << a << ":" << m.volume << " dE=" << de;
    o.require(m.volume > prev, "strict increase");
    o.require(de < 1e-6, "energy constant");
    prev = m.volume;
  }
}

void stokes(Outcome& o) {
  std::mt19937_64 rng(2024);
  Eigen::MatrixXcd f1 = Eigen::MatrixXcd::Zero(2, 1), f2 = Eigen::MatrixXcd::Zero(3, 2);
  f1(0, 0) = 1.0;
  f2(0, 0) = 1.0;
  f2(1, 1) = 1.0;
  const LeafChart disc = complex_ball_chart(Eigen::VectorXd::Zero(4), 1.0, f1);
  const LeafChart ball = complex_ball_chart(Eigen::VectorXd::Zero(6), 1.0, f2);
  for (const auto& [name, chart, n] : {std::tuple{"disc", disc, 2}, std::tuple{"ball", ball, 3}}) {
    double worst = 0, min_order = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10; ++t) {
      auto conv = stokes_convergence(chart, random_poly_form(n, chart.param_dim() - 1, 3, rng), 3, {1, 2, 4, 8});
      worst = std::max(worst, conv.residuals.back());
      min_order = std::min(min_order, conv.observed_order);
    }
    o.detail << " " << name << ": max.res=" << worst << " min.order=" << min_order << ";";
    o.require(worst < 1e-5, std::string(name) + " residual");
    o.require(min_order >= 2, std::string(name) + " order");
  }
}

void moment(Outcome& o) {
  const Complex I(0, 1);
  auto v = [](std::initializer_list<Complex> c) {
    Eigen::VectorXcd z(static_cast<Eigen::Index>(c.size()));
    int k = 0;
    for (auto x : c) z(k++) = x;
    return z;
  };
  auto circle = CurveModel::trigonometric(2, {{1, v({1, 0})}});
  double worst = std::abs(moment_integral(circle, HolomorphicOneForm::parse(2, "z2", 1)));
  for (int k = 0; k < 8; ++k)
    worst = std::max(worst, std::abs(moment_integral(circle, HolomorphicOneForm::parse(2, "z1^" + std::to_string(k), 1))));
  auto parabola = CurveModel::trigonometric(2, {{1, v({1, 0})}, {2, v({0, 1})}});
  for (const char* p : {"z2", "z1*z2^2", "z2^3 - 2*i*z1"})
    for (int j : {1, 2}) worst = std::max(worst, std::abs(moment_integral(parabola, HolomorphicOneForm::parse(2, p, j))));
  o.detail << " bounding.max=" << worst;
  o.require(worst < 1e-10, "bounding moments");

  auto nb = CurveModel::trigonometric(2, {{1, v({1, 0})}, {-1, v({0, 1})}});
  const double werr = std::abs(moment_integral(nb, HolomorphicOneForm::parse(2, "z2", 1)) - 2 * kPi * I);
  o.detail << " witness.err=" << werr;
  o.require(werr < 1e-8, "non-bounding witness");

  const Complex c(0.3, -0.2);
  auto disc = disc_boundary(c);
  NuLambdaFrame f;
  f.xi1 = Complex(0.1, 0.1);
  f.eta1 = Complex(1.5, 0.5);
  f.eta1p = Complex(0.2, -0.1);
  double gerr = 0;
  for (int k = 0; k < 20; ++k) {
    f.lambda = -1.0 + 2.0 * k / 19;
    const Complex z0 = (c - f.xi1 - f.eta1p * f.lambda) / f.eta1;
    o.require(std::abs(std::abs(z0) - 1) > 0.1, "oracle applies");
    gerr = std::max(gerr, std::abs(cauchy_G(disc, f) - (std::abs(z0) < 1 ? z0 : 0.0)));
  }
  o.detail << " G.err=" << gerr;
  o.require(gerr < 1e-8, "cauchy_G vs residues");

  GridFunction sol = [](Complex xi, Complex eta) { return xi / (1.0 - eta); };
  const double r = shockwave_residual(sol, StencilGrid::box(-0.5, 1.0, -1.0, 1.0, 1e-3));
  auto conv = shockwave_convergence(sol, -0.5, 1.0, -1.0, 1.0, {0.04, 0.02, 0.01, 0.005});
  o.detail << " shock.res=" << r << " order=" << conv.observed_order;
  o.require(r < 1e-6, "shock-wave residual");
  o.require(conv.observed_order >= 1.8 && conv.observed_order <= 2.2, "shock-wave order");
}

void h_audit(Outcome& o) {
  const std::vector<double> levels = {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75};
  {
    auto s = make_builtin(BuiltinSurface::elliptic_sphere_721);
    auto rep = condition_H_audit(graph_lift(s, build_nu(s)), levels);
    bool connected = true;
    for (const auto& r : rep.fiber_table) connected &= !r.near_critical && r.connected;
    const auto& L = rep.L_candidates;
    o.detail << " elliptic: connected=" << connected << " L={";
    for (double l : L) o.detail << l << " ";
    o.detail << "}";
    o.require(connected, "elliptic fibers connected");
    o.require(L.size() == 2 && std::abs(L[0] + 1) < 1e-6 && std::abs(L[1] - 1) < 1e-6, "L = {-1, 1}");
  }
  {
    auto s = make_builtin(BuiltinSurface::horned_sphere_731);
    auto lift = graph_lift(s, build_nu(s));
    auto rep = condition_H_audit(lift, levels);
    o.require(lift.nu.singular_levels.size() == 1, "one singular level");
    const double hv = lift.nu.singular_levels.empty() ? 0.0 : lift.nu.singular_levels[0];
    bool exact = true;
    o.detail << " horned (h-value " << hv << "):";
    for (const auto& r : rep.fiber_table) {
      o.detail << " " << r.level << "->" << r.components;
      exact &= !r.near_critical && ((r.components == 2) == (r.level < hv));
    }
    o.require(exact, "2-component fibers exactly below h");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Wirtinger sweep", wirtinger},
      {"horned sphere classification", horned_classification},
      {"torus classification", torus_classification},
      {"orbit topology", orbit_topology},
      {"mixed Plateau volume", mixed_plateau},
      {"Stokes on leaves", stokes},
      {"moment / Cauchy suite", moment},
      {"condition (H) audit", h_audit},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(10);
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += !o.ok;
    std::printf("%s %zu %s:%s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
