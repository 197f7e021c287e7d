#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "plab/errors.hpp"
#include "plab/moment.hpp"
#include "plab/multivector.hpp"
#include "plab/orbits.hpp"
#include "plab/plateau.hpp"
#include "plab/surface_io.hpp"
#include "plab/surfaces.hpp"

#ifndef PLAB_VERSION
#define PLAB_VERSION "0.0.0"
#endif

namespace plab::app {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::ofstream open_output(const RunConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.out);
  std::ofstream f(std::filesystem::path(cfg.out) / file);
  if (!f) throw ConfigError("cannot write " + (std::filesystem::path(cfg.out) / file).string());
  return f;
}

std::string surface_tag(const std::string& surface) {
  if (builtin_from_string(surface)) return surface;
  return std::filesystem::path(surface).stem().string();
}

RunConfig with(const RunConfig& base, const std::string& command, const std::string& surface = {}) {
  RunConfig c = base;
  c.command = command;
  c.surface = surface;
  c.levels.reset();
  c.tol.reset();
  return c;
}

}  // namespace

std::string version() { return PLAB_VERSION; }

json RunConfig::to_json() const {
  json pj = json::array();
  for (auto [n, p] : pairs) pj.push_back({n, p});
  json j = {{"command", command}, {"surface", surface},    {"density", density},       {"seed", seed},
            {"restarts", restarts}, {"samples", samples}, {"pairs", pj},             {"amplitudes", amplitudes},
            {"out", out}};
  j["levels"] = levels ? json(*levels) : json(nullptr);
  j["tol"] = tol ? json(*tol) : json(nullptr);
  return j;
}

void RunConfig::merge(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "command") command = v.get<std::string>();
      else if (key == "surface") surface = v.get<std::string>();
      else if (key == "levels") levels = v.is_null() ? std::nullopt : std::optional(v.get<std::vector<double>>());
      else if (key == "density") density = v.get<int>();
      else if (key == "seed") seed = v.get<std::uint64_t>();
      else if (key == "restarts") restarts = v.get<int>();
      else if (key == "samples") samples = v.get<int>();
      else if (key == "tol") tol = v.is_null() ? std::nullopt : std::optional(v.get<double>());
      else if (key == "amplitudes") amplitudes = v.get<std::vector<double>>();
      else if (key == "out") out = v.get<std::string>();
      else if (key == "pairs") {
        pairs.clear();
        for (const auto& p : v) {
          if (!p.is_array() || p.size() != 2) throw ConfigError("config: pairs must be [n, p] entries");
          pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
        }
      } else
        throw ConfigError("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void RunConfig::validate() const {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw ConfigError("unknown command '" + command + "'");
  if (density <= 0) throw ConfigError("density must be positive");
  if (restarts <= 0) throw ConfigError("restarts must be positive");
  if (samples <= 0) throw ConfigError("samples must be positive");
  if (tol && !(*tol > 0)) throw ConfigError("tol must be positive");
  for (double a : amplitudes)
    if (!(a > 0)) throw ConfigError("perturbation amplitudes must be positive");
  for (auto [n, p] : pairs)
    if (n < 1 || p < 1 || p > n) throw ConfigError("pairs need 1 <= p <= n");
  if (levels)
    for (double l : *levels)
      if (!std::isfinite(l)) throw ConfigError("levels must be finite");
}

Report::Report(const RunConfig& cfg) {
  doc_ = {{"tool", "plateau_lab"},    {"version", version()}, {"command", cfg.command}, {"seed", cfg.seed},
          {"config", cfg.to_json()}, {"results", json::object()}, {"checks", json::array()},
          {"warnings", json::array()}, {"passed", true}};
}

void Report::check(const std::string& name, bool ok, json detail) {
  json c = {{"name", name}, {"passed", ok}};
  if (!detail.is_null()) c["detail"] = std::move(detail);
  doc_["checks"].push_back(std::move(c));
  if (!ok) doc_["passed"] = false;
}

void Report::warn(const std::string& message) { doc_["warnings"].push_back(message); }

void Report::absorb(const std::string& prefix, const Report& other) {
  for (const auto& c : other.doc_["checks"]) check(prefix + "/" + c["name"].get<std::string>(), c["passed"].get<bool>(),
                                                    c.contains("detail") ? c["detail"] : json());
  for (const auto& w : other.doc_["warnings"]) warn(prefix + ": " + w.get<std::string>());
  doc_["results"][prefix] = other.doc_["results"];
}

Report run_wirtinger(const RunConfig& cfg) {
  Report rep(cfg);
  const double tol = cfg.tol.value_or(1e-9);
  json rows = json::array();
  for (auto [n, p] : cfg.pairs) {
    KahlerData k(n, p);
    std::mt19937_64 rng(cfg.seed * 1000003ULL + 31ULL * n + p);
    std::normal_distribution<double> gauss;
    long violations = 0;
    double max_sampled = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.samples; ++s) {
      Eigen::MatrixXd f(2 * n, 2 * p);
      for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = gauss(rng);
      auto w = wirtinger_check(k, blade_from_frame(f).unit(), tol);
      violations += !w.satisfied;
      max_sampled = std::max(max_sampled, w.value);
    }
    auto opt = comass_estimate(k, cfg.restarts, cfg.seed);
    auto best = wirtinger_check(k, opt.argmax.unit(), tol);
    const std::string tag = "n" + std::to_string(n) + "p" + std::to_string(p);
    rows.push_back({{"n", n},
                    {"p", p},
                    {"samples", cfg.samples},
                    {"violations", violations},
                    {"max_sampled", max_sampled},
                    {"optimizer_value", opt.value},
                    {"argmax_frame", matrix_json(opt.argmax.orthonormal_frame())},
                    {"argmax_complex_distance", best.complex_distance}});
    rep.check(tag + "/no_violations", violations == 0, {{"violations", violations}});
    rep.check(tag + "/optimizer_bounded", opt.value <= 1 + tol, {{"value", opt.value}});
    rep.check(tag + "/optimizer_attains_one", opt.value >= 1 - 1e-5, {{"value", opt.value}});
    rep.check(tag + "/argmax_is_complex", best.complex_distance < 1e-3, {{"distance", best.complex_distance}});
  }
  rep.results()["sweeps"] = rows;
  return rep;
}

Report run_classify(const RunConfig& cfg) {
  Report rep(cfg);
  const std::string surface = cfg.surface.empty() ? "horned_sphere_731" : cfg.surface;
  auto s = load_surface(surface);
  auto records = classify_surface(s);
  auto chi = known_euler_characteristic(surface);
  json recs = json::array();
  for (const auto& r : records) recs.push_back(to_json(r));
  const auto count = euler_signed_count(records, chi.value_or(0));
  rep.results()["surface"] = surface;
  rep.results()["records"] = recs;
  rep.results()["signed_count"] = count.count;
  rep.results()["chi"] = chi ? json(*chi) : json(nullptr);
  rep.results()["chi_match"] = chi ? json(count.matches) : json(nullptr);
  if (chi)
    rep.check("signed_count_equals_chi", count.matches, {{"count", count.count}, {"chi", *chi}});
  else
    rep.warn("Euler characteristic unknown; signed count not checked");
  return rep;
}

Report run_orbits(const RunConfig& cfg) {
  Report rep(cfg);
  const std::string surface = cfg.surface.empty() ? "horned_sphere_731" : cfg.surface;
  auto s = load_surface(surface);
  if (s.level_axis < 0) throw ConfigError("orbits: surface '" + surface + "' has no level axis");
  std::vector<double> levels;
  if (cfg.levels) {
    levels = *cfg.levels;
  } else if (s.builtin_id && *s.builtin_id != BuiltinSurface::torus_742) {
    for (int k = 9; k >= 2; --k) levels.push_back(-k / 10.0);
    for (int k = 2; k <= 9; ++k) levels.push_back(k / 10.0);
  } else {
    const double lo = s.lower(s.level_axis), hi = s.upper(s.level_axis);
    for (int k = 0; k < 16; ++k) levels.push_back(lo + (hi - lo) * (k + 0.5) / 16);
  }

  auto nu = build_nu(s, 500, cfg.seed);
  auto lift = graph_lift(s, nu);
  std::vector<LabelledCloud> clouds;
  auto audit = condition_H_audit(lift, levels, cfg.density, cfg.seed, cfg.out.empty() ? nullptr : &clouds);

  json table = json::array();
  bool stable = true;
  for (const auto& r : audit.fiber_table) {
    table.push_back({{"level", r.level},
                     {"components", r.near_critical ? json(nullptr) : json(r.components)},
                     {"components_doubled", r.near_critical ? json(nullptr) : json(r.components_doubled)},
                     {"tau_intersect", r.tau_intersect},
                     {"near_critical", r.near_critical},
                     {"connected", r.connected}});
    if (r.near_critical) {
      std::ostringstream msg;
      msg << "level " << r.level << " lies within " << kNearCriticalGap << " of a critical value; excluded";
      rep.warn(msg.str());
    } else {
      stable &= r.components == r.components_doubled;
    }
  }
  rep.results()["surface"] = surface;
  rep.results()["critical_values"] = nu.critical_values;
  rep.results()["singular_levels"] = nu.singular_levels;
  rep.results()["L_candidates"] = audit.L_candidates;
  rep.results()["fiber_table"] = table;
  rep.check("counts_stable_under_radius_doubling", stable);

  if (s.builtin_id == BuiltinSurface::horned_sphere_731) {
    bool ok = true;
    for (const auto& r : audit.fiber_table)
      if (!r.near_critical) ok &= r.components == (r.level < 0 ? 2 : 1);
    rep.check("two_components_exactly_below_h", ok);
  }
  if (s.builtin_id == BuiltinSurface::elliptic_sphere_721) {
    bool connected = true;
    for (const auto& r : audit.fiber_table)
      if (!r.near_critical) connected &= r.connected;
    rep.check("all_fibers_connected", connected);
    const auto& L = audit.L_candidates;
    rep.check("L_candidates_are_endpoints",
              L.size() == 2 && std::abs(L[0] + 1) < 1e-6 && std::abs(L[1] - 1) < 1e-6, {{"L", L}});
  }

  json sigma = json::array();
  for (const auto& r : classify_surface(s)) {
    if (!(r.label.kind == PointKind::special_hyperbolic && r.label.k == 1)) continue;
    auto sr = sigma_components(s, r.location, cfg.density, cfg.seed);
    sigma.push_back({{"point", std::vector<double>(r.location.data(), r.location.data() + r.location.size())},
                     {"components", sr.components},
                     {"closures_sphere_like", sr.closures_sphere_like}});
    rep.check("sigma_two_components", sr.components == 2, {{"components", sr.components}});
  }
  rep.results()["sigma"] = sigma;

  if (!cfg.out.empty()) {
    std::vector<SliceCloud> cs;
    std::vector<std::vector<int>> ls;
    for (auto& c : clouds) {
      cs.push_back(c.cloud);
      ls.push_back(c.labels);
    }
    auto f = open_output(cfg, "orbits_" + surface_tag(surface) + "_slices.csv");
    write_slice_csv(f, s, cs, ls);
  }
  return rep;
}

Report run_plateau(const RunConfig& cfg) {
  Report rep(cfg);
  const double tol = cfg.tol.value_or(1e-4);
  auto fam = unit_ball_family();
  auto base = mixed_volume(fam);
  const double oracle = 8 * kPi * kPi / 15;
  const double rel = std::abs(base.volume - oracle) / oracle;
  rep.check("mixed_volume_matches_8pi2_over_15", rel <= tol, {{"volume", base.volume}, {"relative_error", rel}});

  Perturbation zero;
  const double v0 = mixed_volume(competitor_perturb(fam, zero)).volume;
  rep.check("amplitude_zero_is_identity", v0 == base.volume, {{"volume", v0}});

  std::vector<double> amps = cfg.amplitudes;
  std::sort(amps.begin(), amps.end());
  json rows = json::array({{{"amplitude", 0.0}, {"volume", base.volume}, {"energy", base.energy}}});
  bool increasing = true, energy_ok = true, immersed = true;
  double prev = base.volume;
  for (double a : amps) {
    Perturbation pert;
    pert.amplitude = a;
    try {
      auto m = mixed_volume(competitor_perturb(fam, pert));
      rows.push_back({{"amplitude", a}, {"volume", m.volume}, {"energy", m.energy}});
      increasing &= m.volume > prev;
      energy_ok &= std::abs(m.energy - base.energy) <= 1e-6 * base.energy;
      prev = m.volume;
      if (!cfg.out.empty()) {
        std::ostringstream name;
        name << "plateau_leaves_a" << a << ".csv";
        auto f = open_output(cfg, name.str());
        write_leaf_table(f, m);
      }
    } catch (const ImmersionLost& e) {
      immersed = false;
      rows.push_back({{"amplitude", a}, {"error", e.what()}});
    }
  }
  rep.results()["mixed_volume"] = rows;
  rep.check("perturbations_stay_immersed", immersed);
  rep.check("volumes_strictly_increasing", increasing && immersed);
  rep.check("omega_energy_constant", energy_ok && immersed);
  if (!cfg.out.empty()) {
    auto f = open_output(cfg, "plateau_leaves.csv");
    write_leaf_table(f, base);
  }

  // Stokes on a complex disc and a complex 2-ball.
  std::mt19937_64 rng(cfg.seed);
  const std::vector<int> panels = {1, 2, 4, 8};
  Eigen::MatrixXcd disc_frame = Eigen::MatrixXcd::Zero(2, 1);
  disc_frame(0, 0) = 1.0;
  Eigen::MatrixXcd ball_frame = Eigen::MatrixXcd::Zero(3, 2);
  ball_frame(0, 0) = 1.0;
  ball_frame(1, 1) = 1.0;
  const LeafChart disc = complex_ball_chart(Eigen::VectorXd::Zero(4), 1.0, disc_frame);
  const LeafChart ball = complex_ball_chart(Eigen::VectorXd::Zero(6), 1.0, ball_frame);
  json stokes = json::array();
  for (const auto& [name, chart, n] : {std::tuple{"disc", disc, 2}, std::tuple{"ball", ball, 3}}) {
    double worst = 0.0, min_order = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10; ++t) {
      auto alpha = random_poly_form(n, chart.param_dim() - 1, 3, rng);
      auto conv = stokes_convergence(chart, alpha, 3, panels);
      worst = std::max(worst, conv.residuals.back());
      min_order = std::min(min_order, conv.observed_order);
      stokes.push_back({{"leaf", name}, {"residuals", conv.residuals}, {"observed_order", conv.observed_order}});
    }
    rep.check(std::string("stokes_") + name + "_residual", worst < 1e-5, {{"max_residual", worst}});
    rep.check(std::string("stokes_") + name + "_order", min_order >= 2.0,
              {{"min_order", std::isfinite(min_order) ? json(min_order) : json("inf")}});
  }
  rep.results()["stokes"] = stokes;
  return rep;
}

Report run_moment(const RunConfig& cfg) {
  Report rep(cfg);
  const double tol = cfg.tol.value_or(1e-10);
  const Complex I(0, 1);
  auto v2 = [](Complex a, Complex b) {
    Eigen::VectorXcd z(2);
    z << a, b;
    return z;
  };

  // Bounding curves: the circle (e^{it}, 0) and (e^{it}, e^{2it}) on w = z^2.
  json suite = json::array();
  double worst = 0.0;
  auto circle = CurveModel::trigonometric(2, {{1, v2(1, 0)}});
  auto parabola = CurveModel::trigonometric(2, {{1, v2(1, 0)}, {2, v2(0, 1)}});
  std::vector<std::pair<std::string, HolomorphicOneForm>> circle_forms = {{"z2 dz1", HolomorphicOneForm::parse(2, "z2", 1)}};
  for (int k = 0; k < 8; ++k)
    circle_forms.emplace_back("z1^" + std::to_string(k) + " dz1", HolomorphicOneForm::parse(2, "z1^" + std::to_string(k), 1));
  for (const auto& [name, f] : circle_forms) {
    const Complex v = moment_integral(circle, f);
    worst = std::max(worst, std::abs(v));
    suite.push_back({{"curve", "circle"}, {"form", name}, {"value", complex_json(v)}});
  }
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int j : {1, 2}) {
        const std::string coef = "z1^" + std::to_string(a) + "*z2^" + std::to_string(b);
        const Complex v = moment_integral(parabola, HolomorphicOneForm::parse(2, coef, j));
        worst = std::max(worst, std::abs(v));
        suite.push_back({{"curve", "parabola"}, {"form", coef + " dz" + std::to_string(j)}, {"value", complex_json(v)}});
      }
  rep.results()["bounding"] = suite;
  rep.check("bounding_moments_vanish", worst < tol, {{"max_abs", worst}});

  auto nb = CurveModel::trigonometric(2, {{1, v2(1, 0)}, {-1, v2(0, 1)}});
  const Complex witness = moment_integral(nb, HolomorphicOneForm::parse(2, "z2", 1));
  rep.results()["non_bounding"] = {{"curve", "(e^it, e^-it)"}, {"form", "z2 dz1"}, {"value", complex_json(witness)}};
  rep.check("non_bounding_witness_is_2pi_i", std::abs(witness - 2 * kPi * I) < 1e-8,
            {{"error", std::abs(witness - 2 * kPi * I)}});

  // G(lambda) on the boundary of {z2 = zeta, z3 = c}.
  const Complex c(0.3, -0.2);
  auto disc = disc_boundary(c);
  NuLambdaFrame frame;
  frame.xi1 = Complex(0.1, 0.1);
  frame.eta1 = Complex(1.5, 0.5);
  frame.eta1p = Complex(0.2, -0.1);
  std::vector<GRow> grows;
  json sweep = json::array();
  double g_err = 0.0;
  int compared = 0;
  for (int k = 0; k < 20; ++k) {
    frame.lambda = -1.0 + 2.0 * k / 19;
    const Complex G = cauchy_G(disc, frame);
    const Complex z0 = (c - frame.xi_lambda1()) / frame.eta1;
    json row = {{"lambda", frame.lambda}, {"G", complex_json(G)}};
    if (std::abs(std::abs(z0) - 1) > 0.1) {
      const Complex oracle = std::abs(z0) < 1 ? z0 : Complex(0);
      g_err = std::max(g_err, std::abs(G - oracle));
      row["oracle"] = complex_json(oracle);
      ++compared;
    }
    grows.push_back({frame.lambda, G});
    sweep.push_back(row);
  }
  rep.results()["G_sweep"] = sweep;
  rep.check("cauchy_G_matches_residues", g_err < 1e-8 && compared == 20, {{"max_error", g_err}, {"compared", compared}});
  if (!cfg.out.empty()) {
    auto f = open_output(cfg, "moment_G.csv");
    write_G_table(f, grows);
  }

  GridFunction sol = [](Complex xi, Complex eta) { return xi / (1.0 - eta); };
  const double r = shockwave_residual(sol, StencilGrid::box(-0.5, 1.0, -1.0, 1.0, 1e-3));
  auto conv = shockwave_convergence(sol, -0.5, 1.0, -1.0, 1.0, {0.04, 0.02, 0.01, 0.005});
  rep.results()["shockwave"] = {{"f", "xi/(1-eta)"}, {"h", 1e-3},      {"residual", r},
                                {"h_sequence", conv.h}, {"residuals", conv.residuals}, {"observed_order", conv.observed_order}};
  rep.check("shockwave_residual", r < 1e-6, {{"residual", r}});
  rep.check("shockwave_second_order", conv.observed_order >= 1.8 && conv.observed_order <= 2.2,
            {{"observed_order", conv.observed_order}});

  // Diagnostic only: the decomposition of D^2 G for the disc.
  NuLambdaFrame base;
  base.lambda = 0.5;
  base.eta1p = Complex(0.3, 0.1);
  auto g = StencilGrid::box(0.0, 0.2, 1.5, 0.2, 0.02);
  auto probe = decomposition_probe(sample_G(disc_boundary(0.3), base, g), g,
                                   {[](Complex xi, Complex eta) { return (0.3 - xi) / eta; }});
  rep.results()["decomposition_probe"] = {{"decomposition_residual", probe.decomposition_residual},
                                          {"candidate_shock_residuals", probe.candidate_shock_residuals},
                                          {"condition_estimate", probe.condition_estimate},
                                          {"reliable", probe.reliable}};
  return rep;
}

Report run_demo(const RunConfig& cfg) {
  Report rep(cfg);
  rep.absorb("wirtinger", run_wirtinger(with(cfg, "wirtinger")));
  for (const char* s : {"horned_sphere_731", "torus_742", "elliptic_sphere_721"})
    rep.absorb(std::string("classify_") + s, run_classify(with(cfg, "classify", s)));
  for (const char* s : {"horned_sphere_731", "elliptic_sphere_721"})
    rep.absorb(std::string("orbits_") + s, run_orbits(with(cfg, "orbits", s)));
  rep.absorb("plateau", run_plateau(with(cfg, "plateau")));
  rep.absorb("moment", run_moment(with(cfg, "moment")));
  return rep;
}

Report run(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.command == "wirtinger") return run_wirtinger(cfg);
  if (cfg.command == "classify") return run_classify(cfg);
  if (cfg.command == "orbits") return run_orbits(cfg);
  if (cfg.command == "plateau") return run_plateau(cfg);
  if (cfg.command == "moment") return run_moment(cfg);
  return run_demo(cfg);
}

}  // namespace plab::app
