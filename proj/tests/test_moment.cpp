#include "doctest.h"

#include <numbers>
#include <random>
#include <sstream>

#include "plab/errors.hpp"
#include "plab/moment.hpp"

using namespace plab;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I(0, 1);

Eigen::VectorXcd vec(std::initializer_list<Complex> v) {
  Eigen::VectorXcd z(static_cast<Eigen::Index>(v.size()));
  int k = 0;
  for (auto c : v) z(k++) = c;
  return z;
}

CurveModel unit_circle2() { return CurveModel::trigonometric(2, {{1, vec({1, 0})}}); }

// Three closed curves in C^3: a circle, a (2,3) torus knot, and a union of
// two loops with several frequencies.
std::vector<CurveModel> test_curves() {
  std::vector<CurveModel> out;
  out.push_back(CurveModel::trigonometric(3, {{1, vec({1, 0, 0})}}));
  out.push_back(CurveModel::trigonometric(3, {{2, vec({1, 0, 0})}, {3, vec({0, 1, 0})}, {0, vec({0, 0, 0.5})}}));
  auto a = CurveModel::trigonometric(3, {{1, vec({0.5, I, 0})}, {-2, vec({0, 0.3, 1})}});
  auto b = CurveModel::trigonometric(3, {{-1, vec({1, 0, 0.2})}, {4, vec({0, 0, 0.1 * I})}, {0, vec({2, 1, 0})}});
  std::vector<CurveLoop> loops = a.loops();
  loops.push_back(b.loops().front());
  out.emplace_back(3, loops);
  return out;
}

ComplexPolynomial random_polynomial(int n, int degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> e(0, degree);
  std::normal_distribution<double> c;
  ComplexPolynomial p(n);
  for (int t = 0; t < 6; ++t) {
    std::vector<int> ex(n);
    int total = 0;
    for (auto& x : ex) {
      x = std::min(e(rng), degree - total);
      total += x;
    }
    p.add_term(ex, Complex(c(rng), c(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("curves must close") {
  CurveLoop open{[](double t) { return vec({t, 0}); }, [](double) { return vec({1, 0}); }};
  CHECK_THROWS_AS(CurveModel(2, {open}), CurveNotClosed);
  CurveLoop stalled{[](double) { return vec({1, 0}); }, [](double) { return vec({0, 0}); }};
  CHECK_THROWS_AS(CurveModel(2, {stalled}), DegenerateTangent);
  CHECK_NOTHROW(unit_circle2());
}

TEST_CASE("moment integrals on the circle") {
  auto c = unit_circle2();
  CHECK(std::abs(moment_integral(c, HolomorphicOneForm::parse(2, "z2", 1))) < 1e-10);
  for (int k = 0; k < 8; ++k)
    CHECK(std::abs(moment_integral(c, HolomorphicOneForm::parse(2, "z1^" + std::to_string(k), 1))) < 1e-10);
  // z1bar dz1 is not holomorphic, but on the circle it equals z1^{-1} dz1: the
  // moment of the non-bounding curve (e^{it}, e^{-it}) is 2 pi i.
  auto nb = CurveModel::trigonometric(2, {{1, vec({1, 0})}, {-1, vec({0, 1})}});
  CHECK(std::abs(moment_integral(nb, HolomorphicOneForm::parse(2, "z2", 1)) - 2 * kPi * I) < 1e-8);
  // Bounding curve (e^{it}, e^{2it}) on the graph w = z^2: every moment vanishes.
  auto bd = CurveModel::trigonometric(2, {{1, vec({1, 0})}, {2, vec({0, 1})}});
  for (const char* p : {"z2", "z1*z2^3", "z2^2 + 3*i*z1^5"})
    for (int j : {1, 2}) CHECK(std::abs(moment_integral(bd, HolomorphicOneForm::parse(2, p, j))) < 1e-10);
}

TEST_CASE("exact differentials integrate to zero") {
  std::mt19937_64 rng(11);
  auto curves = test_curves();
  for (int t = 0; t < 10; ++t) {
    auto p = random_polynomial(3, 5, rng);
    auto dp = HolomorphicOneForm::exact(p);
    for (const auto& c : curves) CHECK(std::abs(moment_integral(c, dp)) < 1e-10);
  }
}

TEST_CASE("moment integral is invariant under reparametrisation") {
  auto c = test_curves()[1];
  auto r = c.reparametrized([](double t) { return t + 0.4 * std::sin(t); }, [](double t) { return 1 + 0.4 * std::cos(t); });
  for (const char* p : {"z3*z1", "z2^2", "z1^3*z3"}) {
    auto f = HolomorphicOneForm::parse(3, p, 2);
    CHECK(std::abs(moment_integral(c, f) - moment_integral(r, f)) < 1e-10);
  }
}

TEST_CASE("shock-wave residual") {
  GridFunction sol = [](Complex xi, Complex eta) { return xi / (1.0 - eta); };
  auto g = StencilGrid::box(-0.5, 1.0, -1.0, 1.0, 1e-3);
  CHECK(shockwave_residual(sol, g) < 1e-6);
  CHECK(shockwave_residual([](Complex, Complex) { return Complex(2, -1); }, g) == 0.0);
  // f = xi is no solution: the residual is |xi| at the nodes.
  auto g2 = StencilGrid::box(0.5, 0.5, 0.0, 0.5, 0.05);
  CHECK(shockwave_residual([](Complex xi, Complex) { return xi; }, g2) == doctest::Approx(0.95));
  StencilGrid thin = g2;
  thin.neta = 2;
  CHECK_THROWS_AS(shockwave_residual(sol, thin), GridTooSmall);

  auto conv = shockwave_convergence(sol, -0.5, 1.0, -1.0, 1.0, {0.04, 0.02, 0.01, 0.005});
  CHECK(conv.observed_order >= 1.8);
  CHECK(conv.observed_order <= 2.2);
  // Complex base points.
  auto cc = shockwave_convergence(sol, Complex(0.1, 0.2), 0.5, Complex(-0.3, 0.4), 0.5, {0.02, 0.01, 0.005});
  CHECK(cc.observed_order >= 1.8);
  CHECK(cc.observed_order <= 2.2);
}

TEST_CASE("cauchy_G on the analytic disc") {
  const Complex c(0.3, -0.2);
  auto disc = disc_boundary(c);
  NuLambdaFrame f;
  f.xi1 = Complex(0.1, 0.1);
  f.eta1 = Complex(1.5, 0.5);
  f.eta1p = Complex(0.2, -0.1);
  for (int k = 0; k < 20; ++k) {
    f.lambda = -1.0 + 2.0 * k / 19;
    const Complex z0 = (c - f.xi1 - f.eta1p * f.lambda) / f.eta1;  // analytic zero of h on the disc
    REQUIRE(std::abs(std::abs(z0) - 1) > 0.1);
    CHECK(std::abs(cauchy_G(disc, f) - (std::abs(z0) < 1 ? z0 : 0.0)) < 1e-8);
  }
  // Zero outside the disc.
  f.lambda = 0;
  f.eta1 = 0.1;
  CHECK(std::abs(cauchy_G(disc, f)) < 1e-8);
  // eta1 = 0: h is constant on the disc.
  f.eta1 = 0;
  CHECK(std::abs(cauchy_G(disc, f)) < 1e-12);
  // Zero on the curve itself.
  f.eta1 = 1;
  f.xi1 = c - 1.0;
  CHECK_THROWS_AS(cauchy_G(disc, f), VanishingDenominator);
}

TEST_CASE("cauchy_G is invariant under reparametrisation") {
  auto disc = disc_boundary(0.4);
  auto r = disc.reparametrized([](double t) { return t - 0.3 * std::sin(2 * t) / 2; },
                               [](double t) { return 1 - 0.3 * std::cos(2 * t); });
  NuLambdaFrame f;
  f.eta1 = Complex(0.8, 0.9);
  f.lambda = 0.25;
  CHECK(std::abs(cauchy_G(disc, f) - cauchy_G(r, f)) < 1e-10);
  auto knot = CurveModel::trigonometric(3, {{1, vec({0, 1, 0})}, {2, vec({0, 0, 0.5})}, {0, vec({0, 0, 0.1})}});
  auto rk = knot.reparametrized([](double t) { return t + 0.5 * std::sin(t); }, [](double t) { return 1 + 0.5 * std::cos(t); });
  f.eta1 = 3.0;
  CHECK(std::abs(cauchy_G(knot, f) - cauchy_G(rk, f)) < 1e-10);
}

TEST_CASE("decomposition probe") {
  const Complex c = 0.3;
  auto disc = disc_boundary(c);
  NuLambdaFrame base;
  base.lambda = 0.5;
  base.eta1p = Complex(0.3, 0.1);
  auto g = StencilGrid::box(0.0, 0.2, 1.5, 0.2, 0.02);
  auto G = sample_G(disc, base, g);
  GridFunction zeta0 = [c](Complex xi, Complex eta) { return (c - xi) / eta; };
  auto rep = decomposition_probe(G, g, {zeta0});
  CHECK(rep.decomposition_residual < 1e-5);
  REQUIRE(rep.candidate_shock_residuals.size() == 1);
  CHECK(rep.candidate_shock_residuals[0] < 1e-3);
  CHECK(rep.reliable);

  auto zero = decomposition_probe(Eigen::MatrixXcd::Zero(g.nxi, g.neta), g, {[](Complex, Complex) { return Complex(0); }});
  CHECK(zero.decomposition_residual == 0.0);
  CHECK(zero.candidate_shock_residuals[0] == 0.0);
  CHECK(zero.dxx_G.cwiseAbs().maxCoeff() == 0.0);

  // (0, e^{it}, e^{-it}) bounds no holomorphic disc; with one zero of
  // 1 - xi z - eta z^2 inside the circle G is no longer affine in xi.
  auto nb = CurveModel::trigonometric(3, {{1, vec({0, 1, 0})}, {-1, vec({0, 0, 1})}});
  auto gnb = StencilGrid::box(0.9, 0.2, 0.5, 0.2, 0.02);
  auto bad = decomposition_probe(sample_G(nb, base, gnb), gnb, {zeta0});
  CHECK(bad.decomposition_residual > 1e-2);
}

TEST_CASE("csv tables") {
  std::ostringstream os;
  write_G_table(os, {{0.0, Complex(1, 2)}});
  CHECK(os.str() == "lambda,re_G,im_G\n0,1,2\n");
  std::ostringstream gs;
  auto g = StencilGrid::box(0.0, 0.1, 0.0, 0.1, 0.05);
  write_frame_grid(gs, g, Eigen::MatrixXcd::Zero(g.nxi, g.neta));
  const std::string text = gs.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 9);
}
