#include "plab/moment.hpp"

#include "plab/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace plab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxPeriodicNodes = 1 << 16;

Complex eval(const ComplexPolynomial& p, const Eigen::VectorXcd& z) {
  return p(std::span<const Complex>(z.data(), static_cast<std::size_t>(z.size())));
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Periodic trapezoid sum of f over every loop, doubled until stable.
template <typename F>
Complex periodic_integral(const CurveModel& c, int nodes, F&& integrand) {
  if (nodes < 1) throw InvalidParameter("periodic rule: nodes must be positive");
  auto pass = [&](int m) {
    Complex s = 0.0;
    for (const auto& loop : c.loops())
      for (int k = 0; k < m; ++k) {
        const double t = kTwoPi * k / m;
        s += integrand(loop.point(t), loop.tangent(t));
      }
    return s * (kTwoPi / m);
  };
  Complex prev = pass(nodes);
  for (int m = 2 * nodes; m <= kMaxPeriodicNodes; m *= 2) {
    Complex cur = pass(m);
    const double scale = std::max(1.0, std::abs(cur));
    if (std::abs(cur - prev) <= 1e-13 * scale) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

CurveModel::CurveModel(int n, std::vector<CurveLoop> loops) : n_(n), loops_(std::move(loops)) {
  if (n < 1) throw InvalidParameter("curve: n must be positive");
  if (loops_.empty()) throw InvalidParameter("curve: no loops");
  for (const auto& l : loops_) {
    if (!l.point || !l.tangent) throw InvalidParameter("curve: loop needs point and tangent");
    Eigen::VectorXcd a = l.point(0.0), b = l.point(kTwoPi);
    if (a.size() != n || b.size() != n) throw DimensionMismatch("curve: loop has wrong dimension");
    const double gap = (a - b).norm();
    if (gap > kClosureTol * std::max(1.0, a.norm())) throw CurveNotClosed("curve: endpoints differ by " + std::to_string(gap));
    // Immersion check on a coarse sweep.
    for (int k = 0; k < 64; ++k)
      if (l.tangent(kTwoPi * k / 64).norm() == 0.0) throw DegenerateTangent("curve: vanishing tangent");
  }
}

CurveModel CurveModel::reparametrized(std::function<double(double)> s, std::function<double(double)> ds) const {
  std::vector<CurveLoop> out;
  for (const auto& l : loops_)
    out.push_back({[l, s](double t) { return l.point(s(t)); },
                   [l, s, ds](double t) -> Eigen::VectorXcd { return l.tangent(s(t)) * ds(t); }});
  return CurveModel(n_, std::move(out));
}

CurveModel CurveModel::trigonometric(int n, const std::vector<std::pair<int, Eigen::VectorXcd>>& modes) {
  for (const auto& [k, a] : modes)
    if (a.size() != n) throw DimensionMismatch("trigonometric curve: coefficient of wrong size");
  CurveLoop l;
  l.point = [n, modes](double t) {
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
    for (const auto& [k, a] : modes) z += a * std::polar(1.0, k * t);
    return z;
  };
  l.tangent = [n, modes](double t) {
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
    for (const auto& [k, a] : modes) z += a * (Complex(0, k) * std::polar(1.0, k * t));
    return z;
  };
  return CurveModel(n, {l});
}

std::vector<std::string> complex_coordinate_names(int n) {
  std::vector<std::string> v;
  for (int j = 1; j <= n; ++j) v.push_back("z" + std::to_string(j));
  return v;
}

HolomorphicOneForm HolomorphicOneForm::single(int n, const ComplexPolynomial& p, int j) {
  if (j < 1 || j > n) throw InvalidParameter("holomorphic form: index out of range");
  if (p.num_vars() != n) throw DimensionMismatch("holomorphic form: coefficient arity");
  HolomorphicOneForm f{n, std::vector<ComplexPolynomial>(n, ComplexPolynomial(n))};
  f.coeffs[j - 1] = p;
  return f;
}

HolomorphicOneForm HolomorphicOneForm::exact(const ComplexPolynomial& p) {
  const int n = p.num_vars();
  HolomorphicOneForm f{n, {}};
  for (int j = 0; j < n; ++j) f.coeffs.push_back(p.derivative(j));
  return f;
}

HolomorphicOneForm HolomorphicOneForm::parse(int n, const std::string& coefficient, int j) {
  return single(n, parse_complex_polynomial(coefficient, complex_coordinate_names(n)), j);
}

Complex moment_integral(const CurveModel& c, const HolomorphicOneForm& form, int nodes) {
  if (form.n != c.n() || static_cast<int>(form.coeffs.size()) != c.n())
    throw DimensionMismatch("moment_integral: form and curve dimensions differ");
  return periodic_integral(c, nodes, [&](const Eigen::VectorXcd& z, const Eigen::VectorXcd& dz) {
    Complex s = 0.0;
    for (int j = 0; j < c.n(); ++j)
      if (!form.coeffs[j].is_zero()) s += eval(form.coeffs[j], z) * dz(j);
    return s;
  });
}

StencilGrid StencilGrid::box(Complex xi0, double lx, Complex eta0, double ly, double h) {
  if (!(h > 0) || lx <= 0 || ly <= 0) throw InvalidParameter("stencil grid: non-positive size");
  StencilGrid g;
  g.xi0 = xi0;
  g.eta0 = eta0;
  g.h = h;
  g.nxi = static_cast<int>(std::lround(lx / h)) + 1;
  g.neta = static_cast<int>(std::lround(ly / h)) + 1;
  return g;
}

Eigen::MatrixXcd sample_grid(const GridFunction& f, const StencilGrid& g) {
  Eigen::MatrixXcd s(g.nxi, g.neta);
  for (int i = 0; i < g.nxi; ++i)
    for (int j = 0; j < g.neta; ++j) s(i, j) = f(g.xi(i), g.eta(j));
  return s;
}

double shockwave_residual(const Eigen::MatrixXcd& f, double h) {
  if (f.rows() < 3 || f.cols() < 3) throw GridTooSmall("shockwave_residual: need at least 3 nodes per axis");
  if (!(h > 0)) throw InvalidParameter("shockwave_residual: spacing must be positive");
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < f.rows(); ++i)
    for (Eigen::Index j = 1; j + 1 < f.cols(); ++j) {
      const Complex fx = (f(i + 1, j) - f(i - 1, j)) / (2 * h);
      const Complex fy = (f(i, j + 1) - f(i, j - 1)) / (2 * h);
      worst = std::max(worst, std::abs(f(i, j) * fx - fy));
    }
  return worst;
}

double shockwave_residual(const GridFunction& f, const StencilGrid& g) {
  if (g.nxi < 3 || g.neta < 3) throw GridTooSmall("shockwave_residual: need at least 3 nodes per axis");
  return shockwave_residual(sample_grid(f, g), g.h);
}

ShockwaveConvergence shockwave_convergence(const GridFunction& f, Complex xi0, double lx, Complex eta0, double ly,
                                           const std::vector<double>& hs) {
  ShockwaveConvergence out;
  std::vector<double> lx_, ly_;
  for (double h : hs) {
    out.h.push_back(h);
    out.residuals.push_back(shockwave_residual(f, StencilGrid::box(xi0, lx, eta0, ly, h)));
    if (out.residuals.back() > 0) {
      lx_.push_back(std::log(h));
      ly_.push_back(std::log(out.residuals.back()));
    }
  }
  out.observed_order = lx_.size() >= 2 ? slope(lx_, ly_) : std::numeric_limits<double>::infinity();
  return out;
}

Complex NuLambdaFrame::h(const Eigen::VectorXcd& z) const { return z(2) - xi_lambda1() - eta1 * z(1); }

Complex cauchy_G(const CurveModel& gamma, const NuLambdaFrame& frame, int nodes) {
  if (gamma.n() != 3) throw DimensionMismatch("cauchy_G: curve must lie in C^3");
  double min_h = std::numeric_limits<double>::infinity();
  Complex s = periodic_integral(gamma, nodes, [&](const Eigen::VectorXcd& z, const Eigen::VectorXcd& dz) {
    const Complex hv = frame.h(z);
    min_h = std::min(min_h, std::abs(hv));
    const Complex dh = dz(2) - frame.eta1 * dz(1);
    return z(1) * dh / hv;
  });
  if (min_h < kMinDenominator) throw VanishingDenominator("cauchy_G: |h| = " + std::to_string(min_h) + " on the curve");
  return s / Complex(0, kTwoPi);
}

CurveModel disc_boundary(Complex c) {
  Eigen::VectorXcd a0(3), a1(3);
  a0 << 0.0, 0.0, c;
  a1 << 0.0, 1.0, 0.0;
  return CurveModel::trigonometric(3, {{0, a0}, {1, a1}});
}

Eigen::MatrixXcd sample_G(const CurveModel& gamma, const NuLambdaFrame& base, const StencilGrid& g) {
  return sample_grid(
      [&](Complex xi_l, Complex eta) {
        NuLambdaFrame f = base;
        f.xi1 = xi_l - f.eta1p * f.lambda;
        f.eta1 = eta;
        return cauchy_G(gamma, f);
      },
      g);
}

DecompositionReport decomposition_probe(const Eigen::MatrixXcd& G, const StencilGrid& g,
                                        const std::vector<GridFunction>& candidates) {
  if (G.rows() < 3 || G.cols() < 1) throw GridTooSmall("decomposition_probe: need at least 3 nodes along xi");
  if (G.rows() != g.nxi || G.cols() != g.neta) throw DimensionMismatch("decomposition_probe: grid and samples differ");
  const double h2 = g.h * g.h;
  auto dxx = [&](const Eigen::MatrixXcd& f) {
    Eigen::MatrixXcd d(f.rows() - 2, f.cols());
    for (Eigen::Index i = 1; i + 1 < f.rows(); ++i) d.row(i - 1) = (f.row(i + 1) - 2.0 * f.row(i) + f.row(i - 1)) / h2;
    return d;
  };
  DecompositionReport r;
  r.dxx_G = dxx(G);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(r.dxx_G.rows(), r.dxx_G.cols());
  for (const auto& f : candidates) {
    auto s = sample_grid(f, g);
    sum += dxx(s);
    r.candidate_shock_residuals.push_back(G.cols() >= 3 ? shockwave_residual(s, g.h)
                                                        : std::numeric_limits<double>::quiet_NaN());
  }
  if (!candidates.empty()) r.decomposition_residual = (r.dxx_G - sum).cwiseAbs().maxCoeff();
  const double noise = 4 * std::numeric_limits<double>::epsilon() * G.cwiseAbs().maxCoeff() / h2;
  const double signal = r.dxx_G.cwiseAbs().maxCoeff();
  r.condition_estimate = signal > 0 ? noise / signal : (noise > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.reliable = noise < 1e-6 || r.condition_estimate < 1e-3;
  return r;
}

void write_G_table(std::ostream& out, const std::vector<GRow>& rows) {
  out << "lambda,re_G,im_G\n";
  out.precision(17);
  for (const auto& r : rows) out << r.lambda << ',' << r.G.real() << ',' << r.G.imag() << '\n';
}

void write_frame_grid(std::ostream& out, const StencilGrid& g, const Eigen::MatrixXcd& G) {
  out << "re_xi,im_xi,re_eta,im_eta,re_G,im_G\n";
  out.precision(17);
  for (int i = 0; i < g.nxi; ++i)
    for (int j = 0; j < g.neta; ++j)
      out << g.xi(i).real() << ',' << g.xi(i).imag() << ',' << g.eta(j).real() << ',' << g.eta(j).imag() << ','
          << G(i, j).real() << ',' << G(i, j).imag() << '\n';
}

}  // namespace plab
