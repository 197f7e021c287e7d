#include "plab/surfaces.hpp"

#include <algorithm>
#include <cmath>

#include "plab/multivector.hpp"

namespace plab {

ImplicitFunction ImplicitFunction::from_polynomial(const RealPolynomial& p, std::string description) {
  std::vector<RealPolynomial> grad;
  for (int k = 0; k < p.num_vars(); ++k) grad.push_back(p.derivative(k));
  ImplicitFunction f;
  f.value = [p](const Eigen::VectorXd& x) { return p(std::span<const double>(x.data(), x.size())); };
  f.gradient = [grad](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) g(k) = grad[k](std::span<const double>(x.data(), x.size()));
    return g;
  };
  f.description = std::move(description);
  return f;
}

std::string to_string(BuiltinSurface id) {
  switch (id) {
    case BuiltinSurface::elliptic_sphere_721:
      return "elliptic_sphere_721";
    case BuiltinSurface::horned_sphere_731:
      return "horned_sphere_731";
    case BuiltinSurface::torus_742:
      return "torus_742";
  }
  return "unknown";
}

std::optional<BuiltinSurface> builtin_from_string(const std::string& name) {
  for (auto id : {BuiltinSurface::elliptic_sphere_721, BuiltinSurface::horned_sphere_731, BuiltinSurface::torus_742})
    if (to_string(id) == name) return id;
  return std::nullopt;
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  const double da = a / (s * s);
  const double db = -b / ((1.0 - s) * (1.0 - s));
  return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

Eigen::VectorXd SurfaceModel::residual(const Eigen::VectorXd& x) const {
  Eigen::VectorXd r(equations.size());
  for (std::size_t k = 0; k < equations.size(); ++k) r(static_cast<Eigen::Index>(k)) = equations[k].value(x);
  return r;
}

Eigen::MatrixXd SurfaceModel::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd j(equations.size(), dim());
  for (std::size_t k = 0; k < equations.size(); ++k)
    j.row(static_cast<Eigen::Index>(k)) = equations[k].gradient(x).transpose();
  return j;
}

bool SurfaceModel::in_box(const Eigen::VectorXd& x, double margin) const {
  for (int i = 0; i < dim(); ++i)
    if (x(i) < lower(i) - margin || x(i) > upper(i) + margin) return false;
  return true;
}

bool SurfaceModel::contains(const Eigen::VectorXd& x, double margin) const {
  return in_box(x, margin) && (!domain || domain(x));
}

namespace {

// Quartic-plus-quadratic profile shared by the horned sphere and the torus:
// G = x1^4 + y1^4 + x2^4 + y2^4 + 4 x1^2 - 2 y1^2 + x2^2 + y2^2.
double horn_profile(const Eigen::VectorXd& x) {
  const double x1 = x(0), y1 = x(1), x2 = x(2), y2 = x(3);
  return std::pow(x1, 4) + std::pow(y1, 4) + std::pow(x2, 4) + std::pow(y2, 4) + 4 * x1 * x1 - 2 * y1 * y1 +
         x2 * x2 + y2 * y2;
}

Eigen::Vector4d horn_profile_gradient(const Eigen::VectorXd& x) {
  const double x1 = x(0), y1 = x(1), x2 = x(2), y2 = x(3);
  return {4 * x1 * x1 * x1 + 8 * x1, 4 * y1 * y1 * y1 - 4 * y1, 4 * x2 * x2 * x2 + 2 * x2,
          4 * y2 * y2 * y2 + 2 * y2};
}

// Horned sphere in (u, t) with u = (x1, y1, x2, y2) and t = x3:
//   lower branch  G(u) - t = 0                          (t <= 0)
//   upper branch  t (|u|^2 + t^2 - 1) + (1 - t) G(u) = 0  (t >= 0)
// The upper branch equals G - t + t (|u|^2 + t^2 - G), so the blend
//   F = G - t + beta(t) t (|u|^2 + t^2 - G)
// with a smooth step beta of width delta around t = 0 reproduces both
// branches outside the band and keeps the 2-jet at the origin.
struct HornBlend {
  double delta;

  double beta(double t) const {
    if (delta <= 0.0) return t >= 0.0 ? 1.0 : 0.0;
    return smooth_step((t + 0.5 * delta) / delta);
  }
  double beta_prime(double t) const {
    if (delta <= 0.0) return 0.0;
    return smooth_step_derivative((t + 0.5 * delta) / delta) / delta;
  }

  double value(const Eigen::VectorXd& u, double t) const {
    const double g = horn_profile(u);
    const double r2 = u.head<4>().squaredNorm();
    return g - t + beta(t) * t * (r2 + t * t - g);
  }

  // Gradient with respect to (u, t).
  Eigen::Matrix<double, 5, 1> gradient(const Eigen::VectorXd& u, double t) const {
    const double g = horn_profile(u);
    const double r2 = u.head<4>().squaredNorm();
    const double b = beta(t);
    Eigen::Matrix<double, 5, 1> out;
    out.head<4>() = (1.0 - b * t) * horn_profile_gradient(u) + 2.0 * b * t * u.head<4>();
    out(4) = -1.0 + (beta_prime(t) * t + b) * (r2 + t * t - g) + 2.0 * b * t * t;
    return out;
  }
};

// Smooth even replacement of |s|: exact outside (-delta, delta).
struct FoldBlend {
  double delta;

  double value(double s) const {
    const double a = std::abs(s);
    if (delta <= 0.0) return a;
    const double b = smooth_step((a - 0.5 * delta) / (0.5 * delta));
    return b * a + (1.0 - b) * (s * s + delta * delta) / (2.0 * delta);
  }
  double derivative(double s) const {
    const double a = std::abs(s);
    const double sg = s >= 0 ? 1.0 : -1.0;
    if (delta <= 0.0) return sg;
    const double b = smooth_step((a - 0.5 * delta) / (0.5 * delta));
    const double db = smooth_step_derivative((a - 0.5 * delta) / (0.5 * delta)) / (0.5 * delta);
    const double quad = (s * s + delta * delta) / (2.0 * delta);
    return db * sg * (a - quad) + b * sg + (1.0 - b) * s / delta;
  }
};

ImplicitFunction y3_equation() {
  ImplicitFunction f;
  f.value = [](const Eigen::VectorXd& x) { return x(5); };
  f.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    g(5) = 1.0;
    return g;
  };
  f.description = "y3";
  return f;
}

Eigen::VectorXd box(std::initializer_list<double> v) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) b(i++) = d;
  return b;
}

}  // namespace

SurfaceModel make_builtin(BuiltinSurface id, double smoothing_width) {
  if (smoothing_width < 0) throw InvalidParameter("make_builtin: smoothing width must be >= 0");
  SurfaceModel s;
  s.n = 3;
  s.builtin_id = id;
  s.smoothing_width = smoothing_width;
  s.level_axis = 4;
  s.name = to_string(id);
  s.equations.push_back(y3_equation());
  constexpr double kTop = 1.0 + 1e-7;

  switch (id) {
    case BuiltinSurface::elliptic_sphere_721: {
      ImplicitFunction f;
      f.value = [](const Eigen::VectorXd& x) { return x.head<5>().squaredNorm() - 1.0; };
      f.gradient = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = 2.0 * x;
        g(5) = 0.0;
        return g;
      };
      f.description = "|z1|^2 + |z2|^2 + x3^2 - 1";
      s.equations.push_back(f);
      s.lower = box({-1.1, -1.1, -1.1, -1.1, -1.1, -0.5});
      s.upper = box({1.1, 1.1, 1.1, 1.1, 1.1, 0.5});
      break;
    }
    case BuiltinSurface::horned_sphere_731: {
      HornBlend hb{smoothing_width};
      ImplicitFunction f;
      f.value = [hb](const Eigen::VectorXd& x) { return hb.value(x, x(4)); };
      f.gradient = [hb](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(6);
        g.head<5>() = hb.gradient(x, x(4));
        return g;
      };
      f.description = "horned sphere (blended at x3 = 0)";
      s.equations.push_back(f);
      s.lower = box({-1.6, -1.6, -1.6, -1.6, -1.1, -0.5});
      s.upper = box({1.6, 1.6, 1.6, 1.6, kTop, 0.5});
      // The upper branch has a second sheet escaping to infinity for x3 > 1.
      s.domain = [](const Eigen::VectorXd& x) { return x(4) <= kTop; };
      break;
    }
    case BuiltinSurface::torus_742: {
      HornBlend hb{smoothing_width};
      FoldBlend fb{smoothing_width};
      // Mirror of the horned piece in x3 >= -1/2 across x3 = -1/2, the fold
      // smoothed by replacing |x3 + 1/2| with a smooth even function.
      ImplicitFunction f;
      f.value = [hb, fb](const Eigen::VectorXd& x) { return hb.value(x, -0.5 + fb.value(x(4) + 0.5)); };
      f.gradient = [hb, fb](const Eigen::VectorXd& x) {
        const double s = x(4) + 0.5;
        auto gh = hb.gradient(x, -0.5 + fb.value(s));
        Eigen::VectorXd g = Eigen::VectorXd::Zero(6);
        g.head<4>() = gh.head<4>();
        g(4) = gh(4) * fb.derivative(s);
        return g;
      };
      f.description = "horned piece glued with its mirror across x3 = -1/2";
      s.equations.push_back(f);
      s.lower = box({-1.6, -1.6, -1.6, -1.6, -2.0 - 1e-7, -0.5});
      s.upper = box({1.6, 1.6, 1.6, 1.6, kTop, 0.5});
      s.domain = [](const Eigen::VectorXd& x) { return x(4) <= kTop && x(4) >= -2.0 - 1e-7; };
      break;
    }
  }
  return s;
}

namespace {

// Real polynomials of z^T a z + z^T b zbar + zbar^T c zbar in (x_k, y_k), k < m,
// embedded in a space of `nvars` real variables.
std::pair<RealPolynomial, RealPolynomial> quadric_polynomials(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                              const Eigen::MatrixXcd& c, int nvars) {
  const int m = static_cast<int>(a.rows());
  ComplexPolynomial q(nvars);
  std::vector<ComplexPolynomial> z, zb;
  for (int k = 0; k < m; ++k) {
    auto x = ComplexPolynomial::variable(nvars, 2 * k);
    auto y = ComplexPolynomial::variable(nvars, 2 * k + 1);
    z.push_back(x + Complex(0, 1) * y);
    zb.push_back(x - Complex(0, 1) * y);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      q += a(i, j) * (z[i] * z[j]);
      q += b(i, j) * (z[i] * zb[j]);
      q += c(i, j) * (zb[i] * zb[j]);
    }
  RealPolynomial re(nvars), im(nvars);
  for (const auto& [e, v] : q.terms()) {
    re.add_term(e, v.real());
    im.add_term(e, v.imag());
  }
  return {re, im};
}

}  // namespace

SurfaceModel make_graph(int n, const RealPolynomial& phi_re, const RealPolynomial& phi_im, double half) {
  if (n < 2) throw InvalidParameter("make_graph: need n >= 2");
  const int d = 2 * n;
  if (phi_re.num_vars() != d || phi_im.num_vars() != d)
    throw DimensionMismatch("make_graph: phi must be a polynomial in all 2n real coordinates");
  SurfaceModel s;
  s.n = n;
  s.representation = SurfaceModel::Representation::graph;
  s.equations.push_back(ImplicitFunction::from_polynomial(RealPolynomial::variable(d, d - 2) - phi_re, "Re(w - phi)"));
  s.equations.push_back(ImplicitFunction::from_polynomial(RealPolynomial::variable(d, d - 1) - phi_im, "Im(w - phi)"));
  s.lower = Eigen::VectorXd::Constant(d, -half);
  s.upper = Eigen::VectorXd::Constant(d, half);
  // w is unbounded over the box of z; the box only limits z.
  s.lower.tail<2>().setConstant(-1e6);
  s.upper.tail<2>().setConstant(1e6);
  s.level_axis = d - 2;
  s.name = "graph";
  return s;
}

SurfaceModel make_quadric(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& c,
                          double half) {
  const int m = static_cast<int>(a.rows());
  if (b.rows() != m || c.rows() != m || a.cols() != m || b.cols() != m || c.cols() != m)
    throw DimensionMismatch("make_quadric: matrix sizes differ");
  auto [re, im] = quadric_polynomials(a, b, c, 2 * (m + 1));
  SurfaceModel s = make_graph(m + 1, re, im, half);
  s.name = "quadric";
  return s;
}

SurfaceModel make_polynomial_surface(int n, const std::vector<std::string>& equations, Eigen::VectorXd lower,
                                     Eigen::VectorXd upper, int level_axis) {
  if (n < 2) throw InvalidParameter("polynomial surface: need n >= 2");
  if (equations.size() != 2) throw InvalidParameter("polynomial surface: need exactly two real equations");
  if (lower.size() != 2 * n || upper.size() != 2 * n) throw DimensionMismatch("polynomial surface: box size != 2n");
  auto names = real_coordinate_names(n);
  SurfaceModel s;
  s.n = n;
  for (const auto& text : equations)
    s.equations.push_back(ImplicitFunction::from_polynomial(parse_real_polynomial(text, names), text));
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  s.level_axis = level_axis;
  s.name = "polynomial";
  return s;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& u) {
  const Eigen::Index n = u.rows(), m = u.cols();
  Eigen::MatrixXd r(2 * n, 2 * m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Complex v = u(i, j);
      r(2 * i, 2 * j) = v.real();
      r(2 * i, 2 * j + 1) = -v.imag();
      r(2 * i + 1, 2 * j) = v.imag();
      r(2 * i + 1, 2 * j + 1) = v.real();
    }
  return r;
}

Eigen::VectorXd realify(const Eigen::VectorXcd& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x(2 * i) = z(i).real();
    x(2 * i + 1) = z(i).imag();
  }
  return x;
}

Eigen::VectorXcd complexify(const Eigen::VectorXd& x) {
  Eigen::VectorXcd z(x.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = {x(2 * i), x(2 * i + 1)};
  return z;
}

SurfaceModel apply_unitary(const SurfaceModel& s, const Eigen::MatrixXcd& u) {
  if (u.rows() != s.n || u.cols() != s.n) throw DimensionMismatch("apply_unitary: matrix size != n");
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(s.n, s.n)).norm() > 1e-10)
    throw InvalidParameter("apply_unitary: matrix is not unitary");
  const Eigen::MatrixXd r = realify(u);
  const Eigen::MatrixXd rt = r.transpose();
  SurfaceModel out = s;
  out.equations.clear();
  for (const auto& eq : s.equations) {
    ImplicitFunction f;
    f.value = [eq, rt](const Eigen::VectorXd& x) { return eq.value(rt * x); };
    f.gradient = [eq, r, rt](const Eigen::VectorXd& x) { return Eigen::VectorXd(r * eq.gradient(rt * x)); };
    f.description = eq.description;
    out.equations.push_back(f);
  }
  // Rotated box: bound by the farthest corner.
  const double radius = std::max(s.lower.cwiseAbs().norm(), s.upper.cwiseAbs().norm());
  out.lower = Eigen::VectorXd::Constant(s.dim(), -radius);
  out.upper = Eigen::VectorXd::Constant(s.dim(), radius);
  auto inner = s;
  out.domain = [inner, rt](const Eigen::VectorXd& x) { return inner.contains(rt * x); };
  out.level_axis = -1;
  out.name = s.name + " (unitary image)";
  return out;
}

std::optional<Eigen::VectorXd> project_to_surface(const SurfaceModel& s, const Eigen::VectorXd& x0,
                                                  const std::vector<bool>& frozen, double tol, int max_iter) {
  Eigen::VectorXd x = x0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd r = s.residual(x);
    if (!r.allFinite()) return std::nullopt;
    if (r.norm() < tol) return x;
    Eigen::MatrixXd j = s.jacobian(x);
    for (std::size_t k = 0; k < frozen.size(); ++k)
      if (frozen[k]) j.col(static_cast<Eigen::Index>(k)).setZero();
    // Minimum-norm Gauss-Newton step.
    Eigen::MatrixXd jjt = j * j.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(jjt);
    if (ldlt.info() != Eigen::Success || std::abs(jjt.determinant()) < 1e-300) return std::nullopt;
    Eigen::VectorXd dx = -j.transpose() * ldlt.solve(r);
    const double len = dx.norm();
    if (!std::isfinite(len)) return std::nullopt;
    if (len > 0.25) dx *= 0.25 / len;
    x += dx;
  }
  if (s.residual(x).norm() < tol * 10) return x;
  return std::nullopt;
}

Eigen::MatrixXd tangent_basis(const SurfaceModel& s, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd j = s.jacobian(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) < 1e-10 * sv(0))
    throw DegenerateTangent("tangent space is degenerate (rank-deficient Jacobian)");
  return svd.matrixV().rightCols(s.dim() - j.rows());
}

double cr_defect(const SurfaceModel& s, const Eigen::VectorXd& x, double on_surface_tol) {
  if (x.size() != s.dim()) throw DimensionMismatch("cr_defect: point dimension != 2n");
  if (s.residual(x).norm() > on_surface_tol) throw NotOnSurface("cr_defect: point is not on the surface");
  return j_invariance_defect(tangent_basis(s, x));
}

namespace {

// Complex points solve F = 0 together with J grad F_1 in span(grad F_1, grad F_2).
// Unknowns: the point and the two span coefficients.
Eigen::VectorXd complex_point_system(const SurfaceModel& s, const Eigen::MatrixXd& jstruct, const Eigen::VectorXd& v) {
  const int d = s.dim();
  Eigen::VectorXd x = v.head(d);
  Eigen::VectorXd out(d + 2);
  out.head(2) = s.residual(x);
  Eigen::VectorXd g1 = s.equations[0].gradient(x);
  Eigen::VectorXd g2 = s.equations[1].gradient(x);
  out.tail(d) = jstruct * g1 - v(d) * g1 - v(d + 1) * g2;
  return out;
}

Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& v, const Eigen::VectorXd& fv) {
  Eigen::MatrixXd j(fv.size(), v.size());
  Eigen::VectorXd w = v;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double h = 1e-7 * std::max(1.0, std::abs(v(k)));
    w(k) = v(k) + h;
    j.col(k) = (f(w) - fv) / h;
    w(k) = v(k);
  }
  return j;
}

struct LmResult {
  Eigen::VectorXd v;
  double residual;
  double conditioning;
};

std::optional<LmResult> solve_complex_point(const SurfaceModel& s, const Eigen::MatrixXd& jstruct,
                                            const Eigen::VectorXd& x0) {
  const int d = s.dim();
  Eigen::VectorXd v(d + 2);
  v.head(d) = x0;
  {
    Eigen::MatrixXd span(d, 2);
    span.col(0) = s.equations[0].gradient(x0);
    span.col(1) = s.equations[1].gradient(x0);
    v.tail(2) = span.colPivHouseholderQr().solve(jstruct * span.col(0));
  }
  auto f = [&](const Eigen::VectorXd& w) { return complex_point_system(s, jstruct, w); };
  Eigen::VectorXd r = f(v);
  double mu = 1e-3;
  for (int it = 0; it < 300; ++it) {
    if (!r.allFinite()) return std::nullopt;
    if (r.norm() < 1e-13) break;
    Eigen::MatrixXd j = numeric_jacobian(f, v, r);
    Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::VectorXd jtr = j.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += mu * (jtj.diagonal().array() + 1e-12).matrix();
      Eigen::VectorXd step = -a.ldlt().solve(jtr);
      if (step.norm() > 0.5) step *= 0.5 / step.norm();
      Eigen::VectorXd cand = v + step;
      Eigen::VectorXd rc = f(cand);
      if (rc.allFinite() && rc.norm() < r.norm()) {
        v = cand;
        r = rc;
        mu = std::max(mu / 3.0, 1e-12);
        improved = true;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) break;
    if (!s.in_box(v.head(d), 0.5)) return std::nullopt;
  }
  if (r.norm() > 1e-10) return std::nullopt;
  Eigen::MatrixXd j = numeric_jacobian(f, v, r);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& sv = svd.singularValues();
  return LmResult{v, r.norm(), sv(sv.size() - 1) / sv(0)};
}

}  // namespace

ComplexPointSearch find_complex_points(const SurfaceModel& s, int grid_density, const ComplexPointOptions& opts) {
  if (grid_density < 2) throw InvalidParameter("find_complex_points: grid density must be >= 2");
  if (s.equations.size() != 2) throw InvalidParameter("find_complex_points: surface must have two equations");
  const int d = s.dim();
  const Eigen::MatrixXd jstruct = complex_structure(s.n);
  ComplexPointSearch out;

  // Box extents for seeding: unbounded (graph) directions are seeded at 0.
  Eigen::VectorXd lo = s.lower, hi = s.upper;
  for (int i = 0; i < d; ++i)
    if (hi(i) - lo(i) > 1e3) lo(i) = hi(i) = 0.0;

  std::vector<int> counter(d, 0);
  long total = 1;
  for (int i = 0; i < d; ++i) total *= (lo(i) == hi(i)) ? 1 : grid_density;

  auto merge = [&](std::vector<Eigen::VectorXd>& list, const Eigen::VectorXd& p) {
    for (const auto& q : list)
      if ((q - p).norm() < opts.cluster_radius) return;
    list.push_back(p);
  };

  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd seed(d);
    long rem = idx;
    for (int i = 0; i < d; ++i) {
      if (lo(i) == hi(i)) {
        seed(i) = lo(i);
        continue;
      }
      const int k = static_cast<int>(rem % grid_density);
      rem /= grid_density;
      seed(i) = lo(i) + (hi(i) - lo(i)) * k / (grid_density - 1);
    }
    ++out.seeds;
    auto on = project_to_surface(s, seed);
    if (!on || !s.contains(*on, 1e-6)) continue;
    auto sol = solve_complex_point(s, jstruct, *on);
    if (!sol) continue;
    Eigen::VectorXd x = sol->v.head(d);
    if (!s.contains(x, 1e-6)) continue;
    double defect;
    try {
      defect = cr_defect(s, x);
    } catch (const Error&) {
      continue;
    }
    if (defect > opts.defect_tol) continue;
    if (sol->conditioning < 1e-8)
      merge(out.non_isolated, x);
    else
      merge(out.points, x);
  }
  return out;
}

}  // namespace plab
