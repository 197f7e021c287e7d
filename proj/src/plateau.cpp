#include "plab/plateau.hpp"

#include "plab/surfaces.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace plab {

GaussRule gauss_legendre(int order) {
  if (order < 1) throw InvalidParameter("gauss_legendre: order must be >= 1");
  GaussRule g{Eigen::VectorXd(order), Eigen::VectorXd(order)};
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      // Three-term recurrence for P_order and its derivative.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes(order - 1 - i) = x;
    g.weights(order - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

namespace {

struct AxisRule {
  std::vector<double> x, w;
};

AxisRule axis_rule(double lo, double hi, const QuadratureSpec& spec, const GaussRule& g) {
  AxisRule r;
  const double h = (hi - lo) / spec.panels;
  for (int p = 0; p < spec.panels; ++p) {
    const double a = lo + p * h;
    for (int k = 0; k < g.nodes.size(); ++k) {
      r.x.push_back(a + 0.5 * h * (g.nodes(k) + 1.0));
      r.w.push_back(0.5 * h * g.weights(k));
    }
  }
  return r;
}

template <typename Visit>
void for_each_node(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const QuadratureSpec& spec, Visit&& visit) {
  if (spec.panels < 1 || spec.order < 1) throw InvalidParameter("quadrature: panels and order must be >= 1");
  const Eigen::Index d = lo.size();
  if (!spec.axis_orders.empty() && static_cast<Eigen::Index>(spec.axis_orders.size()) != d)
    throw DimensionMismatch("quadrature: one order per axis");
  std::vector<AxisRule> axes;
  for (Eigen::Index k = 0; k < d; ++k) {
    const int order = spec.axis_orders.empty() ? spec.order : spec.axis_orders[k];
    if (order < 1) throw InvalidParameter("quadrature: axis order must be >= 1");
    axes.push_back(axis_rule(lo(k), hi(k), spec, gauss_legendre(order)));
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd u(d);
  while (true) {
    double w = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      u(k) = axes[k].x[idx[k]];
      w *= axes[k].w[idx[k]];
    }
    visit(u, w);
    Eigen::Index k = 0;
    while (k < d && ++idx[k] == axes[k].x.size()) idx[k++] = 0;
    if (k == d) break;
  }
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& m, Eigen::Index k) {
  Eigen::MatrixXd out(m.rows(), m.cols() - 1);
  for (Eigen::Index j = 0, c = 0; j < m.cols(); ++j)
    if (j != k) out.col(c++) = m.col(j);
  return out;
}

Eigen::VectorXd drop_entry(const Eigen::VectorXd& v, Eigen::Index k) {
  Eigen::VectorXd out(v.size() - 1);
  for (Eigen::Index j = 0, c = 0; j < v.size(); ++j)
    if (j != k) out(c++) = v(j);
  return out;
}

Eigen::VectorXd insert_entry(const Eigen::VectorXd& v, Eigen::Index k, double value) {
  Eigen::VectorXd out(v.size() + 1);
  for (Eigen::Index j = 0, c = 0; j < out.size(); ++j) out(j) = (j == k) ? value : v(c++);
  return out;
}

}  // namespace

double integrate_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const QuadratureSpec& spec,
                     const std::function<double(const Eigen::VectorXd&)>& f) {
  if (lo.size() != hi.size()) throw DimensionMismatch("integrate_box: bounds differ in size");
  if (lo.size() == 0) return f(lo);
  double sum = 0.0;
  for_each_node(lo, hi, spec, [&](const Eigen::VectorXd& u, double w) { sum += w * f(u); });
  return sum;
}

LeafChart complex_ball_chart(const Eigen::VectorXd& center, double radius, const Eigen::MatrixXcd& frame) {
  const int n = static_cast<int>(frame.rows());
  const int p = static_cast<int>(frame.cols());
  if (center.size() != 2 * n) throw DimensionMismatch("complex_ball_chart: center must have 2n entries");
  if (p < 1 || p > 2) throw InvalidParameter("complex_ball_chart: only p = 1 or 2");
  if ((frame.adjoint() * frame - Eigen::MatrixXcd::Identity(p, p)).norm() > 1e-10)
    throw InvalidParameter("complex_ball_chart: frame must be orthonormal");
  if (radius < 0) throw InvalidParameter("complex_ball_chart: negative radius");
  const Complex I(0, 1);
  LeafChart c;
  c.n = n;
  c.p = p;
  c.radial_axis = 0;
  if (p == 1) {
    const Eigen::VectorXcd u = frame.col(0);
    c.lo = Eigen::Vector2d(0, 0);
    c.hi = Eigen::Vector2d(1, 2 * std::numbers::pi);
    c.map = [=](const Eigen::VectorXd& t) {
      return Eigen::VectorXd(center + realify(Eigen::VectorXcd(radius * t(0) * std::exp(I * t(1)) * u)));
    };
    c.jacobian = [=](const Eigen::VectorXd& t) {
      const Complex e = std::exp(I * t(1));
      Eigen::MatrixXd j(2 * n, 2);
      j.col(0) = realify(Eigen::VectorXcd(radius * e * u));
      j.col(1) = realify(Eigen::VectorXcd(radius * t(0) * I * e * u));
      return j;
    };
  } else {
    // (r, phi, theta1, theta2) -> r (sin phi e^{i theta1} u1 + cos phi e^{i theta2} u2)
    const Eigen::VectorXcd u1 = frame.col(0), u2 = frame.col(1);
    c.lo = Eigen::Vector4d(0, 0, 0, 0);
    c.hi = Eigen::Vector4d(1, std::numbers::pi / 2, 2 * std::numbers::pi, 2 * std::numbers::pi);
    c.map = [=](const Eigen::VectorXd& t) {
      const Eigen::VectorXcd z = radius * t(0) *
                                 (std::sin(t(1)) * std::exp(I * t(2)) * u1 + std::cos(t(1)) * std::exp(I * t(3)) * u2);
      return Eigen::VectorXd(center + realify(z));
    };
    c.jacobian = [=](const Eigen::VectorXd& t) {
      const Complex e1 = std::exp(I * t(2)), e2 = std::exp(I * t(3));
      const double s = std::sin(t(1)), co = std::cos(t(1)), r = radius * t(0);
      Eigen::MatrixXd j(2 * n, 4);
      j.col(0) = realify(Eigen::VectorXcd(radius * (s * e1 * u1 + co * e2 * u2)));
      j.col(1) = realify(Eigen::VectorXcd(r * (co * e1 * u1 - s * e2 * u2)));
      j.col(2) = realify(Eigen::VectorXcd(r * s * I * e1 * u1));
      j.col(3) = realify(Eigen::VectorXcd(r * co * I * e2 * u2));
      return j;
    };
  }
  return c;
}

LeafChart graph_disc_chart(int n, std::function<Complex(Complex)> phi, std::function<Complex(Complex)> phi_z,
                           std::function<Complex(Complex)> phi_zbar) {
  if (n < 2) throw InvalidParameter("graph_disc_chart: need n >= 2");
  const Complex I(0, 1);
  LeafChart c;
  c.n = n;
  c.p = 1;
  c.radial_axis = 0;
  c.lo = Eigen::Vector2d(0, 0);
  c.hi = Eigen::Vector2d(1, 2 * std::numbers::pi);
  c.map = [=](const Eigen::VectorXd& t) {
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
    z(0) = t(0) * std::exp(I * t(1));
    z(1) = phi(z(0));
    return realify(z);
  };
  c.jacobian = [=](const Eigen::VectorXd& t) {
    const Complex e = std::exp(I * t(1)), z = t(0) * e;
    // dz/dr = e, dz/dtheta = i r e; dw = phi_z dz + phi_zbar dzbar.
    const Complex dzr = e, dzt = I * t(0) * e;
    Eigen::VectorXcd cr = Eigen::VectorXcd::Zero(n), ct = Eigen::VectorXcd::Zero(n);
    cr(0) = dzr;
    ct(0) = dzt;
    cr(1) = phi_z(z) * dzr + phi_zbar(z) * std::conj(dzr);
    ct(1) = phi_z(z) * dzt + phi_zbar(z) * std::conj(dzt);
    Eigen::MatrixXd j(2 * n, 2);
    j.col(0) = realify(cr);
    j.col(1) = realify(ct);
    return j;
  };
  return c;
}

LeafChart totally_real_disc(int n) {
  if (n < 2) throw InvalidParameter("totally_real_disc: need n >= 2");
  LeafChart c;
  c.n = n;
  c.p = 1;
  c.radial_axis = 0;
  c.lo = Eigen::Vector2d(0, 0);
  c.hi = Eigen::Vector2d(1, 2 * std::numbers::pi);
  c.map = [n](const Eigen::VectorXd& t) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
    x(0) = t(0) * std::cos(t(1));
    x(2) = t(0) * std::sin(t(1));
    return x;
  };
  c.jacobian = [n](const Eigen::VectorXd& t) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2);
    j(0, 0) = std::cos(t(1));
    j(2, 0) = std::sin(t(1));
    j(0, 1) = -t(0) * std::sin(t(1));
    j(2, 1) = t(0) * std::cos(t(1));
    return j;
  };
  return c;
}

LeafIntegrals integrate_leaf(const LeafChart& c, const QuadratureSpec& spec) {
  if (!c.map || !c.jacobian) throw InvalidParameter("leaf chart has no map");
  if (c.lo.size() != c.param_dim() || c.hi.size() != c.param_dim())
    throw MissingBoundary("leaf chart has no parameter rectangle");
  const Multivector kf = kahler_form(KahlerData(c.n, c.p));
  LeafIntegrals out;
  for_each_node(c.lo, c.hi, spec, [&](const Eigen::VectorXd& u, double w) {
    const Eigen::MatrixXd j = c.jacobian(u);
    const double gram = (j.transpose() * j).determinant();
    if (!(gram > 1e-300) || !std::isfinite(gram)) {
      std::ostringstream msg;
      msg << "degenerate Gram matrix at parameter node (" << u.transpose() << ")";
      throw ImmersionLost(msg.str());
    }
    if (c.reference && (c.reference(u).transpose() * j).determinant() <= 0.0) {
      std::ostringstream msg;
      msg << "leaf folds over (orientation reversed) at parameter node (" << u.transpose() << ")";
      throw ImmersionLost(msg.str());
    }
    out.volume += w * std::sqrt(gram);
    out.omega_energy += w * evaluate_form(kf, j);
    out.mass += w * wedge_frame(j).norm();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(j);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(j.rows(), j.cols());
    out.max_defect = std::max(out.max_defect, j_invariance_defect(q));
    ++out.nodes;
  });
  return out;
}

LeafIntegrals leaf_integrals(const LeafChart& c, const RefineOptions& opts) {
  // Per-axis doubling: an axis is frozen once doubling its order alone
  // leaves volume, energy and mass unchanged to rel_tol.
  const int d = c.param_dim();
  auto run = [&](const std::vector<int>& orders) {
    QuadratureSpec spec{1, opts.start_order, {}};
    spec.axis_orders = orders;
    return integrate_leaf(c, spec);
  };
  auto agree = [&](const LeafIntegrals& a, const LeafIntegrals& b) {
    const double scale = std::max({std::abs(b.volume), std::abs(b.omega_energy), 1e-300});
    return std::abs(a.volume - b.volume) <= opts.rel_tol * scale &&
           std::abs(a.omega_energy - b.omega_energy) <= opts.rel_tol * scale &&
           std::abs(a.mass - b.mass) <= opts.rel_tol * scale;
  };
  std::vector<int> orders(d, opts.start_order);
  std::vector<bool> frozen(d, false);
  LeafIntegrals cur = run(orders);
  double defect = cur.max_defect;
  while (true) {
    std::vector<int> next = orders;
    bool refine = false;
    for (int k = 0; k < d; ++k) {
      if (frozen[k]) continue;
      if (2 * orders[k] > opts.max_order) {
        frozen[k] = true;
        continue;
      }
      std::vector<int> trial = orders;
      trial[k] *= 2;
      const LeafIntegrals t = run(trial);
      defect = std::max(defect, t.max_defect);
      if (agree(cur, t)) {
        frozen[k] = true;
      } else {
        next[k] *= 2;
        refine = true;
      }
    }
    if (!refine) break;
    orders = next;
    cur = run(orders);
    defect = std::max(defect, cur.max_defect);
  }
  cur.max_defect = defect;
  return cur;
}

double leaf_volume(const LeafChart& c, const RefineOptions& opts) { return leaf_integrals(c, opts).volume; }
double omega_energy(const LeafChart& c, const RefineOptions& opts) { return leaf_integrals(c, opts).omega_energy; }
double current_mass(const LeafChart& c, const RefineOptions& opts) { return leaf_integrals(c, opts).mass; }

CalibrationGap calibration_gap(const LeafChart& c, const RefineOptions& opts) {
  const LeafIntegrals li = leaf_integrals(c, opts);
  return {li.volume - li.omega_energy, li.max_defect, li.max_defect < 1e-8};
}

FoliatedHypersurface unit_ball_family() {
  FoliatedHypersurface f;
  f.l_lo = -1.0;
  f.l_hi = 1.0;
  f.parameter_order = 8;
  f.leaf = [](double t) {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(6);
    center(4) = t;
    Eigen::MatrixXcd frame = Eigen::MatrixXcd::Zero(3, 2);
    frame(0, 0) = 1.0;
    frame(1, 1) = 1.0;
    return complex_ball_chart(center, std::sqrt(std::max(0.0, 1.0 - t * t)), frame);
  };
  return f;
}

MixedVolume mixed_volume(const FoliatedHypersurface& f, const RefineOptions& opts) {
  MixedVolume out;
  if (!(f.l_hi > f.l_lo)) return out;
  const GaussRule g = gauss_legendre(f.parameter_order);
  const double half = 0.5 * (f.l_hi - f.l_lo);
  for (int k = 0; k < f.parameter_order; ++k) {
    const double l = f.l_lo + half * (g.nodes(k) + 1.0);
    LeafIntegrals li;
    try {
      li = leaf_integrals(f.leaf(l), opts);
    } catch (const ImmersionLost& e) {
      throw ImmersionLost(std::string(e.what()) + " on leaf l = " + std::to_string(l));
    }
    out.volume += half * g.weights(k) * li.volume;
    out.energy += half * g.weights(k) * li.omega_energy;
    out.leaves.push_back({l, li.volume, li.omega_energy, li.volume - li.omega_energy});
  }
  return out;
}

void write_leaf_table(std::ostream& out, const MixedVolume& m) {
  out << "leaf_parameter,volume,energy,gap\n";
  out.precision(15);
  for (const auto& r : m.leaves) out << r.parameter << ',' << r.volume << ',' << r.energy << ',' << r.gap << '\n';
}

Bump Bump::polynomial() {
  return {[](double r) { return (1 - r * r) * (1 - r * r); }, [](double r) { return -4.0 * r * (1 - r * r); }};
}

LeafChart perturb_leaf(const LeafChart& c, const Perturbation& pert) {
  if (pert.amplitude == 0.0) return c;
  if (c.radial_axis < 0) throw InvalidParameter("perturb_leaf: chart has no radial axis");
  if (!pert.bump.value || !pert.bump.derivative) throw InvalidParameter("perturb_leaf: bump is empty");
  if (std::abs(pert.bump.value(1.0)) > 1e-12 || std::abs(pert.bump.derivative(1.0)) > 1e-9)
    throw BoundaryClampViolated("perturb_leaf: bump must vanish with its derivative at r = 1");
  const int ax = c.radial_axis;
  const double a = pert.amplitude;
  const Bump b = pert.bump;
  LeafChart out = c;
  out.reference = c.reference ? c.reference : c.jacobian;
  if (pert.mode == BumpMode::ambient) {
    Eigen::VectorXd v = pert.direction;
    if (v.size() == 0) v = Eigen::VectorXd::Unit(2 * c.n, 2 * c.n - 2);
    if (v.size() != 2 * c.n) throw DimensionMismatch("perturb_leaf: direction must have 2n entries");
    out.map = [=](const Eigen::VectorXd& u) { return Eigen::VectorXd(c.map(u) + a * b.value(u(ax)) * v); };
    out.jacobian = [=](const Eigen::VectorXd& u) {
      Eigen::MatrixXd j = c.jacobian(u);
      j.col(ax) += a * b.derivative(u(ax)) * v;
      return j;
    };
  } else {
    auto moved = [=](const Eigen::VectorXd& u) {
      Eigen::VectorXd w = u;
      w(ax) = u(ax) * (1.0 + a * b.value(u(ax)));
      return w;
    };
    out.map = [=](const Eigen::VectorXd& u) { return c.map(moved(u)); };
    out.jacobian = [=](const Eigen::VectorXd& u) {
      Eigen::MatrixXd j = c.jacobian(moved(u));
      j.col(ax) *= 1.0 + a * (b.value(u(ax)) + u(ax) * b.derivative(u(ax)));
      return j;
    };
  }
  return out;
}

FoliatedHypersurface competitor_perturb(const FoliatedHypersurface& f, const Perturbation& pert) {
  FoliatedHypersurface out = f;
  const auto leaf = f.leaf;
  // Validate the clamp up front rather than on the first leaf.
  if (pert.amplitude != 0.0 &&
      (std::abs(pert.bump.value(1.0)) > 1e-12 || std::abs(pert.bump.derivative(1.0)) > 1e-9))
    throw BoundaryClampViolated("competitor_perturb: bump must vanish with its derivative at r = 1");
  out.leaf = [leaf, pert](double l) { return perturb_leaf(leaf(l), pert); };
  return out;
}

PolyForm::PolyForm(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1 || degree < 0 || degree > 2 * n) throw InvalidParameter("PolyForm: bad dimension or degree");
}

void PolyForm::add(IndexMask mask, const RealPolynomial& c) {
  if (std::popcount(mask) != degree_ || mask >= (IndexMask{1} << (2 * n_)))
    throw GradeMismatch("PolyForm::add: mask does not match degree");
  if (c.num_vars() != 2 * n_) throw DimensionMismatch("PolyForm::add: coefficient arity must be 2n");
  auto it = coeffs_.find(mask);
  if (it == coeffs_.end())
    it = coeffs_.emplace(mask, c).first;
  else
    it->second += c;
  if (it->second.is_zero()) coeffs_.erase(it);
}

PolyForm PolyForm::d() const {
  if (degree_ == 2 * n_) return PolyForm(n_, degree_);
  PolyForm out(n_, degree_ + 1);
  for (const auto& [mask, c] : coeffs_)
    for (int k = 0; k < 2 * n_; ++k) {
      const IndexMask bit = IndexMask{1} << k;
      if (mask & bit) continue;
      RealPolynomial dc = c.derivative(k);
      if (dc.is_zero()) continue;
      out.add(mask | bit, dc * static_cast<double>(wedge_sign(bit, mask)));
    }
  return out;
}

double PolyForm::evaluate(const Eigen::VectorXd& x, const Eigen::MatrixXd& frame) const {
  if (frame.cols() != degree_ || frame.rows() != 2 * n_) throw DimensionMismatch("PolyForm::evaluate: frame shape");
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  double sum = 0.0;
  Eigen::MatrixXd minor(degree_, degree_);
  for (const auto& [mask, c] : coeffs_) {
    int row = 0;
    for (int k = 0; k < 2 * n_; ++k)
      if (mask & (IndexMask{1} << k)) minor.row(row++) = frame.row(k);
    sum += c(xs) * (degree_ == 0 ? 1.0 : minor.determinant());
  }
  return sum;
}

PolyForm random_poly_form(int n, int degree, int poly_degree, std::mt19937_64& rng) {
  PolyForm f(n, degree);
  const int d = 2 * n;
  std::uniform_int_distribution<int> coef(-3, 3), var(0, d - 1), deg(0, poly_degree);
  std::bernoulli_distribution use(0.5);
  for (IndexMask mask = 0; mask < (IndexMask{1} << d); ++mask) {
    if (std::popcount(mask) != degree || !use(rng)) continue;
    RealPolynomial c(d);
    for (int t = 0; t < 3; ++t) {
      std::vector<int> e(d, 0);
      const int k = deg(rng);
      for (int i = 0; i < k; ++i) ++e[var(rng)];
      c.add_term(e, coef(rng));
    }
    if (!c.is_zero()) f.add(mask, c);
  }
  return f;
}

StokesReport stokes_report(const LeafChart& c, const PolyForm& alpha, const QuadratureSpec& spec) {
  if (c.lo.size() == 0 || c.lo.size() != c.param_dim()) throw MissingBoundary("stokes_check: no boundary parametrisation");
  if (alpha.n() != c.n) throw DimensionMismatch("stokes_check: form lives in a different dimension");
  if (alpha.degree() != c.param_dim() - 1) throw GradeMismatch("stokes_check: form degree must be 2p - 1");
  const PolyForm da = alpha.d();
  StokesReport rep;
  rep.interior = integrate_box(c.lo, c.hi, spec, [&](const Eigen::VectorXd& u) {
    return da.evaluate(c.map(u), c.jacobian(u));
  });
  const Eigen::Index d = c.param_dim();
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::VectorXd flo = drop_entry(c.lo, k), fhi = drop_entry(c.hi, k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (int side = 0; side < 2; ++side) {
      const double fixed = side ? c.hi(k) : c.lo(k);
      const double face = integrate_box(flo, fhi, spec, [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd u = insert_entry(v, k, fixed);
        return alpha.evaluate(c.map(u), drop_column(c.jacobian(u), k));
      });
      rep.boundary += (side ? sign : -sign) * face;
    }
  }
  rep.residual = std::abs(rep.interior - rep.boundary);
  return rep;
}

double stokes_check(const LeafChart& c, const PolyForm& alpha, const QuadratureSpec& spec) {
  return stokes_report(c, alpha, spec).residual;
}

StokesConvergence stokes_convergence(const LeafChart& c, const PolyForm& alpha, int order,
                                     const std::vector<int>& panels) {
  StokesConvergence out;
  out.panels = panels;
  double scale = 1.0;
  for (int p : panels) {
    const StokesReport r = stokes_report(c, alpha, {p, order, {}});
    scale = std::max({scale, std::abs(r.interior), std::abs(r.boundary)});
    out.residuals.push_back(r.residual);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < panels.size(); ++i)
    if (out.residuals[i] > 1e-13 * scale) {
      lx.push_back(std::log(static_cast<double>(panels[i])));
      ly.push_back(std::log(out.residuals[i]));
    }
  if (lx.size() < 2) {
    out.observed_order = std::numeric_limits<double>::infinity();
    return out;
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.observed_order = -sxy / sxx;
  return out;
}

}  // namespace plab
