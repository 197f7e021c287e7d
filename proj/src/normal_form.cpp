#include <algorithm>
#include <cmath>
#include <numeric>

#include "plab/multivector.hpp"
#include "plab/surfaces.hpp"

namespace plab {

namespace {

const Complex kI(0.0, 1.0);

Complex quadratic_value(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& c,
                        const Eigen::VectorXcd& z) {
  const Eigen::VectorXcd zb = z.conjugate();
  return (z.transpose() * a * z)(0) + (z.transpose() * b * zb)(0) + (zb.transpose() * c * zb)(0);
}

// Complex line field spanned by the normal space at a complex point.
Eigen::VectorXcd complex_normal(const SurfaceModel& s, const Eigen::VectorXd& p) {
  Eigen::MatrixXd jac = s.jacobian(p);
  Eigen::VectorXd n1 = jac.row(0).transpose();
  if (n1.norm() == 0.0) throw DegenerateTangent("quadratic_expansion: vanishing gradient");
  Eigen::VectorXcd nu = complexify(n1 / n1.norm());
  nu /= nu.norm();
  Eigen::Index big = 0;
  nu.cwiseAbs().maxCoeff(&big);
  nu *= std::conj(nu(big)) / std::abs(nu(big));
  return nu;
}

Eigen::MatrixXcd chart_for(const Eigen::VectorXcd& nu) {
  const Eigen::Index n = nu.size();
  Eigen::MatrixXcd chart(n, n);
  int filled = 0;
  for (Eigen::Index k = 0; k < n && filled < n - 1; ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, k);
    v -= nu * nu.dot(v);
    for (int j = 0; j < filled; ++j) v -= chart.col(j) * chart.col(j).dot(v);
    if (v.norm() < 1e-6) continue;
    chart.col(filled++) = v / v.norm();
  }
  chart.col(n - 1) = nu;
  return chart;
}

}  // namespace

Complex QuadraticExpansion::evaluate(const Eigen::VectorXcd& z) const { return quadratic_value(a, b, c, z); }

QuadraticExpansion quadratic_expansion(const SurfaceModel& s, const Eigen::VectorXd& p, const ExpansionOptions& opts) {
  if (s.equations.size() != 2) throw InvalidParameter("quadratic_expansion: surface must have two equations");
  if (opts.radius <= 0) throw InvalidParameter("quadratic_expansion: radius must be positive");
  if (cr_defect(s, p) > 1e-6) throw InvalidParameter("quadratic_expansion: not a complex point");
  const int n = s.n, m = n - 1;
  QuadraticExpansion q;
  q.base_point = complexify(p);
  q.chart = chart_for(complex_normal(s, p));
  const Eigen::VectorXd nu_re = realify(Eigen::VectorXcd(q.chart.col(m)));
  const Eigen::VectorXd inu_re = realify(Eigen::VectorXcd(kI * q.chart.col(m)));

  // w as a function of real z-coordinates (x1, y1, ...), by Newton in the normal direction.
  auto solve_w = [&](const Eigen::VectorXd& sz) -> Complex {
    Eigen::VectorXcd z = complexify(sz);
    const Eigen::VectorXd base = p + realify(Eigen::VectorXcd(q.chart.leftCols(m) * z));
    Complex w = 0.0;
    for (int it = 0; it < 50; ++it) {
      const Eigen::VectorXd x = base + w.real() * nu_re + w.imag() * inu_re;
      const Eigen::VectorXd r = s.residual(x);
      if (r.norm() < 1e-15) break;
      const Eigen::MatrixXd j = s.jacobian(x);
      Eigen::Matrix2d a;
      a.col(0) = j * nu_re;
      a.col(1) = j * inu_re;
      if (std::abs(a.determinant()) < 1e-14) throw IllConditionedStencil("quadratic_expansion: singular normal solve");
      const Eigen::Vector2d dw = -a.inverse() * r;
      w += Complex(dw(0), dw(1));
      if (dw.norm() < 1e-16) break;
    }
    if (s.residual(base + w.real() * nu_re + w.imag() * inu_re).norm() > 1e-11)
      throw IllConditionedStencil("quadratic_expansion: normal solve did not converge");
    return w;
  };

  const int d = 2 * m;
  auto hessian = [&](double rho) {
    Eigen::MatrixXcd h(d, d);
    const Complex w0 = solve_w(Eigen::VectorXd::Zero(d));
    for (int k = 0; k < d; ++k) {
      Eigen::VectorXd ek = Eigen::VectorXd::Unit(d, k) * rho;
      h(k, k) = (solve_w(ek) - 2.0 * w0 + solve_w(-ek)) / (rho * rho);
      for (int l = k + 1; l < d; ++l) {
        Eigen::VectorXd el = Eigen::VectorXd::Unit(d, l) * rho;
        h(k, l) = (solve_w(ek + el) - solve_w(ek - el) - solve_w(el - ek) + solve_w(-ek - el)) / (4 * rho * rho);
        h(l, k) = h(k, l);
      }
    }
    return h;
  };
  const Eigen::MatrixXcd h1 = hessian(opts.radius);
  const Eigen::MatrixXcd h2 = hessian(opts.radius / 2);
  const Eigen::MatrixXcd h = (4.0 * h2 - h1) / 3.0;
  if (!h.allFinite()) throw IllConditionedStencil("quadratic_expansion: non-finite stencil");

  q.a.resize(m, m);
  q.b.resize(m, m);
  q.c.resize(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      const Complex hxx = h(2 * k, 2 * l), hxy = h(2 * k, 2 * l + 1), hyx = h(2 * k + 1, 2 * l),
                    hyy = h(2 * k + 1, 2 * l + 1);
      q.a(k, l) = (hxx - kI * hxy - kI * hyx - hyy) / 8.0;
      q.b(k, l) = (hxx + kI * hxy - kI * hyx + hyy) / 4.0;
      q.c(k, l) = (hxx + kI * hxy + kI * hyx - hyy) / 8.0;
    }

  // Relative misfit of the quadratic model at a shrinking probe: should be O(rho).
  double worst = 0.0;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd sz = Eigen::VectorXd::Zero(d);
    sz(k) = opts.radius;
    if (k + 1 < d) sz(k + 1) = -0.5 * opts.radius;
    const Complex w = solve_w(sz);
    worst = std::max(worst, std::abs(w - q.evaluate(complexify(sz))) / sz.squaredNorm());
  }
  q.fit_residual = worst * opts.radius;
  return q;
}

QuadraticExpansion change_z_coordinates(const QuadraticExpansion& q, const Eigen::MatrixXcd& v) {
  const int m = q.m();
  if (v.rows() != m || v.cols() != m) throw DimensionMismatch("change_z_coordinates: size mismatch");
  QuadraticExpansion out = q;
  out.a = v.transpose() * q.a * v;
  out.b = v.transpose() * q.b * v.conjugate();
  out.c = v.adjoint() * q.c * v.conjugate();
  out.chart.leftCols(m) = q.chart.leftCols(m) * v;
  return out;
}

HermitianSplit split_real_form(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols() || p.rows() % 2 != 0) throw DimensionMismatch("split_real_form: need even square matrix");
  const Eigen::MatrixXd qh = p + p.transpose();  // Hessian of s^T P s
  const int m = static_cast<int>(p.rows() / 2);
  HermitianSplit out{Eigen::MatrixXcd(m, m), Eigen::MatrixXcd(m, m)};
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      const double xx = qh(2 * k, 2 * l), xy = qh(2 * k, 2 * l + 1), yx = qh(2 * k + 1, 2 * l),
                   yy = qh(2 * k + 1, 2 * l + 1);
      out.h(k, l) = (xx + kI * xy - kI * yx + yy) / 4.0;
      out.c(k, l) = (xx + kI * xy + kI * yx - yy) / 8.0;
    }
  return out;
}

Eigen::MatrixXd real_form_matrix(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& c) {
  const Eigen::Index m = h.rows();
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(m, m);
  auto q = [&](const Eigen::VectorXd& s) {
    const Eigen::VectorXcd z = complexify(s);
    return quadratic_value(zero, h, zero, z).real() + 2.0 * quadratic_value(zero, zero, c, z).real();
  };
  const Eigen::Index d = 2 * m;
  Eigen::MatrixXd p(d, d);
  for (Eigen::Index i = 0; i < d; ++i) p(i, i) = q(Eigen::VectorXd::Unit(d, i));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      p(i, j) = (q(Eigen::VectorXd::Unit(d, i) + Eigen::VectorXd::Unit(d, j)) - p(i, i) - p(j, j)) / 2.0;
      p(j, i) = p(i, j);
    }
  return p;
}

Complex FlatNormalForm::original_value(const Eigen::VectorXcd& z) const {
  const Eigen::VectorXd s = realify(z);
  const double qr = s.dot(real_q * s);
  return phase * (qr - (z.transpose() * holomorphic_correction * z)(0));
}

FlatNormalForm flat_normal_form(const QuadraticExpansion& q, const FlatOptions& opts) {
  const double bn = q.b.norm();
  Complex lambda = 1.0;
  double residual = 0.0;
  if (bn > 1e-12) {
    const Complex t = (q.b * q.b).trace();
    if (std::abs(t) < 1e-12 * bn * bn) throw NonFlatPoint("flat_normal_form: Hermitian part has no common phase");
    const Complex mu = t / std::abs(t);
    residual = (q.b - mu * q.b.adjoint()).norm() / bn;
    if (residual > opts.phase_tol) throw NonFlatPoint("flat_normal_form: Hermitian part has no common phase");
    lambda = std::sqrt(mu);
    if ((q.b / lambda).trace().real() < 0) lambda = -lambda;
  }
  FlatNormalForm f;
  f.phase = lambda;
  f.flatness_residual = residual;
  Eigen::MatrixXcd h = q.b / lambda;
  h = (h + h.adjoint()).eval() / 2.0;
  const Eigen::MatrixXcd c = q.c / lambda;
  f.holomorphic_correction = (q.c / lambda).conjugate() - q.a / lambda;
  f.real_q = real_form_matrix(h, c);
  return f;
}

TakagiResult takagi(const Eigen::MatrixXcd& c) {
  const Eigen::Index m = c.rows();
  if (c.cols() != m) throw DimensionMismatch("takagi: matrix must be square");
  if ((c - c.transpose()).norm() > 1e-9 * std::max(1.0, c.norm()))
    throw InvalidParameter("takagi: matrix must be symmetric");
  const Eigen::MatrixXd r = c.real(), im = c.imag();
  Eigen::MatrixXd big(2 * m, 2 * m);
  big << r, im, im, -r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big);
  // Eigenvalues come in +-sigma pairs; walk from the top and keep complex-independent vectors.
  TakagiResult out;
  out.u.resize(m, m);
  out.singular_values.resize(m);
  int taken = 0;
  for (Eigen::Index k = 2 * m - 1; k >= 0 && taken < m; --k) {
    Eigen::VectorXcd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w(i) = {es.eigenvectors()(i, k), es.eigenvectors()(m + i, k)};
    for (int j = 0; j < taken; ++j) w -= out.u.col(j) * out.u.col(j).dot(w);
    if (w.norm() < 0.5) continue;
    w /= w.norm();
    const double sigma = std::max(0.0, es.eigenvalues()(k));
    if (sigma < 1e-14 * std::max(1.0, c.norm())) {
      // Kernel direction: any phase works; choose a real positive leading entry.
      Eigen::Index lead = 0;
      while (lead + 1 < m && std::abs(w(lead)) < 1e-8) ++lead;
      w *= std::conj(w(lead)) / std::abs(w(lead));
    } else {
      // Only a sign is free; the phase is pinned so that c conj(w) = sigma w.
      const Complex d = w.dot(c * w.conjugate());
      if (std::abs(d) > 0) w *= std::sqrt(d / std::abs(d));
      Eigen::Index lead = 0;
      while (lead + 1 < m && std::abs(w(lead)) < 1e-8) ++lead;
      const double key = std::abs(w(lead).real()) > 1e-8 ? w(lead).real() : w(lead).imag();
      if (key < 0) w = -w;
    }
    out.u.col(taken) = w;
    out.singular_values(taken) = sigma;
    ++taken;
  }
  if (taken != m) throw RankDeficient("takagi: could not complete a unitary basis");
  out.residual = (c - out.u * out.singular_values.asDiagonal() * out.u.transpose()).norm();
  return out;
}

SpecialNormalForm special_normal_form(const Eigen::MatrixXd& real_q, double tol) {
  const HermitianSplit split = split_real_form(real_q);
  const Eigen::Index m = split.h.rows();
  const Eigen::MatrixXcd k = split.h.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() <= tol * std::max(1.0, ev.cwiseAbs().maxCoeff()))
    throw NotSpecial("special_normal_form: Hermitian part is not positive definite");
  const Eigen::MatrixXcd kinv_half =
      es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::MatrixXcd c1 = kinv_half * split.c * kinv_half.conjugate();
  c1 = (c1 + c1.transpose()).eval() / 2.0;
  const TakagiResult t = takagi(c1);
  SpecialNormalForm out;
  out.transform = kinv_half * t.u;
  for (Eigen::Index j = 0; j < m; ++j) out.lambdas.push_back(2.0 * t.singular_values(j));
  for (std::size_t j = 1; j < out.lambdas.size(); ++j)
    if (std::abs(out.lambdas[j] - out.lambdas[j - 1]) < 1e-6) out.ties = true;
  const Eigen::MatrixXcd& a = out.transform;
  const Eigen::MatrixXcd herm = a.transpose() * split.h * a.conjugate();
  const Eigen::MatrixXcd hol = a.adjoint() * split.c * a.conjugate();
  out.residual = std::max((herm - Eigen::MatrixXcd::Identity(m, m)).norm(),
                          (hol - Eigen::MatrixXcd(t.singular_values.cast<Complex>().asDiagonal())).norm());
  return out;
}

std::string PointLabel::to_string() const {
  switch (kind) {
    case PointKind::special_elliptic:
      return "special_elliptic";
    case PointKind::special_hyperbolic:
      return "special_" + std::to_string(k) + "_hyperbolic";
    case PointKind::parabolic:
      return "parabolic";
    case PointKind::hyperbolic_nonspecial:
      return "hyperbolic_nonspecial";
    case PointKind::elliptic_nonspecial:
      return "elliptic_nonspecial";
    case PointKind::nonflat:
      return "nonflat";
  }
  return "unknown";
}

PointLabel classify_point(const std::vector<double>& lambdas, double tol) {
  int above = 0, below = 0;
  for (double l : lambdas) {
    if (std::abs(l - 1.0) <= tol) return {PointKind::parabolic, 0};
    if (l > 1.0) ++above;
    else ++below;
  }
  if (above == 0) return {PointKind::special_elliptic, 0};
  // k counts J, a proper subset of the indices.
  if (below == 0) return {PointKind::hyperbolic_nonspecial, 0};
  return {PointKind::special_hyperbolic, above};
}

namespace {

PointLabel label_by_signature(const Eigen::MatrixXd& real_q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(real_q);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const bool pos = ev.maxCoeff() > 1e-9 * scale, neg = ev.minCoeff() < -1e-9 * scale;
  const bool zero = (ev.cwiseAbs().array() <= 1e-9 * scale).any();
  if (zero) return {PointKind::parabolic, 0};
  if (pos && neg) return {PointKind::hyperbolic_nonspecial, 0};
  return {PointKind::elliptic_nonspecial, 0};
}

}  // namespace

ComplexPointRecord classify_complex_point(const SurfaceModel& s, const Eigen::VectorXd& p) {
  ComplexPointRecord rec;
  rec.location = p;
  rec.cr_defect = cr_defect(s, p);
  const QuadraticExpansion q = quadratic_expansion(s, p);
  FlatNormalForm f;
  try {
    f = flat_normal_form(q);
  } catch (const NonFlatPoint&) {
    rec.label = {PointKind::nonflat, 0};
    return rec;
  }
  rec.flat = true;
  try {
    const SpecialNormalForm sn = special_normal_form(f.real_q);
    rec.special = true;
    rec.lambdas = sn.lambdas;
    rec.label = classify_point(sn.lambdas);
  } catch (const NotSpecial&) {
    rec.label = label_by_signature(f.real_q);
  }
  return rec;
}

std::vector<ComplexPointRecord> classify_surface(const SurfaceModel& s, int grid_density) {
  const ComplexPointSearch found = find_complex_points(s, grid_density);
  if (!found.non_isolated.empty()) throw UnclassifiableRecord("classify_surface: non-isolated complex points");
  std::vector<Eigen::VectorXd> pts = found.points;
  // Deterministic order: by level coordinate (descending), then lexicographic.
  std::sort(pts.begin(), pts.end(), [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (s.level_axis >= 0 && std::abs(a(s.level_axis) - b(s.level_axis)) > 1e-6)
      return a(s.level_axis) > b(s.level_axis);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (std::abs(a(i) - b(i)) > 1e-6) return a(i) < b(i);
    return false;
  });
  std::vector<ComplexPointRecord> out;
  for (const auto& p : pts) out.push_back(classify_complex_point(s, p));
  return out;
}

EulerCount euler_signed_count(const std::vector<ComplexPointRecord>& records, int chi) {
  int count = 0;
  for (const auto& r : records) {
    switch (r.label.kind) {
      case PointKind::special_elliptic:
        ++count;
        break;
      case PointKind::special_hyperbolic:
        count += (r.label.k % 2 == 0) ? 1 : -1;
        break;
      default:
        throw UnclassifiableRecord("euler_signed_count: record labelled " + r.label.to_string());
    }
  }
  return {count, count == chi};
}

}  // namespace plab
