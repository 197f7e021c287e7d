#include "plab/multivector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace plab {

namespace {

std::vector<int> mask_indices(IndexMask mask) {
  std::vector<int> idx;
  while (mask) {
    idx.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return idx;
}

// Masks built only from complete (x_j, y_j) pairs.
bool is_pair_mask(IndexMask mask) {
  constexpr IndexMask kEven = 0x5555555555555555ULL;
  constexpr IndexMask kOdd = 0xAAAAAAAAAAAAAAAAULL;
  return ((mask & kEven) << 1) == (mask & kOdd);
}

// Orthonormal basis with the orientation of `frame` (R with positive diagonal).
Eigen::MatrixXd oriented_qr(const Eigen::MatrixXd& frame) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(frame.rows(), frame.cols());
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < frame.cols(); ++k)
    if (r(k, k) < 0) q.col(k) = -q.col(k);
  return q;
}

Eigen::MatrixXd polar_retract(const Eigen::MatrixXd& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

Eigen::MatrixXd complex_structure(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k + 1, 2 * k) = 1.0;
    j(2 * k, 2 * k + 1) = -1.0;
  }
  return j;
}

int wedge_sign(IndexMask a, IndexMask b) {
  // Count inversions: for each bit of b, the number of bits of a above it.
  int inversions = 0;
  while (b) {
    int j = std::countr_zero(b);
    b &= b - 1;
    IndexMask above = (j >= 63) ? 0 : (a >> (j + 1));
    inversions += std::popcount(above);
  }
  return (inversions & 1) ? -1 : 1;
}

Multivector::Multivector(int n, int grade) : n_(n), grade_(grade) {
  if (n < 1 || 2 * n > 64) throw InvalidParameter("multivector: complex dimension must be in [1, 32]");
  if (grade < 0) throw InvalidParameter("multivector: negative grade");
}

Multivector Multivector::basis(int n, std::initializer_list<int> indices) {
  Multivector m(n, static_cast<int>(indices.size()));
  IndexMask mask = 0;
  int sign = 1;
  for (int i : indices) {
    if (i < 1 || i > 2 * n) throw InvalidParameter("multivector: basis index out of range");
    IndexMask bit = IndexMask{1} << (i - 1);
    if (mask & bit) return Multivector(n, static_cast<int>(indices.size()));
    sign *= wedge_sign(mask, bit);
    mask |= bit;
  }
  m.add(mask, sign);
  return m;
}

Multivector Multivector::from_vector(const Eigen::VectorXd& v) {
  if (v.size() % 2 != 0) throw DimensionMismatch("multivector: vector length must be even");
  Multivector m(static_cast<int>(v.size() / 2), 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) m.add(IndexMask{1} << i, v(i));
  return m;
}

double Multivector::coeff(IndexMask mask) const {
  auto it = coeffs_.find(mask);
  return it == coeffs_.end() ? 0.0 : it->second;
}

void Multivector::add(IndexMask mask, double value) {
  if (std::popcount(mask) != grade_) throw GradeMismatch("multivector: index set size != grade");
  if (mask >> dim() != 0 && dim() < 64) throw DimensionMismatch("multivector: index out of range");
  if (value == 0.0) return;
  auto [it, inserted] = coeffs_.try_emplace(mask, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) coeffs_.erase(it);
  }
}

double Multivector::norm() const {
  double s = 0.0;
  for (const auto& [m, c] : coeffs_) s += c * c;
  return std::sqrt(s);
}

void Multivector::check_compatible(const Multivector& o) const {
  if (o.n_ != n_) throw DimensionMismatch("multivector: dimension mismatch");
  if (o.grade_ != grade_) throw GradeMismatch("multivector: grade mismatch");
}

double Multivector::dot(const Multivector& o) const {
  check_compatible(o);
  double s = 0.0;
  for (const auto& [m, c] : coeffs_) s += c * o.coeff(m);
  return s;
}

Multivector& Multivector::operator+=(const Multivector& o) {
  check_compatible(o);
  for (const auto& [m, c] : o.coeffs_) add(m, c);
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& o) {
  check_compatible(o);
  for (const auto& [m, c] : o.coeffs_) add(m, -c);
  return *this;
}

Multivector& Multivector::operator*=(double s) {
  if (s == 0.0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [m, c] : coeffs_) c *= s;
  return *this;
}

Multivector wedge(const Multivector& a, const Multivector& b) {
  if (a.n() != b.n()) throw DimensionMismatch("wedge: dimension mismatch");
  Multivector out(a.n(), a.grade() + b.grade());
  if (out.grade() > out.dim()) return out;
  for (const auto& [ma, ca] : a.coeffs())
    for (const auto& [mb, cb] : b.coeffs()) {
      if (ma & mb) continue;
      out.add(ma | mb, wedge_sign(ma, mb) * ca * cb);
    }
  return out;
}

Multivector wedge_frame(const Eigen::MatrixXd& frame) {
  if (frame.rows() % 2 != 0) throw DimensionMismatch("wedge_frame: odd ambient dimension");
  const int n = static_cast<int>(frame.rows() / 2);
  Multivector acc(n, 0);
  acc.add(0, 1.0);
  for (Eigen::Index k = 0; k < frame.cols(); ++k)
    acc = wedge(acc, Multivector::from_vector(frame.col(k)));
  return acc;
}

double evaluate_form(const Multivector& form, const Eigen::MatrixXd& frame) {
  if (frame.rows() != form.dim()) throw DimensionMismatch("evaluate_form: ambient dimension mismatch");
  if (frame.cols() != form.grade()) throw GradeMismatch("evaluate_form: frame size != form degree");
  const Eigen::Index r = frame.cols();
  if (r == 0) return form.coeff(0);
  double s = 0.0;
  Eigen::MatrixXd minor(r, r);
  for (const auto& [mask, c] : form.coeffs()) {
    auto rows = mask_indices(mask);
    for (Eigen::Index i = 0; i < r; ++i) minor.row(i) = frame.row(rows[i]);
    s += c * minor.determinant();
  }
  return s;
}

Blade Blade::unit() const {
  const double nrm = norm();
  Eigen::MatrixXd f = frame_;
  f.col(0) /= nrm;
  Multivector e = expansion_ * (1.0 / nrm);
  return Blade(std::move(f), std::move(e));
}

Eigen::MatrixXd Blade::orthonormal_frame() const { return oriented_qr(frame_); }

Blade blade_from_frame(const Eigen::MatrixXd& frame, double rank_tol) {
  if (frame.cols() == 0) throw InvalidParameter("blade_from_frame: empty frame");
  if (frame.cols() > frame.rows()) throw RankDeficient("blade_from_frame: more vectors than dimensions");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(s.size() - 1) <= rank_tol * s(0))
    throw RankDeficient("blade_from_frame: frame is rank-deficient");
  return Blade(frame, wedge_frame(frame));
}

Blade complex_plane_blade(int n, int p, const std::vector<Eigen::VectorXcd>& complex_frame) {
  if (static_cast<int>(complex_frame.size()) != p) throw InvalidParameter("complex_plane_blade: need p vectors");
  Eigen::MatrixXcd c(n, p);
  for (int k = 0; k < p; ++k) {
    if (complex_frame[k].size() != n) throw DimensionMismatch("complex_plane_blade: vector length != n");
    c.col(k) = complex_frame[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(s.size() - 1) <= kDefaultTol * s(0))
    throw RankDeficient("complex_plane_blade: complex frame is rank-deficient");
  Eigen::MatrixXd real(2 * n, 2 * p);
  for (int k = 0; k < p; ++k)
    for (int j = 0; j < n; ++j) {
      const std::complex<double> v = c(j, k);
      real(2 * j, 2 * k) = v.real();
      real(2 * j + 1, 2 * k) = v.imag();
      // i v
      real(2 * j, 2 * k + 1) = -v.imag();
      real(2 * j + 1, 2 * k + 1) = v.real();
    }
  return blade_from_frame(real);
}

double j_invariance_defect(const Eigen::MatrixXd& basis) {
  const Eigen::Index d = basis.rows();
  if (d % 2 != 0) throw DimensionMismatch("j_invariance_defect: odd ambient dimension");
  if (basis.cols() == 0) return 0.0;
  Eigen::MatrixXd jb = complex_structure(static_cast<int>(d / 2)) * basis;
  Eigen::MatrixXd off = jb - basis * (basis.transpose() * jb);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(off);
  return svd.singularValues()(0);
}

KahlerData::KahlerData(int n_, int p_) : n(n_), p(p_) {
  if (n < 1 || p < 1 || p > n) throw InvalidParameter("KahlerData: need 1 <= p <= n");
}

Multivector kahler_form(const KahlerData& k) {
  Multivector form(k.n, 2 * k.p);
  // All p-subsets of the n complex indices.
  for (IndexMask sub = 0; sub < (IndexMask{1} << k.n); ++sub) {
    if (std::popcount(sub) != k.p) continue;
    IndexMask mask = 0;
    for (int j = 0; j < k.n; ++j)
      if (sub & (IndexMask{1} << j)) mask |= IndexMask{3} << (2 * j);
    form.add(mask, 1.0);
  }
  return form;
}

double kahler_eval(const KahlerData& k, const Multivector& z) {
  if (z.n() != k.n) throw DimensionMismatch("kahler_eval: dimension mismatch");
  if (z.grade() != 2 * k.p) throw GradeMismatch("kahler_eval: grade must be 2p");
  double s = 0.0;
  for (const auto& [mask, c] : z.coeffs())
    if (is_pair_mask(mask)) s += c;
  return s;
}

ComassResult comass_estimate(const Multivector& form, const ComassOptions& opts) {
  if (opts.restarts < 1) throw InvalidParameter("comass_estimate: restarts must be >= 1");
  if (opts.initial_step <= 0 || opts.min_step <= 0) throw InvalidParameter("comass_estimate: steps must be positive");
  const int d = form.dim();
  const int r = form.grade();
  if (r < 1 || r > d) throw GradeMismatch("comass_estimate: form degree out of range");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;

  auto gradient = [&](const Eigen::MatrixXd& e) {
    // Multilinearity: d f / d E(i, k) = f(E with column k replaced by e_i).
    Eigen::MatrixXd g(d, r);
    Eigen::MatrixXd tmp = e;
    for (int k = 0; k < r; ++k) {
      for (int i = 0; i < d; ++i) {
        tmp.col(k).setZero();
        tmp(i, k) = 1.0;
        g(i, k) = evaluate_form(form, tmp);
      }
      tmp.col(k) = e.col(k);
    }
    return g;
  };

  double best = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_frame;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Eigen::MatrixXd e(d, r);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < r; ++k) e(i, k) = gauss(rng);
    e = oriented_qr(e);
    double f = evaluate_form(form, e);
    if (f < 0) {
      e.col(0) = -e.col(0);
      f = -f;
    }
    double step = opts.initial_step;
    for (int it = 0; it < opts.max_iterations && step >= opts.min_step; ++it) {
      Eigen::MatrixXd g = gradient(e);
      Eigen::MatrixXd egt = e.transpose() * g;
      Eigen::MatrixXd rg = g - e * (0.5 * (egt + egt.transpose()));
      if (rg.norm() == 0.0) break;
      Eigen::MatrixXd cand = polar_retract(e + step * rg);
      double fc = evaluate_form(form, cand);
      if (fc > f) {
        e = std::move(cand);
        f = fc;
      } else {
        step *= 0.5;
      }
    }
    if (f > best) {
      best = f;
      best_frame = e;
    }
  }
  return {best, blade_from_frame(best_frame)};
}

ComassResult comass_estimate(const KahlerData& k, int restarts, std::uint64_t seed) {
  ComassOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  return comass_estimate(kahler_form(k), opts);
}

WirtingerReport wirtinger_check(const KahlerData& k, const Blade& z, double tol) {
  if (z.grade() != 2 * k.p) throw GradeMismatch("wirtinger_check: blade grade must be 2p");
  if (std::abs(z.norm() - 1.0) > 1e-9) throw NonUnitBlade("wirtinger_check: blade must have unit norm");
  WirtingerReport rep;
  rep.value = kahler_eval(k, z.expansion());
  rep.satisfied = rep.value <= 1.0 + tol;
  rep.complex_distance = j_invariance_defect(z.orthonormal_frame());
  return rep;
}

std::optional<Blade> as_blade(const Multivector& z, double tol) {
  const int r = z.grade();
  const int d = z.dim();
  if (z.is_zero() || r == 0) return std::nullopt;
  if (r == 1) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    for (const auto& [m, c] : z.coeffs()) v(std::countr_zero(m)) = c;
    return blade_from_frame(v);
  }
  // The span of all contractions of z by (r-1)-covectors has dimension r
  // exactly when z is decomposable.
  std::map<IndexMask, Eigen::VectorXd> contractions;
  for (const auto& [mask, c] : z.coeffs()) {
    for (int b : mask_indices(mask)) {
      IndexMask k = mask & ~(IndexMask{1} << b);
      if (contractions.count(k)) continue;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < d; ++i) {
        IndexMask bit = IndexMask{1} << i;
        if (k & bit) continue;
        v(i) = wedge_sign(k, bit) * z.coeff(k | bit);
      }
      contractions.emplace(k, std::move(v));
    }
  }
  Eigen::MatrixXd m(d, static_cast<Eigen::Index>(contractions.size()));
  Eigen::Index col = 0;
  for (const auto& [k, v] : contractions) m.col(col++) = v;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  if (rank != r) return std::nullopt;
  Eigen::MatrixXd w = svd.matrixU().leftCols(r);
  Multivector unit = wedge_frame(w);
  const double c = z.dot(unit);
  if ((z - unit * c).norm() > tol * std::max(1.0, z.norm())) return std::nullopt;
  w.col(0) *= c;
  return blade_from_frame(w);
}

MassBounds mass_bounds(const Multivector& z, const KahlerData& k, DecompositionStrategy strategy,
                       const std::vector<Blade>& given, double tol) {
  if (z.grade() != 2 * k.p) throw GradeMismatch("mass_bounds: grade must be 2p");
  if (z.n() != k.n) throw DimensionMismatch("mass_bounds: dimension mismatch");
  MassBounds out;
  out.lower = kahler_eval(k, z);
  out.upper = 0.0;
  if (strategy == DecompositionStrategy::given) {
    Multivector sum(z.n(), z.grade());
    for (const auto& b : given) {
      sum += b.expansion();
      out.upper += b.norm();
    }
    if ((sum - z).norm() > tol * std::max(1.0, z.norm()))
      throw InvalidParameter("mass_bounds: witness blades do not sum to z");
    out.witness = given;
    return out;
  }
  Multivector rest = z;
  const double scale = std::max(1.0, z.norm());
  while (rest.norm() > tol * scale) {
    if (auto b = as_blade(rest, tol)) {
      out.upper += b->norm();
      out.witness.push_back(*b);
      break;
    }
    // Peel the largest basis blade.
    auto it = std::max_element(rest.coeffs().begin(), rest.coeffs().end(),
                               [](const auto& a, const auto& b) { return std::abs(a.second) < std::abs(b.second); });
    const IndexMask mask = it->first;
    const double c = it->second;
    auto idx = mask_indices(mask);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(z.dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) f(idx[i], static_cast<Eigen::Index>(i)) = 1.0;
    f.col(0) *= c;
    Blade piece = blade_from_frame(f);
    out.upper += std::abs(c);
    out.witness.push_back(piece);
    Multivector removal(z.n(), z.grade());
    removal.add(mask, c);
    rest -= removal;
  }
  return out;
}

}  // namespace plab
