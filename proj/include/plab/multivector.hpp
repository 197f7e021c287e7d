#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "plab/errors.hpp"

namespace plab {

/// Real coordinates of C^n are ordered x1, y1, x2, y2, ..., xn, yn.
/// Index masks use bit (2j) for x_{j+1} and bit (2j+1) for y_{j+1}.
using IndexMask = std::uint64_t;

inline constexpr double kDefaultTol = 1e-9;

/// 1-based real index of x_j and y_j.
constexpr int x_index(int j) { return 2 * j - 1; }
constexpr int y_index(int j) { return 2 * j; }

/// The complex structure J on R^{2n}: J dx_j = dy_j, J dy_j = -dx_j.
Eigen::MatrixXd complex_structure(int n);

/// (-1)^{#{(i, j) : i in a, j in b, i > j}}, i.e. the sign of e_a ^ e_b
/// relative to e_{a|b}. Callers must ensure a & b == 0.
int wedge_sign(IndexMask a, IndexMask b);

/// Grade-homogeneous element of the exterior algebra over R^{2n}, stored
/// sparsely. Also used for constant-coefficient forms via the dual basis.
class Multivector {
public:
  Multivector(int n, int grade);

  /// Wedge of basis vectors with the given 1-based indices, in order.
  static Multivector basis(int n, std::initializer_list<int> indices);
  static Multivector from_vector(const Eigen::VectorXd& v);

  int n() const { return n_; }
  int grade() const { return grade_; }
  int dim() const { return 2 * n_; }

  double coeff(IndexMask mask) const;
  const std::map<IndexMask, double>& coeffs() const { return coeffs_; }
  void add(IndexMask mask, double value);

  double norm() const;
  double dot(const Multivector& o) const;
  bool is_zero() const { return coeffs_.empty(); }

  Multivector& operator+=(const Multivector& o);
  Multivector& operator-=(const Multivector& o);
  Multivector& operator*=(double s);
  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(Multivector a, double s) { return a *= s; }
  friend Multivector operator*(double s, Multivector a) { return a *= s; }

private:
  void check_compatible(const Multivector& o) const;

  int n_;
  int grade_;
  std::map<IndexMask, double> coeffs_;
};

Multivector wedge(const Multivector& a, const Multivector& b);

/// Coefficients of v_1 ^ ... ^ v_r are the r x r minors of the frame.
Multivector wedge_frame(const Eigen::MatrixXd& frame);

/// Value of a constant-coefficient r-form on the r-vector e_1 ^ ... ^ e_r
/// spanned by the frame columns.
double evaluate_form(const Multivector& form, const Eigen::MatrixXd& frame);

class Blade {
public:
  const Eigen::MatrixXd& frame() const { return frame_; }
  const Multivector& expansion() const { return expansion_; }
  int grade() const { return static_cast<int>(frame_.cols()); }
  int n() const { return expansion_.n(); }
  double norm() const { return expansion_.norm(); }
  /// Same plane and orientation, euclidean norm 1.
  Blade unit() const;
  /// Orthonormal basis of the spanned plane with the blade's orientation.
  Eigen::MatrixXd orthonormal_frame() const;

private:
  Blade(Eigen::MatrixXd frame, Multivector expansion)
      : frame_(std::move(frame)), expansion_(std::move(expansion)) {}
  friend Blade blade_from_frame(const Eigen::MatrixXd&, double);

  Eigen::MatrixXd frame_;
  Multivector expansion_;
};

/// Throws RankDeficient when the columns are numerically dependent.
Blade blade_from_frame(const Eigen::MatrixXd& frame, double rank_tol = kDefaultTol);

/// Real 2p-blade of the complex span of `complex_frame`, oriented by the
/// complex structure: v_1, i v_1, v_2, i v_2, ...
Blade complex_plane_blade(int n, int p, const std::vector<Eigen::VectorXcd>& complex_frame);

/// Deviation of span(basis) from J-invariance: spectral norm of the part of
/// J(span) orthogonal to span. `basis` must be orthonormal.
double j_invariance_defect(const Eigen::MatrixXd& orthonormal_basis);

struct KahlerData {
  KahlerData(int n, int p);
  int n;
  int p;
};

/// omega^p / p! as a constant-coefficient 2p-form.
Multivector kahler_form(const KahlerData& k);

/// omega^p(z) / p!.
double kahler_eval(const KahlerData& k, const Multivector& z);

struct ComassResult {
  double value;
  Blade argmax;
};

struct ComassOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  double initial_step = 0.1;
  double min_step = 1e-12;
  int max_iterations = 20000;
};

/// Multi-start ascent of the form over oriented orthonormal frames.
ComassResult comass_estimate(const Multivector& form, const ComassOptions& opts);
ComassResult comass_estimate(const KahlerData& k, int restarts, std::uint64_t seed);

struct WirtingerReport {
  double value;
  bool satisfied;
  double complex_distance;
};

WirtingerReport wirtinger_check(const KahlerData& k, const Blade& z, double tol = kDefaultTol);

enum class DecompositionStrategy { greedy, given };

struct MassBounds {
  double lower;
  double upper;
  std::vector<Blade> witness;
};

/// Returns the blade when z is decomposable within tol (relative).
std::optional<Blade> as_blade(const Multivector& z, double tol = kDefaultTol);

MassBounds mass_bounds(const Multivector& z, const KahlerData& k,
                       DecompositionStrategy strategy = DecompositionStrategy::greedy,
                       const std::vector<Blade>& given = {}, double tol = kDefaultTol);

}  // namespace plab
