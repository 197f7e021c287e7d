#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plab/errors.hpp"
#include "plab/polynomial.hpp"

namespace plab {

/// Smooth scalar function on R^{2n} with its gradient.
struct ImplicitFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::string description;

  static ImplicitFunction from_polynomial(const RealPolynomial& p, std::string description = {});
};

enum class BuiltinSurface { elliptic_sphere_721, horned_sphere_731, torus_742 };

std::string to_string(BuiltinSurface id);
std::optional<BuiltinSurface> builtin_from_string(const std::string& name);

/// C^infinity step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);
double smooth_step_derivative(double s);

/// Compact real 2-codimensional submanifold of C^n given by two implicit
/// equations inside an axis-aligned box, optionally cut by a domain predicate.
/// Real coordinates are ordered x1, y1, ..., xn, yn.
struct SurfaceModel {
  enum class Representation { implicit, graph };

  int n = 0;
  std::vector<ImplicitFunction> equations;
  Eigen::VectorXd lower;  // box, length 2n
  Eigen::VectorXd upper;
  std::function<bool(const Eigen::VectorXd&)> domain;  // empty: whole box
  Representation representation = Representation::implicit;
  std::optional<BuiltinSurface> builtin_id;
  double smoothing_width = 0.0;
  /// 0-based real coordinate whose level sets slice S into CR orbits; -1 if none.
  int level_axis = -1;
  std::string name;

  int dim() const { return 2 * n; }
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
  bool in_box(const Eigen::VectorXd& x, double margin = 0.0) const;
  bool contains(const Eigen::VectorXd& x, double margin = 1e-9) const;
};

inline constexpr double kDefaultSmoothingWidth = 0.05;

SurfaceModel make_builtin(BuiltinSurface id, double smoothing_width = kDefaultSmoothingWidth);

/// Surface {w = phi(z)} in C^n (w = z_n) for a complex-valued polynomial
/// phi = re + i im in the real coordinates of z.
SurfaceModel make_graph(int n, const RealPolynomial& phi_re, const RealPolynomial& phi_im,
                        double box_half_width = 1.0);

/// Quadric w = z^T a z + z^T b zbar + zbar^T c zbar in C^{m+1}.
SurfaceModel make_quadric(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                          const Eigen::MatrixXcd& c, double box_half_width = 1.0);

/// Surface with implicit polynomial equations in x_j, y_j.
SurfaceModel make_polynomial_surface(int n, const std::vector<std::string>& equations,
                                     Eigen::VectorXd lower, Eigen::VectorXd upper, int level_axis = -1);

/// Real 2n x 2n orthogonal matrix of a complex n x n matrix.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& u);
Eigen::VectorXd realify(const Eigen::VectorXcd& z);
Eigen::VectorXcd complexify(const Eigen::VectorXd& x);

/// The image U(S) of S under an ambient unitary motion.
SurfaceModel apply_unitary(const SurfaceModel& s, const Eigen::MatrixXcd& u);

/// Gauss-Newton projection onto S; coordinates flagged in `frozen` stay fixed.
std::optional<Eigen::VectorXd> project_to_surface(const SurfaceModel& s, const Eigen::VectorXd& x0,
                                                  const std::vector<bool>& frozen = {}, double tol = 1e-12,
                                                  int max_iter = 60);

/// Orthonormal basis of T_x S (columns). Throws DegenerateTangent.
Eigen::MatrixXd tangent_basis(const SurfaceModel& s, const Eigen::VectorXd& x);

/// Deviation of T_x S from being a complex hyperplane; 0 exactly at complex points.
double cr_defect(const SurfaceModel& s, const Eigen::VectorXd& x, double on_surface_tol = 1e-8);

struct ComplexPointSearch {
  std::vector<Eigen::VectorXd> points;
  /// Converged points whose defining system is singular: they lie on a
  /// continuum of complex points and are not reported as isolated.
  std::vector<Eigen::VectorXd> non_isolated;
  int seeds = 0;
};

struct ComplexPointOptions {
  double cluster_radius = 1e-4;
  double defect_tol = 1e-6;
};

ComplexPointSearch find_complex_points(const SurfaceModel& s, int grid_density,
                                       const ComplexPointOptions& opts = {});

/// Second-order jet at a complex point in holomorphic coordinates (z, w),
/// X = base + chart * (z, w), with S = { w = Q(z) + O(|z|^3) } and
/// Q(z) = z^T a z + z^T b zbar + zbar^T c zbar.
struct QuadraticExpansion {
  Eigen::MatrixXcd a;
  Eigen::MatrixXcd b;
  Eigen::MatrixXcd c;
  Eigen::VectorXcd base_point;
  Eigen::MatrixXcd chart;  // unitary; last column is the complex normal
  double fit_residual = 0.0;

  int m() const { return static_cast<int>(a.rows()); }
  Complex evaluate(const Eigen::VectorXcd& z) const;
};

struct ExpansionOptions {
  double radius = 1e-3;
};

QuadraticExpansion quadratic_expansion(const SurfaceModel& s, const Eigen::VectorXd& p,
                                       const ExpansionOptions& opts = {});

/// Holomorphic linear change z = v z' (v unitary) applied to the expansion.
QuadraticExpansion change_z_coordinates(const QuadraticExpansion& q, const Eigen::MatrixXcd& v);

/// Real quadratic form s^T P s on R^{2m} (s = x1, y1, ..., xm, ym) as
/// Q = z^T h zbar + 2 Re(zbar^T c zbar); h Hermitian, c complex symmetric.
struct HermitianSplit {
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd c;
};
HermitianSplit split_real_form(const Eigen::MatrixXd& p);
Eigen::MatrixXd real_form_matrix(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& c);

/// w' = w / phase + z^T holomorphic_correction z makes Q real valued.
struct FlatNormalForm {
  Eigen::MatrixXd real_q;
  Complex phase;
  Eigen::MatrixXcd holomorphic_correction;
  double flatness_residual = 0.0;

  /// Original expansion value recovered from the normal form.
  Complex original_value(const Eigen::VectorXcd& z) const;
};

struct FlatOptions {
  double phase_tol = 1e-6;
};

FlatNormalForm flat_normal_form(const QuadraticExpansion& q, const FlatOptions& opts = {});

struct TakagiResult {
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXcd u;               // c = u diag(s) u^T
  double residual = 0.0;
};

TakagiResult takagi(const Eigen::MatrixXcd& c);

struct SpecialNormalForm {
  std::vector<double> lambdas;  // descending, >= 0
  Eigen::MatrixXcd transform;   // z = transform * z'
  double residual = 0.0;
  bool ties = false;
};

SpecialNormalForm special_normal_form(const Eigen::MatrixXd& real_q, double tol = 1e-9);

enum class PointKind {
  special_elliptic,
  special_hyperbolic,
  parabolic,
  hyperbolic_nonspecial,
  elliptic_nonspecial,
  nonflat
};

struct PointLabel {
  PointKind kind;
  int k = 0;  // size of J for special_hyperbolic

  std::string to_string() const;
  friend bool operator==(const PointLabel&, const PointLabel&) = default;
};

inline constexpr double kClassifyTol = 1e-6;

PointLabel classify_point(const std::vector<double>& lambdas, double tol = kClassifyTol);

struct ComplexPointRecord {
  Eigen::VectorXd location;
  bool flat = false;
  bool special = false;
  std::vector<double> lambdas;
  PointLabel label{PointKind::nonflat};
  double cr_defect = 0.0;
};

ComplexPointRecord classify_complex_point(const SurfaceModel& s, const Eigen::VectorXd& p);
std::vector<ComplexPointRecord> classify_surface(const SurfaceModel& s, int grid_density = 5);

struct EulerCount {
  int count;
  bool matches;
};

EulerCount euler_signed_count(const std::vector<ComplexPointRecord>& records, int chi);

}  // namespace plab
