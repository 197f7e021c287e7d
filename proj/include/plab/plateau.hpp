#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "plab/multivector.hpp"
#include "plab/polynomial.hpp"

namespace plab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussRule gauss_legendre(int order);

/// Composite tensor rule: each axis split into `panels` equal pieces with
/// `order` Gauss-Legendre nodes per piece.
struct QuadratureSpec {
  int panels = 1;
  int order = 8;
  std::vector<int> axis_orders;  // per-axis override of `order` when non-empty
};

double integrate_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const QuadratureSpec& spec,
                     const std::function<double(const Eigen::VectorXd&)>& f);

/// Immersed p-dimensional complex leaf (real dimension 2p) parametrised over a
/// rectangle in R^{2p}. Degenerate faces (r = 0, polar axes) and periodic
/// faces contribute nothing to boundary integrals, so the rectangle's boundary
/// stands in for the leaf's boundary.
struct LeafChart {
  int n = 0;  // ambient complex dimension
  int p = 0;  // complex leaf dimension
  Eigen::VectorXd lo, hi;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // 2n x 2p
  /// Parameter axis that is the normalised radius in [0, 1]; -1 if none.
  int radial_axis = -1;
  /// Optional orientation reference (e.g. the unperturbed Jacobian); the chart
  /// must keep det(ref^T J) > 0 on every node.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> reference;

  int param_dim() const { return 2 * p; }
};

/// Complex p-ball (p = 1 or 2) of the given radius through `center` spanned by
/// the orthonormal complex columns of `frame` (n x p); polar/Hopf coordinates
/// (r, theta) or (r, phi, theta1, theta2), oriented so omega^p is positive.
LeafChart complex_ball_chart(const Eigen::VectorXd& center, double radius, const Eigen::MatrixXcd& frame);

/// Unit disc in C^n in coordinates z_1 = r e^{i theta} with w = z_2 = phi(z_1),
/// given with its derivatives phi_z and phi_zbar.
LeafChart graph_disc_chart(int n, std::function<Complex(Complex)> phi, std::function<Complex(Complex)> phi_z,
                           std::function<Complex(Complex)> phi_zbar);

/// Real 2-disc in the (x1, x2)-plane: totally real.
LeafChart totally_real_disc(int n);

struct RefineOptions {
  double rel_tol = 1e-7;
  int start_order = 4;
  int max_order = 32;
};

struct LeafIntegrals {
  double volume = 0.0;        // integral of sqrt(det G)
  double omega_energy = 0.0;  // integral of omega^p / p!
  double mass = 0.0;          // integral of the norm of the tangent 2p-vector
  double max_defect = 0.0;    // max J-invariance defect of tangent planes on the nodes
  long nodes = 0;
};

/// One pass of a fixed rule. Throws ImmersionLost on a degenerate or
/// orientation-reversed node.
LeafIntegrals integrate_leaf(const LeafChart& c, const QuadratureSpec& spec);

/// Volume, energy and the mass path refined by doubling the Gauss order axis by axis.
LeafIntegrals leaf_integrals(const LeafChart& c, const RefineOptions& opts = {});

double leaf_volume(const LeafChart& c, const RefineOptions& opts = {});
double omega_energy(const LeafChart& c, const RefineOptions& opts = {});
/// Mass of the integration current of the leaf, via the multivector norm of the tangent 2p-vector.
double current_mass(const LeafChart& c, const RefineOptions& opts = {});

struct CalibrationGap {
  double gap = 0.0;
  double max_defect = 0.0;
  bool complex_leaf = false;
};

CalibrationGap calibration_gap(const LeafChart& c, const RefineOptions& opts = {});

/// Family of leaves over a parameter interval.
struct FoliatedHypersurface {
  std::function<LeafChart(double)> leaf;
  double l_lo = 0.0;
  double l_hi = 0.0;
  int parameter_order = 8;
};

/// Levi-flat ball: slices of the unit ball of C^3 by x3 = t are complex 2-balls.
FoliatedHypersurface unit_ball_family();

struct LeafRow {
  double parameter;
  double volume;
  double energy;
  double gap;
};

struct MixedVolume {
  double volume = 0.0;
  double energy = 0.0;
  std::vector<LeafRow> leaves;
};

MixedVolume mixed_volume(const FoliatedHypersurface& f, const RefineOptions& opts = {});

void write_leaf_table(std::ostream& out, const MixedVolume& m);

/// Boundary-clamped radial profile b(r), r in [0, 1].
struct Bump {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  /// (1 - r^2)^2.
  static Bump polynomial();
};

enum class BumpMode {
  ambient,  // displace along a fixed ambient vector
  radial,   // reparametrise the radius in-leaf: r -> r (1 + a b(r))
};

struct Perturbation {
  double amplitude = 0.0;
  Bump bump = Bump::polynomial();
  BumpMode mode = BumpMode::ambient;
  Eigen::VectorXd direction;  // ambient mode; defaults to e_{x_n}
};

LeafChart perturb_leaf(const LeafChart& c, const Perturbation& pert);

/// Each leaf displaced by the clamped bump; boundaries unchanged.
FoliatedHypersurface competitor_perturb(const FoliatedHypersurface& f, const Perturbation& pert);

/// Differential form with polynomial coefficients in the 2n real coordinates.
class PolyForm {
public:
  PolyForm(int n, int degree);

  int n() const { return n_; }
  int degree() const { return degree_; }
  const std::map<IndexMask, RealPolynomial>& coeffs() const { return coeffs_; }

  /// Adds c * dx_I; the mask holds 0-based coordinate bits.
  void add(IndexMask mask, const RealPolynomial& c);
  PolyForm d() const;
  /// alpha_x(v_1, ..., v_r) for the columns of `frame`.
  double evaluate(const Eigen::VectorXd& x, const Eigen::MatrixXd& frame) const;

private:
  int n_;
  int degree_;
  std::map<IndexMask, RealPolynomial> coeffs_;
};

/// Random integer-coefficient form of the given degree with polynomial
/// coefficients of total degree <= poly_degree.
PolyForm random_poly_form(int n, int degree, int poly_degree, std::mt19937_64& rng);

struct StokesReport {
  double interior = 0.0;
  double boundary = 0.0;
  double residual = 0.0;
};

StokesReport stokes_report(const LeafChart& c, const PolyForm& alpha, const QuadratureSpec& spec);
double stokes_check(const LeafChart& c, const PolyForm& alpha, const QuadratureSpec& spec = {2, 8});

struct StokesConvergence {
  std::vector<int> panels;
  std::vector<double> residuals;
  /// Least-squares slope of -log residual against log panels over the levels
  /// above round-off; infinite when the residual is at round-off throughout.
  double observed_order = 0.0;
};

StokesConvergence stokes_convergence(const LeafChart& c, const PolyForm& alpha, int order,
                                     const std::vector<int>& panels);

}  // namespace plab
