#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "plab/polynomial.hpp"

namespace plab {

/// One closed loop t in [0, 2pi] -> C^n with its derivative.
struct CurveLoop {
  std::function<Eigen::VectorXcd(double)> point;
  std::function<Eigen::VectorXcd(double)> tangent;
};

inline constexpr double kClosureTol = 1e-12;
inline constexpr int kPeriodicNodes = 512;

/// Union of closed immersed loops in C^n.
class CurveModel {
public:
  /// Throws CurveNotClosed if some loop fails to close within kClosureTol.
  CurveModel(int n, std::vector<CurveLoop> loops);

  int n() const { return n_; }
  const std::vector<CurveLoop>& loops() const { return loops_; }

  /// t -> s(t) with s increasing, s(2pi) = s(0) + 2pi.
  CurveModel reparametrized(std::function<double(double)> s, std::function<double(double)> ds) const;

  /// Single loop z(t) = sum_k a_k e^{i k t}; one (k, a_k) pair per frequency.
  static CurveModel trigonometric(int n, const std::vector<std::pair<int, Eigen::VectorXcd>>& modes);

private:
  int n_;
  std::vector<CurveLoop> loops_;
};

/// sum_j P_j(z) dz_j with polynomial coefficients in z_1..z_n.
struct HolomorphicOneForm {
  int n = 0;
  std::vector<ComplexPolynomial> coeffs;

  static HolomorphicOneForm single(int n, const ComplexPolynomial& p, int j);  // P dz_j, j 1-based
  static HolomorphicOneForm exact(const ComplexPolynomial& p);                 // dP
  /// Parses e.g. "z2" with variables z1..zn.
  static HolomorphicOneForm parse(int n, const std::string& coefficient, int j);
};

std::vector<std::string> complex_coordinate_names(int n);

/// Integral of the pullback by the periodic trapezoid rule, doubling the node
/// count from `nodes` until two passes agree to round-off.
Complex moment_integral(const CurveModel& c, const HolomorphicOneForm& form, int nodes = kPeriodicNodes);

/// Regular grid xi = xi0 + i h, eta = eta0 + j h (real steps from complex bases).
struct StencilGrid {
  Complex xi0 = 0.0;
  Complex eta0 = 0.0;
  double h = 1e-2;
  int nxi = 3;
  int neta = 3;

  Complex xi(int i) const { return xi0 + double(i) * h; }
  Complex eta(int j) const { return eta0 + double(j) * h; }
  /// Grid covering [xi0, xi0 + lx] x [eta0, eta0 + ly] with spacing close to h.
  static StencilGrid box(Complex xi0, double lx, Complex eta0, double ly, double h);
};

using GridFunction = std::function<Complex(Complex, Complex)>;

Eigen::MatrixXcd sample_grid(const GridFunction& f, const StencilGrid& g);

/// max over interior nodes of |f D_xi f - D_eta f|, central differences.
/// Throws GridTooSmall below 3 nodes per axis.
double shockwave_residual(const Eigen::MatrixXcd& samples, double h);
double shockwave_residual(const GridFunction& f, const StencilGrid& g);

struct ShockwaveConvergence {
  std::vector<double> h;
  std::vector<double> residuals;
  double observed_order = 0.0;  // least-squares slope of log residual against log h
};

/// Residuals on a fixed box at the given spacings.
ShockwaveConvergence shockwave_convergence(const GridFunction& f, Complex xi0, double lx, Complex eta0, double ly,
                                           const std::vector<double>& hs);

/// The matrix nu_lambda = (xi_lambda, eta) with xi_lambda,l = xi_l + eta'_l lambda.
struct NuLambdaFrame {
  double lambda = 0.0;
  Complex xi1 = 0.0, xi2 = 0.0;
  Complex eta1 = 0.0, eta2 = 0.0;
  Complex eta1p = 1.0, eta2p = 1.0;

  Complex xi_lambda1() const { return xi1 + eta1p * lambda; }
  Complex xi_lambda2() const { return xi2 + eta2p * lambda; }
  /// h(z) = z3 - (xi1 + eta'1 lambda) - eta1 z2.
  Complex h(const Eigen::VectorXcd& z) const;
};

inline constexpr double kMinDenominator = 1e-6;

/// G = (1/2 pi i) \oint z2 dh / h over a curve in C^3.
/// Throws VanishingDenominator if min |h| on the nodes is below kMinDenominator.
Complex cauchy_G(const CurveModel& gamma, const NuLambdaFrame& frame, int nodes = kPeriodicNodes);

/// Boundary of the analytic disc {z2 = zeta, z3 = c, |zeta| <= 1} in C^3.
CurveModel disc_boundary(Complex c);

/// G over a grid in (xi_lambda1, eta1), other entries taken from `base`.
Eigen::MatrixXcd sample_G(const CurveModel& gamma, const NuLambdaFrame& base, const StencilGrid& g);

struct DecompositionReport {
  Eigen::MatrixXcd dxx_G;  // interior nodes
  /// max |D^2 G - sum_j D^2 f_j| over interior nodes; 0 without candidates.
  double decomposition_residual = 0.0;
  std::vector<double> candidate_shock_residuals;
  /// Round-off amplification of the second differences, eps max|G| / h^2 relative to max|D^2 G|.
  double condition_estimate = 0.0;
  bool reliable = true;
};

DecompositionReport decomposition_probe(const Eigen::MatrixXcd& G, const StencilGrid& g,
                                        const std::vector<GridFunction>& candidates = {});

struct GRow {
  double lambda;
  Complex G;
};

/// CSV: lambda,re_G,im_G
void write_G_table(std::ostream& out, const std::vector<GRow>& rows);
/// CSV: re_xi,im_xi,re_eta,im_eta,re_G,im_G
void write_frame_grid(std::ostream& out, const StencilGrid& g, const Eigen::MatrixXcd& G);

}  // namespace plab
