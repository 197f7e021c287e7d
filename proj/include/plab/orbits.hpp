#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "plab/surfaces.hpp"

namespace plab {

/// Points of S on one level {x[level_axis] = level}.
struct SliceCloud {
  double level = 0.0;
  int level_axis = -1;
  std::vector<Eigen::VectorXd> points;
  double adjacency_radius = 0.0;
  /// Number of seeds tried; when `points` is empty this is the emptiness certificate.
  long seeds_tried = 0;
  /// Level lies outside the bounding box, so the slice is empty without sampling.
  bool outside_box = false;
  /// Some sample has a nearly degenerate slice Jacobian (a complex point is close).
  bool near_singular = false;

  bool empty() const { return points.empty(); }
};

struct SliceOptions {
  /// Extra acceptance test on projected points (e.g. excluding a ball).
  std::function<bool(const Eigen::VectorXd&)> accept;
};

inline constexpr int kDefaultSliceDensity = 2000;

SliceCloud slice_sample(const SurfaceModel& s, double level, int density, std::uint64_t seed,
                        const SliceOptions& opts = {});

double median_nearest_neighbor(const std::vector<Eigen::VectorXd>& points);

/// Union-find over the radius graph; labels are numbered in order of first appearance.
std::vector<int> component_labels(const std::vector<Eigen::VectorXd>& points, double radius);

struct ComponentCount {
  int count = 0;
  int count_doubled = 0;
  double radius = 0.0;
  std::vector<int> labels;
};

/// Components at the cloud's adjacency radius, certified by the count at twice
/// that radius. Throws UnstableComponents when the two disagree.
ComponentCount component_count(const SliceCloud& c);

/// Samples and counts, doubling the density after each unstable attempt.
ComponentCount stable_component_count(const SurfaceModel& s, double level, int density, std::uint64_t seed,
                                      int max_refinements = 3, SliceCloud* cloud_out = nullptr,
                                      const SliceOptions& opts = {});

struct SigmaReport {
  int components = 0;
  /// Heuristic only: every central slab of every closure is connected.
  bool closures_sphere_like = false;
  double excluded_radius = 0.0;
  SliceCloud cloud;
  std::vector<int> labels;
};

/// Components of the singular orbit through a 1-hyperbolic point h with a ball around h removed.
SigmaReport sigma_components(const SurfaceModel& s, const Eigen::VectorXd& h, int density = kDefaultSliceDensity,
                             std::uint64_t seed = 1, double excluded_radius = 0.75);

/// Global orbit function: level sets are CR orbits.
struct NuFunction {
  int level_axis = -1;
  std::function<double(const Eigen::VectorXd&)> value;
  std::vector<Eigen::VectorXd> mesh;
  std::vector<double> values;
  std::vector<Eigen::VectorXd> critical_set;  // complex points
  std::vector<double> critical_values;        // nu on the complex points, ascending
  std::vector<double> singular_levels;        // levels of hyperbolic points (whole orbits are singular)
};

/// nu = level coordinate composed with an increasing reparametrisation (identity by default).
NuFunction build_nu(const SurfaceModel& s, int mesh_density = 500, std::uint64_t seed = 1,
                    std::function<double(double)> reparam = {});

/// nu from an arbitrary function; critical data left empty.
NuFunction nu_from_function(const SurfaceModel& s, std::function<double(const Eigen::VectorXd&)> f,
                            int mesh_density = 500, std::uint64_t seed = 1);

struct LiftedModel {
  SurfaceModel surface;
  NuFunction nu;
  Eigen::MatrixXd graph;        // rows (nu(z), z)
  std::vector<bool> in_tau;     // per mesh point
  std::vector<double> tau_values;

  /// Projection k onto the first coordinate.
  Eigen::VectorXd k() const { return graph.col(0); }
};

/// Graph of nu over S with the singular set marked. Throws DegenerateNu when
/// the surface gradient of nu vanishes away from the critical set.
LiftedModel graph_lift(const SurfaceModel& s, const NuFunction& nu);

struct FiberRow {
  double level = 0.0;
  int components = 0;
  int components_doubled = 0;
  bool tau_intersect = false;
  bool near_critical = false;  // excluded from sampling
  bool connected = false;
};

struct HAuditReport {
  std::vector<double> L_candidates;
  std::vector<FiberRow> fiber_table;
};

inline constexpr double kNearCriticalGap = 1e-3;

struct LabelledCloud {
  SliceCloud cloud;
  std::vector<int> labels;
};

/// `samples_out`, when given, receives the cloud and labels of every sampled level.
HAuditReport condition_H_audit(const LiftedModel& lift, const std::vector<double>& levels,
                               int density = kDefaultSliceDensity, std::uint64_t seed = 1,
                               std::vector<LabelledCloud>* samples_out = nullptr);

/// CSV with columns x1,y1,...,level,component_id (the constant y3 of the builtins is dropped).
void write_slice_csv(std::ostream& out, const SurfaceModel& s, const std::vector<SliceCloud>& clouds,
                     const std::vector<std::vector<int>>& labels);

}  // namespace plab
