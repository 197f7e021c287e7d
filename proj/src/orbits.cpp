#include "plab/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace plab {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

int count_labels(const std::vector<int>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<bool> frozen_mask(const SurfaceModel& s) {
  std::vector<bool> frozen(s.dim(), false);
  frozen[s.level_axis] = true;
  return frozen;
}

}  // namespace

SliceCloud slice_sample(const SurfaceModel& s, double level, int density, std::uint64_t seed,
                        const SliceOptions& opts) {
  if (s.level_axis < 0 || s.level_axis >= s.dim()) throw InvalidParameter("slice_sample: surface has no level axis");
  if (density < 1) throw InvalidParameter("slice_sample: density must be positive");
  SliceCloud c;
  c.level = level;
  c.level_axis = s.level_axis;
  if (level < s.lower(s.level_axis) || level > s.upper(s.level_axis)) {
    c.outside_box = true;
    return c;
  }
  const std::vector<bool> frozen = frozen_mask(s);
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> coord;
  for (int i = 0; i < s.dim(); ++i) {
    // Unbounded graph directions are seeded in a unit window.
    const double lo = s.upper(i) - s.lower(i) > 1e3 ? -1.0 : s.lower(i);
    const double hi = s.upper(i) - s.lower(i) > 1e3 ? 1.0 : s.upper(i);
    coord.emplace_back(lo, hi);
  }
  // Seeds find every piece of the slice but land unevenly; a tangent random
  // walk then spreads points over each piece and farthest-point thinning
  // evens out the spacing.
  const long max_seeds = static_cast<long>(density) * density;
  const int discover = std::max(std::min(density, 50), density / 4);
  std::vector<Eigen::VectorXd> pool;
  auto admit = [&](const std::optional<Eigen::VectorXd>& p) {
    if (!p || !s.contains(*p, 1e-9) || s.residual(*p).norm() > 1e-6) return false;
    if (opts.accept && !opts.accept(*p)) return false;
    pool.push_back(*p);
    return true;
  };
  while (static_cast<int>(pool.size()) < discover && c.seeds_tried < max_seeds) {
    Eigen::VectorXd x(s.dim());
    for (int i = 0; i < s.dim(); ++i) x(i) = coord[i](rng);
    x(s.level_axis) = level;
    ++c.seeds_tried;
    admit(project_to_surface(s, x, frozen, 1e-12, 60));
  }
  if (pool.empty()) return c;

  Eigen::VectorXd lo = pool[0], hi = pool[0];
  for (const auto& p : pool) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double step = 0.05 * std::max((hi - lo).norm(), 1e-3);
  Eigen::MatrixXd constraints(s.equations.size() + 1, s.dim());
  std::normal_distribution<double> gauss;
  const std::size_t target = static_cast<std::size_t>(3) * density;
  long attempts = 0;
  while (pool.size() < target && attempts++ < 20L * density) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const Eigen::VectorXd& from = pool[pick(rng)];
    constraints.topRows(s.equations.size()) = s.jacobian(from);
    constraints.bottomRows(1) = Eigen::RowVectorXd::Unit(s.dim(), s.level_axis);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
    const Eigen::MatrixXd tangent = svd.matrixV().rightCols(s.dim() - constraints.rows());
    Eigen::VectorXd dir(tangent.cols());
    for (Eigen::Index k = 0; k < dir.size(); ++k) dir(k) = gauss(rng);
    Eigen::VectorXd x = from + step * (tangent * dir.normalized());
    x(s.level_axis) = level;
    admit(project_to_surface(s, x, frozen, 1e-12, 30));
  }

  // Farthest-point thinning, started from the first discovered point.
  const std::size_t keep = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(density));
  std::vector<double> dist(pool.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (std::size_t k = 0; k < keep; ++k) {
    c.points.push_back(pool[next]);
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      dist[i] = std::min(dist[i], (pool[i] - pool[next]).squaredNorm());
      if (dist[i] > best) {
        best = dist[i];
        far = i;
      }
    }
    next = far;
  }
  for (const auto& p : c.points) {
    Eigen::MatrixXd j = s.jacobian(p);
    j.col(s.level_axis).setZero();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-3 * std::max(1.0, sv(0))) c.near_singular = true;
  }
  if (c.points.size() >= 2) c.adjacency_radius = 4.0 * median_nearest_neighbor(c.points);
  return c;
}

namespace {

// Indices sorted along the coordinate of largest spread; pairs farther apart
// than r in that coordinate are never compared.
struct Sweep {
  std::vector<std::size_t> order;
  std::vector<double> key;

  explicit Sweep(const std::vector<Eigen::VectorXd>& points) {
    Eigen::VectorXd lo = points[0], hi = points[0];
    for (const auto& p : points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    Eigen::Index axis = 0;
    (hi - lo).maxCoeff(&axis);
    order.resize(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return points[i](axis) < points[j](axis); });
    for (std::size_t i : order) key.push_back(points[i](axis));
  }
};

}  // namespace

double median_nearest_neighbor(const std::vector<Eigen::VectorXd>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw InvalidParameter("median_nearest_neighbor: need at least two points");
  const Sweep sw(points);
  std::vector<double> nn(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Eigen::VectorXd& p = points[sw.order[a]];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dk = sw.key[b] - sw.key[a];
      if (dk * dk >= best) break;
      best = std::min(best, (points[sw.order[b]] - p).squaredNorm());
    }
    for (std::size_t b = a; b-- > 0;) {
      const double dk = sw.key[a] - sw.key[b];
      if (dk * dk >= best) break;
      best = std::min(best, (points[sw.order[b]] - p).squaredNorm());
    }
    nn[a] = best;
  }
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(n / 2), nn.end());
  return std::sqrt(nn[n / 2]);
}

std::vector<int> component_labels(const std::vector<Eigen::VectorXd>& points, double radius) {
  const int n = static_cast<int>(points.size());
  if (n == 0) return {};
  UnionFind uf(n);
  const double r2 = radius * radius;
  const Sweep sw(points);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n && sw.key[b] - sw.key[a] <= radius; ++b)
      if ((points[sw.order[a]] - points[sw.order[b]]).squaredNorm() <= r2)
        uf.unite(static_cast<int>(sw.order[a]), static_cast<int>(sw.order[b]));
  std::vector<int> labels(n), remap(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (remap[root] < 0) remap[root] = next++;
    labels[i] = remap[root];
  }
  return labels;
}

ComponentCount component_count(const SliceCloud& c) {
  if (c.empty()) throw InvalidParameter("component_count: empty cloud");
  ComponentCount out;
  out.radius = c.adjacency_radius;
  if (c.points.size() == 1) {
    out.count = out.count_doubled = 1;
    out.labels = {0};
    return out;
  }
  out.labels = component_labels(c.points, out.radius);
  out.count = count_labels(out.labels);
  out.count_doubled = count_labels(component_labels(c.points, 2.0 * out.radius));
  if (out.count != out.count_doubled)
    throw UnstableComponents("component_count: " + std::to_string(out.count) + " components at radius " +
                             std::to_string(out.radius) + " but " + std::to_string(out.count_doubled) +
                             " at twice the radius");
  return out;
}

ComponentCount stable_component_count(const SurfaceModel& s, double level, int density, std::uint64_t seed,
                                      int max_refinements, SliceCloud* cloud_out, const SliceOptions& opts) {
  for (int attempt = 0;; ++attempt) {
    SliceCloud c = slice_sample(s, level, density, seed + static_cast<std::uint64_t>(attempt), opts);
    if (c.empty()) {
      if (cloud_out) *cloud_out = std::move(c);
      return {};
    }
    try {
      ComponentCount cc = component_count(c);
      if (cloud_out) *cloud_out = std::move(c);
      return cc;
    } catch (const UnstableComponents&) {
      if (attempt >= max_refinements) throw;
      density *= 2;
    }
  }
}

namespace {

// Every slab through the middle of a closure, across each principal axis, is
// a single cluster. Spheres pass; rings and handles cut by a slab fall apart.
bool slabs_connected(const std::vector<Eigen::VectorXd>& pts, double radius) {
  if (pts.size() < 8) return false;
  const Eigen::Index d = pts[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), d);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  const Eigen::RowVectorXd mean = m.colwise().mean();
  const Eigen::MatrixXd centered = m.rowwise() - mean;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered.transpose() * centered);
  for (Eigen::Index axis = d - 1; axis >= std::max<Eigen::Index>(0, d - 3); --axis) {
    if (es.eigenvalues()(axis) <= 1e-12 * es.eigenvalues()(d - 1)) continue;
    const Eigen::VectorXd proj = centered * es.eigenvectors().col(axis);
    const double extent = proj.maxCoeff() - proj.minCoeff();
    const double half = std::max(0.1 * extent, 2.0 * radius);
    std::vector<Eigen::VectorXd> slab;
    for (Eigen::Index i = 0; i < proj.size(); ++i)
      if (std::abs(proj(i)) < half) slab.push_back(pts[static_cast<std::size_t>(i)]);
    if (slab.empty()) continue;
    if (count_labels(component_labels(slab, 2.0 * radius)) != 1) return false;
  }
  return true;
}

}  // namespace

SigmaReport sigma_components(const SurfaceModel& s, const Eigen::VectorXd& h, int density, std::uint64_t seed,
                             double excluded_radius) {
  if (excluded_radius <= 0) throw InvalidParameter("sigma_components: excluded radius must be positive");
  const ComplexPointRecord rec = classify_complex_point(s, h);
  if (!(rec.label == PointLabel{PointKind::special_hyperbolic, 1}))
    throw NotHyperbolic("sigma_components: point is " + rec.label.to_string() + ", not special 1-hyperbolic");
  SigmaReport out;
  out.excluded_radius = excluded_radius;
  SliceOptions opts;
  opts.accept = [&](const Eigen::VectorXd& x) { return (x - h).norm() >= excluded_radius; };
  const ComponentCount cc =
      stable_component_count(s, h(s.level_axis), density, seed, 3, &out.cloud, opts);
  out.components = cc.count;
  out.labels = cc.labels;
  out.closures_sphere_like = cc.count > 0;
  for (int k = 0; k < cc.count && out.closures_sphere_like; ++k) {
    std::vector<Eigen::VectorXd> closure{h};
    for (std::size_t i = 0; i < cc.labels.size(); ++i)
      if (cc.labels[i] == k) closure.push_back(out.cloud.points[i]);
    out.closures_sphere_like = slabs_connected(closure, cc.radius);
  }
  return out;
}

namespace {

std::vector<Eigen::VectorXd> surface_mesh(const SurfaceModel& s, int density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> mesh;
  long tries = 0;
  const long max_tries = 200L * density;
  while (static_cast<int>(mesh.size()) < density && tries++ < max_tries) {
    Eigen::VectorXd x(s.dim());
    for (int i = 0; i < s.dim(); ++i) {
      const bool open = s.upper(i) - s.lower(i) > 1e3;
      std::uniform_real_distribution<double> u(open ? -1.0 : s.lower(i), open ? 1.0 : s.upper(i));
      x(i) = u(rng);
    }
    auto p = project_to_surface(s, x);
    if (p && s.contains(*p, 1e-9)) mesh.push_back(*p);
  }
  return mesh;
}

}  // namespace

NuFunction build_nu(const SurfaceModel& s, int mesh_density, std::uint64_t seed, std::function<double(double)> reparam) {
  if (s.level_axis < 0) throw InvalidParameter("build_nu: surface has no level axis");
  const auto records = classify_surface(s);
  NuFunction nu;
  nu.level_axis = s.level_axis;
  const int axis = s.level_axis;
  if (reparam)
    nu.value = [axis, reparam](const Eigen::VectorXd& x) { return reparam(x(axis)); };
  else
    nu.value = [axis](const Eigen::VectorXd& x) { return x(axis); };
  for (const auto& r : records) {
    if (r.label.kind == PointKind::parabolic) throw UnclassifiableRecord("build_nu: parabolic complex point");
    if (r.label.kind != PointKind::special_elliptic && r.label.kind != PointKind::special_hyperbolic)
      throw UnclassifiableRecord("build_nu: complex point labelled " + r.label.to_string());
    nu.critical_set.push_back(r.location);
    const double v = nu.value(r.location);
    nu.critical_values.push_back(v);
    if (r.label.kind == PointKind::special_hyperbolic) nu.singular_levels.push_back(v);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
  };
  uniq(nu.critical_values);
  uniq(nu.singular_levels);
  nu.mesh = surface_mesh(s, mesh_density, seed);
  for (const auto& p : nu.mesh) nu.values.push_back(nu.value(p));
  return nu;
}

NuFunction nu_from_function(const SurfaceModel& s, std::function<double(const Eigen::VectorXd&)> f,
                            int mesh_density, std::uint64_t seed) {
  NuFunction nu;
  nu.level_axis = s.level_axis;
  nu.value = std::move(f);
  nu.mesh = surface_mesh(s, mesh_density, seed);
  for (const auto& p : nu.mesh) nu.values.push_back(nu.value(p));
  return nu;
}

LiftedModel graph_lift(const SurfaceModel& s, const NuFunction& nu) {
  if (!nu.value || nu.mesh.empty()) throw DegenerateNu("graph_lift: nu has no samples");
  constexpr double kExclusion = 0.05;
  constexpr double kStep = 1e-6;
  LiftedModel lift{s, nu, Eigen::MatrixXd(static_cast<Eigen::Index>(nu.mesh.size()), 1 + s.dim()), {}, {}};
  int checked = 0;
  for (std::size_t i = 0; i < nu.mesh.size(); ++i) {
    const Eigen::VectorXd& p = nu.mesh[i];
    lift.graph(static_cast<Eigen::Index>(i), 0) = nu.values[i];
    lift.graph.row(static_cast<Eigen::Index>(i)).tail(s.dim()) = p.transpose();
    bool near_critical = false;
    for (const auto& c : nu.critical_set) near_critical |= (p - c).norm() < kExclusion;
    bool on_singular_level = false;
    for (double l : nu.singular_levels) on_singular_level |= std::abs(nu.values[i] - l) < 1e-9;
    lift.in_tau.push_back(near_critical || on_singular_level);
    if (near_critical) continue;
    // Surface gradient of nu by central differences along an orthonormal tangent frame.
    const Eigen::MatrixXd t = tangent_basis(s, p);
    Eigen::VectorXd g(t.cols());
    for (Eigen::Index k = 0; k < t.cols(); ++k)
      g(k) = (nu.value(p + kStep * t.col(k)) - nu.value(p - kStep * t.col(k))) / (2 * kStep);
    ++checked;
    if (g.norm() < 1e-6) throw DegenerateNu("graph_lift: nu is critical away from the complex points");
  }
  if (checked == 0) throw DegenerateNu("graph_lift: every sample lies in the critical set");
  lift.tau_values = nu.critical_values;
  return lift;
}

HAuditReport condition_H_audit(const LiftedModel& lift, const std::vector<double>& levels, int density,
                               std::uint64_t seed, std::vector<LabelledCloud>* samples_out) {
  HAuditReport rep;
  if (levels.empty()) return rep;
  rep.L_candidates = lift.tau_values;
  std::uint64_t level_seed = seed;
  for (double level : levels) {
    FiberRow row;
    row.level = level;
    for (double c : lift.tau_values) {
      if (std::abs(level - c) < kNearCriticalGap) row.near_critical = true;
      if (std::abs(level - c) < 1e-9) row.tau_intersect = true;
    }
    for (double c : lift.nu.singular_levels)
      if (std::abs(level - c) < 1e-9) row.tau_intersect = true;
    if (row.near_critical) {
      rep.fiber_table.push_back(row);
      continue;
    }
    SliceCloud cloud;
    const ComponentCount cc = stable_component_count(lift.surface, level, density, level_seed, 3, &cloud);
    level_seed += 7919;
    if (samples_out) samples_out->push_back({std::move(cloud), cc.labels});
    row.components = cc.count;
    row.components_doubled = cc.count_doubled;
    row.connected = cc.count == 1;
    if (cc.count > 1 || row.tau_intersect) rep.L_candidates.push_back(level);
    rep.fiber_table.push_back(row);
  }
  std::sort(rep.L_candidates.begin(), rep.L_candidates.end());
  rep.L_candidates.erase(std::unique(rep.L_candidates.begin(), rep.L_candidates.end()), rep.L_candidates.end());
  return rep;
}

void write_slice_csv(std::ostream& out, const SurfaceModel& s, const std::vector<SliceCloud>& clouds,
                     const std::vector<std::vector<int>>& labels) {
  if (clouds.size() != labels.size()) throw DimensionMismatch("write_slice_csv: one label list per cloud");
  auto names = real_coordinate_names(s.n);
  const int columns = s.builtin_id ? 5 : s.dim();
  for (int i = 0; i < columns; ++i) out << names[i] << ',';
  out << "level,component_id\n";
  out.precision(12);
  for (std::size_t c = 0; c < clouds.size(); ++c) {
    if (labels[c].size() != clouds[c].points.size()) throw DimensionMismatch("write_slice_csv: label count");
    for (std::size_t i = 0; i < clouds[c].points.size(); ++i) {
      for (int k = 0; k < columns; ++k) out << clouds[c].points[i](k) << ',';
      out << clouds[c].level << ',' << labels[c][i] << '\n';
    }
  }
}

}  // namespace plab
