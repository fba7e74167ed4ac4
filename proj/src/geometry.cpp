#include "lipforge/geometry.hpp"

#include "lipforge/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lipforge {

namespace {

double clamp01(double t) { return std::min(1.0, std::max(0.0, t)); }

Vec closest_on_segment(const Vec& x, const Vec& a, const Vec& b) {
  Vec d = b - a;
  double len2 = d.squaredNorm();
  if (len2 == 0.0) return a;
  double t = clamp01((x - a).dot(d) / len2);
  return a + t * d;
}

double dist_to_box(const Vec& x, const Vec& lo, const Vec& hi) {
  double out2 = 0.0;
  double inside = kInf;
  for (int k = 0; k < x.size(); ++k) {
    if (x[k] < lo[k]) {
      out2 += (lo[k] - x[k]) * (lo[k] - x[k]);
    } else if (x[k] > hi[k]) {
      out2 += (x[k] - hi[k]) * (x[k] - hi[k]);
    } else {
      inside = std::min(inside, std::min(x[k] - lo[k], hi[k] - x[k]));
    }
  }
  if (out2 > 0.0) return std::sqrt(out2);
  (void)inside;
  return 0.0;  // on or inside the box
}

}  // namespace

double point_segment_dist(const Vec& x, const Vec& a, const Vec& b) {
  return (x - closest_on_segment(x, a, b)).norm();
}

// Closest approach of two segments; clamped quadratic minimization.
double segment_segment_dist(const Vec& a0, const Vec& a1, const Vec& b0, const Vec& b1) {
  Vec u = a1 - a0, v = b1 - b0, w = a0 - b0;
  double a = u.squaredNorm();
  double b = u.dot(v);
  double c = v.squaredNorm();
  double d = u.dot(w);
  double e = v.dot(w);
  double den = a * c - b * b;

  double s;
  if (den > 1e-14 * a * c) {
    s = clamp01((b * e - c * d) / den);
  } else {
    s = 0.0;  // nearly parallel; endpoint sweep below covers the rest
  }
  double t = (c > 0.0) ? clamp01((b * s + e) / c) : 0.0;
  s = (a > 0.0) ? clamp01((b * t - d) / a) : 0.0;
  double best = (a0 + s * u - (b0 + t * v)).norm();

  best = std::min(best, point_segment_dist(a0, b0, b1));
  best = std::min(best, point_segment_dist(a1, b0, b1));
  best = std::min(best, point_segment_dist(b0, a0, a1));
  best = std::min(best, point_segment_dist(b1, a0, a1));
  return best;
}

double dist_to_shape(const Vec& x, const Shape& shape) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
          return std::max(0.0, s.offset - s.normal.dot(x));
        } else if constexpr (std::is_same_v<T, BoxShape>) {
          return dist_to_box(x, s.lo, s.hi);
        } else if constexpr (std::is_same_v<T, DiskShape>) {
          return std::max(0.0, (x - s.center).norm() - s.radius);
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          return std::abs((x - s.center).norm() - s.radius);
        } else if constexpr (std::is_same_v<T, PointSet>) {
          double best = kInf;
          for (const auto& p : s.points) best = std::min(best, (x - p).norm());
          return best;
        } else {
          double best = kInf;
          for (const auto& [a, b] : s.segments)
            best = std::min(best, point_segment_dist(x, a, b));
          return best;
        }
      },
      shape);
}

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

Domain Domain::make(const DomainSpec& spec) {
  const int d = static_cast<int>(spec.box_lo.size());
  if (d < 2) throw std::invalid_argument("domain dimension must be >= 2");
  if (spec.box_hi.size() != d) throw std::invalid_argument("box lo/hi dimension mismatch");
  for (int k = 0; k < d; ++k) {
    if (!(spec.box_lo[k] < spec.box_hi[k]) || !std::isfinite(spec.box_lo[k]) ||
        !std::isfinite(spec.box_hi[k]))
      throw std::invalid_argument("degenerate or non-finite box");
  }
  Domain dom(spec);

  // Reject configurations where Gamma covers the whole box.
  const int n = 48;
  Vec x(d);
  bool found_free = false;
  std::vector<int> idx(d, 0);
  while (!found_free) {
    for (int k = 0; k < d; ++k)
      x[k] = spec.box_lo[k] +
             (spec.box_hi[k] - spec.box_lo[k]) * (idx[k] + 0.5) / n;
    if (dom.in_free_region(x)) found_free = true;
    int k = d - 1;
    while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
    if (k < 0) break;
  }
  if (!found_free) throw std::invalid_argument("empty free region: Gamma covers the box");
  return dom;
}

bool Domain::in_box(const Vec& x) const {
  for (int k = 0; k < dim(); ++k)
    if (x[k] < spec_.box_lo[k] || x[k] > spec_.box_hi[k]) return false;
  return true;
}

double Domain::dist_to_gamma(const Vec& x) const {
  double best = kInf;
  if (spec_.exterior_is_gamma) {
    // Distance to the closed exterior of the box.
    if (!in_box(x)) return 0.0;
    for (int k = 0; k < dim(); ++k)
      best = std::min(best, std::min(x[k] - spec_.box_lo[k], spec_.box_hi[k] - x[k]));
  }
  for (const auto& s : spec_.gamma) best = std::min(best, dist_to_shape(x, s));
  return best;
}

double Domain::dist_to_complement(const Vec& x) const {
  double best = dist_to_gamma(x);
  if (!spec_.exterior_is_gamma) {
    if (!in_box(x)) return 0.0;
    for (int k = 0; k < dim(); ++k)
      best = std::min(best, std::min(x[k] - spec_.box_lo[k], spec_.box_hi[k] - x[k]));
  }
  return best;
}

bool Domain::in_gamma(const Vec& x) const { return dist_to_gamma(x) == 0.0; }

bool Domain::in_free_region(const Vec& x) const {
  if (!in_box(x)) return false;
  for (int k = 0; k < dim(); ++k)
    if (x[k] == spec_.box_lo[k] || x[k] == spec_.box_hi[k]) return false;
  return dist_to_gamma(x) > 0.0;
}

std::vector<Shape> Domain::boundary_shapes() const {
  if (dim() != 2)
    throw std::logic_error("boundary_shapes implemented for d = 2 only");
  std::vector<Shape> out;
  const Vec& lo = spec_.box_lo;
  const Vec& hi = spec_.box_hi;
  auto v2 = [](double x, double y) {
    Vec p(2);
    p << x, y;
    return p;
  };
  SegmentSet edges;
  edges.segments = {{v2(lo[0], lo[1]), v2(hi[0], lo[1])},
                    {v2(hi[0], lo[1]), v2(hi[0], hi[1])},
                    {v2(hi[0], hi[1]), v2(lo[0], hi[1])},
                    {v2(lo[0], hi[1]), v2(lo[0], lo[1])}};
  out.emplace_back(edges);
  const double diag = (hi - lo).norm();
  for (const auto& s : spec_.gamma) {
    std::visit(
        [&](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, DiskShape>) {
            out.emplace_back(CircleShape{sh.center, sh.radius});
          } else if constexpr (std::is_same_v<T, CircleShape>) {
            out.emplace_back(sh);
          } else if constexpr (std::is_same_v<T, BoxShape>) {
            SegmentSet e;
            e.segments = {{v2(sh.lo[0], sh.lo[1]), v2(sh.hi[0], sh.lo[1])},
                          {v2(sh.hi[0], sh.lo[1]), v2(sh.hi[0], sh.hi[1])},
                          {v2(sh.hi[0], sh.hi[1]), v2(sh.lo[0], sh.hi[1])},
                          {v2(sh.lo[0], sh.hi[1]), v2(sh.lo[0], sh.lo[1])}};
            out.emplace_back(e);
          } else if constexpr (std::is_same_v<T, HalfSpace>) {
            // Boundary line n.x = c, clipped to a generous box cover.
            Vec mid = 0.5 * (lo + hi);
            Vec foot = mid + (sh.offset - sh.normal.dot(mid)) * sh.normal;
            Vec tang(2);
            tang << -sh.normal[1], sh.normal[0];
            SegmentSet e;
            e.segments = {{foot - diag * tang, foot + diag * tang}};
            out.emplace_back(e);
          } else {
            out.emplace_back(sh);  // points and segments are their own boundary
          }
        },
        s);
  }
  return out;
}

double Domain::volume_estimate(int cells_per_axis) const {
  const int d = dim();
  Vec span = spec_.box_hi - spec_.box_lo;
  double cell_vol = 1.0;
  for (int k = 0; k < d; ++k) cell_vol *= span[k] / cells_per_axis;
  std::vector<int> idx(d, 0);
  Vec x(d);
  std::int64_t count = 0;
  while (true) {
    for (int k = 0; k < d; ++k)
      x[k] = spec_.box_lo[k] + span[k] * (idx[k] + 0.5) / cells_per_axis;
    if (in_free_region(x)) ++count;
    int k = d - 1;
    while (k >= 0 && ++idx[k] == cells_per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  return cell_vol * static_cast<double>(count);
}

std::optional<Vec> Domain::project_to_gamma(const Vec& x) const {
  std::optional<Vec> best;
  double best_d = kInf;
  auto consider = [&](const Vec& p) {
    double d = (x - p).norm();
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  };
  if (spec_.exterior_is_gamma) {
    // Nearest point on the box boundary.
    Vec p = x;
    for (int k = 0; k < dim(); ++k)
      p[k] = std::min(std::max(p[k], spec_.box_lo[k]), spec_.box_hi[k]);
    if ((p - x).norm() > 0.0) {
      consider(p);
    } else {
      int bk = 0;
      double bd = kInf;
      double bv = 0.0;
      for (int k = 0; k < dim(); ++k) {
        double dl = x[k] - spec_.box_lo[k];
        double dh = spec_.box_hi[k] - x[k];
        if (dl < bd) { bd = dl; bk = k; bv = spec_.box_lo[k]; }
        if (dh < bd) { bd = dh; bk = k; bv = spec_.box_hi[k]; }
      }
      Vec q = x;
      q[bk] = bv;
      consider(q);
    }
  }
  for (const auto& s : spec_.gamma) {
    std::visit(
        [&](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, HalfSpace>) {
            double gap = sh.offset - sh.normal.dot(x);
            consider(gap <= 0.0 ? x : Vec(x + gap * sh.normal));
          } else if constexpr (std::is_same_v<T, BoxShape>) {
            Vec p = x;
            for (int k = 0; k < x.size(); ++k)
              p[k] = std::min(std::max(p[k], sh.lo[k]), sh.hi[k]);
            consider(p);
          } else if constexpr (std::is_same_v<T, DiskShape>) {
            double r = (x - sh.center).norm();
            if (r <= sh.radius) {
              consider(x);
            } else {
              consider(Vec(sh.center + (sh.radius / r) * (x - sh.center)));
            }
          } else if constexpr (std::is_same_v<T, CircleShape>) {
            Vec dir = x - sh.center;
            double r = dir.norm();
            if (r == 0.0) {
              dir = Vec::Zero(x.size());
              dir[0] = 1.0;
              r = 1.0;
            }
            consider(Vec(sh.center + (sh.radius / r) * dir));
          } else if constexpr (std::is_same_v<T, PointSet>) {
            for (const auto& p : sh.points) consider(p);
          } else {
            for (const auto& [a, b] : sh.segments) consider(closest_on_segment(x, a, b));
          }
        },
        s);
  }
  if (!best) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// SegmentLedger
// ---------------------------------------------------------------------------

void SegmentLedger::begin_scale(int i) { max_scale_ = std::max(max_scale_, i); }

void SegmentLedger::add_segment(const Segment& s) { segments_.push_back(s); }

void SegmentLedger::add_centers(int scale, const std::vector<Vec>& centers) {
  centers_[scale] = centers;
}

std::vector<Segment> SegmentLedger::segments_up_to(int i) const {
  std::vector<Segment> out;
  for (const auto& s : segments_)
    if (s.scale <= i) out.push_back(s);
  return out;
}

std::vector<Segment> SegmentLedger::segments_at(int i) const {
  std::vector<Segment> out;
  for (const auto& s : segments_)
    if (s.scale == i) out.push_back(s);
  return out;
}

const std::vector<Vec>& SegmentLedger::centers_at(int i) const {
  static const std::vector<Vec> empty;
  auto it = centers_.find(i);
  return it == centers_.end() ? empty : it->second;
}

// ---------------------------------------------------------------------------
// SpatialGrid
// ---------------------------------------------------------------------------

SpatialGrid::SpatialGrid(const Vec& lo, const Vec& hi, double cell) : lo_(lo), cell_(cell) {
  const int d = static_cast<int>(lo.size());
  counts_.resize(d);
  strides_.resize(d);
  std::int64_t stride = 1;
  for (int k = 0; k < d; ++k) {
    counts_[k] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil((hi[k] - lo[k]) / cell)) + 1);
    strides_[k] = stride;
    stride *= counts_[k];
  }
}

std::int64_t SpatialGrid::cell_key(const Vec& p) const {
  std::int64_t key = 0;
  for (int k = 0; k < p.size(); ++k) {
    auto i = static_cast<std::int64_t>(std::floor((p[k] - lo_[k]) / cell_));
    i = std::min(counts_[k] - 1, std::max<std::int64_t>(0, i));
    key += i * strides_[k];
  }
  return key;
}

void SpatialGrid::insert_point(int id, const Vec& p) { cells_[cell_key(p)].push_back(id); }

void SpatialGrid::insert_box(int id, const Vec& lo, const Vec& hi) {
  const int d = static_cast<int>(lo.size());
  std::vector<std::int64_t> i0(d), i1(d), it(d);
  for (int k = 0; k < d; ++k) {
    i0[k] = std::min(counts_[k] - 1, std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor((lo[k] - lo_[k]) / cell_))));
    i1[k] = std::min(counts_[k] - 1, std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor((hi[k] - lo_[k]) / cell_))));
    it[k] = i0[k];
  }
  while (true) {
    std::int64_t key = 0;
    for (int k = 0; k < d; ++k) key += it[k] * strides_[k];
    cells_[key].push_back(id);
    int k = d - 1;
    while (k >= 0 && ++it[k] > i1[k]) it[k--] = i0[k];
    if (k < 0) break;
  }
}

void SpatialGrid::query(const Vec& p, double radius, std::vector<int>& out) const {
  out.clear();
  const int d = static_cast<int>(p.size());
  std::vector<std::int64_t> i0(d), i1(d), it(d);
  for (int k = 0; k < d; ++k) {
    i0[k] = std::min(counts_[k] - 1, std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor((p[k] - radius - lo_[k]) / cell_))));
    i1[k] = std::min(counts_[k] - 1, std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor((p[k] + radius - lo_[k]) / cell_))));
    it[k] = i0[k];
  }
  while (true) {
    std::int64_t key = 0;
    for (int k = 0; k < d; ++k) key += it[k] * strides_[k];
    auto found = cells_.find(key);
    if (found != cells_.end())
      out.insert(out.end(), found->second.begin(), found->second.end());
    int k = d - 1;
    while (k >= 0 && ++it[k] > i1[k]) it[k--] = i0[k];
    if (k < 0) break;
  }
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

namespace {

struct PackingScan {
  const Domain& dom;
  const std::vector<Segment>& obstacles;
  double radius;
  double spacing;
  SpatialGrid obstacle_grid;

  PackingScan(const Domain& d, const std::vector<Segment>& obs, double r, double sp)
      : dom(d), obstacles(obs), radius(r), spacing(sp),
        obstacle_grid(d.box_lo(), d.box_hi(), std::max(2.0 * r, 1e-6)) {
    for (int i = 0; i < static_cast<int>(obs.size()); ++i) {
      Vec lo = obs[i].a.cwiseMin(obs[i].b);
      Vec hi = obs[i].a.cwiseMax(obs[i].b);
      obstacle_grid.insert_box(i, lo, hi);
    }
  }

  // B(p, radius) compactly contained in V minus the obstacles.
  bool contained(const Vec& p, std::vector<int>& scratch) const {
    if (dom.dist_to_complement(p) < radius + spacing) return false;
    obstacle_grid.query(p, radius + spacing, scratch);
    for (int id : scratch) {
      const Segment& s = obstacles[id];
      if (point_segment_dist(p, s.a, s.b) < radius + spacing) return false;
    }
    return true;
  }

  // Row-major odometer over the candidate lattice (last axis fastest).
  template <typename F>
  void for_each_candidate(F&& f) const {
    const int d = dom.dim();
    std::vector<std::int64_t> n(d), it(d, 0);
    for (int k = 0; k < d; ++k)
      n[k] = static_cast<std::int64_t>(
                 std::floor((dom.box_hi()[k] - dom.box_lo()[k]) / spacing)) + 1;
    Vec p(d);
    while (true) {
      for (int k = 0; k < d; ++k) p[k] = dom.box_lo()[k] + spacing * it[k];
      if (!f(p)) return;
      int k = d - 1;
      while (k >= 0 && ++it[k] == n[k]) it[k--] = 0;
      if (k < 0) return;
    }
  }
};

}  // namespace

Packing maximal_packing(const Domain& dom, const std::vector<Segment>& obstacles,
                        int scale, double radius) {
  if (!(radius > 0.0 && radius <= 1.0))
    throw std::invalid_argument("packing radius must be in (0, 1]");
  const double spacing = radius / 8.0;
  PackingScan scan(dom, obstacles, radius, spacing);

  Packing packing;
  packing.scale = scale;
  packing.radius = radius;
  packing.audit_spacing = spacing;

  SpatialGrid accepted(dom.box_lo(), dom.box_hi(), 2.0 * radius);
  std::vector<int> scratch;
  scan.for_each_candidate([&](const Vec& p) {
    if (!scan.contained(p, scratch)) return true;
    accepted.query(p, 2.0 * radius, scratch);
    for (int id : scratch)
      if ((p - packing.balls[id].center).norm() <= 2.0 * radius) return true;
    accepted.insert_point(static_cast<int>(packing.balls.size()), p);
    packing.balls.push_back(Ball{p, radius});
    return true;
  });
  return packing;
}

bool audit_maximality(const Domain& dom, const std::vector<Segment>& obstacles,
                      const Packing& packing, Vec* witness) {
  PackingScan scan(dom, obstacles, packing.radius, packing.audit_spacing);
  SpatialGrid accepted(dom.box_lo(), dom.box_hi(), 2.0 * packing.radius);
  for (int i = 0; i < static_cast<int>(packing.balls.size()); ++i)
    accepted.insert_point(i, packing.balls[i].center);

  bool ok = true;
  std::vector<int> scratch;
  scan.for_each_candidate([&](const Vec& p) {
    if (!scan.contained(p, scratch)) return true;
    accepted.query(p, 2.0 * packing.radius, scratch);
    for (int id : scratch)
      if ((p - packing.balls[id].center).norm() <= 2.0 * packing.radius) return true;
    ok = false;
    if (witness) *witness = p;
    return false;
  });
  return ok;
}

double coverage_statistic(const Domain& dom, const SegmentLedger& ledger, int i,
                          int nsamples, Vec* witness) {
  std::vector<Vec> centers;
  for (int j = 1; j <= i; ++j) {
    const auto& u = ledger.centers_at(j);
    centers.insert(centers.end(), u.begin(), u.end());
  }
  const double diam = (dom.box_hi() - dom.box_lo()).norm();
  SpatialGrid grid(dom.box_lo(), dom.box_hi(), std::max(1e-6, diam / 256.0));
  for (int k = 0; k < static_cast<int>(centers.size()); ++k)
    grid.insert_point(k, centers[k]);

  double worst = 0.0;
  std::vector<int> scratch;
  std::uint64_t n = 0;
  int found = 0;
  Vec lo = dom.box_lo(), span = dom.box_hi() - dom.box_lo();
  while (found < nsamples) {
    Vec p = halton_point(n++, dom.dim());
    Vec x = lo + span.cwiseProduct(p);
    if (!dom.in_free_region(x)) continue;
    ++found;
    double best = dom.dist_to_gamma(x);
    if (!centers.empty()) {
      // Expanding-radius nearest neighbor over the center grid.
      for (double r = std::max(1e-6, diam / 256.0); r <= 2.0 * diam && r < best;
           r *= 2.0) {
        grid.query(x, r, scratch);
        for (int id : scratch) best = std::min(best, (x - centers[id]).norm());
        if (best <= r) break;
      }
    }
    if (best > worst) {
      worst = best;
      if (witness) *witness = x;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Minkowski content
// ---------------------------------------------------------------------------

MinkowskiEstimate minkowski_content(const std::vector<Shape>& shapes, int dim,
                                    const std::vector<double>& radii) {
  MinkowskiEstimate est;
  est.radii = radii;
  if (radii.empty()) throw std::invalid_argument("empty radii list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw std::invalid_argument("radii must be decreasing");
  }
  if (shapes.empty()) {
    est.values.assign(radii.size(), 0.0);
    est.estimate = 0.0;
    return est;
  }

  // Bounding box over the shapes (half-spaces carry no bounded extent).
  Vec lo = Vec::Constant(dim, kInf), hi = Vec::Constant(dim, -kInf);
  auto grow = [&](const Vec& p, double pad) {
    lo = lo.cwiseMin((p.array() - pad).matrix()).eval();
    hi = hi.cwiseMax((p.array() + pad).matrix()).eval();
  };
  for (const auto& s : shapes) {
    std::visit(
        [&](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, BoxShape>) {
            grow(sh.lo, 0.0);
            grow(sh.hi, 0.0);
          } else if constexpr (std::is_same_v<T, DiskShape> ||
                               std::is_same_v<T, CircleShape>) {
            grow(sh.center, sh.radius);
          } else if constexpr (std::is_same_v<T, PointSet>) {
            for (const auto& p : sh.points) grow(p, 0.0);
          } else if constexpr (std::is_same_v<T, SegmentSet>) {
            for (const auto& [a, b] : sh.segments) {
              grow(a, 0.0);
              grow(b, 0.0);
            }
          }
        },
        s);
  }
  if (!std::isfinite(lo[0])) throw std::invalid_argument("unbounded shape list");

  const double r_max = radii.front();
  const double r_min = radii.back();
  const double spacing = r_min / 4.0;
  double cell_count = 1.0;
  for (int k = 0; k < dim; ++k)
    cell_count *= std::floor((hi[k] - lo[k] + 2.0 * r_max) / spacing) + 1.0;
  if (cell_count > 8e7)
    throw std::invalid_argument("radii below achievable lattice resolution");

  const double cell_vol = std::pow(spacing, dim);
  std::vector<std::int64_t> counts(radii.size(), 0);
  std::vector<std::int64_t> n(dim), it(dim, 0);
  for (int k = 0; k < dim; ++k)
    n[k] = static_cast<std::int64_t>(
               std::floor((hi[k] - lo[k] + 2.0 * r_max) / spacing)) + 1;
  Vec p(dim);
  while (true) {
    for (int k = 0; k < dim; ++k) p[k] = lo[k] - r_max + spacing * (it[k] + 0.5);
    double dist = kInf;
    for (const auto& s : shapes) dist = std::min(dist, dist_to_shape(p, s));
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (dist < radii[i]) ++counts[i];
    int k = dim - 1;
    while (k >= 0 && ++it[k] == n[k]) it[k--] = 0;
    if (k < 0) break;
  }
  est.values.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    est.values[i] = cell_vol * static_cast<double>(counts[i]) / (2.0 * radii[i]);
  est.estimate = est.values.back();
  return est;
}

}  // namespace lipforge
