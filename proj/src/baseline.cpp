#include "lipforge/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace lipforge {

namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

struct HeapEntry {
  double dist;
  int node;
  bool operator>(const HeapEntry& o) const { return dist > o.dist; }
};

using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

std::vector<double> psi_on_grid(const GridField& g, const MapExpr& psi) {
  std::vector<double> w(static_cast<std::size_t>(g.nx) * g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      w[g.idx(ix, iy)] = psi.component(0).eval(g.node(ix, iy));
  return w;
}

/// Multi-source Dijkstra from the pre-seeded finite entries of g.samples.
void dijkstra_sweep(GridField& g, const std::vector<double>& w) {
  MinHeap heap;
  for (int n = 0; n < static_cast<int>(g.samples.size()); ++n)
    if (std::isfinite(g.samples[n])) heap.push({g.samples[n], n});
  while (!heap.empty()) {
    auto [dist, n] = heap.top();
    heap.pop();
    if (dist > g.samples[n]) continue;
    const int ix = n % g.nx, iy = n / g.nx;
    for (int k = 0; k < 8; ++k) {
      const int jx = ix + kDx[k], jy = iy + kDy[k];
      if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny) continue;
      const int m = g.idx(jx, jy);
      const double len = g.h * ((k < 4) ? 1.0 : std::numbers::sqrt2);
      const double cand = dist + len * 0.5 * (w[n] + w[m]);
      if (cand < g.samples[m]) {
        g.samples[m] = cand;
        heap.push({cand, m});
      }
    }
  }
}

}  // namespace

GridField make_grid(const Domain& dom, double h) {
  if (dom.dim() != 2) throw std::invalid_argument("grid baselines require d = 2");
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  GridField g;
  g.origin = dom.box_lo();
  const Vec span = dom.box_hi() - dom.box_lo();
  g.nx = std::max(2, static_cast<int>(std::lround(span[0] / h)) + 1);
  g.ny = std::max(2, static_cast<int>(std::lround(span[1] / h)) + 1);
  g.h = span[0] / (g.nx - 1);
  if (std::abs(span[1] / (g.ny - 1) - g.h) > 1e-9 * g.h)
    throw std::invalid_argument("grid spacing must divide both box extents");
  g.samples.assign(static_cast<std::size_t>(g.nx) * g.ny, kInf);
  g.gamma.assign(g.samples.size(), 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      Vec p = g.node(ix, iy);
      // Box-edge nodes count as data when the exterior does.
      const bool edge = ix == 0 || iy == 0 || ix == g.nx - 1 || iy == g.ny - 1;
      if ((edge && dom.spec().exterior_is_gamma) || dom.dist_to_gamma(p) < 0.5 * g.h)
        g.gamma[g.idx(ix, iy)] = 1;
    }
  return g;
}

GridField weighted_distance(const Domain& dom, const MapExpr& psi, double h) {
  GridField g = make_grid(dom, h);
  const auto w = psi_on_grid(g, psi);
  for (std::size_t n = 0; n < g.samples.size(); ++n)
    if (g.gamma[n]) g.samples[n] = 0.0;
  dijkstra_sweep(g, w);
  return g;
}

McShaneResult mcshane_extend(const MapExpr& f, const MapExpr& psi,
                             const Domain& dom, double h) {
  McShaneResult out;
  out.field = make_grid(dom, h);
  GridField& g = out.field;
  const auto w = psi_on_grid(g, psi);
  std::vector<double> f_gamma(g.samples.size(), 0.0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int n = g.idx(ix, iy);
      if (!g.gamma[n]) continue;
      f_gamma[n] = f.component(0).eval(g.node(ix, iy));
      g.samples[n] = f_gamma[n];
    }
  dijkstra_sweep(g, w);
  // Incompatible data shows up as the relaxation lowering some Gamma node
  // below its own datum; the nearest seed still holding its value is the
  // other end of the violating pair.
  double worst = 0.0;
  int worst_node = -1;
  for (int n = 0; n < static_cast<int>(g.samples.size()); ++n) {
    if (!g.gamma[n]) continue;
    const double gap = f_gamma[n] - g.samples[n];
    if (gap > worst + 1e-12) {
      worst = gap;
      worst_node = n;
    }
  }
  if (worst_node >= 0) {
    out.violation_gap = worst;
    Vec a = g.node(worst_node % g.nx, worst_node / g.nx);
    Vec b = a;
    double best = kInf;
    for (int n = 0; n < static_cast<int>(g.samples.size()); ++n) {
      if (!g.gamma[n] || n == worst_node) continue;
      if (g.samples[n] != f_gamma[n]) continue;
      Vec p = g.node(n % g.nx, n / g.nx);
      const double dist = (p - a).norm();
      if (dist < best) {
        best = dist;
        b = p;
      }
    }
    out.violation = std::make_pair(a, b);
  }
  return out;
}

GridField fast_march(const Domain& dom, const MapExpr& psi, const MapExpr& f,
                     double h) {
  GridField g = make_grid(dom, h);
  const auto w = psi_on_grid(g, psi);

  // Band initialization: within 2h of Gamma, seed with the datum at the
  // nearest Gamma point plus psi times the offset. Seeds stay improvable, so
  // incompatible data is overwritten by the causal sweep.
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int n = g.idx(ix, iy);
      Vec p = g.node(ix, iy);
      if (g.gamma[n]) {
        g.samples[n] = f.component(0).eval(p);
        continue;
      }
      double dist = dom.dist_to_gamma(p);
      std::optional<Vec> star = dom.project_to_gamma(p);
      const double edge = std::min({p[0] - g.origin[0], p[1] - g.origin[1],
                                    g.origin[0] + (g.nx - 1) * g.h - p[0],
                                    g.origin[1] + (g.ny - 1) * g.h - p[1]});
      if (dom.spec().exterior_is_gamma && edge < dist) {
        dist = edge;
        star.reset();  // datum taken at the clamped edge point below
      }
      if (dist > 2.0 * g.h) continue;
      Vec q = p;
      if (star) {
        q = *star;
      } else {
        q[0] = std::clamp(q[0], g.origin[0], g.origin[0] + (g.nx - 1) * g.h);
        q[1] = std::clamp(q[1], g.origin[1], g.origin[1] + (g.ny - 1) * g.h);
        if (edge == p[0] - g.origin[0]) q[0] = g.origin[0];
        else if (edge == g.origin[0] + (g.nx - 1) * g.h - p[0]) q[0] = g.origin[0] + (g.nx - 1) * g.h;
        else if (edge == p[1] - g.origin[1]) q[1] = g.origin[1];
        else q[1] = g.origin[1] + (g.ny - 1) * g.h;
      }
      g.samples[n] = f.component(0).eval(q) + w[n] * (p - q).norm();
    }

  // Upwind quadratic update: solve (u-a)^2 + (u-b)^2 = (h psi)^2 with the
  // smaller axis neighbors a, b, falling back to one-sided when the
  // discriminant fails.
  auto update = [&](int ix, int iy) {
    double a = kInf, b = kInf;
    if (ix > 0) a = std::min(a, g.at(ix - 1, iy));
    if (ix < g.nx - 1) a = std::min(a, g.at(ix + 1, iy));
    if (iy > 0) b = std::min(b, g.at(ix, iy - 1));
    if (iy < g.ny - 1) b = std::min(b, g.at(ix, iy + 1));
    const double rhs = g.h * w[g.idx(ix, iy)];
    if (!std::isfinite(a) && !std::isfinite(b)) return kInf;
    if (!std::isfinite(b) || std::abs(a - b) >= rhs)
      return std::min(a, b) + rhs;
    if (!std::isfinite(a)) return b + rhs;
    const double disc = 2.0 * rhs * rhs - (a - b) * (a - b);
    return 0.5 * (a + b + std::sqrt(disc));
  };

  MinHeap heap;
  for (int n = 0; n < static_cast<int>(g.samples.size()); ++n)
    if (std::isfinite(g.samples[n])) heap.push({g.samples[n], n});
  std::vector<std::uint8_t> frozen(g.samples.size(), 0);
  while (!heap.empty()) {
    auto [dist, n] = heap.top();
    heap.pop();
    if (frozen[n] || dist > g.samples[n]) continue;
    frozen[n] = 1;
    const int ix = n % g.nx, iy = n / g.nx;
    for (int k = 0; k < 4; ++k) {
      const int jx = ix + kDx[k], jy = iy + kDy[k];
      if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny) continue;
      const int m = g.idx(jx, jy);
      if (frozen[m]) continue;
      const double cand = update(jx, jy);
      if (cand < g.samples[m]) {
        g.samples[m] = cand;
        heap.push({cand, m});
      }
    }
  }
  return g;
}

CompareReport compare(const BumpStack& u_stack, const GridField& u_base,
                      const MapExpr& f) {
  CompareReport rep;
  double sum = 0.0;
  for (int iy = 0; iy < u_base.ny; ++iy)
    for (int ix = 0; ix < u_base.nx; ++ix) {
      const int n = u_base.idx(ix, iy);
      Vec p = u_base.node(ix, iy);
      const double up = u_stack.eval(p)[0];
      const double ub = u_base.samples[n];
      const double diff = std::abs(up - ub);
      rep.sup_diff = std::max(rep.sup_diff, diff);
      sum += diff;
      ++rep.lattice_points;
      if (u_base.gamma[n]) {
        const double fv = f.component(0).eval(p);
        rep.stack_boundary_violation =
            std::max(rep.stack_boundary_violation, std::abs(up - fv));
        rep.base_boundary_violation =
            std::max(rep.base_boundary_violation, std::abs(ub - fv));
      }
    }
  rep.mean_diff = sum / rep.lattice_points;
  return rep;
}

}  // namespace lipforge
