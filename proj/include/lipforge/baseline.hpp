#pragma once

#include "lipforge/expr.hpp"
#include "lipforge/field.hpp"
#include "lipforge/geometry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lipforge {

/// Uniform scalar lattice over the domain box (d = 2 only), with a mask of
/// the nodes lying on the data set.
struct GridField {
  int nx = 0, ny = 0;
  Vec origin;         // lattice node (0, 0)
  double h = 0.0;     // spacing, equal on both axes
  std::vector<double> samples;     // row-major, y outer
  std::vector<std::uint8_t> gamma; // 1 when the node counts as data

  int idx(int ix, int iy) const { return iy * nx + ix; }
  Vec node(int ix, int iy) const {
    Vec p = origin;
    p[0] += ix * h;
    p[1] += iy * h;
    return p;
  }
  double& at(int ix, int iy) { return samples[idx(ix, iy)]; }
  double at(int ix, int iy) const { return samples[idx(ix, iy)]; }
};

/// Empty field over the domain box with spacing ~h (node counts rounded so the
/// lattice spans the box exactly) and the Gamma mask filled in. Throws
/// std::invalid_argument unless d = 2 and h > 0.
GridField make_grid(const Domain& dom, double h);

/// psi-weighted shortest-path distance to Gamma on the 8-neighbor lattice,
/// edge weight = edge length x average psi at the endpoints. Unreachable
/// nodes keep +inf.
GridField weighted_distance(const Domain& dom, const MapExpr& psi, double h);

struct McShaneResult {
  GridField field;
  /// Set when f violates the weighted-distance triangle bound between two
  /// Gamma nodes; holds the violating pair and the gap.
  std::optional<std::pair<Vec, Vec>> violation;
  double violation_gap = 0.0;
};

/// Maximal subsolution inf_gamma f(gamma) + d_psi(x, gamma), computed as a
/// single multi-source Dijkstra seeded with f on the Gamma nodes.
McShaneResult mcshane_extend(const MapExpr& f, const MapExpr& psi,
                             const Domain& dom, double h);

/// First-order upwind fast-marching solution of |grad u| = psi with Dirichlet
/// data f on Gamma. Seeds are improvable: incompatible data is overwritten by
/// the viscosity solution, so the output may differ from f on Gamma.
GridField fast_march(const Domain& dom, const MapExpr& psi, const MapExpr& f,
                     double h);

struct CompareReport {
  double sup_diff = 0.0;
  double mean_diff = 0.0;
  /// max |field - f| over Gamma nodes, per input (bump stack first).
  double stack_boundary_violation = 0.0;
  double base_boundary_violation = 0.0;
  long lattice_points = 0;
};

/// Samples the bump stack's first output component on the baseline lattice
/// and reports sup/mean difference plus boundary attainment for both.
CompareReport compare(const BumpStack& u_stack, const GridField& u_base,
                      const MapExpr& f);

}  // namespace lipforge
