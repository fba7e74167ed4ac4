#pragma once

#include "lipforge/expr.hpp"
#include "lipforge/geometry.hpp"
#include "lipforge/sampling.hpp"
#include "lipforge/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lipforge {

// ---------------------------------------------------------------------------
// Cutoff profile: radial, exactly 1 on r <= R/2, exactly 0 on r >= R, the
// exp-based smooth step in between. All bumps share this profile so their
// Lipschitz constants are reproducible.
// ---------------------------------------------------------------------------

/// Profile value at radius r for support radius R.
double cutoff_value(double r, double support_radius);
/// d/dr of the profile (<= 0).
double cutoff_derivative(double r, double support_radius);
/// max |d phi / ds| of the unit smooth step; |phi'(r)| <= this * 2/R.
double cutoff_step_lip();

// ---------------------------------------------------------------------------
// One analytic oscillator: value eps0 * sin(10 t xi1 / eps0) * phi(|x - z0|)
// on one output axis, with xi1 the coordinate along `direction`.
// ---------------------------------------------------------------------------

struct Bump {
  Vec center;             // z0
  double radius = 0.0;    // support radius of S
  Vec direction;          // unit vector in R^d
  int axis = 0;           // output component receiving the oscillation
  double amplitude = 0.0; // eps0 > 0
  double t = 0.0;         // frequency parameter
  int scale = 0;          // ledger cross-reference
  int parent_ball = -1;
  double profile_lip = 0.0;  // recorded Lipschitz bound of the cutoff, 2*step/R
};

/// Value contribution on bump.axis; exactly 0 outside the support ball.
double bump_value(const Bump& b, const Vec& x, double t_scale = 1.0);
/// Gradient of the contribution (d-vector), exact closed form.
Vec bump_gradient(const Bump& b, const Vec& x, double t_scale = 1.0);
/// Continuity in the frequency parameter, valid on [0, t_max]:
/// Lip(chi_t - chi_s, S) <= bound * |t - s|.
double bump_t_continuity(const Bump& b, double t_max);

// ---------------------------------------------------------------------------
// BumpStack: u(x) = f(x) + sum of bumps, with an exact Jacobian.
// Appends are single-writer; evaluation is pure and thread-safe.
// ---------------------------------------------------------------------------

class BumpStack {
 public:
  BumpStack() = default;
  BumpStack(MapExpr base, int dim);

  /// Virtual extent of the bump index; call before the first append.
  void set_bounds(const Vec& lo, const Vec& hi);

  int dim() const { return dim_; }
  int out_dim() const { return base_.out_dim(); }
  const MapExpr& base() const { return base_; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  std::size_t bump_count() const { return bumps_.size(); }

  void append(Bump b);

  Vec eval(const Vec& x) const { return eval_prefix(x, bumps_.size()); }
  /// Value of the stack truncated to its first `count` bumps. Summation is in
  /// append order, so snapshots agree bit-exactly with the full stack wherever
  /// later bumps vanish.
  Vec eval_prefix(const Vec& x, std::size_t count) const;
  /// All bump parameters scaled by s in [0,1]: s=0 gives the base, s=1 the stack.
  Vec eval_homotopy(const Vec& x, double s) const;

  Mat jacobian(const Vec& x, bool* kink = nullptr) const;

 private:
  void collect(const Vec& x, std::vector<int>& out) const;

  MapExpr base_;
  int dim_ = 0;
  std::vector<Bump> bumps_;
  // One spatial hash per distinct support radius; supports shrink with scale.
  std::map<double, std::unique_ptr<SpatialGrid>> buckets_;
  Vec box_lo_, box_hi_;
};

/// Read-only view of a stack with one trial bump on top; nothing is appended.
class PlusBump {
 public:
  PlusBump(const BumpStack& u, const Bump& b) : u_(&u), b_(&b) {}
  int dim() const { return u_->dim(); }
  Vec eval(const Vec& x) const {
    Vec out = u_->eval(x);
    out[b_->axis] += bump_value(*b_, x);
    return out;
  }
  Mat jacobian(const Vec& x, bool* kink = nullptr) const {
    Mat j = u_->jacobian(x, kink);
    j.row(b_->axis) += bump_gradient(*b_, x).transpose();
    return j;
  }

 private:
  const BumpStack* u_;
  const Bump* b_;
};

// ---------------------------------------------------------------------------
// Lipschitz estimators. Templated over any field with dim/eval/jacobian.
// ---------------------------------------------------------------------------

/// Largest singular value: closed form when min(rows, cols) <= 2, power
/// iteration (tol 1e-12, <= 1000 iterations) otherwise.
double op_norm(const Mat& j);

struct LocalLipConfig {
  double r0 = 1e-3;           // largest sampling radius at kink points
  int n_radii = 5;            // geometric sequence r0, r0/2, ...
  int pairs_per_radius = 256; // deterministic low-discrepancy directions
};

/// Local Lipschitz constant at x: the Jacobian operator norm at smooth
/// points; at kinks, the max sampled difference quotient at the smallest
/// radius. `per_radius` (optional) receives the estimate per radius, largest
/// radius first; the per-radius list is monotone nonincreasing by
/// construction, matching Lip(u, B(x, r)) being nondecreasing in r.
template <typename Field>
double local_lip(const Field& u, const Vec& x, const LocalLipConfig& cfg = {},
                 std::vector<double>* per_radius = nullptr, bool* was_kink = nullptr) {
  bool kink = false;
  Mat j = u.jacobian(x, &kink);
  if (was_kink) *was_kink = kink;
  if (!kink) {
    double v = op_norm(j);
    if (per_radius) per_radius->assign(cfg.n_radii, v);
    return v;
  }
  const auto dirs = direction_set(u.dim(), cfg.pairs_per_radius);
  std::vector<double> own(cfg.n_radii, 0.0);
  const Vec ux = u.eval(x);
  for (int k = 0; k < cfg.n_radii; ++k) {
    double r = cfg.r0 * std::pow(0.5, k);
    double m = 0.0;
    for (const Vec& e : dirs) {
      Vec a = x + r * e;
      Vec b = x + 0.5 * r * e;
      Vec ua = u.eval(a);
      Vec ub = u.eval(b);
      m = std::max(m, (ua - ub).norm() / (0.5 * r));
      m = std::max(m, (ua - ux).norm() / r);
      m = std::max(m, (ub - ux).norm() / (0.5 * r));
    }
    own[k] = m;
  }
  for (int k = cfg.n_radii - 2; k >= 0; --k) own[k] = std::max(own[k], own[k + 1]);
  if (per_radius) *per_radius = own;
  return own.back();
}

struct SegmentLip {
  double pair_max = 0.0;      // max sampled difference quotient (lower bound)
  double local_lip_max = 0.0; // max of local_lip over the samples (upper proxy)
};

/// Lipschitz constant of u restricted to the segment, from n equally spaced
/// samples. Throws on a degenerate segment or n < 2.
template <typename Field>
SegmentLip lip_on_segment(const Field& u, const Segment& seg, int n,
                          bool with_local = true) {
  if (n < 2) throw std::invalid_argument("lip_on_segment needs n >= 2");
  Vec dir = seg.b - seg.a;
  double len = dir.norm();
  if (len == 0.0) throw std::invalid_argument("degenerate segment");
  std::vector<Vec> vals(n);
  SegmentLip out;
  for (int i = 0; i < n; ++i) {
    Vec x = seg.a + (static_cast<double>(i) / (n - 1)) * dir;
    vals[i] = u.eval(x);
    if (with_local) out.local_lip_max = std::max(out.local_lip_max, local_lip(u, x));
  }
  const double h = len / (n - 1);
  if (n <= 1024) {
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k)
        out.pair_max = std::max(out.pair_max, (vals[i] - vals[k]).norm() / ((k - i) * h));
  } else {
    // Along a segment the pair maximum is attained at adjacent samples.
    for (int i = 0; i + 1 < n; ++i)
      out.pair_max = std::max(out.pair_max, (vals[i] - vals[i + 1]).norm() / h);
  }
  return out;
}

/// Max difference quotient over all point pairs; duplicates skipped.
template <typename Field>
double lip_bruteforce(const Field& u, const std::vector<Vec>& points) {
  if (points.size() < 2) throw std::invalid_argument("lip_bruteforce needs >= 2 points");
  std::vector<Vec> vals(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) vals[i] = u.eval(points[i]);
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t k = i + 1; k < points.size(); ++k) {
      double dx = (points[i] - points[k]).norm();
      if (dx == 0.0) continue;
      m = std::max(m, (vals[i] - vals[k]).norm() / dx);
    }
  return m;
}

}  // namespace lipforge
