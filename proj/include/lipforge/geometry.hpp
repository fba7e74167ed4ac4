#pragma once

#include "lipforge/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace lipforge {

// ---------------------------------------------------------------------------
// Primitive closed shapes making up the data set Gamma. All carry exact
// Euclidean distance formulas; membership is dist == 0.
// ---------------------------------------------------------------------------

struct HalfSpace {
  Vec normal;    // unit outward normal of the complement: set is {x : n.x >= c}
  double offset = 0.0;
};

struct BoxShape {
  Vec lo, hi;  // closed axis-aligned box
};

struct DiskShape {
  Vec center;
  double radius = 0.0;  // closed ball
};

struct CircleShape {
  Vec center;
  double radius = 0.0;  // sphere/circle (boundary only), used for content estimates
};

struct PointSet {
  std::vector<Vec> points;
};

struct SegmentSet {
  std::vector<std::pair<Vec, Vec>> segments;
};

using Shape = std::variant<HalfSpace, BoxShape, DiskShape, CircleShape, PointSet, SegmentSet>;

double dist_to_shape(const Vec& x, const Shape& shape);

double point_segment_dist(const Vec& x, const Vec& a, const Vec& b);
double segment_segment_dist(const Vec& a0, const Vec& a1, const Vec& b0, const Vec& b1);

// ---------------------------------------------------------------------------
// Balls and the shrink map Phi.
// ---------------------------------------------------------------------------

struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Same center, squared radius.
inline Ball phi_shrink(const Ball& b) { return Ball{b.center, b.radius * b.radius}; }

// ---------------------------------------------------------------------------
// Domain: bounded box, closed data set Gamma, free region V = int(box) \ Gamma.
// ---------------------------------------------------------------------------

struct DomainSpec {
  Vec box_lo, box_hi;
  std::vector<Shape> gamma;
  bool exterior_is_gamma = true;
};

class Domain {
 public:
  /// Throws std::invalid_argument on a degenerate box, d < 2, or empty V.
  static Domain make(const DomainSpec& spec);

  int dim() const { return static_cast<int>(spec_.box_lo.size()); }
  const Vec& box_lo() const { return spec_.box_lo; }
  const Vec& box_hi() const { return spec_.box_hi; }
  const DomainSpec& spec() const { return spec_; }

  bool in_box(const Vec& x) const;
  /// x is in the open free region V.
  bool in_free_region(const Vec& x) const;
  bool in_gamma(const Vec& x) const;

  /// Exact distance to Gamma (including the box exterior when flagged).
  /// +inf when Gamma is empty.
  double dist_to_gamma(const Vec& x) const;

  /// Distance to the complement of V (Gamma plus the box exterior, always).
  double dist_to_complement(const Vec& x) const;

  /// Curve-like primitives tracing the boundary of V (d = 2 only): box edges,
  /// circles of disks, clipped half-space lines, isolated points, segments.
  std::vector<Shape> boundary_shapes() const;

  /// Lattice-count estimate of vol(V) at the given per-axis resolution.
  double volume_estimate(int cells_per_axis = 512) const;

  /// Nearest point of Gamma (exact per primitive); used to sample Gamma.
  /// Returns nullopt when Gamma is empty.
  std::optional<Vec> project_to_gamma(const Vec& x) const;

 private:
  explicit Domain(DomainSpec spec) : spec_(std::move(spec)) {}
  DomainSpec spec_;
};

// ---------------------------------------------------------------------------
// Segments, ledger, packings.
// ---------------------------------------------------------------------------

struct Segment {
  Vec a, b;
  int scale = 0;          // dyadic scale index i
  int parent_ball = -1;   // index into the scale-i packing
};

inline double seg_dist(const Segment& s, const Segment& t) {
  return segment_segment_dist(s.a, s.b, t.a, t.b);
}

/// Scale-indexed family L_1 <= L_2 <= ... of certified segments, with the
/// packing center lists U_i alongside.
class SegmentLedger {
 public:
  void begin_scale(int i);
  void add_segment(const Segment& s);
  void add_centers(int scale, const std::vector<Vec>& centers);

  int max_scale() const { return max_scale_; }
  const std::vector<Segment>& segments() const { return segments_; }
  /// Segments of scale <= i.
  std::vector<Segment> segments_up_to(int i) const;
  std::vector<Segment> segments_at(int i) const;
  const std::vector<Vec>& centers_at(int i) const;

 private:
  std::vector<Segment> segments_;
  std::unordered_map<int, std::vector<Vec>> centers_;
  int max_scale_ = 0;
};

struct Packing {
  int scale = 0;              // radius is 2^-scale
  double radius = 0.0;
  double audit_spacing = 0.0; // lattice spacing used by the greedy scan
  std::vector<Ball> balls;
};

/// Greedy maximal r-packing of V minus the obstacle segments, with candidate
/// centers on a row-major lattice of spacing r/8. Compact containment is
/// dist-to-complement >= r + spacing.
Packing maximal_packing(const Domain& dom, const std::vector<Segment>& obstacles,
                        int scale, double radius);

/// Re-scan the candidate lattice: every admissible center must touch a packed
/// ball. Returns false (with a witness) if an extra disjoint ball would fit.
bool audit_maximality(const Domain& dom, const std::vector<Segment>& obstacles,
                      const Packing& packing, Vec* witness = nullptr);

/// max over low-discrepancy samples of V of
/// min(dist(x, boundary of V), min_{j <= i} dist(x, U_j)).
double coverage_statistic(const Domain& dom, const SegmentLedger& ledger, int i,
                          int nsamples, Vec* witness = nullptr);

// ---------------------------------------------------------------------------
// Minkowski content.
// ---------------------------------------------------------------------------

struct MinkowskiEstimate {
  std::vector<double> radii;
  std::vector<double> values;  // vol({dist < r}) / (2r) per radius
  double estimate = 0.0;       // value at the smallest radius
};

/// (d-1)-dimensional content of the union of the given shapes, by counting
/// lattice cells of spacing min(radii)/4 inside the inflated bounding box.
/// Radii must be positive and decreasing. Throws when radii underrun the
/// achievable resolution (guarded by a cell-count cap).
MinkowskiEstimate minkowski_content(const std::vector<Shape>& shapes, int dim,
                                    const std::vector<double>& radii);

// ---------------------------------------------------------------------------
// Uniform spatial hash for neighbor queries over points and segments.
// ---------------------------------------------------------------------------

class SpatialGrid {
 public:
  SpatialGrid(const Vec& lo, const Vec& hi, double cell);

  void insert_point(int id, const Vec& p);
  void insert_box(int id, const Vec& lo, const Vec& hi);
  /// Ids of items whose cell neighborhood intersects B(p, radius); may contain
  /// duplicates and false positives.
  void query(const Vec& p, double radius, std::vector<int>& out) const;

 private:
  std::int64_t cell_key(const Vec& p) const;
  Vec lo_;
  double cell_;
  Eigen::Array<std::int64_t, Eigen::Dynamic, 1, 0, kMaxDim, 1> strides_;
  Eigen::Array<std::int64_t, Eigen::Dynamic, 1, 0, kMaxDim, 1> counts_;
  std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace lipforge
