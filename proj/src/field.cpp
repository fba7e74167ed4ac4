#include "lipforge/field.hpp"

namespace lipforge {

// ---------------------------------------------------------------------------
// Cutoff profile
// ---------------------------------------------------------------------------

namespace {

// Unit smooth step: 1 at s <= 0, 0 at s >= 1, exp-based in between.
double step_value(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  double a = std::exp(-1.0 / (1.0 - s));
  double b = std::exp(-1.0 / s);
  return a / (a + b);
}

double step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  double a = std::exp(-1.0 / (1.0 - s));
  double b = std::exp(-1.0 / s);
  double da = -a / ((1.0 - s) * (1.0 - s));
  double db = b / (s * s);
  double sum = a + b;
  return (da * sum - a * (da + db)) / (sum * sum);
}

}  // namespace

double cutoff_step_lip() {
  static const double lip = [] {
    double m = 0.0;
    for (int i = 1; i < 100000; ++i)
      m = std::max(m, std::abs(step_derivative(i / 100000.0)));
    return m;
  }();
  return lip;
}

double cutoff_value(double r, double support_radius) {
  const double half = 0.5 * support_radius;
  if (r >= support_radius) return 0.0;
  if (r <= half) return 1.0;
  return step_value((r - half) / half);
}

double cutoff_derivative(double r, double support_radius) {
  const double half = 0.5 * support_radius;
  if (r >= support_radius || r <= half) return 0.0;
  return step_derivative((r - half) / half) / half;
}

// ---------------------------------------------------------------------------
// Bump
// ---------------------------------------------------------------------------

double bump_value(const Bump& b, const Vec& x, double t_scale) {
  Vec rel = x - b.center;
  double r = rel.norm();
  if (r >= b.radius) return 0.0;
  double t = b.t * t_scale;
  if (t == 0.0 || b.amplitude == 0.0) return 0.0;
  double xi1 = b.direction.dot(rel);
  return b.amplitude * std::sin(10.0 * t * xi1 / b.amplitude) * cutoff_value(r, b.radius);
}

Vec bump_gradient(const Bump& b, const Vec& x, double t_scale) {
  Vec rel = x - b.center;
  double r = rel.norm();
  if (r >= b.radius) return Vec::Zero(x.size());
  double t = b.t * t_scale;
  if (t == 0.0 || b.amplitude == 0.0) return Vec::Zero(x.size());
  double xi1 = b.direction.dot(rel);
  double theta = 10.0 * t * xi1 / b.amplitude;
  Vec g = 10.0 * t * std::cos(theta) * cutoff_value(r, b.radius) * b.direction;
  if (r > 0.0) {
    double dphi = cutoff_derivative(r, b.radius);
    if (dphi != 0.0) g += (b.amplitude * std::sin(theta) * dphi / r) * rel;
  }
  return g;
}

double bump_t_continuity(const Bump& b, double t_max) {
  // d/dt of the gradient: 10 cos(theta) phi dir - 100 t xi1/eps0 sin(theta) phi dir
  //                       + 10 xi1 cos(theta) phi' rhat, with |xi1| <= R.
  const double R = b.radius;
  return 10.0 + 100.0 * t_max * R / b.amplitude + 10.0 * R * b.profile_lip;
}

// ---------------------------------------------------------------------------
// BumpStack
// ---------------------------------------------------------------------------

BumpStack::BumpStack(MapExpr base, int dim) : base_(std::move(base)), dim_(dim) {
  box_lo_ = Vec::Constant(dim, -1.0);
  box_hi_ = Vec::Constant(dim, 1.0);
}

void BumpStack::set_bounds(const Vec& lo, const Vec& hi) {
  if (!bumps_.empty()) throw std::logic_error("set_bounds after append");
  box_lo_ = lo;
  box_hi_ = hi;
}

void BumpStack::append(Bump b) {
  const int id = static_cast<int>(bumps_.size());
  auto& bucket = buckets_[b.radius];
  if (!bucket) bucket = std::make_unique<SpatialGrid>(box_lo_, box_hi_, b.radius);
  bucket->insert_point(id, b.center);
  bumps_.push_back(std::move(b));
}

void BumpStack::collect(const Vec& x, std::vector<int>& out) const {
  out.clear();
  std::vector<int> scratch;
  for (const auto& [radius, grid] : buckets_) {
    grid->query(x, radius, scratch);
    out.insert(out.end(), scratch.begin(), scratch.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

Vec BumpStack::eval_prefix(const Vec& x, std::size_t count) const {
  Vec out = base_.eval(x);
  std::vector<int> ids;
  collect(x, ids);
  for (int id : ids) {
    if (static_cast<std::size_t>(id) >= count) break;
    const Bump& b = bumps_[id];
    out[b.axis] += bump_value(b, x);
  }
  return out;
}

Vec BumpStack::eval_homotopy(const Vec& x, double s) const {
  Vec out = base_.eval(x);
  std::vector<int> ids;
  collect(x, ids);
  for (int id : ids) {
    const Bump& b = bumps_[id];
    out[b.axis] += bump_value(b, x, s);
  }
  return out;
}

Mat BumpStack::jacobian(const Vec& x, bool* kink) const {
  Mat j = base_.jacobian(x, kink);
  std::vector<int> ids;
  collect(x, ids);
  for (int id : ids) {
    const Bump& b = bumps_[id];
    j.row(b.axis) += bump_gradient(b, x).transpose();
  }
  return j;
}

// ---------------------------------------------------------------------------
// op_norm
// ---------------------------------------------------------------------------

double op_norm(const Mat& j) {
  const int rows = static_cast<int>(j.rows());
  const int cols = static_cast<int>(j.cols());
  const int small = std::min(rows, cols);
  if (small == 0) return 0.0;
  if (small == 1) return j.norm();  // a single row or column: Euclidean norm
  if (small == 2) {
    Mat g = (rows <= cols) ? Mat(j * j.transpose()) : Mat(j.transpose() * j);
    double tr = g(0, 0) + g(1, 1);
    double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    double disc = std::max(0.0, tr * tr - 4.0 * det);
    return std::sqrt(0.5 * (tr + std::sqrt(disc)));
  }
  Mat g = (rows <= cols) ? Mat(j * j.transpose()) : Mat(j.transpose() * j);
  Vec v = Vec::Constant(g.rows(), 1.0).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vec w = g * v;
    double next = w.norm();
    if (next == 0.0) return 0.0;
    w /= next;
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
    v = w;
  }
  return std::sqrt(lambda);
}

}  // namespace lipforge
