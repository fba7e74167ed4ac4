#include "lipforge/construct.hpp"

#include "lipforge/sampling.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace lipforge {

namespace {

// Tolerated between-sample excess of Lu - psi inside earlier oscillator
// supports; matches the post-hoc subsolution verification tolerance.
constexpr double kSaturationSlack = 0.03;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::string point_str(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ")";
  return os.str();
}

// Top right-singular direction of a D x d Jacobian (unit vector in R^d).
Vec top_singular_direction(const Mat& j) {
  const int d = static_cast<int>(j.cols());
  if (j.rows() == 1) {
    Vec g = j.row(0).transpose();
    double n = g.norm();
    if (n == 0.0) return Vec();
    return g / n;
  }
  Mat g = j.transpose() * j;
  Vec v = Vec::Constant(d, 1.0).normalized();
  for (int it = 0; it < 200; ++it) {
    Vec w = g * v;
    double n = w.norm();
    if (n == 0.0) return Vec();
    w /= n;
    if ((w - v).norm() < 1e-13) return w;
    v = w;
  }
  return v;
}

template <typename Field>
double max_local_lip_minus_psi(const Field& u, const MapExpr& psi,
                               const std::vector<Vec>& samples, Vec* argmax) {
  double best = -kInf;
  for (const Vec& x : samples) {
    double v = local_lip(u, x) - psi.component(0).eval(x);
    if (v > best) {
      best = v;
      if (argmax) *argmax = x;
    }
  }
  return best;
}

}  // namespace

Vec hashed_direction(int dim, int scale, int ball_id, std::uint64_t seed) {
  std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(scale) * 0x9e3779b97f4a7c15ULL ^
                                       static_cast<std::uint64_t>(ball_id) + 1));
  double angle = 2.0 * M_PI * (static_cast<double>(h >> 11) / 9007199254740992.0);
  Vec e = Vec::Zero(dim);
  e[0] = std::cos(angle);
  e[1] = std::sin(angle);
  return e;
}

Oscillator make_oscillator(const Ball& support, double t, double eps0,
                           const Vec& direction, const OscillatorParams& params,
                           int dim) {
  if (t < 0.0) throw ConstructError("oscillator parameter t must be >= 0");
  if (!(eps0 > 0.0)) throw ConstructError("oscillator amplitude must be positive");
  Oscillator osc;
  osc.bump = Bump{support.center,
                  support.radius,
                  direction,
                  params.output_axis,
                  eps0,
                  t,
                  params.scale,
                  params.ball_id,
                  2.0 * cutoff_step_lip() / support.radius};
  if (t == 0.0) return osc;

  BumpStack zero(MapExpr::zero(params.output_axis + 1), dim);
  PlusBump view(zero, osc.bump);
  Segment diameter{support.center - support.radius * direction,
                   support.center + support.radius * direction, params.scale,
                   params.ball_id};
  int n = params.cert_samples;
  for (int attempt = 0; attempt < 2; ++attempt) {
    osc.measured_lip = lip_on_segment(view, diameter, n, /*with_local=*/false).pair_max;
    if (osc.measured_lip >= t) break;
    n *= 4;  // one refinement retry, then give up
  }
  if (osc.measured_lip < t)
    throw ConstructError("oscillator certification failed: measured Lip " +
                         std::to_string(osc.measured_lip) + " < t " + std::to_string(t));
  osc.continuity_c = bump_t_continuity(osc.bump, t);
  return osc;
}

double h_profile(const BumpStack& u, const MapExpr& psi, const Bump& proto,
                 double t, const std::vector<Vec>& samples, Vec* argmax) {
  Bump b = proto;
  b.t = t;
  PlusBump view(u, b);
  return max_local_lip_minus_psi(view, psi, samples, argmax);
}

ImprovePointResult improve_point(const BumpStack& u, const MapExpr& psi,
                                 const Ball& ball, double tol,
                                 const OscillatorParams& osc, int n_samples) {
  if (!(tol > 0.0)) throw ConstructError("tol must be positive");
  const int d = u.dim();
  const Ball support{ball.center, 0.5 * ball.radius};
  const auto samples = halton_ball_samples(support.center, support.radius, n_samples);

  double sup_psi = 0.0;
  for (const Vec& x : samples) sup_psi = std::max(sup_psi, psi.component(0).eval(x));
  if (!(sup_psi > 0.0)) throw ConstructError("psi must be positive on the support");

  ImprovePointResult res;
  double h0 = max_local_lip_minus_psi(u, psi, samples, &res.witness);
  // Earlier certified oscillators bound Lu - psi at *their* audit samples;
  // between those samples a small positive excess remains possible, so a ball
  // landing in an old cutoff skirt is saturated, not a violation. Only an
  // excess beyond the verification tolerance is a genuine precondition breach.
  if (h0 > kSaturationSlack)
    throw ConstructError("precondition Lu <= psi violated at " + point_str(res.witness) +
                         " by " + std::to_string(h0));
  if (h0 >= -tol) {
    res.h_at_t = h0;  // nothing to do: the bound is already attained here
    return res;
  }

  const double eps0 = std::min(support.radius, sup_psi * support.radius);
  const Vec direction = hashed_direction(d, osc.scale, osc.ball_id, osc.seed);
  Bump proto = Bump{support.center,
                    support.radius,
                    direction,
                    osc.output_axis,
                    eps0,
                    0.0,
                    osc.scale,
                    osc.ball_id,
                    2.0 * cutoff_step_lip() / support.radius};

  // Bracket by doubling from tol, then bisect, then back off to the largest
  // probed parameter on the subsolution side.
  const double t_cap = 4.0 * sup_psi;
  double lo = 0.0, hi = tol;
  while (h_profile(u, psi, proto, hi, samples) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_cap)
      throw ConstructError("oscillator ceiling: no sign change below t = " +
                           std::to_string(t_cap));
  }
  res.t_low = lo;
  res.t_high = hi;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (h_profile(u, psi, proto, mid, samples) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.t = lo;
  res.added = true;
  Oscillator certified =
      make_oscillator(support, res.t, eps0, direction, osc, d);
  res.bump = certified.bump;
  res.h_at_t = h_profile(u, psi, proto, res.t, samples, &res.witness);
  return res;
}

ImproveBallResult improve_ball(const BumpStack& u, const MapExpr& psi, const Ball& w,
                               double eps, const ConstructConfig& cfg, int scale,
                               int ball_id) {
  if (!(eps > 0.0)) throw ConstructError("eps must be positive");
  const Ball w_prime{w.center, 0.5 * w.radius};
  OscillatorParams osc;
  osc.seed = cfg.seed;
  osc.scale = scale;
  osc.ball_id = ball_id;
  const int n_samples = scale <= 4 ? cfg.h_samples_coarse : cfg.h_samples_fine;

  ImproveBallResult out;
  out.point = improve_point(u, psi, w_prime, cfg.tol_root, osc, n_samples);

  // Trial segments through the witness, dyadically shrinking lengths; bump
  // direction first, then the steepest (top singular) direction at the witness.
  auto search = [&](const auto& view) -> bool {
    std::vector<Vec> dirs;
    if (out.point.added) dirs.push_back(out.point.bump.direction);
    else dirs.push_back(hashed_direction(u.dim(), scale, ball_id, cfg.seed));
    Vec grad_dir = top_singular_direction(view.jacobian(out.point.witness));
    if (grad_dir.size() > 0) dirs.push_back(grad_dir);

    for (const Vec& dir : dirs) {
      for (int k = 0; k <= cfg.max_halvings; ++k) {
        double rho = w_prime.radius * std::pow(0.5, k);
        Segment seg{out.point.witness - 0.5 * rho * dir,
                    out.point.witness + 0.5 * rho * dir, scale, ball_id};
        double reach = std::max((seg.a - w.center).norm(), (seg.b - w.center).norm());
        if (reach >= w.radius) continue;  // need compact containment in W
        SegmentLip sl = lip_on_segment(view, seg, cfg.segment_samples, false);
        double psi_max = 0.0;
        for (int s = 0; s < cfg.segment_samples; ++s) {
          Vec x = seg.a + (static_cast<double>(s) / (cfg.segment_samples - 1)) *
                              (seg.b - seg.a);
          psi_max = std::max(psi_max, psi.component(0).eval(x));
        }
        if (sl.pair_max > psi_max - eps) {
          out.segment = seg;
          out.segment_lip = sl.pair_max;
          out.psi_max_on_seg = psi_max;
          return true;
        }
      }
    }
    return false;
  };

  bool found = out.point.added ? search(PlusBump(u, out.point.bump)) : search(u);
  if (!found) {
    std::ostringstream os;
    os << "segment detection failed at scale " << scale << " ball " << ball_id
       << " (witness " << point_str(out.point.witness) << ", T = " << out.point.t
       << ", h(T) = " << out.point.h_at_t << ", bracket [" << out.point.t_low << ", "
       << out.point.t_high << "])";
    throw ConstructError(os.str());
  }
  return out;
}

std::vector<Segment> improve_packing(BumpStack& u, const MapExpr& psi,
                                     const Packing& packing, double eps,
                                     const ConstructConfig& cfg) {
  const int n = static_cast<int>(packing.balls.size());
  std::vector<ImproveBallResult> results(n);
  std::vector<std::string> errors(n);

  auto work = [&](int begin, int step) {
    for (int i = begin; i < n; i += step) {
      try {
        results[i] = improve_ball(u, psi, phi_shrink(packing.balls[i]), eps, cfg,
                                  packing.scale, i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  // Modifications live in disjoint Phi(B) supports, so per-ball improvements
  // are computed against the same snapshot and merged in ball order.
  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || n < 2) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw ConstructError("ball " + std::to_string(i) + ": " + errors[i]);

  std::vector<Segment> segments;
  segments.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (results[i].point.added) u.append(results[i].point.bump);
    segments.push_back(results[i].segment);
  }
  return segments;
}

IterationResult iterate(const MapExpr& f, const MapExpr& psi, const Domain& dom,
                        int i_max, const ConstructConfig& cfg) {
  if (i_max < 1) throw ConstructError("i_max must be >= 1");
  const int d = dom.dim();
  IterationResult res;
  res.u = BumpStack(f, d);
  res.u.set_bounds(dom.box_lo(), dom.box_hi());

  // Hypothesis check: sampled L f <= psi on V.
  {
    Vec lo = dom.box_lo(), span = dom.box_hi() - dom.box_lo();
    std::uint64_t n = 0;
    int found = 0;
    while (found < cfg.precondition_samples) {
      Vec x = lo + span.cwiseProduct(halton_point(n++, d));
      if (!dom.in_free_region(x)) continue;
      ++found;
      double gap = local_lip(res.u, x) - psi.component(0).eval(x);
      if (gap > 1e-9)
        throw ConstructError("precondition L f <= psi violated at " + point_str(x) +
                             " by " + std::to_string(gap));
    }
  }

  for (int i = 1; i <= i_max; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    const double radius = std::pow(0.5, i);
    const double eps_i = cfg.eps_override > 0.0 ? cfg.eps_override : radius;
    Packing packing = maximal_packing(dom, res.ledger.segments(), i, radius);
    std::vector<Segment> segs = improve_packing(res.u, psi, packing, eps_i, cfg);

    res.ledger.begin_scale(i);
    std::vector<Vec> centers;
    for (const Ball& b : packing.balls) centers.push_back(b.center);
    res.ledger.add_centers(i, centers);

    ScaleReport sr;
    sr.scale = i;
    sr.ball_count = static_cast<int>(packing.balls.size());
    sr.segment_count = static_cast<int>(segs.size());
    for (const Segment& s : segs) {
      res.ledger.add_segment(s);
      SegmentLip sl = lip_on_segment(res.u, s, cfg.segment_samples, false);
      double psi_max = 0.0;
      for (int k = 0; k < cfg.segment_samples; ++k) {
        Vec x = s.a + (static_cast<double>(k) / (cfg.segment_samples - 1)) * (s.b - s.a);
        psi_max = std::max(psi_max, psi.component(0).eval(x));
      }
      sr.max_deficit = std::max(sr.max_deficit, psi_max - sl.pair_max);
    }
    sr.coverage_radius = coverage_statistic(dom, res.ledger, i, 20000);
    sr.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.report.scales.push_back(sr);
    res.snapshot_counts.push_back(res.u.bump_count());
    res.packings.push_back(std::move(packing));
  }
  return res;
}

Vec homotopy_eval(const BumpStack& u, double s, const Vec& x) {
  if (s < 0.0 || s > 1.0) throw ConstructError("homotopy parameter must be in [0, 1]");
  return u.eval_homotopy(x, s);
}

}  // namespace lipforge
