#include "lipforge/verify.hpp"

#include "lipforge/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lipforge {

Certificate check_coverage(const SegmentLedger& ledger, const Domain& dom, int i,
                           int nsamples) {
  Certificate cert;
  cert.name = "coverage";
  cert.scale = i;
  cert.samples = nsamples;
  cert.bound = std::pow(2.0, -i + 4);
  Vec witness;
  cert.measured = coverage_statistic(dom, ledger, i, nsamples, &witness);
  cert.report_only = i < 10;  // asserted only in the asymptotic regime
  cert.pass = cert.report_only || cert.measured <= cert.bound;
  if (!cert.pass) cert.witness = witness;
  return cert;
}

Certificate check_exceptional_volume(const SegmentLedger& ledger, const Domain& dom,
                                     int i, double boundary_content, double vol_v,
                                     int nsamples, std::uint64_t seed) {
  Certificate cert;
  cert.name = "exceptional_volume";
  cert.scale = i;
  cert.samples = nsamples;
  const int d = dom.dim();
  const double r = std::pow(2.0, -i + 4);
  cert.bound = (64.0 * boundary_content + std::pow(64.0, d) * vol_v) / std::pow(2.0, i);

  const auto boundary = dom.boundary_shapes();
  std::vector<Vec> centers;
  for (int j = 1; j <= i / 2; ++j) {
    const auto& u = ledger.centers_at(j);
    centers.insert(centers.end(), u.begin(), u.end());
  }
  Vec lo = dom.box_lo().array() - r, hi = dom.box_hi().array() + r;
  SpatialGrid grid(lo, hi, std::max(r, 1e-9));
  for (int k = 0; k < static_cast<int>(centers.size()); ++k)
    grid.insert_point(k, centers[k]);

  std::mt19937_64 rng(seed);
  std::vector<int> scratch;
  long inside = 0;
  Vec last_in = Vec::Zero(d);
  for (int n = 0; n < nsamples; ++n) {
    Vec x = uniform_in_box(rng, lo, hi);
    bool in_z = false;
    for (const auto& s : boundary) {
      if (dist_to_shape(x, s) < r) {
        in_z = true;
        break;
      }
    }
    if (!in_z && !centers.empty()) {
      grid.query(x, r, scratch);
      for (int id : scratch)
        if ((x - centers[id]).norm() < r) {
          in_z = true;
          break;
        }
    }
    if (in_z) {
      ++inside;
      last_in = x;
    }
  }
  double box_vol = 1.0;
  for (int k = 0; k < d; ++k) box_vol *= hi[k] - lo[k];
  cert.measured = box_vol * static_cast<double>(inside) / nsamples;
  cert.pass = cert.measured <= cert.bound;
  if (!cert.pass) cert.witness = last_in;
  return cert;
}

Certificate check_separation(const SegmentLedger& ledger, int i) {
  Certificate cert;
  cert.name = "separation";
  cert.scale = i;
  cert.pass = true;
  cert.measured = kInf;
  for (int s = 1; s <= i; ++s) {
    const double bound = std::pow(2.0, -s) - std::pow(4.0, -s);
    auto segs = ledger.segments_up_to(s);
    cert.samples += static_cast<long>(segs.size());
    if (segs.size() < 2) continue;

    double max_half = 0.0;
    Vec lo = segs[0].a, hi = segs[0].a;
    for (const auto& sg : segs) {
      lo = lo.cwiseMin(sg.a).cwiseMin(sg.b).eval();
      hi = hi.cwiseMax(sg.a).cwiseMax(sg.b).eval();
      max_half = std::max(max_half, 0.5 * (sg.a - sg.b).norm());
    }
    SpatialGrid grid(lo, hi, std::max(bound + 2.0 * max_half, 1e-9));
    for (int k = 0; k < static_cast<int>(segs.size()); ++k)
      grid.insert_point(k, 0.5 * (segs[k].a + segs[k].b));
    std::vector<int> scratch;
    for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
      grid.query(0.5 * (segs[k].a + segs[k].b), bound + 2.0 * max_half, scratch);
      for (int id : scratch) {
        if (id <= k) continue;
        double dist = seg_dist(segs[k], segs[id]);
        if (dist - bound < cert.measured - cert.bound ||
            (cert.measured == kInf)) {
          cert.measured = dist;
          cert.bound = bound;
        }
        if (!(dist > bound)) {
          cert.pass = false;
          cert.witness = 0.5 * (segs[k].a + segs[k].b);
        }
      }
    }
  }
  if (cert.measured == kInf) {
    cert.measured = 0.0;  // vacuous: fewer than two segments everywhere
    cert.bound = 0.0;
  }
  return cert;
}

double sampled_modulus(const MapExpr& psi, const Domain& dom, double r, int pairs,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int d = dom.dim();
  double m = 0.0;
  int done = 0;
  while (done < pairs) {
    Vec x = uniform_in_box(rng, dom.box_lo(), dom.box_hi());
    if (!dom.in_free_region(x)) continue;
    Vec e(d);
    for (int k = 0; k < d; ++k) e[k] = 2.0 * unit(rng) - 1.0;
    double len = e.norm();
    if (len == 0.0) continue;
    Vec y = x + (r * unit(rng) / len) * e;
    if (!dom.in_box(y)) continue;
    ++done;
    m = std::max(m, std::abs(psi.component(0).eval(x) - psi.component(0).eval(y)));
  }
  return m;
}

SolutionReport check_solution(const BumpStack& u, const MapExpr& psi, const MapExpr& f,
                              const Domain& dom, const SegmentLedger& ledger,
                              double tol, std::uint64_t seed, int gamma_samples,
                              int v_samples, int seg_lip_samples) {
  SolutionReport rep;
  const int d = dom.dim();

  // (a) boundary exactness, bit for bit.
  {
    Certificate& c = rep.boundary;
    c.name = "boundary_exactness";
    c.pass = true;
    std::mt19937_64 rng(seed);
    for (int n = 0; n < gamma_samples; ++n) {
      Vec x = uniform_in_box(rng, dom.box_lo(), dom.box_hi());
      auto gamma = dom.project_to_gamma(x);
      if (!gamma) break;  // empty Gamma: vacuous
      ++c.samples;
      Vec a = u.eval(*gamma);
      Vec b = f.eval(*gamma);
      for (int k = 0; k < a.size(); ++k) {
        double diff = std::abs(a[k] - b[k]);
        c.measured = std::max(c.measured, diff);
        if (a[k] != b[k]) {
          c.pass = false;
          c.witness = *gamma;
        }
      }
    }
  }

  // (b) subsolution at sampling resolution.
  {
    Certificate& c = rep.subsolution;
    c.name = "subsolution";
    c.bound = tol;
    c.measured = -kInf;
    std::uint64_t n = 0;
    Vec lo = dom.box_lo(), span = dom.box_hi() - dom.box_lo();
    while (c.samples < v_samples) {
      Vec x = lo + span.cwiseProduct(halton_point(n++, d));
      if (!dom.in_free_region(x)) continue;
      ++c.samples;
      double gap = local_lip(u, x) - psi.component(0).eval(x);
      if (gap > c.measured) {
        c.measured = gap;
        if (gap > tol) c.witness = x;
      }
    }
    c.pass = c.measured <= tol;
  }

  // (c) attainment curve: per scale index, the fraction of V samples near a
  // certified segment whose measured stretch beats the local threshold.
  const int max_scale = ledger.max_scale();
  if (max_scale >= 1) {
    auto segs = ledger.segments();
    std::vector<double> seg_lip(segs.size());
    for (std::size_t k = 0; k < segs.size(); ++k)
      seg_lip[k] = lip_on_segment(u, segs[k], seg_lip_samples, false).pair_max;

    const int n_att = std::min(v_samples, 20000);
    std::vector<Vec> pts;
    {
      std::uint64_t n = 0;
      Vec lo = dom.box_lo(), span = dom.box_hi() - dom.box_lo();
      while (static_cast<int>(pts.size()) < n_att) {
        Vec x = lo + span.cwiseProduct(halton_point(n++, d));
        if (dom.in_free_region(x)) pts.push_back(x);
      }
    }

    SpatialGrid grid(dom.box_lo(), dom.box_hi(),
                     std::max(std::pow(2.0, -max_scale), 1e-9));
    for (int k = 0; k < static_cast<int>(segs.size()); ++k)
      grid.insert_box(k, segs[k].a.cwiseMin(segs[k].b), segs[k].a.cwiseMax(segs[k].b));

    const double diam = (dom.box_hi() - dom.box_lo()).norm();
    std::vector<int> scratch;
    for (int i = 1; i <= max_scale; ++i) {
      const double reach = std::pow(2.0, -i + 5);
      const double drop = std::pow(2.0, -0.5 * i) + sampled_modulus(psi, dom, reach,
                                                                    10000, seed);
      double best_overall = -kInf;
      for (std::size_t k = 0; k < segs.size(); ++k)
        if (segs[k].scale <= i) best_overall = std::max(best_overall, seg_lip[k]);
      int hit = 0;
      for (const Vec& x : pts) {
        double psi_x = psi.component(0).eval(x);
        double threshold = psi_x - drop;
        bool ok = false;
        if (reach >= diam) {
          ok = best_overall > threshold;
        } else {
          grid.query(x, reach, scratch);
          for (int id : scratch) {
            if (segs[id].scale > i || seg_lip[id] <= threshold) continue;
            if (point_segment_dist(x, segs[id].a, segs[id].b) <= reach) {
              ok = true;
              break;
            }
          }
        }
        if (ok) ++hit;
      }
      rep.attainment.push_back(static_cast<double>(hit) / pts.size());
    }
  }
  return rep;
}

}  // namespace lipforge
