#include "lipforge/construct.hpp"
#include "lipforge/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lipforge;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Domain unit_square() {
  DomainSpec spec;
  spec.box_lo = v2(0, 0);
  spec.box_hi = v2(1, 1);
  spec.exterior_is_gamma = true;
  return Domain::make(spec);
}

BumpStack zero_stack() {
  BumpStack u(MapExpr::zero(1), 2);
  u.set_bounds(v2(0, 0), v2(1, 1));
  return u;
}

MapExpr one() { return MapExpr({ScalarExpr::constant(1.0)}); }

}  // namespace

TEST_CASE("oscillator: t = 0 gives the zero bump") {
  Oscillator osc = make_oscillator(Ball{v2(0.5, 0.5), 0.05}, 0.0, 0.05, v2(1, 0),
                                   {}, 2);
  CHECK(osc.bump.t == 0.0);
  CHECK(bump_value(osc.bump, v2(0.51, 0.5)) == 0.0);
  CHECK(osc.measured_lip == 0.0);
}

TEST_CASE("oscillator: certified stretch along the diameter") {
  Ball s{v2(0.5, 0.5), 0.05};
  Oscillator osc = make_oscillator(s, 1.0, 0.1, v2(1, 0), {}, 2);
  CHECK(osc.measured_lip >= 1.0 * 0.98);
  // Dense-pair oracle.
  BumpStack u = zero_stack();
  u.append(osc.bump);
  Segment diam{v2(0.45, 0.5), v2(0.55, 0.5), 1, 0};
  double dense = lip_on_segment(u, diam, 100000, false).pair_max;
  CHECK(dense >= 1.0 * 0.98);
  CHECK(osc.measured_lip <= dense * 1.02 + 1e-12);
  // Support: exact zero on the boundary sphere.
  CHECK(bump_value(osc.bump, v2(0.55, 0.5)) == 0.0);
  CHECK(bump_value(osc.bump, v2(0.5, 0.45)) == 0.0);
  CHECK(osc.continuity_c > 0.0);
}

TEST_CASE("oscillator: deterministic hashed directions are unit length") {
  for (int scale = 1; scale <= 4; ++scale)
    for (int ball = 0; ball < 8; ++ball) {
      Vec d1 = hashed_direction(2, scale, ball, 42);
      Vec d2 = hashed_direction(2, scale, ball, 42);
      CHECK(d1 == d2);
      CHECK(d1.norm() == doctest::Approx(1.0));
    }
  CHECK(hashed_direction(2, 1, 0, 42) != hashed_direction(2, 1, 1, 42));
}

TEST_CASE("h profile: zero map against psi = 1") {
  BumpStack u = zero_stack();
  Ball s{v2(0.5, 0.5), 0.05};
  auto samples = halton_ball_samples(s.center, s.radius, 512, 0);
  // t = 0: strictly negative (Lu = 0 < 1).
  Oscillator proto = make_oscillator(s, 1.0, 0.05, v2(1, 0), {}, 2);
  CHECK(h_profile(u, one(), proto.bump, 0.0, samples) == doctest::Approx(-1.0));
  // t = 2: the center sample has stretch about 2.
  Vec argmax;
  double h2 = h_profile(u, one(), proto.bump, 2.0, samples, &argmax);
  CHECK(h2 >= 1.0 * 0.98);
  CHECK((argmax - s.center).norm() <= s.radius);
}

TEST_CASE("h profile: Lipschitz in t with the recorded constant") {
  BumpStack u = zero_stack();
  Ball s{v2(0.5, 0.5), 0.05};
  auto samples = halton_ball_samples(s.center, s.radius, 256, 0);
  Oscillator proto = make_oscillator(s, 1.0, 0.05, v2(1, 0), {}, 2);
  const double tmax = 3.0;
  const double c = bump_t_continuity(proto.bump, tmax);
  std::vector<double> hs;
  for (int k = 0; k < 12; ++k)
    hs.push_back(h_profile(u, one(), proto.bump, tmax * k / 11.0, samples));
  for (int i = 0; i < 12; ++i)
    for (int k = 0; k < 12; ++k)
      CHECK(std::abs(hs[i] - hs[k]) <= c * tmax * std::abs(i - k) / 11.0 + 1e-9);
}

TEST_CASE("improve_point: zero map reaches psi = 1 up to tolerance") {
  BumpStack u = zero_stack();
  Ball ball{v2(0.5, 0.5), 0.1};
  OscillatorParams osc;
  auto res = improve_point(u, one(), ball, 1e-3, osc, 512);
  REQUIRE(res.added);
  CHECK(res.h_at_t <= 0.0);
  CHECK(res.h_at_t >= -1e-3);
  CHECK(res.t_low <= res.t);
  CHECK(res.t <= res.t_high);

  // The witness carries local Lipschitz constant close to psi.
  BumpStack v = zero_stack();
  v.append(res.bump);
  const double lv = local_lip(v, res.witness);
  CHECK(lv <= 1.0 + 1e-9);
  CHECK(lv >= 1.0 - 1e-3 - 0.02);

  // Outside the ball the map is untouched, bit-exact.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    Vec y = v2(r(rng), r(rng));
    if ((y - ball.center).norm() <= ball.radius) continue;
    ++checked;
    CHECK(v.eval(y)[0] == u.eval(y)[0]);
  }
}

TEST_CASE("improve_point: saturated input returns unchanged") {
  // Base already has Lu = psi = 1 everywhere.
  BumpStack u(MapExpr({ScalarExpr::parse("x")}), 2);
  u.set_bounds(v2(0, 0), v2(1, 1));
  auto res = improve_point(u, one(), Ball{v2(0.5, 0.5), 0.1}, 1e-3, {}, 512);
  CHECK(!res.added);
  CHECK(res.t == 0.0);
}

TEST_CASE("improve_point: violated precondition is rejected") {
  BumpStack u(MapExpr({ScalarExpr::parse("3 * x")}), 2);
  u.set_bounds(v2(0, 0), v2(1, 1));
  CHECK_THROWS_AS(improve_point(u, one(), Ball{v2(0.5, 0.5), 0.1}, 1e-3, {}, 512),
                  ConstructError);
}

TEST_CASE("improve_ball: segment with near-psi stretch") {
  BumpStack u = zero_stack();
  Ball w{v2(0.5, 0.5), 0.1};
  ConstructConfig cfg;
  auto res = improve_ball(u, one(), w, 0.1, cfg, 1, 0);
  CHECK(res.segment_lip > res.psi_max_on_seg - 0.1);
  CHECK(res.segment_lip > 0.9);
  // Containment: the segment stays strictly inside W.
  for (const Vec& e : {res.segment.a, res.segment.b})
    CHECK((e - w.center).norm() < w.radius);
}

TEST_CASE("improve_packing: empty packing changes nothing") {
  BumpStack u = zero_stack();
  Packing p;
  p.scale = 1;
  p.radius = 0.5;
  auto segs = improve_packing(u, one(), p, 0.5, {});
  CHECK(segs.empty());
  CHECK(u.bump_count() == 0);
}

TEST_CASE("improve_packing: disjoint balls get disjoint supports") {
  BumpStack u = zero_stack();
  Packing p;
  p.scale = 2;
  p.radius = 0.25;
  p.balls = {Ball{v2(0.3, 0.3), 0.25}, Ball{v2(0.72, 0.72), 0.25}};
  ConstructConfig cfg;
  auto segs = improve_packing(u, one(), p, 0.25, cfg);
  REQUIRE(segs.size() == 2);
  REQUIRE(u.bump_count() == 2);
  const Bump& b0 = u.bumps()[0];
  const Bump& b1 = u.bumps()[1];
  // Supports live inside the shrunken balls Phi(B) = B(x, r^2).
  CHECK((b0.center - p.balls[0].center).norm() + b0.radius <= 0.0625 + 1e-12);
  CHECK((b1.center - p.balls[1].center).norm() + b1.radius <= 0.0625 + 1e-12);
  CHECK((b0.center - b1.center).norm() > b0.radius + b1.radius);

  // Outside both supports the map equals the base, bit-exact.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    Vec y = v2(r(rng), r(rng));
    if ((y - b0.center).norm() <= b0.radius) continue;
    if ((y - b1.center).norm() <= b1.radius) continue;
    ++checked;
    CHECK(u.eval(y)[0] == 0.0);
  }
}

TEST_CASE("improve_packing: parallel run matches single-threaded bit-exact") {
  Packing p;
  p.scale = 2;
  p.radius = 0.25;
  p.balls = {Ball{v2(0.3, 0.3), 0.25}, Ball{v2(0.72, 0.72), 0.25},
             Ball{v2(0.3, 0.72), 0.25}};
  ConstructConfig seq, par;
  par.threads = 3;
  BumpStack a = zero_stack(), b = zero_stack();
  auto sa = improve_packing(a, one(), p, 0.25, seq);
  auto sb = improve_packing(b, one(), p, 0.25, par);
  REQUIRE(sa.size() == sb.size());
  REQUIRE(a.bump_count() == b.bump_count());
  for (std::size_t k = 0; k < sa.size(); ++k) {
    CHECK(sa[k].a == sb[k].a);
    CHECK(sa[k].b == sb[k].b);
  }
  for (std::size_t k = 0; k < a.bump_count(); ++k) {
    CHECK(a.bumps()[k].center == b.bumps()[k].center);
    CHECK(a.bumps()[k].t == b.bumps()[k].t);
  }
}

TEST_CASE("iterate: scale one of the unit square is empty") {
  IterationResult res = iterate(MapExpr::zero(1), one(), unit_square(), 1, {});
  REQUIRE(res.report.scales.size() == 1);
  CHECK(res.report.scales[0].ball_count == 0);
  CHECK(res.ledger.segments().empty());
  CHECK(res.u.bump_count() == 0);
}

TEST_CASE("iterate: three scales with certified deficits") {
  ConstructConfig cfg;
  IterationResult res = iterate(MapExpr::zero(1), one(), unit_square(), 3, cfg);
  CHECK(res.ledger.max_scale() == 3);
  CHECK(!res.ledger.segments().empty());

  for (const Segment& s : res.ledger.segments()) {
    double lip = lip_on_segment(res.u, s, 1000, false).pair_max;
    CHECK(lip > 1.0 - std::pow(2.0, -s.scale));
  }
  // Bijection between packing balls and new segments.
  for (std::size_t k = 0; k < res.packings.size(); ++k) {
    int scale = res.packings[k].scale;
    CHECK(static_cast<int>(res.ledger.segments_at(scale).size()) ==
          static_cast<int>(res.packings[k].balls.size()));
  }
  // Report deficits stay below the scale budget.
  for (const auto& sr : res.report.scales)
    CHECK(sr.max_deficit < std::pow(2.0, -sr.scale));
}

TEST_CASE("iterate: stability of earlier segments is bit-exact") {
  ConstructConfig cfg;
  IterationResult res = iterate(MapExpr::zero(1), one(), unit_square(), 4, cfg);
  REQUIRE(res.snapshot_counts.size() == 4);
  for (int j = 1; j <= 4; ++j) {
    const std::size_t count = res.snapshot_counts[j - 1];
    for (const Segment& s : res.ledger.segments_at(j)) {
      for (int k = 0; k <= 16; ++k) {
        Vec x = s.a + (k / 16.0) * (s.b - s.a);
        CHECK(res.u.eval(x) == res.u.eval_prefix(x, count));
      }
    }
  }
}

TEST_CASE("iterate: subsolution survives adversarial probes at bump skirts") {
  ConstructConfig cfg;
  IterationResult res = iterate(MapExpr::zero(1), one(), unit_square(), 3, cfg);
  // Broad random sampling stays below psi...
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int k = 0; k < 2000; ++k)
    CHECK(local_lip(res.u, v2(r(rng), r(rng))) <= 1.0 + 1e-9);
  // ...and so do points planted right at the cutoff transition bands.
  std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979);
  REQUIRE(!res.u.bumps().empty());
  for (int k = 0; k < 100; ++k) {
    const Bump& b = res.u.bumps()[k % res.u.bumps().size()];
    const double rho = b.radius * (0.5 + 0.5 * r(rng));
    Vec x = b.center + rho * v2(std::cos(ang(rng)), std::sin(ang(rng)));
    CHECK(local_lip(res.u, x) <= 1.0 + 1e-3);
  }
}

TEST_CASE("iterate: rejects data violating the slope bound") {
  MapExpr f({ScalarExpr::parse("2 * x")});
  CHECK_THROWS_AS(iterate(f, one(), unit_square(), 1, {}), ConstructError);
}

TEST_CASE("homotopy: endpoints and data-set fixing") {
  ConstructConfig cfg;
  MapExpr f({ScalarExpr::parse("x / 2")});
  IterationResult res = iterate(f, one(), unit_square(), 2, cfg);
  Vec inside = v2(0.37, 0.48);
  CHECK(homotopy_eval(res.u, 0.0, inside)[0] == f.eval(inside)[0]);
  CHECK(homotopy_eval(res.u, 1.0, inside) == res.u.eval(inside));
  for (Vec g : {v2(0.0, 0.3), v2(1.0, 0.8), v2(0.6, 0.0), v2(0.2, 1.0)})
    for (double s : {0.0, 0.25, 0.7, 1.0})
      CHECK(homotopy_eval(res.u, s, g)[0] == f.eval(g)[0]);
}
