#include "lipforge/geometry.hpp"
#include "lipforge/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lipforge;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

DomainSpec unit_square_spec() {
  DomainSpec spec;
  spec.box_lo = v2(0, 0);
  spec.box_hi = v2(1, 1);
  spec.exterior_is_gamma = true;
  return spec;
}

}  // namespace

TEST_CASE("domain: unit square with exterior data set") {
  Domain dom = Domain::make(unit_square_spec());
  CHECK(dom.dim() == 2);
  CHECK(dom.in_free_region(v2(0.5, 0.5)));
  CHECK(!dom.in_free_region(v2(0.0, 0.5)));  // box edge belongs to Gamma
  CHECK(dom.dist_to_gamma(v2(0.5, 0.5)) == doctest::Approx(0.5));
  CHECK(dom.dist_to_gamma(v2(0.1, 0.5)) == doctest::Approx(0.1));
}

TEST_CASE("domain: square minus disk, Monte Carlo area oracle") {
  DomainSpec spec = unit_square_spec();
  spec.gamma.push_back(DiskShape{v2(0.5, 0.5), 0.2});
  Domain dom = Domain::make(spec);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long in = 0;
  const long n = 1000000;
  for (long k = 0; k < n; ++k)
    if (dom.in_free_region(v2(u(rng), u(rng)))) ++in;
  const double mc = static_cast<double>(in) / n;
  const double exact = 1.0 - 0.04 * std::numbers::pi;
  CHECK(mc == doctest::Approx(exact).epsilon(0.005));
  CHECK(dom.volume_estimate() == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("domain: fully covered box is rejected") {
  DomainSpec spec = unit_square_spec();
  spec.gamma.push_back(BoxShape{v2(-1, -1), v2(2, 2)});
  CHECK_THROWS_WITH_AS(Domain::make(spec), doctest::Contains("empty free region"),
                       std::invalid_argument);
}

TEST_CASE("domain: dimension below two is rejected") {
  DomainSpec spec;
  spec.box_lo = Vec::Constant(1, 0.0);
  spec.box_hi = Vec::Constant(1, 1.0);
  CHECK_THROWS_AS(Domain::make(spec), std::invalid_argument);
}

TEST_CASE("distances: primitive queries are exact") {
  Domain dom = Domain::make(unit_square_spec());
  CHECK(dom.dist_to_gamma(v2(0.5, 0.5)) == 0.5);
  CHECK(point_segment_dist(v2(0.5, 0.5), v2(0.1, 0.1), v2(0.1, 0.9)) ==
        doctest::Approx(0.4));
  CHECK(dom.dist_to_gamma(v2(0.0, 0.3)) == 0.0);

  DomainSpec empty = unit_square_spec();
  empty.exterior_is_gamma = false;
  Domain free = Domain::make(empty);
  CHECK(free.dist_to_gamma(v2(0.5, 0.5)) == kInf);
}

TEST_CASE("distances: segment-segment") {
  CHECK(segment_segment_dist(v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)) ==
        doctest::Approx(1.0));
  // Crossing segments have distance zero.
  CHECK(segment_segment_dist(v2(0, 0), v2(1, 1), v2(0, 1), v2(1, 0)) ==
        doctest::Approx(0.0));
  CHECK(segment_segment_dist(v2(0, 0), v2(1, 0), v2(2, 0), v2(3, 0)) ==
        doctest::Approx(1.0));
}

TEST_CASE("phi shrink squares the radius") {
  Ball b1 = phi_shrink(Ball{v2(0, 0), 1.0});
  CHECK(b1.radius == 1.0);
  Ball b2 = phi_shrink(Ball{v2(0, 0), 0.5});
  CHECK(b2.radius == 0.25);
  Ball b3 = phi_shrink(Ball{v2(1, 2), 0.25});
  CHECK(b3.radius == 0.0625);
  CHECK(b3.center == v2(1, 2));
  // The boundary gap between B and Phi(B) is r - r^2.
  const double r = 0.3;
  CHECK(r - phi_shrink(Ball{v2(0, 0), r}).radius == doctest::Approx(r - r * r));
}

TEST_CASE("maximal packing: impossibly large radius gives the empty packing") {
  Domain dom = Domain::make(unit_square_spec());
  Packing p = maximal_packing(dom, {}, 1, 0.6);
  CHECK(p.balls.empty());
  CHECK(audit_maximality(dom, {}, p));
}

TEST_CASE("maximal packing: radius 0.2 in the unit square") {
  Domain dom = Domain::make(unit_square_spec());
  Packing p = maximal_packing(dom, {}, 1, 0.2);
  CHECK(p.balls.size() >= 1);
  CHECK(p.balls.size() <= 4);
  for (std::size_t i = 0; i < p.balls.size(); ++i) {
    CHECK(dom.dist_to_complement(p.balls[i].center) >= 0.2 + p.audit_spacing);
    for (std::size_t k = i + 1; k < p.balls.size(); ++k)
      CHECK((p.balls[i].center - p.balls[k].center).norm() > 0.4);
  }
  Vec witness;
  CHECK(audit_maximality(dom, {}, p, &witness));
}

TEST_CASE("maximal packing: avoids obstacle segments") {
  Domain dom = Domain::make(unit_square_spec());
  std::vector<Segment> obstacles{{v2(0.0, 0.5), v2(1.0, 0.5), 1, 0}};
  Packing p = maximal_packing(dom, obstacles, 1, 0.2);
  for (const auto& b : p.balls)
    CHECK(point_segment_dist(b.center, obstacles[0].a, obstacles[0].b) > 0.2);
  CHECK(audit_maximality(dom, obstacles, p));
}

TEST_CASE("maximal packing: audit detects a hole") {
  Domain dom = Domain::make(unit_square_spec());
  Packing p = maximal_packing(dom, {}, 1, 0.1);
  REQUIRE(!p.balls.empty());
  Packing broken = p;
  broken.balls.pop_back();
  Vec witness;
  CHECK(!audit_maximality(dom, {}, broken, &witness));
  CHECK(witness.size() == 2);
}

TEST_CASE("segment ledger: nesting and center lists") {
  SegmentLedger ledger;
  ledger.begin_scale(1);
  ledger.add_segment({v2(0.2, 0.2), v2(0.3, 0.2), 1, 0});
  ledger.add_centers(1, {v2(0.25, 0.2)});
  ledger.begin_scale(2);
  ledger.add_segment({v2(0.7, 0.7), v2(0.8, 0.7), 2, 0});
  CHECK(ledger.max_scale() == 2);
  CHECK(ledger.segments_up_to(1).size() == 1);
  CHECK(ledger.segments_up_to(2).size() == 2);
  CHECK(ledger.segments_at(2).size() == 1);
  CHECK(ledger.centers_at(1).size() == 1);
  CHECK(ledger.centers_at(2).empty());
}

TEST_CASE("minkowski content: circle oracle") {
  std::vector<Shape> shapes{CircleShape{v2(0.5, 0.5), 0.25}};
  auto est = minkowski_content(shapes, 2, {0.08, 0.02});
  const double exact = 2.0 * std::numbers::pi * 0.25;
  CHECK(est.estimate == doctest::Approx(exact).epsilon(0.03));
  // The circular tube has no curvature correction (the annulus area is exactly
  // 2*pi*R*2r), so the residual is lattice noise; it must stay within one
  // lattice spacing of monotone decrease.
  const double spacing = 0.02 / 4.0;
  CHECK(std::abs(est.values[1] - exact) <=
        std::abs(est.values[0] - exact) + spacing);
}

TEST_CASE("minkowski content: error decreases with the radius on a stadium") {
  // A segment tube carries the pi*r/2 end-cap excess, so the error in the
  // content estimate genuinely shrinks as the radius does.
  std::vector<Shape> shapes{SegmentSet{{{v2(0.2, 0.5), v2(0.7, 0.5)}}}};
  auto est = minkowski_content(shapes, 2, {0.08, 0.04, 0.02});
  for (std::size_t k = 1; k < est.values.size(); ++k)
    CHECK(std::abs(est.values[k] - 0.5) < std::abs(est.values[k - 1] - 0.5));
}

TEST_CASE("minkowski content: segment stadium oracle") {
  std::vector<Shape> shapes{SegmentSet{{{v2(0.2, 0.5), v2(0.7, 0.5)}}}};
  auto est = minkowski_content(shapes, 2, {0.04, 0.02});
  for (std::size_t k = 0; k < est.radii.size(); ++k) {
    const double r = est.radii[k];
    const double stadium = (2.0 * r * 0.5 + std::numbers::pi * r * r) / (2.0 * r);
    CHECK(est.values[k] == doctest::Approx(stadium).epsilon(0.03));
  }
  CHECK(est.estimate == doctest::Approx(0.5).epsilon(0.07));
}

TEST_CASE("minkowski content: empty set and bad radii") {
  CHECK(minkowski_content({}, 2, {0.04, 0.02}).estimate == 0.0);
  std::vector<Shape> shapes{CircleShape{v2(0.5, 0.5), 0.25}};
  CHECK_THROWS_AS(minkowski_content(shapes, 2, {0.02, 0.04}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(minkowski_content(shapes, 2, {1e-7}),
                       doctest::Contains("resolution"), std::invalid_argument);
}

TEST_CASE("coverage statistic: empty ledger measures distance to the boundary") {
  Domain dom = Domain::make(unit_square_spec());
  SegmentLedger ledger;
  Vec witness;
  double c = coverage_statistic(dom, ledger, 1, 20000, &witness);
  CHECK(c == doctest::Approx(0.5).epsilon(0.02));
  CHECK((witness - v2(0.5, 0.5)).norm() < 0.05);
}

TEST_CASE("spatial grid: query returns all nearby items") {
  SpatialGrid grid(v2(0, 0), v2(1, 1), 0.1);
  std::vector<Vec> pts;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    pts.push_back(v2(u(rng), u(rng)));
    grid.insert_point(k, pts.back());
  }
  std::vector<int> out;
  for (int trial = 0; trial < 50; ++trial) {
    Vec q = v2(u(rng), u(rng));
    const double r = 0.15 * u(rng);
    grid.query(q, r, out);
    for (int k = 0; k < 200; ++k) {
      if ((pts[k] - q).norm() <= r)
        CHECK(std::find(out.begin(), out.end(), k) != out.end());
    }
  }
}
