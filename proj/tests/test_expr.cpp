#include "lipforge/expr.hpp"

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

double central_diff(const ScalarExpr& e, const Vec& x, int k, double step = 1e-6) {
  Vec a = x, b = x;
  a[k] += step;
  b[k] -= step;
  return (e.eval(a) - e.eval(b)) / (2.0 * step);
}

}  // namespace

TEST_CASE("parser: arithmetic, precedence, unary minus") {
  CHECK(ScalarExpr::parse("1 + 2 * 3").eval(v2(0, 0)) == 7.0);
  CHECK(ScalarExpr::parse("(1 + 2) * 3").eval(v2(0, 0)) == 9.0);
  CHECK(ScalarExpr::parse("-x + 4").eval(v2(1.5, 0)) == 2.5);
  CHECK(ScalarExpr::parse("2 - 3 - 4").eval(v2(0, 0)) == -5.0);
  CHECK(ScalarExpr::parse("12 / 4 / 3").eval(v2(0, 0)) == 1.0);
  CHECK(ScalarExpr::parse("1.5e2").eval(v2(0, 0)) == 150.0);
  CHECK(ScalarExpr::parse("--x").eval(v2(2, 0)) == 2.0);
}

TEST_CASE("parser: variables x, y, z and x1..x9") {
  CHECK(ScalarExpr::parse("x").eval(v2(3, 4)) == 3.0);
  CHECK(ScalarExpr::parse("y").eval(v2(3, 4)) == 4.0);
  CHECK(ScalarExpr::parse("x1 + x2").eval(v2(3, 4)) == 7.0);
  Vec x3(3);
  x3 << 1, 2, 5;
  CHECK(ScalarExpr::parse("z").eval(x3) == 5.0);
  CHECK(ScalarExpr::parse("x3").min_dim() == 3);
  CHECK(ScalarExpr::parse("x + y").min_dim() == 2);
  CHECK(ScalarExpr::parse("3").min_dim() == 0);
}

TEST_CASE("parser: functions") {
  CHECK(ScalarExpr::parse("sin(0)").eval(v2(0, 0)) == 0.0);
  CHECK(ScalarExpr::parse("cos(0)").eval(v2(0, 0)) == 1.0);
  CHECK(ScalarExpr::parse("exp(0)").eval(v2(0, 0)) == 1.0);
  CHECK(ScalarExpr::parse("abs(-3)").eval(v2(0, 0)) == 3.0);
  CHECK(ScalarExpr::parse("min(2, 5)").eval(v2(0, 0)) == 2.0);
  CHECK(ScalarExpr::parse("max(x, 0)").eval(v2(-1, 0)) == 0.0);
  CHECK(ScalarExpr::parse("sin(x)*sin(x) + cos(x)*cos(x)").eval(v2(0.7, 0)) ==
        doctest::Approx(1.0));
}

TEST_CASE("parser: syntax errors carry offsets") {
  CHECK_THROWS_AS(ScalarExpr::parse("1 +"), ExprError);
  CHECK_THROWS_AS(ScalarExpr::parse("foo(1)"), ExprError);
  CHECK_THROWS_AS(ScalarExpr::parse("(1 + 2"), ExprError);
  CHECK_THROWS_AS(ScalarExpr::parse("min(1)"), ExprError);
  CHECK_THROWS_AS(ScalarExpr::parse("sin(1, 2)"), ExprError);
  CHECK_THROWS_AS(ScalarExpr::parse(""), ExprError);
  CHECK_THROWS_AS(ScalarExpr::parse("x10"), ExprError);
  try {
    ScalarExpr::parse("1 + * 2");
    CHECK(false);
  } catch (const ExprError& e) {
    CHECK(e.offset == 4);
  }
}

TEST_CASE("eval: division by zero reports the location") {
  ScalarExpr e = ScalarExpr::parse("1 / x");
  CHECK(e.eval(v2(2, 0)) == 0.5);
  CHECK_THROWS_AS(e.eval(v2(0, 0)), ExprError);
}

TEST_CASE("gradient: closed forms") {
  auto g = [](const std::string& s, const Vec& x) {
    return ScalarExpr::parse(s).eval_grad(x);
  };
  CHECK(g("3 * x", v2(1, 1)).grad[0] == 3.0);
  CHECK(g("3 * x", v2(1, 1)).grad[1] == 0.0);
  CHECK(g("x * y", v2(2, 5)).grad[0] == 5.0);
  CHECK(g("sin(x)", v2(0, 0)).grad[0] == 1.0);
  CHECK(g("exp(2 * x)", v2(0.5, 0)).grad[0] == doctest::Approx(2.0 * std::exp(1.0)));
}

TEST_CASE("gradient: matches central differences at random smooth points") {
  const char* exprs[] = {
      "x * y + sin(3 * x)",
      "exp(x - y) + cos(x * y)",
      "(x + 2) / (y + 3)",
      "x * x * y - y * y",
  };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* s : exprs) {
    ScalarExpr e = ScalarExpr::parse(s);
    for (int trial = 0; trial < 25; ++trial) {
      Vec x = v2(u(rng), u(rng));
      auto r = e.eval_grad(x);
      REQUIRE(!r.kink);
      for (int k = 0; k < 2; ++k) {
        double fd = central_diff(e, x, k);
        CHECK(r.grad[k] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("kinks: one-sided convention and flags") {
  ScalarExpr a = ScalarExpr::parse("abs(x)");
  auto r0 = a.eval_grad(v2(0, 0));
  CHECK(r0.kink);
  CHECK(r0.grad[0] == 1.0);  // positive-direction convention
  auto rp = a.eval_grad(v2(0.5, 0));
  CHECK(!rp.kink);
  CHECK(rp.grad[0] == 1.0);
  auto rn = a.eval_grad(v2(-0.5, 0));
  CHECK(rn.grad[0] == -1.0);

  ScalarExpr m = ScalarExpr::parse("max(x, y)");
  CHECK(m.eval_grad(v2(0.3, 0.3)).kink);
  CHECK(!m.eval_grad(v2(0.4, 0.3)).kink);
  auto rt = m.eval_grad(v2(0.3, 0.3));
  CHECK(rt.grad[0] == 1.0);  // max picks the first argument on ties
  CHECK(rt.grad[1] == 0.0);

  ScalarExpr mi = ScalarExpr::parse("min(x, y)");
  auto ri = mi.eval_grad(v2(0.3, 0.3));
  CHECK(ri.kink);
  CHECK(ri.grad[0] == 1.0);  // min picks the first argument on ties
}

TEST_CASE("combinators: max/min/plus/scale") {
  ScalarExpr f = ScalarExpr::parse("x");
  ScalarExpr g = ScalarExpr::parse("-x");
  ScalarExpr m = max_combine(f, g);
  CHECK(m.eval(v2(0.5, 0)) == 0.5);
  CHECK(m.eval(v2(-0.5, 0)) == 0.5);
  CHECK(min_combine(f, g).eval(v2(0.5, 0)) == -0.5);
  CHECK(max_combine(f, f).eval(v2(0.3, 0)) == 0.3);
  CHECK((f + g).eval(v2(0.7, 0)) == 0.0);
  CHECK((2.5 * f).eval(v2(2, 0)) == 5.0);
}

TEST_CASE("to_string reparses to the same values") {
  const char* exprs[] = {"x * y + sin(3 * x)", "max(x, 0) - min(y, 1)",
                         "-(x + 2) / (y + 3)"};
  for (const char* s : exprs) {
    ScalarExpr e = ScalarExpr::parse(s);
    ScalarExpr r = ScalarExpr::parse(e.to_string());
    for (double x = -1; x <= 1; x += 0.25)
      for (double y = -1; y <= 1; y += 0.25)
        CHECK(e.eval(v2(x, y)) == r.eval(v2(x, y)));
  }
}

TEST_CASE("map expr: tuple evaluation and jacobian") {
  MapExpr m({ScalarExpr::parse("x"), ScalarExpr::parse("y")});
  Vec x = v2(0.3, 0.8);
  CHECK(m.eval(x) == x);
  Mat j = m.jacobian(x);
  CHECK(j(0, 0) == 1.0);
  CHECK(j(0, 1) == 0.0);
  CHECK(j(1, 1) == 1.0);

  MapExpr z = MapExpr::zero(3);
  CHECK(z.out_dim() == 3);
  CHECK(z.eval(x).norm() == 0.0);

  bool kink = false;
  MapExpr k({ScalarExpr::parse("abs(x)")});
  k.jacobian(v2(0, 0), &kink);
  CHECK(kink);
}
