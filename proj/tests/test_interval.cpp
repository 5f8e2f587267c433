#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "pvfit/interval.hpp"

using namespace pvfit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct IvGen {
  std::mt19937_64 rng;
  explicit IvGen(std::uint64_t seed) : rng(seed) {}

  double unit() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  double scalar() {
    const int e = static_cast<int>(unit() * 7.0) - 3;
    return (unit() * 2.0 - 1.0) * std::pow(10.0, e);
  }

  Interval interval(bool allow_infinite = true) {
    const double shape = unit();
    if (shape < 0.10) return Interval::point(scalar());
    double a = scalar(), b = scalar();
    if (a > b) std::swap(a, b);
    if (allow_infinite) {
      if (shape > 0.95) a = -kInf;
      if (shape > 0.90 && shape <= 0.95) b = kInf;
    }
    return {a, b};
  }

  double inside(const Interval& iv) {
    double lo = iv.lo == -kInf ? -1e12 : iv.lo;
    double hi = iv.hi == kInf ? 1e12 : iv.hi;
    if (lo > hi) return iv.lo;  // degenerate fallback, not expected
    const double x = lo + unit() * (hi - lo);
    return std::min(std::max(x, iv.lo), iv.hi);
  }
};

}  // namespace

TEST_CASE("interval addition keeps exact endpoints exact") {
  const Interval r = iv_add({1.0, 2.0}, {3.0, 4.0});
  CHECK(r.lo == 4.0);
  CHECK(r.hi == 6.0);
}

TEST_CASE("interval multiplication covers the endpoint-product hull") {
  const Interval r = iv_mul({-1.0, 2.0}, {3.0, 4.0});
  CHECK(r.lo == -4.0);
  CHECK(r.hi == 8.0);
}

TEST_CASE("division by a zero-touching interval extends to infinity") {
  const Interval r = iv_div({1.0, 1.0}, {0.0, 2.0});
  CHECK(r.lo == 0.5);
  CHECK(r.hi == kInf);

  const Interval whole = iv_div({1.0, 2.0}, {-1.0, 1.0});
  CHECK(whole.lo == -kInf);
  CHECK(whole.hi == kInf);

  const Interval neg = iv_div({-2.0, -1.0}, {0.0, 4.0});
  CHECK(neg.lo == -kInf);
  CHECK(neg.hi == -0.25);

  // Zero numerator over a zero-containing denominator still collapses to the
  // whole line rather than erroring.
  const Interval z = iv_div({0.0, 0.0}, {0.0, 0.0});
  CHECK(z.lo == -kInf);
  CHECK(z.hi == kInf);
}

TEST_CASE("exp endpoints: identity point and monotone range") {
  const Interval one = iv_exp({0.0, 0.0});
  CHECK(one.contains(1.0));
  CHECK(one.width() <= 2.0 * std::numeric_limits<double>::epsilon());

  const Interval e01 = iv_exp({0.0, 1.0});
  CHECK(e01.lo <= 1.0);
  CHECK(e01.hi >= std::exp(1.0));

  CHECK(iv_exp({-kInf, 0.0}).lo == 0.0);
  CHECK(iv_exp({0.0, kInf}).hi == kInf);
}

TEST_CASE("squaring handles sign-crossing ranges exactly") {
  Interval r = iv_sq({-2.0, 1.0});
  CHECK(r.lo == 0.0);
  CHECK(r.hi == 4.0);
  r = iv_sq({2.0, 3.0});
  CHECK(r.lo == 4.0);
  CHECK(r.hi == 9.0);
  r = iv_sq({-3.0, -1.0});
  CHECK(r.lo == 1.0);
  CHECK(r.hi == 9.0);
}

TEST_CASE("containment holds over randomized operands", "[property]") {
  IvGen gen(20240811);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const Interval a = gen.interval();
    const Interval b = gen.interval();
    const double x = gen.inside(a);
    const double y = gen.inside(b);

    CHECK(iv_add(a, b).contains(x + y));
    CHECK(iv_sub(a, b).contains(x - y));
    CHECK(iv_mul(a, b).contains(x * y));
    if (y != 0.0) {
      CHECK(iv_div(a, b).contains(x / y));
    }
    CHECK(iv_sq(a).contains(x * x));
    if (std::abs(x) < 700.0) {
      CHECK(iv_exp(a).contains(std::exp(x)));
    }
  }
}

TEST_CASE("outward rounding never crosses the endpoints", "[property]") {
  IvGen gen(7);
  for (int t = 0; t < 20000; ++t) {
    const Interval a = gen.interval();
    const Interval b = gen.interval();
    for (const auto op : {IvOp::Add, IvOp::Sub, IvOp::Mul, IvOp::Div}) {
      const Interval r = iv_arith(a, b, op);
      CHECK(r.lo <= r.hi);
      CHECK(!std::isnan(r.lo));
      CHECK(!std::isnan(r.hi));
    }
  }
}

TEST_CASE("square is at least as tight as self-multiplication", "[property]") {
  IvGen gen(99);
  for (int t = 0; t < 5000; ++t) {
    const Interval a = gen.interval(false);
    const Interval sq = iv_sq(a);
    const Interval mul = iv_mul(a, a);
    CHECK(sq.lo >= mul.lo);
    CHECK(sq.hi <= mul.hi);
    if (a.lo < 0.0 && a.hi > 0.0 && a.lo != a.hi) {
      // Self-multiplication cannot see the factors moving together.
      CHECK(sq.lo > mul.lo);
    }
  }
}

TEST_CASE("box width is the largest component diameter") {
  CHECK(box_width({Interval::point(1.0), Interval::point(-2.0)}) == 0.0);
  CHECK(box_width({{0.0, 1.0}, {0.0, 3.0}, {0.0, 2.0}}) == 3.0);
  CHECK(box_width({{0.0, 1.0}, {0.0, kInf}}) == kInf);
}

TEST_CASE("bisection splits the widest component and covers the box") {
  const IntervalBox b{{0.0, 2.0}, {0.0, 1.0}};
  const auto [left, right] = box_bisect(b);
  CHECK(left[0].lo == 0.0);
  CHECK(left[0].hi == 1.0);
  CHECK(right[0].lo == 1.0);
  CHECK(right[0].hi == 2.0);
  CHECK(left[1].lo == 0.0);
  CHECK(left[1].hi == 1.0);

  // Equal widths: the first component is the one split.
  const auto [l2, r2] = box_bisect({{0.0, 1.0}, {5.0, 6.0}});
  CHECK(l2[0].hi == 0.5);
  CHECK(l2[1].lo == 5.0);
  CHECK(r2[1].hi == 6.0);

  CHECK_THROWS_AS(box_bisect({Interval::point(1.0)}), std::domain_error);

  IvGen gen(1234);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> p(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) p[j] = gen.inside(b[j]);
    CHECK((box_contains(left, p) || box_contains(right, p)));
  }
}
