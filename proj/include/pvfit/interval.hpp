#ifndef PVFIT_INTERVAL_HPP
#define PVFIT_INTERVAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pvfit {

/// A closed extended-real interval [lo, hi]. Endpoints may be infinite but
/// never NaN; the empty interval is the distinct state [+inf, -inf].
///
/// Every operation returns an enclosure of the exact set image. Endpoints are
/// computed in double precision and bumped one representable value outward
/// whenever the computation may have rounded, so containment holds without
/// touching the FPU rounding mode.
struct Interval {
  double lo;
  double hi;

  static constexpr double inf() { return std::numeric_limits<double>::infinity(); }

  static Interval empty() { return {inf(), -inf()}; }
  static Interval whole() { return {-inf(), inf()}; }
  static Interval point(double x) { return {x, x}; }

  bool is_empty() const { return lo > hi; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return is_empty() ? 0.0 : hi - lo; }
  double mid() const;
};

namespace ivdetail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// An endpoint candidate together with whether it is known to be exact.
struct Rounded {
  double value;
  bool exact;
};

inline double bump_down(const Rounded& r) {
  return r.exact ? r.value : std::nextafter(r.value, -kInf);
}

inline double bump_up(const Rounded& r) {
  return r.exact ? r.value : std::nextafter(r.value, kInf);
}

/// 2Sum exactness test: err == 0 iff a + b was computed without rounding.
inline Rounded radd(double a, double b) {
  const double s = a + b;
  if (std::isinf(a) || std::isinf(b)) return {s, true};  // extended-real sum
  if (std::isinf(s)) return {s, false};                  // overflow
  const double bp = s - a;
  const double err = (a - (s - bp)) + (b - bp);
  return {s, err == 0.0};
}

/// 0 * inf is 0 here: a zero factor collapses the set image to {0} no matter
/// how large the other operand ranges.
inline Rounded rmul(double a, double b) {
  if (a == 0.0 || b == 0.0) return {0.0, true};
  if (std::isinf(a) || std::isinf(b)) {
    const bool neg = (a < 0.0) != (b < 0.0);
    return {neg ? -kInf : kInf, true};
  }
  const double p = a * b;
  if (std::isinf(p)) return {p, false};
  // Near the subnormal range the FMA residual itself can underflow and lie.
  if (p == 0.0 || std::fpclassify(p) == FP_SUBNORMAL) return {p, false};
  return {p, std::fma(a, b, -p) == 0.0};
}

/// Finite/nonzero-denominator quotient; the extended cases are dispatched by
/// iv_div before reaching here.
inline Rounded rdiv(double a, double b) {
  if (std::isinf(b)) return {std::signbit(a) == std::signbit(b) ? 0.0 : -0.0, true};
  if (std::isinf(a)) {
    const bool neg = (a < 0.0) != (b < 0.0);
    return {neg ? -kInf : kInf, true};
  }
  const double q = a / b;
  if (std::isinf(q)) return {q, false};
  if ((q == 0.0 && a != 0.0) || std::fpclassify(q) == FP_SUBNORMAL) return {q, false};
  return {q, std::fma(q, b, -a) == 0.0};
}

inline Rounded min_r(const Rounded& a, const Rounded& b) {
  if (a.value < b.value) return a;
  if (b.value < a.value) return b;
  return {a.value, a.exact && b.exact};
}

inline Rounded max_r(const Rounded& a, const Rounded& b) {
  if (a.value > b.value) return a;
  if (b.value > a.value) return b;
  return {a.value, a.exact && b.exact};
}

}  // namespace ivdetail

inline Interval iv_add(const Interval& a, const Interval& b) {
  using namespace ivdetail;
  return {bump_down(radd(a.lo, b.lo)), bump_up(radd(a.hi, b.hi))};
}

inline Interval iv_neg(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval iv_sub(const Interval& a, const Interval& b) { return iv_add(a, iv_neg(b)); }

inline Interval iv_mul(const Interval& a, const Interval& b) {
  using namespace ivdetail;
  const Rounded c1 = rmul(a.lo, b.lo);
  const Rounded c2 = rmul(a.lo, b.hi);
  const Rounded c3 = rmul(a.hi, b.lo);
  const Rounded c4 = rmul(a.hi, b.hi);
  return {bump_down(min_r(min_r(c1, c2), min_r(c3, c4))),
          bump_up(max_r(max_r(c1, c2), max_r(c3, c4)))};
}

/// Extended division. A denominator containing zero yields the semi-infinite
/// hull (or the whole line), never an error.
inline Interval iv_div(const Interval& a, const Interval& b) {
  using namespace ivdetail;
  if (b.lo > 0.0 || b.hi < 0.0) {
    const Rounded c1 = rdiv(a.lo, b.lo);
    const Rounded c2 = rdiv(a.lo, b.hi);
    const Rounded c3 = rdiv(a.hi, b.lo);
    const Rounded c4 = rdiv(a.hi, b.hi);
    return {bump_down(min_r(min_r(c1, c2), min_r(c3, c4))),
            bump_up(max_r(max_r(c1, c2), max_r(c3, c4)))};
  }
  // Zero in the denominator.
  if (a.lo <= 0.0 && a.hi >= 0.0) return Interval::whole();
  if (b.lo == 0.0 && b.hi == 0.0) return Interval::whole();
  if (a.lo > 0.0) {
    if (b.lo == 0.0) return {bump_down(rdiv(a.lo, b.hi)), kInf};   // [a,b]/[0,d]
    if (b.hi == 0.0) return {-kInf, bump_up(rdiv(a.lo, b.lo))};    // [a,b]/[c,0]
  } else {  // a.hi < 0
    if (b.lo == 0.0) return {-kInf, bump_up(rdiv(a.hi, b.hi))};
    if (b.hi == 0.0) return {bump_down(rdiv(a.hi, b.lo)), kInf};
  }
  return Interval::whole();  // denominator straddles zero: hull of two rays
}

enum class IvOp { Add, Sub, Mul, Div };

inline Interval iv_arith(const Interval& a, const Interval& b, IvOp op) {
  switch (op) {
    case IvOp::Add: return iv_add(a, b);
    case IvOp::Sub: return iv_sub(a, b);
    case IvOp::Mul: return iv_mul(a, b);
    default: return iv_div(a, b);
  }
}

/// exp extended to intervals; relies on the library exp being faithful, with
/// a one-step outward bump on each finite endpoint.
inline Interval iv_exp(const Interval& a) {
  using namespace ivdetail;
  double lo;
  if (a.lo == -kInf) {
    lo = 0.0;
  } else {
    lo = std::nextafter(std::exp(a.lo), -kInf);
    if (lo < 0.0) lo = 0.0;  // exp is positive; the bump may cross zero
  }
  double hi;
  if (a.hi == kInf) {
    hi = kInf;
  } else {
    hi = std::exp(a.hi);
    if (hi != kInf) hi = std::nextafter(hi, kInf);
  }
  return {lo, hi};
}

/// Exact image of x^2 (sign-crossing intervals collapse to [0, max]).
/// Tighter than iv_mul(a, a), which cannot see both factors move together.
inline Interval iv_sq(const Interval& a) {
  using namespace ivdetail;
  const Rounded lo2 = rmul(a.lo, a.lo);
  const Rounded hi2 = rmul(a.hi, a.hi);
  if (a.lo >= 0.0) return {bump_down(lo2), bump_up(hi2)};
  if (a.hi <= 0.0) return {bump_down(hi2), bump_up(lo2)};
  return {0.0, bump_up(max_r(lo2, hi2))};
}

inline double Interval::mid() const {
  // 0.5*lo + 0.5*hi cannot overflow and always lands inside [lo, hi].
  const double l = lo == -inf() ? std::numeric_limits<double>::lowest() : lo;
  const double h = hi == inf() ? std::numeric_limits<double>::max() : hi;
  return 0.5 * l + 0.5 * h;
}

/// An axis-aligned box: one interval per parameter.
using IntervalBox = std::vector<Interval>;

inline bool box_contains(const IntervalBox& b, const std::vector<double>& x) {
  if (b.size() != x.size()) return false;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!b[j].contains(x[j])) return false;
  }
  return true;
}

inline std::vector<double> box_midpoint(const IntervalBox& b) {
  std::vector<double> m(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) m[j] = b[j].mid();
  return m;
}

/// Largest component diameter; +inf if any component is unbounded.
inline double box_width(const IntervalBox& b) {
  double w = 0.0;
  for (const auto& c : b) w = std::max(w, c.width());
  return w;
}

/// True when bisecting the component actually shrinks it: the midpoint must
/// land strictly between the endpoints.
inline bool iv_splittable(const Interval& c) {
  const double m = c.mid();
  return m > c.lo && m < c.hi;
}

inline bool box_splittable(const IntervalBox& b) {
  for (const auto& c : b) {
    if (iv_splittable(c)) return true;
  }
  return false;
}

/// Splits the widest splittable component (lowest index on ties) at its
/// midpoint. The halves cover the box exactly and share only the split plane.
inline std::pair<IntervalBox, IntervalBox> box_bisect(const IntervalBox& b) {
  std::size_t widest = b.size();
  double w = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double wj = b[j].width();
    if (wj > w && iv_splittable(b[j])) {
      w = wj;
      widest = j;
    }
  }
  if (widest == b.size()) {
    throw std::domain_error("cannot bisect a degenerate box");
  }
  const double m = b[widest].mid();
  IntervalBox left = b, right = b;
  left[widest] = {b[widest].lo, m};
  right[widest] = {m, b[widest].hi};
  return {std::move(left), std::move(right)};
}

}  // namespace pvfit

#endif  // PVFIT_INTERVAL_HPP
