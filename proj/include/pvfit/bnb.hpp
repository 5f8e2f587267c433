#ifndef PVFIT_BNB_HPP
#define PVFIT_BNB_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pvfit/interval.hpp"
#include "pvfit/objective.hpp"

namespace pvfit {

struct BnbConfig {
  double eps_f = 1e-13;    // absolute objective precision (SSE scale)
  double eps_rel = 1e-9;   // relative objective precision
  double eps_x = 1e-6;     // box width precision
  double timeout_s = 3600.0;
  std::size_t max_boxes = 1'000'000;  // processed-box budget and memory cap
  /// Discard strictly interior boxes whose interval SSE gradient excludes
  /// zero. Off by default: bound pruning alone is the baseline.
  bool use_gradient_contractor = false;
  /// Polish each midpoint with a short deterministic compass search before
  /// the incumbent update. Off by default.
  bool refine_midpoint = false;

  void validate() const {
    if (!(eps_f > 0.0)) throw std::invalid_argument("eps_f must be positive");
    if (!(eps_x > 0.0)) throw std::invalid_argument("eps_x must be positive");
    if (!(timeout_s > 0.0)) throw std::invalid_argument("timeout must be positive");
    if (max_boxes < 1) throw std::invalid_argument("max_boxes must be at least 1");
  }
};

enum class BnbTermination { Exhausted, Timeout, BoxCap };

inline const char* termination_name(BnbTermination t) {
  switch (t) {
    case BnbTermination::Exhausted: return "exhausted";
    case BnbTermination::Timeout: return "timeout";
    default: return "box_cap";
  }
}

/// A queued box with the objective enclosure computed when it was enqueued.
struct BnbEntry {
  IntervalBox box;
  Interval objective;
  std::uint64_t seq = 0;

  double lower_bound() const { return objective.lo; }
};

/// Min-heap ordered by (lower bound, insertion order). Exposes its storage so
/// soundness instrumentation and final bound accounting can scan live boxes.
class BoxQueue {
 public:
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<BnbEntry>& entries() const { return entries_; }

  void push(BnbEntry e) {
    entries_.push_back(std::move(e));
    std::push_heap(entries_.begin(), entries_.end(), later_);
  }

  BnbEntry pop_min() {
    if (entries_.empty()) throw std::logic_error("pop from an empty box queue");
    std::pop_heap(entries_.begin(), entries_.end(), later_);
    BnbEntry e = std::move(entries_.back());
    entries_.pop_back();
    return e;
  }

  double min_lower_bound() const {
    double lb = std::numeric_limits<double>::infinity();
    for (const auto& e : entries_) lb = std::min(lb, e.lower_bound());
    return lb;
  }

 private:
  // std heap primitives keep the *largest* element first, so "later" means
  // worse bound or (on ties) later insertion.
  static bool later_(const BnbEntry& a, const BnbEntry& b) {
    if (a.objective.lo != b.objective.lo) return a.objective.lo > b.objective.lo;
    return a.seq > b.seq;
  }

  std::vector<BnbEntry> entries_;
};

struct BnbResult {
  double f_lower = 0.0;
  double f_upper = std::numeric_limits<double>::infinity();
  double rmse_lower = 0.0;
  double rmse_upper = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent;
  std::vector<IntervalBox> solution_boxes;
  std::size_t boxes_processed = 0;
  double elapsed_s = 0.0;
  BnbTermination terminated_by = BnbTermination::Exhausted;
};

/// The certified optimality gap; only an exhausted run certifies it.
struct CertifiedGap {
  double gap;
  bool certified;
};

inline CertifiedGap certify_epsilon(const BnbResult& r) {
  return {r.f_upper - r.f_lower, r.terminated_by == BnbTermination::Exhausted};
}

namespace bnbdetail {

/// Interval counterpart of detail::diode_current, with the same expression
/// structure so a point evaluated in plain doubles always lands inside the
/// interval result (rounding drift included).
inline Interval iv_diode_current(const Interval& x, const Interval& isat_ua, const Interval& n,
                                 double temperature) {
  const Interval q = Interval::point(PhysicalConstants::electron_charge);
  const Interval k = Interval::point(PhysicalConstants::boltzmann);
  const Interval arg =
      iv_div(iv_mul(q, x), iv_mul(iv_mul(n, k), Interval::point(temperature)));
  const Interval e = iv_exp(arg);
  return iv_mul(iv_mul(isat_ua, Interval::point(1e-6)), iv_sub(e, Interval::point(1.0)));
}

}  // namespace bnbdetail

/// Natural interval extension of the SSE objective over a box. Saturation
/// currents are scaled from microamperes inside, exactly as in the scalar
/// path. Total for any box: a zero shunt range goes through extended
/// division and simply yields wide (possibly semi-infinite) bounds.
inline Interval bound_objective(const IntervalBox& b, ModelKind model, const IVDataset& d) {
  if (b.size() != model_dimension(model)) {
    throw std::invalid_argument("box dimension does not match the model");
  }
  const bool sdm = model == ModelKind::Sdm;
  const Interval& iph = b[0];
  const Interval& rs = sdm ? b[3] : b[5];
  const Interval& rp = sdm ? b[4] : b[6];
  const double temp = d.condition.temperature;

  Interval acc = Interval::point(0.0);
  for (const auto& pt : d.points) {
    const Interval x = iv_add(Interval::point(pt.v), iv_mul(Interval::point(pt.i), rs));
    Interval diode;
    if (sdm) {
      diode = bnbdetail::iv_diode_current(x, b[1], b[2], temp);
    } else {
      diode = iv_add(bnbdetail::iv_diode_current(x, b[1], b[3], temp),
                     bnbdetail::iv_diode_current(x, b[2], b[4], temp));
    }
    const Interval ip = iv_div(x, rp);
    const Interval r = iv_sub(iv_sub(iv_sub(iph, diode), ip), Interval::point(pt.i));
    acc = iv_add(acc, iv_sq(r));
  }
  if (acc.lo < 0.0) acc.lo = 0.0;  // a sum of squares cannot go negative
  return acc;
}

/// Interval enclosure of the SSE gradient over a box (one interval per
/// parameter). Used by the optional first-order contractor.
inline std::vector<Interval> bound_gradient(const IntervalBox& b, ModelKind model,
                                            const IVDataset& d) {
  const Interval q = Interval::point(PhysicalConstants::electron_charge);
  const Interval k = Interval::point(PhysicalConstants::boltzmann);
  const Interval temp = Interval::point(d.condition.temperature);
  const Interval kq = iv_div(q, iv_mul(k, temp));
  const Interval micro = Interval::point(1e-6);
  const Interval one = Interval::point(1.0);
  const Interval two = Interval::point(2.0);

  const bool sdm = model == ModelKind::Sdm;
  const Interval& iph = b[0];
  const Interval& rs = sdm ? b[3] : b[5];
  const Interval& rp = sdm ? b[4] : b[6];
  const Interval rp_sq = iv_sq(rp);

  std::vector<Interval> grad(b.size(), Interval::point(0.0));
  for (const auto& pt : d.points) {
    const Interval im = Interval::point(pt.i);
    const Interval x = iv_add(Interval::point(pt.v), iv_mul(im, rs));
    const Interval kx = iv_mul(kq, x);
    const Interval ip = iv_div(x, rp);

    // Residual and the partials of the residual, model by model.
    Interval r;
    std::vector<Interval> dr(b.size());
    if (sdm) {
      const Interval& isat = b[1];
      const Interval& n = b[2];
      const Interval e = iv_exp(iv_div(kx, n));
      const Interval em1 = iv_sub(e, one);
      const Interval isat_a = iv_mul(isat, micro);
      r = iv_sub(iv_sub(iv_sub(iph, iv_mul(isat_a, em1)), ip), im);
      dr[0] = one;
      dr[1] = iv_neg(iv_mul(micro, em1));
      dr[2] = iv_div(iv_mul(iv_mul(isat_a, e), kx), iv_sq(n));
      dr[3] = iv_neg(iv_add(iv_mul(iv_mul(iv_mul(isat_a, e), kq), im), iv_div(im, rp)));
      dr[4] = iv_div(x, rp_sq);
    } else {
      const Interval& i1 = b[1];
      const Interval& i2 = b[2];
      const Interval& n1 = b[3];
      const Interval& n2 = b[4];
      const Interval e1 = iv_exp(iv_div(kx, n1));
      const Interval e2 = iv_exp(iv_div(kx, n2));
      const Interval i1_a = iv_mul(i1, micro);
      const Interval i2_a = iv_mul(i2, micro);
      const Interval diode = iv_add(iv_mul(i1_a, iv_sub(e1, one)), iv_mul(i2_a, iv_sub(e2, one)));
      r = iv_sub(iv_sub(iv_sub(iph, diode), ip), im);
      dr[0] = one;
      dr[1] = iv_neg(iv_mul(micro, iv_sub(e1, one)));
      dr[2] = iv_neg(iv_mul(micro, iv_sub(e2, one)));
      dr[3] = iv_div(iv_mul(iv_mul(i1_a, e1), kx), iv_sq(n1));
      dr[4] = iv_div(iv_mul(iv_mul(i2_a, e2), kx), iv_sq(n2));
      dr[5] = iv_neg(iv_add(
          iv_mul(iv_add(iv_mul(i1_a, e1), iv_mul(i2_a, e2)), iv_mul(kq, im)), iv_div(im, rp)));
      dr[6] = iv_div(x, rp_sq);
    }
    for (std::size_t j = 0; j < grad.size(); ++j) {
      grad[j] = iv_add(grad[j], iv_mul(two, iv_mul(r, dr[j])));
    }
  }
  return grad;
}

/// Pops the entry with the smallest stored lower bound (earliest insertion on
/// ties).
inline std::pair<IntervalBox, double> choose_box(BoxQueue& q) {
  BnbEntry e = q.pop_min();
  return {std::move(e.box), e.objective.lo};
}

/// Baseline contraction: keep the box unless its objective lower bound
/// already matches or exceeds the incumbent.
inline std::optional<IntervalBox> contract_box(const IntervalBox& b, double f_best,
                                               ModelKind model, const IVDataset& d) {
  if (bound_objective(b, model, d).lo < f_best) return b;
  return std::nullopt;
}

/// Per-iteration view handed to the optional observer, used by the soundness
/// instrumentation tests.
struct BnbStep {
  std::size_t iteration;
  const IntervalBox& chosen;
  bool discarded;
  bool accepted;
  double f_upper;
  const BoxQueue& queue;
  const std::vector<BnbEntry>& solutions;
};

using BnbObserver = std::function<void(const BnbStep&)>;

namespace bnbdetail {

inline bool strictly_interior(const IntervalBox& b, const ParamBounds& bounds) {
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!(b[j].lo > bounds.lower[j] && b[j].hi < bounds.upper[j])) return false;
  }
  return true;
}

inline bool gradient_excludes_zero(const std::vector<Interval>& grad) {
  for (const auto& g : grad) {
    if (g.lo > 0.0 || g.hi < 0.0) return true;
  }
  return false;
}

inline double eval_or_inf(std::vector<double>& theta, ModelKind model, const IVDataset& d) {
  const double s = sse_unchecked(theta, model, d);
  return std::isnan(s) ? std::numeric_limits<double>::infinity() : s;
}

/// Deterministic compass search from a start point, clamped to the bounds.
/// Cheap sharpening of the incumbent; never used for lower bounds.
inline std::pair<std::vector<double>, double> compass_refine(std::vector<double> theta,
                                                             double f_start,
                                                             const ParamBounds& bounds,
                                                             ModelKind model, const IVDataset& d) {
  const std::size_t dim = theta.size();
  std::vector<double> step(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    step[j] = 0.125 * (bounds.upper[j] - bounds.lower[j]);
  }
  double best = f_start;
  for (int round = 0; round < 40; ++round) {
    bool improved = false;
    for (std::size_t j = 0; j < dim; ++j) {
      const double saved = theta[j];
      for (const double dir : {+1.0, -1.0}) {
        const double cand = std::clamp(saved + dir * step[j], bounds.lower[j], bounds.upper[j]);
        if (cand == saved) continue;
        theta[j] = cand;
        const double f = sse_unchecked(theta, model, d);
        if (f < best) {
          best = f;
          improved = true;
          break;
        }
        theta[j] = saved;
      }
    }
    if (!improved) {
      for (auto& s : step) s *= 0.25;
    }
  }
  return {std::move(theta), best};
}

}  // namespace bnbdetail

/// Best-first interval branch-and-bound over the given bounds. Returns a
/// rigorous enclosure [f_lower, f_upper] of the global SSE minimum: f_upper is
/// the best midpoint evaluation, f_lower the smallest lower bound over every
/// box not yet excluded. A budget-terminated run folds all unprocessed boxes
/// into f_lower, so the enclosure stays valid, just looser.
inline BnbResult run_bnb(ModelKind model, const IVDataset& d, const ParamBounds& bounds,
                         const BnbConfig& cfg, const BnbObserver& observer = nullptr) {
  cfg.validate();
  bounds.validate(model);

  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const std::size_t dim = bounds.dimension();
  IntervalBox root(dim);
  for (std::size_t j = 0; j < dim; ++j) root[j] = {bounds.lower[j], bounds.upper[j]};

  BoxQueue queue;
  std::uint64_t seq = 0;
  queue.push({root, bound_objective(root, model, d), seq++});

  std::vector<BnbEntry> solutions;
  double f_best = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent;

  BnbResult result;
  result.terminated_by = BnbTermination::Exhausted;

  while (!queue.empty()) {
    if (result.boxes_processed >= cfg.max_boxes ||
        queue.size() + solutions.size() > cfg.max_boxes) {
      result.terminated_by = BnbTermination::BoxCap;
      break;
    }
    if (elapsed() > cfg.timeout_s) {
      result.terminated_by = BnbTermination::Timeout;
      break;
    }

    BnbEntry entry = queue.pop_min();
    ++result.boxes_processed;

    // Contract: the stored bound equals bound_objective at enqueue time, and
    // the box itself is unchanged, so no re-evaluation is needed.
    bool discarded = entry.objective.lo >= f_best;
    if (!discarded && cfg.use_gradient_contractor &&
        bnbdetail::strictly_interior(entry.box, bounds)) {
      discarded = bnbdetail::gradient_excludes_zero(bound_gradient(entry.box, model, d));
    }

    bool accepted = false;
    if (!discarded) {
      std::vector<double> mid = box_midpoint(entry.box);
      double f_mid = bnbdetail::eval_or_inf(mid, model, d);
      if (cfg.refine_midpoint && f_mid < 4.0 * f_best) {
        std::tie(mid, f_mid) = bnbdetail::compass_refine(std::move(mid), f_mid, bounds, model, d);
      }
      if (f_mid < f_best) {
        f_best = f_mid;
        incumbent = std::move(mid);
      }

      const double obj_width = entry.objective.width();
      const bool precise_f = obj_width <= cfg.eps_f ||
                             (std::isfinite(f_best) && obj_width <= cfg.eps_rel * std::abs(f_best));
      const bool precise_x = box_width(entry.box) <= cfg.eps_x;
      // A box no bisection can shrink counts as a solution even if the
      // objective enclosure is still wider than requested.
      if ((precise_x && precise_f) || !box_splittable(entry.box)) {
        accepted = true;
        solutions.push_back(std::move(entry));
      } else {
        auto [left, right] = box_bisect(entry.box);
        for (auto* child : {&left, &right}) {
          Interval obj = bound_objective(*child, model, d);
          if (obj.lo < f_best) {
            queue.push({std::move(*child), obj, seq++});
          }
        }
      }
    }

    if (observer) {
      const IntervalBox& chosen = accepted ? solutions.back().box : entry.box;
      observer(BnbStep{result.boxes_processed, chosen, discarded, accepted, f_best, queue,
                       solutions});
    }
  }

  // Final accounting: drop solution boxes the incumbent now excludes, then
  // fold every remaining lower bound (and the live queue, if the run was cut
  // short) into f_lower.
  std::erase_if(solutions, [&](const BnbEntry& e) { return e.lower_bound() > f_best; });

  double f_lower = f_best;
  for (const auto& e : solutions) f_lower = std::min(f_lower, e.lower_bound());
  if (result.terminated_by != BnbTermination::Exhausted) {
    f_lower = std::min(f_lower, queue.min_lower_bound());
  }
  if (!std::isfinite(f_best) && queue.empty() && solutions.empty()) {
    f_lower = 0.0;  // nothing evaluated; keep the enclosure trivially valid
  }

  result.f_lower = f_lower;
  result.f_upper = f_best;
  result.rmse_lower = rmse_from_sse(std::max(f_lower, 0.0), d.points.size());
  result.rmse_upper = rmse_from_sse(f_best, d.points.size());
  result.incumbent = std::move(incumbent);
  result.solution_boxes.reserve(solutions.size());
  for (auto& e : solutions) result.solution_boxes.push_back(std::move(e.box));
  result.elapsed_s = elapsed();
  return result;
}

}  // namespace pvfit

#endif  // PVFIT_BNB_HPP
