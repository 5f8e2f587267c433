#ifndef PVFIT_OBJECTIVE_HPP
#define PVFIT_OBJECTIVE_HPP

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvfit/dataset.hpp"
#include "pvfit/model.hpp"

namespace pvfit {

enum class ModelKind { Sdm, Ddm };

constexpr std::size_t model_dimension(ModelKind m) {
  return m == ModelKind::Sdm ? 5 : 7;
}

inline const char* model_name(ModelKind m) { return m == ModelKind::Sdm ? "sdm" : "ddm"; }

/// Parameter vector layout (units match the stored parameter structs):
///   SDM: [iph, i0, n, rs, rp]
///   DDM: [iph, i01, i02, n1, n2, rs, rp]
inline SdmParams sdm_from_theta(std::span<const double> theta) {
  return SdmParams{theta[0], theta[1], theta[2], theta[3], theta[4]};
}

inline DdmParams ddm_from_theta(std::span<const double> theta) {
  return DdmParams{theta[0], theta[1], theta[2], theta[3], theta[4], theta[5], theta[6]};
}

/// Component-wise search ranges in the theta layout above.
struct ParamBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const { return lower.size(); }

  void validate(ModelKind model) const {
    if (lower.size() != upper.size() || lower.size() != model_dimension(model)) {
      throw std::invalid_argument("bounds dimension does not match the model");
    }
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (!(lower[j] <= upper[j])) {
        throw std::invalid_argument("lower bound exceeds upper bound at component " +
                                    std::to_string(j));
      }
    }
  }
};

/// Sum of squared residuals without the finite-range check; non-finite
/// evaluations surface as +infinity. This is the optimizer-facing kernel.
inline double sse_unchecked(std::span<const double> theta, ModelKind model, const IVDataset& d,
                            bool compensated = false) {
  double acc = 0.0;
  double carry = 0.0;  // Kahan compensation, used only when requested
  if (model == ModelKind::Sdm) {
    const SdmParams p = sdm_from_theta(theta);
    for (const auto& pt : d.points) {
      const double x = pt.v + pt.i * p.rs;
      const double id = detail::diode_current(x, p.i0, p.n, d.condition.temperature);
      const double r = ((p.iph - id) - x / p.rp) - pt.i;
      const double sq = r * r;
      if (compensated) {
        const double y = sq - carry;
        const double t = acc + y;
        carry = (t - acc) - y;
        acc = t;
      } else {
        acc += sq;
      }
    }
  } else {
    const DdmParams p = ddm_from_theta(theta);
    for (const auto& pt : d.points) {
      const double x = pt.v + pt.i * p.rs;
      const double id1 = detail::diode_current(x, p.i01, p.n1, d.condition.temperature);
      const double id2 = detail::diode_current(x, p.i02, p.n2, d.condition.temperature);
      const double r = ((p.iph - (id1 + id2)) - x / p.rp) - pt.i;
      const double sq = r * r;
      if (compensated) {
        const double y = sq - carry;
        const double t = acc + y;
        carry = (t - acc) - y;
        acc = t;
      } else {
        acc += sq;
      }
    }
  }
  if (std::isnan(acc)) return std::numeric_limits<double>::infinity();
  return acc;
}

/// Sum of squared residuals; throws evaluation_overflow if any point leaves
/// the finite range.
inline double sse(std::span<const double> theta, ModelKind model, const IVDataset& d,
                  bool compensated = false) {
  const double s = sse_unchecked(theta, model, d, compensated);
  if (!std::isfinite(s)) {
    throw evaluation_overflow("sse evaluation left the finite range");
  }
  return s;
}

inline double rmse_from_sse(double s, std::size_t n_points) {
  return std::sqrt(s / static_cast<double>(n_points));
}

/// Formats a non-negative value to exactly five significant digits in
/// scientific notation, truncating toward zero ("9.8602E-4", "0.0000E0").
/// Truncation, not rounding, is the convention the benchmark literature uses
/// for cross-study RMSE comparison.
inline std::string format_rmse_5sig(double r) {
  if (r == 0.0) return "0.0000E0";
  // Print enough exact digits that dropping everything after the fifth
  // significant digit equals truncating the exact decimal value.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.40E", r);
  const char* exp_pos = std::strchr(buf, 'E');
  const int exponent = std::atoi(exp_pos + 1);
  char out[16];
  // buf looks like "d.dddd...E±xx"; take the leading digit and next four.
  std::snprintf(out, sizeof out, "%c.%c%c%c%cE%d", buf[0], buf[2], buf[3], buf[4], buf[5],
                exponent);
  return out;
}

}  // namespace pvfit

#endif  // PVFIT_OBJECTIVE_HPP
