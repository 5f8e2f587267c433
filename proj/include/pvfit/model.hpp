#ifndef PVFIT_MODEL_HPP
#define PVFIT_MODEL_HPP

#include <cmath>
#include <stdexcept>

#include "pvfit/constants.hpp"

namespace pvfit {

/// Raised when a model evaluation leaves the finite double range (overflowing
/// exponential, division by a zero shunt resistance). Callers that probe
/// arbitrary parameter vectors (optimizers) are expected to catch this and
/// treat the candidate as infeasible.
class evaluation_overflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single diode model parameters. Saturation current i0 is stored in
/// microamperes; evaluation converts to amperes internally.
struct SdmParams {
  double iph;  // photocurrent, A
  double i0;   // reverse saturation current, uA
  double n;    // diode ideality factor
  double rs;   // series resistance, ohm
  double rp;   // parallel (shunt) resistance, ohm
};

/// Double diode model parameters; both saturation currents in microamperes.
struct DdmParams {
  double iph;
  double i01;
  double i02;
  double n1;
  double n2;
  double rs;
  double rp;
};

/// Cell temperature and module topology. ns/np are series/parallel cell
/// counts; single-cell data uses 1/1.
struct OperatingCondition {
  double temperature;  // K
  int ns = 1;
  int np = 1;
};

namespace detail {

/// Shockley diode current for junction voltage x = v + i*rs, with the
/// saturation current given in microamperes. A zero saturation current gives
/// exactly zero without touching exp, so a vanished diode never overflows.
inline double diode_current(double x, double isat_ua, double n, double temperature) {
  if (isat_ua == 0.0) return 0.0;
  const double arg = PhysicalConstants::electron_charge * x /
                     (n * PhysicalConstants::boltzmann * temperature);
  return isat_ua * 1e-6 * (std::exp(arg) - 1.0);
}

inline void require_finite(double value) {
  if (!std::isfinite(value)) {
    throw evaluation_overflow("model evaluation left the finite range");
  }
}

}  // namespace detail

/// Output current of the single diode model with the measured current
/// substituted on the right-hand side (no implicit root-finding).
inline double sdm_current(double v_meas, double i_meas, const SdmParams& p,
                          const OperatingCondition& cond) {
  const double x = v_meas + i_meas * p.rs;
  const double id = detail::diode_current(x, p.i0, p.n, cond.temperature);
  const double out = (p.iph - id) - x / p.rp;
  detail::require_finite(out);
  return out;
}

/// Double diode variant. The two diode terms are summed before subtraction so
/// the result is exactly symmetric under exchanging the diodes and reduces
/// bit-for-bit to sdm_current when i02 = 0.
inline double ddm_current(double v_meas, double i_meas, const DdmParams& p,
                          const OperatingCondition& cond) {
  const double x = v_meas + i_meas * p.rs;
  const double id1 = detail::diode_current(x, p.i01, p.n1, cond.temperature);
  const double id2 = detail::diode_current(x, p.i02, p.n2, cond.temperature);
  const double out = (p.iph - (id1 + id2)) - x / p.rp;
  detail::require_finite(out);
  return out;
}

/// PV module of cond.ns series cells and cond.np parallel strings, all cells
/// sharing the same single-diode parameters. ns = np = 1 is identical to
/// sdm_current.
inline double module_current(double v_meas, double i_meas, const SdmParams& p,
                             const OperatingCondition& cond) {
  const double ns = static_cast<double>(cond.ns);
  const double np = static_cast<double>(cond.np);
  const double x = v_meas / ns + i_meas * p.rs / np;
  const double id = detail::diode_current(x, p.i0, p.n, cond.temperature);
  const double out = (p.iph * np - id * np) - x / (p.rp / np);
  detail::require_finite(out);
  return out;
}

}  // namespace pvfit

#endif  // PVFIT_MODEL_HPP
