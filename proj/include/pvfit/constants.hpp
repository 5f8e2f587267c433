#ifndef PVFIT_CONSTANTS_HPP
#define PVFIT_CONSTANTS_HPP

namespace pvfit {

/// Physical constants used by the diode equations. The literal values are
/// fixed verbatim for cross-study comparability of fitted parameters; do not
/// "update" them to newer CODATA releases.
struct PhysicalConstants {
  static constexpr double electron_charge = 1.60217646e-19;  // C
  static constexpr double boltzmann = 1.3806503e-23;         // J/K
};

constexpr double celsius_to_kelvin(double t_celsius) { return t_celsius + 273.15; }

}  // namespace pvfit

#endif  // PVFIT_CONSTANTS_HPP
