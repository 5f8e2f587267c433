#ifndef PVFIT_PRESETS_HPP
#define PVFIT_PRESETS_HPP

#include <optional>
#include <string>
#include <string_view>

#include "pvfit/de.hpp"
#include "pvfit/objective.hpp"

namespace pvfit {

/// Canonical search ranges and solver settings for the two benchmark
/// datasets, as used throughout the parameter-extraction literature.
namespace presets {

inline constexpr double kRtcTempCelsius = 33.0;
inline constexpr double kPhotowattTempCelsius = 45.0;
inline constexpr std::size_t kRtcPointCount = 26;
inline constexpr std::size_t kPhotowattPointCount = 25;

/// Search range for one dataset: per-parameter-family bounds, expanded into
/// the theta layout of either model.
struct RangeSpec {
  double iph_hi;
  double isat_hi;  // uA
  double n_hi;
  double rs_hi;
  double rp_hi;
};

inline constexpr RangeSpec kRtcRange{1.0, 1.0, 2.0, 0.5, 100.0};
inline constexpr RangeSpec kPhotowattRange{2.0, 50.0, 50.0, 2.0, 2000.0};

inline ParamBounds expand(const RangeSpec& r, ModelKind model) {
  if (model == ModelKind::Sdm) {
    return {{0.0, 0.0, 1.0, 0.0, 0.0}, {r.iph_hi, r.isat_hi, r.n_hi, r.rs_hi, r.rp_hi}};
  }
  return {{0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0},
          {r.iph_hi, r.isat_hi, r.isat_hi, r.n_hi, r.n_hi, r.rs_hi, r.rp_hi}};
}

/// Bounds registry keyed by dataset name (file stem). Returns nothing for
/// unknown datasets; the caller must then supply explicit bounds.
inline std::optional<ParamBounds> bounds_for_dataset(std::string_view dataset_name,
                                                     ModelKind model) {
  if (dataset_name == "rtc_france") return expand(kRtcRange, model);
  if (dataset_name == "photowatt_pwp201") return expand(kPhotowattRange, model);
  return std::nullopt;
}

/// Default DE control parameters; only the generation count differs between
/// the models.
inline DEConfig default_config(ModelKind model) {
  DEConfig cfg;
  cfg.generations = model == ModelKind::Sdm ? 800 : 1600;
  return cfg;
}

/// Published 30-run RMSE references, five significant digits.
struct BenchReference {
  const char* case_name;
  ModelKind model;
  const char* dataset_name;
  double temp_celsius;
  const char* min_5sig;
  const char* max_5sig;  // worst run still expected at or below this value
};

inline constexpr BenchReference kBenchReferences[] = {
    {"sdm-rtc", ModelKind::Sdm, "rtc_france", kRtcTempCelsius, "9.8602E-4", "9.8602E-4"},
    {"sdm-pw", ModelKind::Sdm, "photowatt_pwp201", kPhotowattTempCelsius, "2.4250E-3",
     "2.4250E-3"},
    {"ddm-rtc", ModelKind::Ddm, "rtc_france", kRtcTempCelsius, "9.8248E-4", "9.8602E-4"},
    {"ddm-pw", ModelKind::Ddm, "photowatt_pwp201", kPhotowattTempCelsius, "2.4250E-3",
     "2.4250E-3"},
};

}  // namespace presets
}  // namespace pvfit

#endif  // PVFIT_PRESETS_HPP
