#ifndef PVFIT_HARNESS_HPP
#define PVFIT_HARNESS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvfit/de.hpp"
#include "pvfit/objective.hpp"

namespace pvfit {

/// RMSE statistics over a batch of independent runs. std is the population
/// standard deviation (divide by n), fixed so exact comparisons against the
/// published 30-run tables are well defined.
struct RunStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double std = 0.0;
  std::size_t n_runs = 0;
  std::vector<FitResult> per_run;
};

struct CurvePoint {
  double v;
  double i_measured;
  double i_calculated;
  double abs_error;
};

/// Runs the solver n_runs times with seeds base, base+1, ... and aggregates
/// the RMSE statistics.
inline RunStats run_batch(ModelKind model, const IVDataset& d, const ParamBounds& bounds,
                          const DEConfig& cfg, std::size_t n_runs) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  RunStats stats;
  stats.n_runs = n_runs;
  stats.per_run.reserve(n_runs);
  for (std::size_t k = 0; k < n_runs; ++k) {
    DEConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + k;
    stats.per_run.push_back(run_de(model, d, bounds, run_cfg));
  }
  stats.min = stats.per_run.front().best_rmse;
  stats.max = stats.min;
  double sum = 0.0;
  for (const auto& r : stats.per_run) {
    stats.min = std::min(stats.min, r.best_rmse);
    stats.max = std::max(stats.max, r.best_rmse);
    sum += r.best_rmse;
  }
  stats.mean = sum / static_cast<double>(n_runs);
  double var = 0.0;
  for (const auto& r : stats.per_run) {
    const double dev = r.best_rmse - stats.mean;
    var += dev * dev;
  }
  stats.std = std::sqrt(var / static_cast<double>(n_runs));
  return stats;
}

/// Index of the best run (lowest RMSE, earliest on ties).
inline std::size_t best_run_index(const RunStats& stats) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < stats.per_run.size(); ++k) {
    if (stats.per_run[k].best_sse < stats.per_run[best].best_sse) best = k;
  }
  return best;
}

/// Evaluates the fitted model at every dataset point.
inline std::vector<CurvePoint> reconstruct_curve(std::span<const double> theta, ModelKind model,
                                                 const IVDataset& d) {
  std::vector<CurvePoint> curve;
  curve.reserve(d.points.size());
  for (const auto& pt : d.points) {
    double calc;
    if (model == ModelKind::Sdm) {
      calc = sdm_current(pt.v, pt.i, sdm_from_theta(theta), d.condition);
    } else {
      calc = ddm_current(pt.v, pt.i, ddm_from_theta(theta), d.condition);
    }
    curve.push_back({pt.v, pt.i, calc, std::abs(pt.i - calc)});
  }
  return curve;
}

struct ReportMeta {
  ModelKind model;
  std::string dataset;
  DEConfig config;
};

struct ReportFiles {
  std::filesystem::path report_json;
  std::filesystem::path curve_csv;
  std::filesystem::path history_csv;
};

/// Writes report.json plus the reconstructed-curve and convergence-history
/// CSV tables into out_dir. RMSE values appear both at full precision (exact
/// round-trip) and as the five-significant-digit comparison string.
inline ReportFiles emit_report(const RunStats& stats, const FitResult& best,
                               const ReportMeta& meta, const IVDataset& d,
                               const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  ReportFiles files{out_dir / "report.json", out_dir / "curve.csv", out_dir / "history.csv"};

  {
    std::ofstream out(files.curve_csv);
    if (!out) throw std::runtime_error("cannot write " + files.curve_csv.string());
    out << "v,i_measured,i_calculated,abs_error\n";
    for (const auto& cp : reconstruct_curve(best.best_theta, meta.model, d)) {
      out << detail::shortest_repr(cp.v) << ',' << detail::shortest_repr(cp.i_measured) << ','
          << detail::shortest_repr(cp.i_calculated) << ',' << detail::shortest_repr(cp.abs_error)
          << '\n';
    }
  }
  {
    std::ofstream out(files.history_csv);
    if (!out) throw std::runtime_error("cannot write " + files.history_csv.string());
    out << "generation,best_rmse\n";
    for (std::size_t g = 0; g < best.history.size(); ++g) {
      out << g << ',' << detail::shortest_repr(best.history[g]) << '\n';
    }
  }

  nlohmann::json j;
  j["meta"] = {{"model", model_name(meta.model)},
               {"dataset", meta.dataset},
               {"config",
                {{"np", meta.config.population_size},
                 {"cr", meta.config.crossover_rate},
                 {"f", meta.config.scale_factor},
                 {"gens", meta.config.generations}}},
               {"seed_base", meta.config.seed}};
  j["stats"] = {{"min", stats.min},
                {"mean", stats.mean},
                {"max", stats.max},
                {"std", stats.std},
                {"n_runs", stats.n_runs}};
  j["best"] = {{"theta", best.best_theta},
               {"sse", best.best_sse},
               {"rmse", best.best_rmse},
               {"rmse_5sig", format_rmse_5sig(best.best_rmse)},
               {"runtime_s", best.runtime_s}};
  j["files"] = {{"curve_csv", files.curve_csv.string()},
                {"history_csv", files.history_csv.string()}};

  std::ofstream out(files.report_json);
  if (!out) throw std::runtime_error("cannot write " + files.report_json.string());
  out << j.dump(2) << '\n';
  return files;
}

}  // namespace pvfit

#endif  // PVFIT_HARNESS_HPP
