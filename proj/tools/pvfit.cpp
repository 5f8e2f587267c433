// Command-line front end: fit, certify, bench, curve, info.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvfit/pvfit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pvfit;

namespace {

ModelKind parse_model(const std::string& name) {
  if (name == "sdm") return ModelKind::Sdm;
  if (name == "ddm") return ModelKind::Ddm;
  throw CLI::ValidationError("--model", "expected 'sdm' or 'ddm'");
}

/// Bounds file: one "name,lower,upper" row per parameter, in order.
ParamBounds load_bounds_file(const fs::path& path, ModelKind model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bounds file: " + path.string());
  ParamBounds b;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(line_no) +
                               ": expected name,lower,upper");
    }
    try {
      b.lower.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
      b.upper.push_back(std::stod(line.substr(c2 + 1)));
    } catch (const std::exception&) {
      if (line_no == 1) {  // header row
        continue;
      }
      throw std::runtime_error(path.string() + ": row " + std::to_string(line_no) +
                               ": non-numeric bound");
    }
  }
  b.validate(model);
  return b;
}

ParamBounds resolve_bounds(const std::string& bounds_file, const IVDataset& d, ModelKind model) {
  if (!bounds_file.empty()) return load_bounds_file(bounds_file, model);
  if (auto b = presets::bounds_for_dataset(d.name, model)) return *b;
  throw std::runtime_error("no built-in search range for dataset '" + d.name +
                           "'; pass --bounds");
}

const char* param_name(ModelKind model, std::size_t j) {
  static const char* sdm[] = {"iph_a", "i0_ua", "n", "rs_ohm", "rp_ohm"};
  static const char* ddm[] = {"iph_a", "i01_ua", "i02_ua", "n1", "n2", "rs_ohm", "rp_ohm"};
  return model == ModelKind::Sdm ? sdm[j] : ddm[j];
}

struct FitOptions {
  std::string model = "sdm";
  std::string data;
  double temp_c = 0.0;
  int np = 0;  // 0: use the model default
  double cr = -1.0;
  double f = -1.0;
  int gens = 0;
  std::uint64_t seed = 1;
  int runs = 1;
  std::string bounds_file;
  std::string out_dir = ".";
};

DEConfig build_config(const FitOptions& opt, ModelKind model) {
  DEConfig cfg = presets::default_config(model);
  if (opt.np > 0) cfg.population_size = opt.np;
  if (opt.cr >= 0.0) cfg.crossover_rate = opt.cr;
  if (opt.f > 0.0) cfg.scale_factor = opt.f;
  if (opt.gens > 0) cfg.generations = opt.gens;
  cfg.seed = opt.seed;
  return cfg;
}

int cmd_fit(const FitOptions& opt) {
  const ModelKind model = parse_model(opt.model);
  const IVDataset d = load_csv(opt.data, opt.temp_c);
  const ParamBounds bounds = resolve_bounds(opt.bounds_file, d, model);
  const DEConfig cfg = build_config(opt, model);

  const RunStats stats = run_batch(model, d, bounds, cfg, static_cast<std::size_t>(opt.runs));
  const FitResult& best = stats.per_run[best_run_index(stats)];
  const ReportFiles files = emit_report(stats, best, {model, d.name, cfg}, d, opt.out_dir);

  std::printf("%s on %s: %d run(s)\n", model_name(model), d.name.c_str(), opt.runs);
  std::printf("  rmse min %s  mean %s  max %s  std %.4E\n", format_rmse_5sig(stats.min).c_str(),
              format_rmse_5sig(stats.mean).c_str(), format_rmse_5sig(stats.max).c_str(),
              stats.std);
  for (std::size_t j = 0; j < best.best_theta.size(); ++j) {
    std::printf("  %-7s %.9g\n", param_name(model, j), best.best_theta[j]);
  }
  std::printf("  report: %s\n", files.report_json.string().c_str());
  return 0;
}

struct CertifyOptions {
  std::string model = "sdm";
  std::string data;
  double temp_c = 0.0;
  double eps_f = 1e-13;
  double eps_rel = 1e-9;
  double eps_x = 1e-6;
  double timeout_s = 1800.0;
  std::size_t max_boxes = 1'000'000;
  bool gradient_contractor = false;
  bool refine_midpoint = false;
  std::string bounds_file;
  std::string out_dir = ".";
};

int cmd_certify(const CertifyOptions& opt) {
  const ModelKind model = parse_model(opt.model);
  const IVDataset d = load_csv(opt.data, opt.temp_c);
  const ParamBounds bounds = resolve_bounds(opt.bounds_file, d, model);

  BnbConfig cfg;
  cfg.eps_f = opt.eps_f;
  cfg.eps_rel = opt.eps_rel;
  cfg.eps_x = opt.eps_x;
  cfg.timeout_s = opt.timeout_s;
  cfg.max_boxes = opt.max_boxes;
  cfg.use_gradient_contractor = opt.gradient_contractor;
  cfg.refine_midpoint = opt.refine_midpoint;

  const BnbResult r = run_bnb(model, d, bounds, cfg);
  const CertifiedGap gap = certify_epsilon(r);

  json j;
  j["model"] = model_name(model);
  j["dataset"] = d.name;
  j["config"] = {{"eps_f", cfg.eps_f},       {"eps_rel", cfg.eps_rel},
                 {"eps_x", cfg.eps_x},       {"timeout_s", cfg.timeout_s},
                 {"max_boxes", cfg.max_boxes}};
  j["rmse_lower"] = r.rmse_lower;
  j["rmse_upper"] = r.rmse_upper;
  j["rmse_lower_5sig"] = format_rmse_5sig(r.rmse_lower);
  j["rmse_upper_5sig"] = format_rmse_5sig(r.rmse_upper);
  j["sse_lower"] = r.f_lower;
  j["sse_upper"] = r.f_upper;
  j["gap"] = gap.gap;
  j["certified"] = gap.certified;
  j["incumbent"] = r.incumbent;
  j["boxes_processed"] = r.boxes_processed;
  j["solution_boxes"] = r.solution_boxes.size();
  j["terminated_by"] = termination_name(r.terminated_by);
  j["elapsed_s"] = r.elapsed_s;

  fs::create_directories(opt.out_dir);
  const fs::path out = fs::path(opt.out_dir) / "certify.json";
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  os << j.dump(2) << '\n';

  std::printf("%s on %s: rmse in [%.16E, %.16E]\n", model_name(model), d.name.c_str(),
              r.rmse_lower, r.rmse_upper);
  std::printf("  terminated by %s after %zu boxes (%.1f s), gap %.6E%s\n",
              termination_name(r.terminated_by), r.boxes_processed, r.elapsed_s, gap.gap,
              gap.certified ? "" : " (not certified)");
  std::printf("  report: %s\n", out.string().c_str());
  return 0;
}

struct BenchOptions {
  std::vector<std::string> cases;
  std::string data_dir = "data";
  int runs = 30;
  std::string out_dir = ".";
};

int cmd_bench(const BenchOptions& opt) {
  std::vector<presets::BenchReference> selected;
  for (const auto& ref : presets::kBenchReferences) {
    const bool wanted = opt.cases.empty() ||
                        std::find(opt.cases.begin(), opt.cases.end(), ref.case_name) !=
                            opt.cases.end();
    if (wanted) selected.push_back(ref);
  }
  for (const auto& name : opt.cases) {
    const bool known = std::any_of(std::begin(presets::kBenchReferences),
                                   std::end(presets::kBenchReferences),
                                   [&](const auto& r) { return name == r.case_name; });
    if (!known) throw CLI::ValidationError("--cases", "unknown case '" + name + "'");
  }

  json report = json::array();
  bool all_pass = true;
  std::printf("%-8s %-10s %-10s %-10s %-10s %-10s %s\n", "case", "min", "mean", "max", "ref-min",
              "ref-max", "verdict");
  for (const auto& ref : selected) {
    const fs::path csv = fs::path(opt.data_dir) / (std::string(ref.dataset_name) + ".csv");
    const IVDataset d = load_csv(csv, ref.temp_celsius);
    const ParamBounds bounds = *presets::bounds_for_dataset(ref.dataset_name, ref.model);
    const DEConfig cfg = presets::default_config(ref.model);
    const RunStats stats = run_batch(ref.model, d, bounds, cfg, static_cast<std::size_t>(opt.runs));

    const std::string min_s = format_rmse_5sig(stats.min);
    const std::string max_s = format_rmse_5sig(stats.max);
    const bool pass = min_s == ref.min_5sig && std::stod(max_s) <= std::stod(ref.max_5sig) * (1.0 + 1e-12);
    all_pass = all_pass && pass;

    std::printf("%-8s %-10s %-10s %-10s %-10s %-10s %s\n", ref.case_name, min_s.c_str(),
                format_rmse_5sig(stats.mean).c_str(), max_s.c_str(), ref.min_5sig, ref.max_5sig,
                pass ? "pass" : "FAIL");
    report.push_back({{"case", ref.case_name},
                      {"min", stats.min},
                      {"mean", stats.mean},
                      {"max", stats.max},
                      {"std", stats.std},
                      {"min_5sig", min_s},
                      {"max_5sig", max_s},
                      {"ref_min", ref.min_5sig},
                      {"ref_max", ref.max_5sig},
                      {"n_runs", opt.runs},
                      {"pass", pass}});
  }

  fs::create_directories(opt.out_dir);
  const fs::path out = fs::path(opt.out_dir) / "bench.json";
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  os << report.dump(2) << '\n';
  std::printf("report: %s\n", out.string().c_str());
  return all_pass ? 0 : 1;
}

struct CurveOptions {
  std::string model = "sdm";
  std::string data;
  double temp_c = 0.0;
  std::vector<double> theta;
  std::string out_dir = ".";
};

int cmd_curve(const CurveOptions& opt) {
  const ModelKind model = parse_model(opt.model);
  const IVDataset d = load_csv(opt.data, opt.temp_c);
  if (opt.theta.size() != model_dimension(model)) {
    throw CLI::ValidationError("--theta", "expected " +
                                              std::to_string(model_dimension(model)) +
                                              " comma-separated values");
  }
  const auto curve = reconstruct_curve(opt.theta, model, d);

  fs::create_directories(opt.out_dir);
  const fs::path out = fs::path(opt.out_dir) / "curve.csv";
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  os << "v,i_measured,i_calculated,abs_error\n";
  double acc = 0.0;
  for (const auto& cp : curve) {
    os << detail::shortest_repr(cp.v) << ',' << detail::shortest_repr(cp.i_measured) << ','
       << detail::shortest_repr(cp.i_calculated) << ',' << detail::shortest_repr(cp.abs_error)
       << '\n';
    acc += cp.abs_error * cp.abs_error;
  }
  std::printf("rmse %s over %zu points\n",
              format_rmse_5sig(rmse_from_sse(acc, curve.size())).c_str(), curve.size());
  std::printf("curve: %s\n", out.string().c_str());
  return 0;
}

int cmd_info() {
  std::printf("physical constants: q = %.8E C, k = %.7E J/K\n",
              PhysicalConstants::electron_charge, PhysicalConstants::boltzmann);
  std::printf("\ndefault control parameters (np, cr, f, gens):\n");
  for (const ModelKind m : {ModelKind::Sdm, ModelKind::Ddm}) {
    const DEConfig c = presets::default_config(m);
    std::printf("  %s: %d, %g, %g, %d\n", model_name(m), c.population_size, c.crossover_rate,
                c.scale_factor, c.generations);
  }
  std::printf("\nsearch ranges (lower..upper):\n");
  for (const char* ds : {"rtc_france", "photowatt_pwp201"}) {
    for (const ModelKind m : {ModelKind::Sdm, ModelKind::Ddm}) {
      const auto b = presets::bounds_for_dataset(ds, m);
      std::printf("  %s/%s:", ds, model_name(m));
      for (std::size_t j = 0; j < b->dimension(); ++j) {
        std::printf(" %s=[%g,%g]", param_name(m, j), b->lower[j], b->upper[j]);
      }
      std::printf("\n");
    }
  }
  std::printf("\nbenchmark references (30-run rmse, 5 significant digits):\n");
  for (const auto& ref : presets::kBenchReferences) {
    std::printf("  %-8s min %s  worst-case max %s\n", ref.case_name, ref.min_5sig, ref.max_5sig);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PV circuit-model parameter extraction and certification"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a diode model with differential evolution");
  fit_cmd->add_option("--model", fit.model, "sdm or ddm")->required();
  fit_cmd->add_option("--data", fit.data, "I-V dataset CSV")->required();
  fit_cmd->add_option("--temp-c", fit.temp_c, "cell temperature, Celsius")->required();
  fit_cmd->add_option("--np", fit.np, "population size");
  fit_cmd->add_option("--cr", fit.cr, "crossover rate");
  fit_cmd->add_option("--f", fit.f, "scale factor");
  fit_cmd->add_option("--gens", fit.gens, "generation count");
  fit_cmd->add_option("--seed", fit.seed, "base RNG seed");
  fit_cmd->add_option("--runs", fit.runs, "independent runs (seeds base..base+n-1)")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--bounds", fit.bounds_file, "bounds CSV: name,lower,upper per row");
  fit_cmd->add_option("--out", fit.out_dir, "output directory");

  CertifyOptions cert;
  auto* cert_cmd = app.add_subcommand("certify", "enclose the global minimum with interval B&B");
  cert_cmd->add_option("--model", cert.model)->required();
  cert_cmd->add_option("--data", cert.data)->required();
  cert_cmd->add_option("--temp-c", cert.temp_c)->required();
  cert_cmd->add_option("--eps-f", cert.eps_f, "absolute objective precision (SSE)");
  cert_cmd->add_option("--eps-rel", cert.eps_rel, "relative objective precision");
  cert_cmd->add_option("--eps-x", cert.eps_x, "box width precision");
  cert_cmd->add_option("--timeout-s", cert.timeout_s, "wall-clock budget");
  cert_cmd->add_option("--max-boxes", cert.max_boxes, "deterministic box budget");
  cert_cmd->add_flag("--gradient-contractor", cert.gradient_contractor,
                     "discard interior boxes with a nonzero gradient enclosure");
  cert_cmd->add_flag("--refine-midpoint", cert.refine_midpoint,
                     "polish midpoints with a local compass search");
  cert_cmd->add_option("--bounds", cert.bounds_file);
  cert_cmd->add_option("--out", cert.out_dir);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "reproduce the published benchmark statistics");
  bench_cmd->add_option("--cases", bench.cases,
                        "subset of {sdm-rtc, sdm-pw, ddm-rtc, ddm-pw}");
  bench_cmd->add_option("--data-dir", bench.data_dir, "directory holding the benchmark CSVs");
  bench_cmd->add_option("--runs", bench.runs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench.out_dir);

  CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("curve", "reconstruct an I-V curve at given parameters");
  curve_cmd->add_option("--model", curve.model)->required();
  curve_cmd->add_option("--data", curve.data)->required();
  curve_cmd->add_option("--temp-c", curve.temp_c)->required();
  curve_cmd->add_option("--theta", curve.theta, "parameter vector")->required()->delimiter(',');
  curve_cmd->add_option("--out", curve.out_dir);

  auto* info_cmd = app.add_subcommand("info", "print defaults and benchmark references");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*cert_cmd) return cmd_certify(cert);
    if (*bench_cmd) return cmd_bench(bench);
    if (*curve_cmd) return cmd_curve(curve);
    if (*info_cmd) return cmd_info();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
