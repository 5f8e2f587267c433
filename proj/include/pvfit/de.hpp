#ifndef PVFIT_DE_HPP
#define PVFIT_DE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pvfit/objective.hpp"
#include "pvfit/rng.hpp"

namespace pvfit {

/// Control parameters of the plain DE/rand/1/bin loop. The defaults are the
/// canonical settings for the five-parameter model; the seven-parameter model
/// conventionally doubles the generation count.
struct DEConfig {
  int population_size = 50;
  double crossover_rate = 0.6;
  double scale_factor = 0.9;
  int generations = 800;
  std::uint64_t seed = 1;
  /// Stop after this many generations without improvement; 0 disables.
  int stall_limit = 0;

  void validate() const {
    if (population_size < 4) throw std::invalid_argument("population size must be at least 4");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
      throw std::invalid_argument("crossover rate must lie in [0, 1]");
    if (!(scale_factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    if (generations < 1) throw std::invalid_argument("generation count must be at least 1");
  }
};

struct Population {
  std::vector<std::vector<double>> vectors;
  std::vector<double> fitness;
  int generation = 0;

  std::size_t size() const { return vectors.size(); }
};

struct FitResult {
  std::vector<double> best_theta;
  double best_sse = std::numeric_limits<double>::infinity();
  double best_rmse = std::numeric_limits<double>::infinity();
  std::vector<double> history;  // best RMSE after init and after each generation
  std::size_t n_evals = 0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;
};

/// Uniform initialization inside the bounds; one fresh draw per component of
/// every vector. Fitness is evaluated with the supplied objective.
template <class Objective, UniformSource Rng>
Population init_population(const ParamBounds& bounds, const DEConfig& cfg, Objective&& objective,
                           Rng& rng) {
  const std::size_t dim = bounds.dimension();
  Population pop;
  pop.vectors.resize(static_cast<std::size_t>(cfg.population_size), std::vector<double>(dim));
  pop.fitness.resize(static_cast<std::size_t>(cfg.population_size));
  for (auto& x : pop.vectors) {
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = bounds.lower[j] + rng.unit() * (bounds.upper[j] - bounds.lower[j]);
    }
  }
  for (std::size_t i = 0; i < pop.vectors.size(); ++i) {
    pop.fitness[i] = objective(pop.vectors[i]);
  }
  return pop;
}

/// DE/rand/1 donor: x_a + f * (x_b - x_c) with a, b, c distinct and != i.
/// The donor may leave the bounds; bounce_back repairs it.
template <UniformSource Rng>
std::vector<double> mutate_rand1(const Population& pop, std::size_t i, double f, Rng& rng) {
  const std::size_t np = pop.size();
  auto draw_distinct = [&](std::initializer_list<std::size_t> taken) {
    for (;;) {
      const std::size_t k = rng.index(np);
      bool clash = k == i;
      for (const std::size_t t : taken) clash = clash || k == t;
      if (!clash) return k;
    }
  };
  const std::size_t a = draw_distinct({});
  const std::size_t b = draw_distinct({a});
  const std::size_t c = draw_distinct({a, b});

  std::vector<double> donor(pop.vectors[a].size());
  for (std::size_t j = 0; j < donor.size(); ++j) {
    donor[j] = pop.vectors[a][j] + f * (pop.vectors[b][j] - pop.vectors[c][j]);
  }
  return donor;
}

/// Relocates each out-of-bounds component between the violated bound and the
/// target vector's value; one fresh draw per violated component.
template <UniformSource Rng>
std::vector<double> bounce_back(std::vector<double> v, std::span<const double> x_target,
                                const ParamBounds& bounds, Rng& rng) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < bounds.lower[j]) {
      v[j] = bounds.lower[j] + rng.unit() * (x_target[j] - bounds.lower[j]);
    } else if (v[j] > bounds.upper[j]) {
      v[j] = bounds.upper[j] - rng.unit() * (bounds.upper[j] - x_target[j]);
    }
  }
  return v;
}

/// Binomial crossover; the forced index beta guarantees at least one donor
/// component survives. The per-component draw happens before the beta test so
/// the stream advances once per component regardless.
template <UniformSource Rng>
std::vector<double> crossover_binomial(std::span<const double> donor,
                                       std::span<const double> x_target, double cr, Rng& rng) {
  std::vector<double> trial(donor.size());
  const std::size_t beta = rng.index(donor.size());
  for (std::size_t j = 0; j < donor.size(); ++j) {
    const bool take_donor = rng.unit() <= cr || j == beta;
    trial[j] = take_donor ? donor[j] : x_target[j];
  }
  return trial;
}

/// Elitist one-to-one selection; the trial wins ties so the population can
/// drift across flat fitness regions.
inline std::span<const double> select_survivor(std::span<const double> trial,
                                               std::span<const double> x_target, double f_trial,
                                               double f_target) {
  return f_trial <= f_target ? trial : x_target;
}

/// Optimizes an arbitrary objective with the plain DE loop. The history and
/// rmse fields are scaled as if the objective were a sum of squares over
/// rmse_points residuals. An optional per-generation observer sees every
/// population state, which the invariant tests rely on.
template <class Objective>
FitResult run_de_generic(Objective&& raw_objective, const ParamBounds& bounds,
                         const DEConfig& cfg, std::size_t rmse_points = 1,
                         const std::function<void(const Population&)>& on_generation = nullptr) {
  cfg.validate();
  if (bounds.lower.size() != bounds.upper.size() || bounds.lower.empty()) {
    throw std::invalid_argument("invalid bounds");
  }

  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(cfg.seed);
  std::size_t n_evals = 0;
  auto objective = [&](const std::vector<double>& theta) {
    ++n_evals;
    const double f = raw_objective(theta);
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };

  Population pop = init_population(bounds, cfg, objective, rng);

  std::size_t best_i = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop.fitness[i] < pop.fitness[best_i]) best_i = i;
  }
  std::vector<double> best_theta = pop.vectors[best_i];
  double best_sse = pop.fitness[best_i];

  const std::size_t n_points = rmse_points;
  FitResult result;
  result.seed = cfg.seed;
  result.history.push_back(rmse_from_sse(best_sse, n_points));
  if (on_generation) on_generation(pop);

  Population next = pop;
  int stall = 0;
  for (int g = 0; g < cfg.generations; ++g) {
    const double gen_entry_best = best_sse;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      auto donor = mutate_rand1(pop, i, cfg.scale_factor, rng);
      donor = bounce_back(std::move(donor), pop.vectors[i], bounds, rng);
      auto trial = crossover_binomial(donor, pop.vectors[i], cfg.crossover_rate, rng);
      const double f_trial = objective(trial);
      if (f_trial <= pop.fitness[i]) {
        next.vectors[i] = std::move(trial);
        next.fitness[i] = f_trial;
      } else {
        next.vectors[i] = pop.vectors[i];
        next.fitness[i] = pop.fitness[i];
      }
      if (next.fitness[i] < best_sse) {
        best_sse = next.fitness[i];
        best_theta = next.vectors[i];
      }
    }
    std::swap(pop, next);
    pop.generation = g + 1;
    result.history.push_back(rmse_from_sse(best_sse, n_points));
    if (on_generation) on_generation(pop);
    if (cfg.stall_limit > 0) {
      stall = best_sse < gen_entry_best ? 0 : stall + 1;
      if (stall >= cfg.stall_limit) break;
    }
  }

  result.best_theta = std::move(best_theta);
  result.best_sse = best_sse;
  result.best_rmse = rmse_from_sse(best_sse, n_points);
  result.n_evals = n_evals;
  result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

/// Full curve-fitting run. Candidates whose evaluation leaves the finite
/// range get +infinity fitness and lose selection. Identical inputs (seed
/// included) reproduce the result bit-for-bit, runtime aside.
inline FitResult run_de(ModelKind model, const IVDataset& d, const ParamBounds& bounds,
                        const DEConfig& cfg) {
  bounds.validate(model);
  return run_de_generic(
      [&](const std::vector<double>& theta) { return sse_unchecked(theta, model, d); }, bounds,
      cfg, d.points.size());
}

}  // namespace pvfit

#endif  // PVFIT_DE_HPP
