#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "measurement.hpp"
#include "tuner.hpp"

namespace admmo {

enum class optimizer_kind { admmo, mmo_fixed, pmo, rs, ga };

struct optimizer_spec {
  optimizer_kind kind = optimizer_kind::admmo;
  // Only read for kind == admmo.
  duplicates_mode duplicates = duplicates_mode::partial;
  trigger_mode trigger = trigger_mode::progressive;
  // Only read for kind == mmo_fixed.
  double fixed_w = 1.0;
  // Display name; derived from the flags when empty.
  std::string label;
};

[[nodiscard]] inline std::string default_label(const optimizer_spec& spec) {
  switch (spec.kind) {
    case optimizer_kind::admmo: {
      std::string name = "admmo";
      if (spec.duplicates == duplicates_mode::indistinct) name += "_i";
      if (spec.duplicates == duplicates_mode::remove_all) name += "_r";
      if (spec.trigger == trigger_mode::constant) name += "_c";
      if (spec.trigger == trigger_mode::never) name += "_n";
      return name;
    }
    case optimizer_kind::mmo_fixed:
      return "mmo";
    case optimizer_kind::pmo:
      return "pmo";
    case optimizer_kind::rs:
      return "rs";
    case optimizer_kind::ga:
      return "ga";
  }
  return "unknown";
}

[[nodiscard]] inline std::string label_of(const optimizer_spec& spec) {
  return spec.label.empty() ? default_label(spec) : spec.label;
}

// MMO with a frozen weight and original (indistinct) duplicate handling.
inline tuning_run run_mmo_fixed(const measurement_oracle& oracle, tuner_params params, std::uint64_t seed,
                                double fixed_w = 1.0, std::string name = "mmo") {
  params.w_init = fixed_w;
  engine_options opts{objective_mode::mmo, duplicates_mode::indistinct, trigger_mode::never};
  return run_engine(oracle, params, seed, opts, std::move(name));
}

// NSGA-II directly on normalized (f_t, f_a).
inline tuning_run run_pmo(const measurement_oracle& oracle, const tuner_params& params, std::uint64_t seed,
                          std::string name = "pmo") {
  engine_options opts{objective_mode::pmo, duplicates_mode::indistinct, trigger_mode::never};
  return run_engine(oracle, params, seed, opts, std::move(name));
}

// Uniform draws with replacement; only first-time configurations are charged.
inline tuning_run run_rs(const measurement_oracle& oracle, const tuner_params& params, std::uint64_t seed,
                         std::string name = "rs") {
  const auto& space = oracle.space();
  tuning_run run;
  run.optimizer = std::move(name);
  run.seed = seed;
  run.budget = params.budget;

  auto rng = make_rng(seed);
  budget_ledger ledger(params.budget);
  detail::run_recorder recorder(oracle, ledger, run);
  std::size_t draws = 0;
  while (!ledger.exhausted() && !recorder.space_exhausted()) {
    auto before = ledger.consumed();
    recorder.try_measure(random_config(space, rng));
    ++draws;
    if (ledger.consumed() != before) {
      trajectory_row row;
      row.iteration = draws;
      row.consumed = ledger.consumed();
      row.best_f_t_raw = run.best.f_t_raw;
      run.trajectory.push_back(row);
    }
  }
  return run;
}

namespace detail {

// Truncation order on raw f_t; ranks are dense so equal values tie.
inline void rank_by_target(std::vector<individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(),
                   [](const individual& a, const individual& b) { return a.raw.f_t_raw < b.raw.f_t_raw; });
  std::size_t rank = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (i > 0 && pop[i].raw.f_t_raw > pop[i - 1].raw.f_t_raw) ++rank;
    pop[i].rank = rank;
    pop[i].crowding = 0.0;
  }
}

}  // namespace detail

// Single-objective elitist GA with (mu + lambda) truncation on raw f_t.
inline tuning_run run_ga(const measurement_oracle& oracle, const tuner_params& params, std::uint64_t seed,
                         std::string name = "ga") {
  params.validate();
  if (params.budget < params.population) throw error("budget must be at least the population size");
  const auto& space = oracle.space();
  tuning_run run;
  run.optimizer = std::move(name);
  run.seed = seed;
  run.budget = params.budget;

  auto rng = make_rng(seed);
  budget_ledger ledger(params.budget);
  detail::run_recorder recorder(oracle, ledger, run);

  tuner_state state;
  state.population = detail::initial_population(space, params.population, recorder, rng);
  update_stagnation(state, state.population);
  state.stagnation = 0;
  detail::rank_by_target(state.population);

  auto record = [&](std::size_t iteration) {
    trajectory_row row;
    row.iteration = iteration;
    row.consumed = ledger.consumed();
    row.stagnation = state.stagnation;
    row.best_f_t_raw = state.best.raw.f_t_raw;
    run.trajectory.push_back(row);
  };
  record(0);

  std::size_t idle = 0;
  for (std::size_t iteration = 1;
       !ledger.exhausted() && !recorder.space_exhausted() && idle < params.max_idle_iterations;
       ++iteration) {
    const auto before = ledger.consumed();
    auto offspring =
        detail::make_offspring(state.population, params.population, space, params, recorder, rng);
    update_stagnation(state, offspring);
    state.population.insert(state.population.end(), offspring.begin(), offspring.end());
    detail::rank_by_target(state.population);
    state.population.resize(std::min(params.population, state.population.size()));
    record(iteration);
    idle = ledger.consumed() == before ? idle + 1 : 0;
  }
  return run;
}

// AdMMO with one of the ablation switches applied.
inline tuning_run run_variant(const measurement_oracle& oracle, const tuner_params& params, std::uint64_t seed,
                              duplicates_mode duplicates, trigger_mode trigger, std::string name) {
  engine_options opts{objective_mode::mmo, duplicates, trigger};
  return run_engine(oracle, params, seed, opts, std::move(name));
}

inline tuning_run run_optimizer(const optimizer_spec& spec, const measurement_oracle& oracle,
                                const tuner_params& params, std::uint64_t seed) {
  auto name = label_of(spec);
  switch (spec.kind) {
    case optimizer_kind::admmo:
      return run_variant(oracle, params, seed, spec.duplicates, spec.trigger, std::move(name));
    case optimizer_kind::mmo_fixed:
      return run_mmo_fixed(oracle, params, seed, spec.fixed_w, std::move(name));
    case optimizer_kind::pmo:
      return run_pmo(oracle, params, seed, std::move(name));
    case optimizer_kind::rs:
      return run_rs(oracle, params, seed, std::move(name));
    case optimizer_kind::ga:
      return run_ga(oracle, params, seed, std::move(name));
  }
  throw error("unknown optimizer kind");
}

}  // namespace admmo
