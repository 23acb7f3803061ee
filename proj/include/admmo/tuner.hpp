#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "config_space.hpp"
#include "error.hpp"
#include "measurement.hpp"
#include "mmo.hpp"
#include "nsga2.hpp"
#include "random.hpp"

namespace admmo {

struct tuner_params {
  std::size_t population = 10;
  std::size_t budget = 100;
  double w_init = 1.0;
  std::size_t trigger_offset = 1;  // T
  double cutoff = 0.5;             // C
  double target_proportion = 0.3;  // p
  double delta_coarse = 0.1;
  double delta_fine = 1e-4;
  double w_min = weight_min;
  double w_max = weight_max;
  double mutation_rate = 0.1;
  double crossover_rate = 0.9;
  std::size_t adapt_iteration_cap = 10'000;
  // Stop after this many consecutive iterations that charge no measurement.
  std::size_t max_idle_iterations = 1'000;

  void validate() const {
    if (population < 2) throw error("population size must be >= 2");
    if (!(target_proportion > 0.0 && target_proportion <= 1.0)) throw error("p must lie in (0, 1]");
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw error("cut-off C must lie in (0, 1)");
    if (!(w_min < w_max)) throw error("w_min must be below w_max");
    if (w_init < w_min || w_init > w_max) throw error("initial weight outside [w_min, w_max]");
    if (mutation_rate < 0.0 || mutation_rate > 1.0) throw error("mutation rate must lie in [0, 1]");
    if (crossover_rate < 0.0 || crossover_rate > 1.0) throw error("crossover rate must lie in [0, 1]");
  }
};

// ---------------------------------------------------------------------------
// Progressive trigger
// ---------------------------------------------------------------------------

struct trigger_input {
  std::size_t stagnation = 0;  // o
  std::size_t offset = 1;      // T
  std::size_t consumed = 1;    // b
  std::size_t budget = 1;      // B
  double cutoff = 0.5;         // C

  // S = B / b; shrinks as measurements accumulate.
  [[nodiscard]] double slope() const noexcept {
    return static_cast<double>(budget) / static_cast<double>(consumed);
  }
};

[[nodiscard]] inline double trigger_probability(const trigger_input& in) {
  const double excess =
      in.stagnation > in.offset ? static_cast<double>(in.stagnation - in.offset) : 0.0;
  const double s = in.slope();
  return 1.0 - std::exp(std::log(in.cutoff) * excess / (s * s));
}

// Always consumes exactly one uniform draw, so runs that differ only in the
// trigger rule keep their random streams aligned.
[[nodiscard]] inline bool should_trigger(const trigger_input& in, rng_type& rng) {
  const double u = uniform01(rng);
  return u < trigger_probability(in);
}

// ---------------------------------------------------------------------------
// Proportion of unique nondominated configurations
// ---------------------------------------------------------------------------

struct proportion {
  std::size_t nondominated = 0;  // n_d
  std::size_t unique = 0;        // n_u
  [[nodiscard]] double value() const noexcept {
    return unique == 0 ? 0.0 : static_cast<double>(nondominated) / static_cast<double>(unique);
  }
};

// First-encountered representative of every duplicate group.
[[nodiscard]] inline std::vector<individual> unique_members(std::span<const individual> pop) {
  std::vector<individual> out;
  for (const auto& ind : pop) {
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const individual& u) { return u.config == ind.config; });
    if (!seen) out.push_back(ind);
  }
  return out;
}

// n_d / n_u on an already deduplicated set whose meta-objectives are current.
[[nodiscard]] inline proportion proportion_of(std::span<individual> unique) {
  proportion prop;
  prop.unique = unique.size();
  if (!unique.empty()) prop.nondominated = nondominated_sort(unique).front().size();
  return prop;
}

// Recomputes the meta-objectives of `pop` at w and measures p' over its
// unique configurations.
inline proportion unique_nondominated_proportion(std::span<individual> pop, double w) {
  compute_meta(pop, w);
  auto unique = unique_members(pop);
  return proportion_of(unique);
}

// ---------------------------------------------------------------------------
// Weight adaptation
// ---------------------------------------------------------------------------

struct adapt_result {
  double w = 1.0;
  proportion prop;
  std::size_t steps = 0;
};

// Walks w towards the target proportion p. Stops on p' == p, when the next
// step would leave [w_min, w_max], when p' - p changes sign (keeping the
// nearer of the last two weights, the smaller on ties), or at the step cap.
// The union's meta-objectives are left computed at the returned weight.
inline adapt_result adapt_weight(std::span<individual> pop, double w, double p,
                                 const tuner_params& params) {
  auto unique = unique_members(pop);
  auto proportion_at = [&](double weight) {
    compute_meta(std::span<individual>(unique), weight);
    return proportion_of(unique);
  };

  double delta = params.delta_coarse;
  double cur_w = std::clamp(w, params.w_min, params.w_max);
  proportion cur = proportion_at(cur_w);
  int prev_sign = 0;
  double prev_w = cur_w;
  proportion prev = cur;
  std::size_t steps = 0;

  while (steps < params.adapt_iteration_cap) {
    const double pp = cur.value();
    if (pp == p) break;
    const int sign = pp < p ? 1 : -1;
    if (prev_sign != 0 && sign != prev_sign) {
      const double d_prev = std::abs(prev.value() - p);
      const double d_cur = std::abs(pp - p);
      if (d_prev < d_cur || (d_prev == d_cur && prev_w < cur_w)) {
        cur_w = prev_w;
        cur = prev;
      }
      break;
    }
    double next_w = cur_w;
    if (sign > 0) {
      if (cur_w >= params.w_max) break;
      if (cur_w + delta >= 0.1) delta = params.delta_coarse;
      next_w = std::min(cur_w + delta, params.w_max);
    } else {
      if (cur_w <= params.w_min) break;
      if (cur_w - delta < 0.1) delta = params.delta_fine;
      next_w = std::max(cur_w - delta, params.w_min);
    }
    prev_sign = sign;
    prev_w = cur_w;
    prev = cur;
    cur_w = next_w;
    cur = proportion_at(cur_w);
    ++steps;
  }

  compute_meta(pop, cur_w);
  return {cur_w, cur, steps};
}

// ---------------------------------------------------------------------------
// Survival selection
// ---------------------------------------------------------------------------

enum class duplicates_mode { partial, indistinct, remove_all };

namespace detail {

inline void take_front(std::span<individual> pop, const std::vector<std::size_t>& front,
                       std::size_t rank, std::size_t capacity, std::vector<std::size_t>& out) {
  crowding_distance(pop, front);
  for (auto i : front) pop[i].rank = rank;
  const std::size_t room = capacity - out.size();
  if (front.size() <= room) {
    out.insert(out.end(), front.begin(), front.end());
    return;
  }
  auto ordered = sort_by_crowding(pop, front);
  out.insert(out.end(), ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(room));
}

}  // namespace detail

// Nondominated sorting over the whole union, duplicates included. Every front
// that has a successor keeps one member per duplicate group and pushes the
// other copies down one front. Fronts are then taken whole while they fit and
// the first overflowing front is cut by crowding distance.
// Returns indices into `pop`; rank and crowding of the chosen members are set.
inline std::vector<std::size_t> partial_duplicate_survival(std::span<individual> pop,
                                                           std::size_t capacity) {
  auto fronts = nondominated_sort(pop);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fronts.size() && out.size() < capacity; ++i) {
    if (i + 1 < fronts.size()) {
      std::vector<std::size_t> kept;
      std::vector<std::size_t> demoted;
      for (auto idx : fronts[i]) {
        bool dup = std::any_of(kept.begin(), kept.end(),
                               [&](std::size_t k) { return pop[k].config == pop[idx].config; });
        (dup ? demoted : kept).push_back(idx);
      }
      fronts[i] = std::move(kept);
      fronts[i + 1].insert(fronts[i + 1].end(), demoted.begin(), demoted.end());
    }
    detail::take_front(pop, fronts[i], i, capacity, out);
  }
  return out;
}

// Plain NSGA-II survival: duplicates are treated like any other member.
inline std::vector<std::size_t> nsga2_survival(std::span<individual> pop, std::size_t capacity) {
  auto fronts = nondominated_sort(pop);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fronts.size() && out.size() < capacity; ++i)
    detail::take_front(pop, fronts[i], i, capacity, out);
  return out;
}

// Deletes all but the first copy of every configuration, then runs plain
// NSGA-II survival on what is left. If fewer unique members than `capacity`
// exist, the deleted copies fill the remaining slots in union order.
inline std::vector<std::size_t> remove_all_survival(std::span<individual> pop, std::size_t capacity) {
  std::vector<std::size_t> keep;
  std::vector<std::size_t> removed;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dup = std::any_of(keep.begin(), keep.end(),
                           [&](std::size_t k) { return pop[k].config == pop[i].config; });
    (dup ? removed : keep).push_back(i);
  }
  std::vector<individual> unique;
  unique.reserve(keep.size());
  for (auto i : keep) unique.push_back(pop[i]);
  auto chosen = nsga2_survival(unique, capacity);

  std::vector<std::size_t> out;
  for (auto c : chosen) {
    pop[keep[c]].rank = unique[c].rank;
    pop[keep[c]].crowding = unique[c].crowding;
    out.push_back(keep[c]);
  }
  const std::size_t worst = unique.empty() ? 0 : unique[chosen.back()].rank + 1;
  for (std::size_t j = 0; out.size() < capacity && j < removed.size(); ++j) {
    pop[removed[j]].rank = worst;
    pop[removed[j]].crowding = 0.0;
    out.push_back(removed[j]);
  }
  return out;
}

inline std::vector<std::size_t> survive(std::span<individual> pop, std::size_t capacity,
                                        duplicates_mode mode) {
  switch (mode) {
    case duplicates_mode::partial:
      return partial_duplicate_survival(pop, capacity);
    case duplicates_mode::indistinct:
      return nsga2_survival(pop, capacity);
    case duplicates_mode::remove_all:
      return remove_all_survival(pop, capacity);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

// One row per iteration: the quantities needed to plot w and p' over time.
struct trajectory_row {
  std::size_t iteration = 0;
  std::size_t consumed = 0;  // b
  double w = std::numeric_limits<double>::quiet_NaN();
  double p_prime = std::numeric_limits<double>::quiet_NaN();
  std::size_t stagnation = 0;  // o
  double best_f_t_raw = 0.0;
};

struct tuning_run {
  std::string optimizer;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  configuration best_config;
  perf_sample best;
  std::vector<trajectory_row> trajectory;
  // Best raw f_t after the 1st, 2nd, ... charged measurement.
  std::vector<double> best_by_measurement;

  [[nodiscard]] std::size_t consumed() const noexcept { return best_by_measurement.size(); }
};

struct tuner_state {
  double w = 1.0;
  std::size_t stagnation = 0;  // o
  individual best;
  bool has_best = false;
  std::vector<individual> population;
};

// o is reset only by a strictly better raw f_t.
inline void update_stagnation(tuner_state& state, std::span<const individual> offspring) {
  bool improved = false;
  for (const auto& ind : offspring) {
    if (!state.has_best || ind.raw.f_t_raw < state.best.raw.f_t_raw) {
      state.best = ind;
      state.has_best = true;
      improved = true;
    }
  }
  state.stagnation = improved ? 0 : state.stagnation + 1;
}

// ---------------------------------------------------------------------------
// Main loop
// ---------------------------------------------------------------------------

enum class trigger_mode { progressive, constant, never };
enum class objective_mode { mmo, pmo };

struct engine_options {
  objective_mode objectives = objective_mode::mmo;
  duplicates_mode duplicates = duplicates_mode::partial;
  trigger_mode trigger = trigger_mode::progressive;
};

namespace detail {

// Charged measurement bookkeeping shared by every optimizer.
class run_recorder {
public:
  run_recorder(const measurement_oracle& oracle, budget_ledger& ledger, tuning_run& run)
      : oracle_(oracle), ledger_(ledger), run_(run) {}

  // Measures c unless that would need budget that is not there.
  std::optional<perf_sample> try_measure(const configuration& c) {
    if (!ledger_.contains(c) && ledger_.exhausted()) return std::nullopt;
    const bool fresh = !ledger_.contains(c);
    auto s = measure(oracle_, c, ledger_);
    if (fresh) {
      double best = run_.best_by_measurement.empty()
                        ? s.f_t_raw
                        : std::min(run_.best_by_measurement.back(), s.f_t_raw);
      run_.best_by_measurement.push_back(best);
    }
    if (!has_best_ || s.f_t_raw < run_.best.f_t_raw) {
      run_.best = s;
      run_.best_config = c;
      has_best_ = true;
    }
    return s;
  }

  [[nodiscard]] bool space_exhausted() const {
    return ledger_.consumed() >= oracle_.space().cardinality();
  }

private:
  const measurement_oracle& oracle_;
  budget_ledger& ledger_;
  tuning_run& run_;
  bool has_best_ = false;
};

// Tournament, crossover and mutation until n offspring exist or the budget
// runs out. Offspring already measured reuse the cached sample.
inline std::vector<individual> make_offspring(std::span<const individual> parents, std::size_t n,
                                              const config_space& space, const tuner_params& params,
                                              run_recorder& recorder, rng_type& rng) {
  std::vector<individual> offspring;
  while (offspring.size() < n) {
    auto [px, py] = binary_tournament(parents, rng);
    auto [c1, c2] = uniform_crossover(parents[px].config, parents[py].config, params.crossover_rate, rng);
    c1 = boundary_mutation(c1, params.mutation_rate, space, rng);
    c2 = boundary_mutation(c2, params.mutation_rate, space, rng);
    for (auto* child : {&c1, &c2}) {
      if (offspring.size() >= n) break;
      auto sample = recorder.try_measure(*child);
      if (!sample) return offspring;
      offspring.push_back(individual{std::move(*child), *sample});
    }
  }
  return offspring;
}

// n distinct random configurations (fewer only if the space is smaller).
// Collisions are redrawn so a budget of n leaves nothing for a first iteration.
inline std::vector<individual> initial_population(const config_space& space, std::size_t n,
                                                  run_recorder& recorder, rng_type& rng) {
  const auto target = std::min<std::size_t>(n, space.cardinality());
  std::vector<individual> pop;
  while (pop.size() < target) {
    auto c = random_config(space, rng);
    if (std::any_of(pop.begin(), pop.end(), [&](const individual& p) { return p.config == c; })) continue;
    auto s = recorder.try_measure(c);
    if (!s) break;
    pop.push_back(individual{std::move(c), *s});
  }
  return pop;
}

inline void assign_objectives(std::span<individual> pop, objective_mode mode, double w) {
  if (mode == objective_mode::mmo) {
    compute_meta(pop, w);
    return;
  }
  for (auto& ind : pop) {
    ind.g1 = ind.f_t_norm;
    ind.g2 = ind.f_a_norm;
  }
}

inline double current_proportion(std::span<const individual> pop, objective_mode mode, double w) {
  auto unique = unique_members(pop);
  assign_objectives(unique, mode, w);
  return proportion_of(unique).value();
}

inline void rank_population(std::span<individual> pop) {
  auto fronts = nondominated_sort(pop);
  for (const auto& f : fronts) crowding_distance(pop, f);
}

}  // namespace detail

// The nondominated-sorting tuner with its variant switches. With the default
// options this is AdMMO.
inline tuning_run run_engine(const measurement_oracle& oracle, const tuner_params& params,
                             std::uint64_t seed, const engine_options& opts, std::string name) {
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
  state.w = params.w_init;
  state.population = detail::initial_population(space, params.population, recorder, rng);
  for (const auto& ind : state.population) {
    if (!state.has_best || ind.raw.f_t_raw < state.best.raw.f_t_raw) {
      state.best = ind;
      state.has_best = true;
    }
  }
  normalize_union(state.population);
  detail::assign_objectives(state.population, opts.objectives, state.w);
  detail::rank_population(state.population);

  auto record = [&](std::size_t iteration, std::span<const individual> pop) {
    trajectory_row row;
    row.iteration = iteration;
    row.consumed = ledger.consumed();
    row.w = opts.objectives == objective_mode::mmo ? state.w : std::numeric_limits<double>::quiet_NaN();
    row.p_prime = detail::current_proportion(pop, opts.objectives, state.w);
    row.stagnation = state.stagnation;
    row.best_f_t_raw = state.best.raw.f_t_raw;
    run.trajectory.push_back(row);
  };
  record(0, state.population);

  std::size_t idle = 0;
  for (std::size_t iteration = 1;
       !ledger.exhausted() && !recorder.space_exhausted() && idle < params.max_idle_iterations;
       ++iteration) {
    const auto charged_before = ledger.consumed();
    auto offspring =
        detail::make_offspring(state.population, params.population, space, params, recorder, rng);
    update_stagnation(state, offspring);

    std::vector<individual> pool = state.population;
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                std::make_move_iterator(offspring.end()));
    normalize_union(pool);

    trigger_input trig{state.stagnation, params.trigger_offset, std::max<std::size_t>(ledger.consumed(), 1),
                       params.budget, params.cutoff};
    bool fire = should_trigger(trig, rng);
    if (opts.trigger == trigger_mode::constant) fire = true;
    if (opts.trigger == trigger_mode::never || opts.objectives == objective_mode::pmo) fire = false;

    if (fire) {
      state.w = adapt_weight(pool, state.w, params.target_proportion, params).w;
    } else {
      detail::assign_objectives(pool, opts.objectives, state.w);
    }

    auto chosen = survive(pool, params.population, opts.duplicates);
    std::vector<individual> next;
    next.reserve(chosen.size());
    for (auto i : chosen) next.push_back(pool[i]);

    record(iteration, pool);
    state.population = std::move(next);
    idle = ledger.consumed() == charged_before ? idle + 1 : 0;
  }
  return run;
}

inline tuning_run run_admmo(const measurement_oracle& oracle, const tuner_params& params,
                            std::uint64_t seed) {
  return run_engine(oracle, params, seed, engine_options{}, "admmo");
}

}  // namespace admmo
