#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "baselines.hpp"
#include "measurement.hpp"
#include "stats.hpp"
#include "tuner.hpp"

namespace admmo {

// A system-objective pair: an id plus the oracle that answers for it.
struct benchmark_case {
  std::string id;
  std::shared_ptr<const measurement_oracle> oracle;
};

// All repeats of every optimizer on one case at one budget.
struct case_result {
  std::string case_id;
  std::size_t budget = 0;
  std::vector<std::string> optimizers;                    // campaign order
  std::map<std::string, std::vector<tuning_run>> runs;    // optimizer -> repeats
  std::optional<std::string> failure;

  [[nodiscard]] std::vector<double> final_bests(const std::string& optimizer) const {
    std::vector<double> out;
    for (const auto& r : runs.at(optimizer)) out.push_back(r.best.f_t_raw);
    return out;
  }
};

struct campaign_config {
  std::vector<std::size_t> budgets;
  std::size_t repeats = 1;
  std::uint64_t base_seed = 0;
  tuner_params params;
  std::size_t jobs = 1;
};

// Seed of repeat i.
[[nodiscard]] inline std::uint64_t repeat_seed(std::uint64_t base, std::size_t i) { return base + i; }

// Every optimizer x case x budget x repeat. Runs are independent and may be
// spread over `jobs` threads; results are placed by index so the outcome does
// not depend on scheduling. A case whose runs throw is marked failed.
inline std::vector<case_result> run_campaign(const std::vector<benchmark_case>& cases,
                                             const std::vector<optimizer_spec>& optimizers,
                                             const campaign_config& cfg) {
  struct task {
    std::size_t result_index;
    std::size_t optimizer_index;
    std::size_t repeat;
  };

  std::vector<case_result> results;
  std::vector<task> tasks;
  std::vector<std::string> labels;
  for (const auto& o : optimizers) labels.push_back(label_of(o));
  for (std::size_t i = 1; i < labels.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (labels[i] == labels[j]) throw error("duplicate optimizer label '" + labels[i] + "'");

  for (const auto& c : cases) {
    for (auto budget : cfg.budgets) {
      case_result cr;
      cr.case_id = c.id;
      cr.budget = budget;
      cr.optimizers = labels;
      for (const auto& l : labels) cr.runs[l].resize(cfg.repeats);
      results.push_back(std::move(cr));
      for (std::size_t o = 0; o < optimizers.size(); ++o)
        for (std::size_t r = 0; r < cfg.repeats; ++r) tasks.push_back({results.size() - 1, o, r});
    }
  }

  std::vector<std::size_t> case_of(results.size());
  {
    std::size_t k = 0;
    for (std::size_t c = 0; c < cases.size(); ++c)
      for (std::size_t b = 0; b < cfg.budgets.size(); ++b) case_of[k++] = c;
  }

  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const auto t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto& tk = tasks[t];
      auto& cr = results[tk.result_index];
      try {
        if (!cases[case_of[tk.result_index]].oracle) throw error("case has no oracle");
        auto params = cfg.params;
        params.budget = cr.budget;
        cr.runs[labels[tk.optimizer_index]][tk.repeat] =
            run_optimizer(optimizers[tk.optimizer_index], *cases[case_of[tk.result_index]].oracle, params,
                          repeat_seed(cfg.base_seed, tk.repeat));
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!cr.failure) cr.failure = e.what();
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, tasks.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return results;
}

// ---------------------------------------------------------------------------
// Normalized target performance
// ---------------------------------------------------------------------------

struct normalized_performance {
  // budget -> optimizer -> mean normalized best f_t
  std::map<std::size_t, std::map<std::string, double>> means;
  bool zero_range = false;
};

// Pools every repeat of every optimizer at every budget of one case, min-max
// maps each run's best raw f_t into [0, 1], and averages per optimizer and
// budget. Smaller is better.
inline normalized_performance normalized_target_performance(const std::vector<const case_result*>& results) {
  normalized_performance out;
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto* cr : results) {
    for (const auto& [name, runs] : cr->runs) {
      for (const auto& r : runs) {
        if (first) {
          lo = hi = r.best.f_t_raw;
          first = false;
        }
        lo = std::min(lo, r.best.f_t_raw);
        hi = std::max(hi, r.best.f_t_raw);
      }
    }
  }
  const double range = hi - lo;
  out.zero_range = !(range > 0.0);
  for (const auto* cr : results) {
    for (const auto& [name, runs] : cr->runs) {
      double sum = 0.0;
      for (const auto& r : runs) sum += out.zero_range ? 0.0 : (r.best.f_t_raw - lo) / range;
      out.means[cr->budget][name] = runs.empty() ? 0.0 : sum / static_cast<double>(runs.size());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Speedup
// ---------------------------------------------------------------------------

// Mean best-so-far f_t at measurement counts 1..budget. Runs that stopped
// early (space exhausted) hold their last value.
inline std::vector<double> mean_trajectory(const std::vector<tuning_run>& runs, std::size_t budget) {
  std::vector<double> mean(budget, 0.0);
  if (runs.empty()) return mean;
  for (const auto& r : runs) {
    if (r.best_by_measurement.empty()) throw error("run has no measurements");
    for (std::size_t i = 0; i < budget; ++i) {
      const auto j = std::min(i, r.best_by_measurement.size() - 1);
      mean[i] += r.best_by_measurement[j];
    }
  }
  for (auto& m : mean) m /= static_cast<double>(runs.size());
  return mean;
}

struct speedup_result {
  std::size_t b_star = 0;    // measurements the counterpart needs for its final mean
  double t_star = 0.0;       // that final mean
  std::optional<std::size_t> m;  // measurements AdMMO needs to match it
  [[nodiscard]] bool achieved() const noexcept { return m.has_value(); }
  [[nodiscard]] double value() const { return static_cast<double>(b_star) / static_cast<double>(*m); }
};

// s = b_star / m over mean trajectories indexed by measurement count - 1.
inline speedup_result speedup(std::span<const double> counterpart, std::span<const double> admmo) {
  if (counterpart.empty() || admmo.empty()) throw error("speedup needs nonempty mean trajectories");
  speedup_result out;
  out.t_star = counterpart.back();
  for (std::size_t i = 0; i < counterpart.size(); ++i) {
    if (counterpart[i] <= out.t_star) {
      out.b_star = i + 1;
      break;
    }
  }
  for (std::size_t i = 0; i < admmo.size(); ++i) {
    if (admmo[i] <= out.t_star) {
      out.m = i + 1;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise statistics
// ---------------------------------------------------------------------------

struct pair_comparison {
  std::string first;
  std::string second;
  double p_value = 1.0;
  double a12 = 0.5;  // P(first's best f_t > second's)
  stats::effect_class effect = stats::effect_class::trivial;
};

inline std::vector<pair_comparison> compare_all_pairs(const case_result& cr) {
  std::vector<pair_comparison> out;
  for (std::size_t i = 0; i < cr.optimizers.size(); ++i) {
    for (std::size_t j = i + 1; j < cr.optimizers.size(); ++j) {
      auto a = cr.final_bests(cr.optimizers[i]);
      auto b = cr.final_bests(cr.optimizers[j]);
      pair_comparison pc;
      pc.first = cr.optimizers[i];
      pc.second = cr.optimizers[j];
      pc.p_value = stats::wilcoxon_rank_sum(a, b);
      pc.a12 = stats::a12(a, b);
      pc.effect = stats::classify_effect(pc.a12, pc.p_value);
      out.push_back(pc);
    }
  }
  return out;
}

}  // namespace admmo
