#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <set>

#include <admmo/tuner.hpp>

#include "test_support.hpp"

using namespace admmo;
using admmo::testing::make_individual;

// ---------------------------------------------------------------------------
// Progressive trigger
// ---------------------------------------------------------------------------

TEST(Trigger, ZeroWhileStagnationWithinOffset) {
  for (std::size_t o : {0u, 1u}) {
    for (std::size_t b : {1u, 50u, 399u, 400u}) {
      EXPECT_EQ(trigger_probability({o, 1, b, 400, 0.5}), 0.0);
    }
  }
}

TEST(Trigger, ProgressiveValues) {
  // Direct evaluation: 1 - exp(ln(0.5) * 4 / 64) and 1 - exp(ln(0.5) * 4 / 16).
  EXPECT_NEAR(trigger_probability({5, 1, 50, 400, 0.5}), 0.042397, 1e-4);
  EXPECT_NEAR(trigger_probability({5, 1, 100, 400, 0.5}), 0.159104, 1e-4);
}

TEST(Trigger, MonotoneInStagnationAndConsumption) {
  double prev = -1.0;
  for (std::size_t o = 0; o < 60; ++o) {
    double p = trigger_probability({o, 1, 100, 400, 0.5});
    EXPECT_GE(p, prev);
    EXPECT_LT(p, 1.0);
    prev = p;
  }
  prev = -1.0;
  for (std::size_t b = 1; b <= 400; ++b) {
    double p = trigger_probability({5, 1, b, 400, 0.5});
    EXPECT_GE(p, prev);
    prev = p;
  }
  // With the whole budget used, S = 1 and the probability is 1 - C^(o - T).
  EXPECT_NEAR(trigger_probability({3, 1, 400, 400, 0.5}), 0.75, 1e-12);
}

TEST(Trigger, SlopeShrinksWithConsumption) {
  trigger_input a{0, 1, 50, 400, 0.5};
  trigger_input b{0, 1, 100, 400, 0.5};
  EXPECT_DOUBLE_EQ(a.slope(), 8.0);
  EXPECT_GT(a.slope(), b.slope());
  EXPECT_GE(trigger_input({0, 1, 400, 400, 0.5}).slope(), 1.0);
}

TEST(ShouldTrigger, NeverFiresAtZeroProbability) {
  auto rng = make_rng(1);
  for (int i = 0; i < 10'000; ++i) EXPECT_FALSE(should_trigger({1, 1, 10, 400, 0.5}, rng));
}

TEST(ShouldTrigger, FrequencyMatchesProbability) {
  auto rng = make_rng(2);
  const trigger_input in{5, 1, 100, 400, 0.5};
  int fired = 0;
  constexpr int draws = 100'000;
  for (int i = 0; i < draws; ++i) fired += should_trigger(in, rng) ? 1 : 0;
  EXPECT_NEAR(fired / double(draws), trigger_probability(in), 0.01);
}

TEST(ShouldTrigger, EmpiricalRateGrowsWithStagnation) {
  double prev = -1.0;
  for (std::size_t o : {2u, 6u, 12u, 25u, 50u}) {
    auto rng = make_rng(o);
    int fired = 0;
    for (int i = 0; i < 20'000; ++i) fired += should_trigger({o, 1, 200, 400, 0.5}, rng) ? 1 : 0;
    const double rate = fired / 20'000.0;
    EXPECT_GT(rate, prev);
    prev = rate;
  }
}

// ---------------------------------------------------------------------------
// Proportion
// ---------------------------------------------------------------------------

TEST(Proportion, DuplicateWalkthroughUnion) {
  auto u = admmo::testing::duplicate_walkthrough_union();
  auto prop = unique_nondominated_proportion(u, 1.0);
  EXPECT_EQ(prop.unique, 5u);
  EXPECT_EQ(prop.nondominated, 2u);
  EXPECT_DOUBLE_EQ(prop.value(), 0.4);
}

TEST(Proportion, CopiesOfOneConfiguration) {
  std::vector<individual> u(6, make_individual({3, 1}, 0.4, 0.7));
  auto prop = unique_nondominated_proportion(u, 2.0);
  EXPECT_EQ(prop.unique, 1u);
  EXPECT_EQ(prop.nondominated, 1u);
  EXPECT_DOUBLE_EQ(prop.value(), 1.0);
}

TEST(Proportion, DominanceChain) {
  for (std::size_t m = 1; m <= 9; ++m) {
    std::vector<individual> u;
    for (std::size_t i = 0; i < m; ++i)
      u.push_back(make_individual({static_cast<int>(i)}, static_cast<double>(i) / 10.0, 0.5));
    auto prop = unique_nondominated_proportion(u, 3.0);
    EXPECT_DOUBLE_EQ(prop.value(), 1.0 / static_cast<double>(m));
  }
}

// ---------------------------------------------------------------------------
// Weight adaptation
// ---------------------------------------------------------------------------

TEST(AdaptWeight, UnchangedWhenAlreadyOnTarget) {
  auto u = admmo::testing::duplicate_walkthrough_union();
  tuner_params params;
  auto r = adapt_weight(u, 1.0, 0.4, params);
  EXPECT_EQ(r.w, 1.0);
  EXPECT_EQ(r.steps, 0u);
}

TEST(AdaptWeight, ClimbsUntilTargetReached) {
  // First dominates second while 0.2 >= 0.7 w, i.e. up to w = 2/7.
  std::vector<individual> u{make_individual({0}, 0.2, 0.8), make_individual({1}, 0.4, 0.1)};
  tuner_params params;
  auto r = adapt_weight(u, 0.1, 1.0, params);
  EXPECT_NEAR(r.w, 0.3, 1e-12);
  EXPECT_EQ(r.steps, 2u);
  EXPECT_DOUBLE_EQ(r.prop.value(), 1.0);
  EXPECT_NEAR(u[0].g1, 0.2 + r.w * 0.8, 1e-15);
}

TEST(AdaptWeight, StopsAtUpperBound) {
  // f_a identical, so dominance is weight independent and p' stays 1/3.
  std::vector<individual> u{make_individual({0}, 0.1, 0.5), make_individual({1}, 0.2, 0.5),
                            make_individual({2}, 0.3, 0.5)};
  tuner_params params;
  auto r = adapt_weight(u, weight_max, 0.5, params);
  EXPECT_EQ(r.w, weight_max);
  EXPECT_EQ(r.steps, 0u);

  auto climb = adapt_weight(u, 999.75, 0.5, params);
  EXPECT_EQ(climb.w, weight_max);
}

TEST(AdaptWeight, StopsAtLowerBound) {
  // Mutually incomparable at any w > 0; at w = 0 only the f_t minimum survives.
  std::vector<individual> u{make_individual({0}, 0.1, 0.9), make_individual({1}, 0.2, 0.1)};
  tuner_params params;
  auto r = adapt_weight(u, 0.05, 0.2, params);
  EXPECT_GE(r.w, 0.0);
  EXPECT_LE(r.w, 0.05);
}

TEST(AdaptWeight, FineStepBelowOneTenth) {
  // One unique point dominating another until w = 0.1 / 0.9; the target 1.0 is
  // reachable by climbing, the target 0.5 by descending from above.
  std::vector<individual> u{make_individual({0}, 0.1, 0.0), make_individual({1}, 0.2, 0.9)};
  tuner_params params;
  auto down = adapt_weight(u, 0.15, 0.5, params);
  // Descends in 1e-4 steps from 0.15 to the first weight <= 1/9.
  EXPECT_LE(down.w, 0.1 / 0.9);
  EXPECT_GT(down.w, 0.1 / 0.9 - 2e-4);
  EXPECT_DOUBLE_EQ(down.prop.value(), 0.5);
}

TEST(AdaptWeight, OscillationKeepsNearestWeight) {
  // Three unique points; p = 0.5 sits between the reachable 1/3 and 2/3.
  std::vector<individual> u{make_individual({0}, 0.0, 0.5), make_individual({1}, 0.3, 0.0),
                            make_individual({2}, 0.6, 1.0)};
  tuner_params params;
  auto r = adapt_weight(u, 0.1, 0.5, params);
  auto check = u;
  auto at = unique_nondominated_proportion(check, r.w);
  EXPECT_EQ(at.value(), r.prop.value());
  EXPECT_LT(r.steps, params.adapt_iteration_cap);
  EXPECT_NEAR(std::abs(r.prop.value() - 0.5), 1.0 / 6.0, 1e-12);
}

TEST(AdaptWeight, MovesInTheDirectionOfTheTarget) {
  auto rng = make_rng(44);
  tuner_params params;
  for (int trial = 0; trial < 300; ++trial) {
    auto pop = admmo::testing::random_population(rng, 4 + uniform_index(rng, 16));
    const double w = 5.0 * uniform01(rng);
    const double p = 0.05 + 0.95 * uniform01(rng);
    auto probe = pop;
    const double before = unique_nondominated_proportion(probe, w).value();
    auto r = adapt_weight(pop, w, p, params);
    if (before < p) {
      EXPECT_GE(r.w, w);
    }
    if (before > p) {
      EXPECT_LE(r.w, w);
    }
    EXPECT_GE(r.w, params.w_min);
    EXPECT_LE(r.w, params.w_max);
    for (const auto& ind : pop) EXPECT_DOUBLE_EQ(ind.g1, ind.f_t_norm + r.w * ind.f_a_norm);
  }
}

// ---------------------------------------------------------------------------
// Survival
// ---------------------------------------------------------------------------

namespace {

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(PartialDuplicateSurvival, DuplicateWalkthrough) {
  auto u = admmo::testing::duplicate_walkthrough_union();
  // x1, x2, x3, x6
  EXPECT_EQ(as_set(partial_duplicate_survival(u, 4)), (std::set<std::size_t>{0, 1, 2, 5}));
}

TEST(RemoveAllSurvival, DuplicateWalkthrough) {
  auto u = admmo::testing::duplicate_walkthrough_union();
  // x1, x2, x5, x6
  EXPECT_EQ(as_set(remove_all_survival(u, 4)), (std::set<std::size_t>{0, 1, 4, 5}));
}

TEST(IndistinctSurvival, DuplicateWalkthrough) {
  auto u = admmo::testing::duplicate_walkthrough_union();
  // x1, x2, x3, x4
  EXPECT_EQ(as_set(nsga2_survival(u, 4)), (std::set<std::size_t>{0, 1, 2, 3}));
}

TEST(PartialDuplicateSurvival, NoDuplicatesMatchesNsga2) {
  auto rng = make_rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto pop = admmo::testing::random_population(rng, 20);
    compute_meta(pop, 3.0 * uniform01(rng));
    auto a = pop;
    auto b = pop;
    EXPECT_EQ(partial_duplicate_survival(a, 10), nsga2_survival(b, 10));
  }
}

TEST(PartialDuplicateSurvival, SingleFrontOfCopiesIsNotDemoted) {
  std::vector<individual> u(7, make_individual({1, 1}, 0.3, 0.3));
  compute_meta(u, 1.0);
  auto chosen = partial_duplicate_survival(u, 4);
  EXPECT_EQ(chosen.size(), 4u);
  for (auto i : chosen) EXPECT_EQ(u[i].rank, 0u);
}

namespace {

// Union of `size` members drawn with replacement from `unique` distinct points.
std::vector<individual> union_with_duplicates(rng_type& rng, std::size_t unique, std::size_t size) {
  auto base = admmo::testing::random_population(rng, unique);
  std::vector<individual> u;
  for (std::size_t i = 0; i < size; ++i) u.push_back(base[uniform_index(rng, base.size())]);
  return u;
}

}  // namespace

TEST(PartialDuplicateSurvival, FirstFrontAgreesWithProportion) {
  auto rng = make_rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    auto u = union_with_duplicates(rng, 2 + uniform_index(rng, 10), 20);
    const double w = 4.0 * uniform01(rng);
    auto probe = u;
    const auto prop = unique_nondominated_proportion(probe, w);
    // Copies are only demoted out of a front that has a successor.
    const bool single_front = nondominated_sort(probe).size() == 1;
    compute_meta(u, w);
    auto chosen = partial_duplicate_survival(u, 10);
    std::size_t rank0 = 0;
    std::set<configuration> rank0_configs;
    for (auto i : chosen)
      if (u[i].rank == 0) {
        ++rank0;
        rank0_configs.insert(u[i].config);
      }
    if (single_front) continue;
    EXPECT_EQ(rank0, rank0_configs.size());
    if (prop.nondominated <= 10) {
      EXPECT_EQ(rank0, prop.nondominated);
    }
  }
}

TEST(Survival, KeepsBothMetaObjectiveElites) {
  auto rng = make_rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    auto u = union_with_duplicates(rng, 3 + uniform_index(rng, 15), 20);
    compute_meta(u, 3.0 * uniform01(rng));
    double min_g1 = u[0].g1;
    double min_g2 = u[0].g2;
    for (const auto& ind : u) {
      min_g1 = std::min(min_g1, ind.g1);
      min_g2 = std::min(min_g2, ind.g2);
    }
    // Plain NSGA-II can lose an elite to copies of the other extreme, so it is
    // checked on the duplicate-free part only.
    const auto distinct = unique_members(u);
    for (auto mode : {duplicates_mode::partial, duplicates_mode::indistinct, duplicates_mode::remove_all}) {
      auto work = mode == duplicates_mode::indistinct ? distinct : u;
      const std::size_t capacity = 2 + uniform_index(rng, 9);
      auto chosen = survive(work, capacity, mode);
      ASSERT_EQ(chosen.size(), std::min(capacity, work.size()));
      bool has_g1 = false;
      bool has_g2 = false;
      for (auto i : chosen) {
        has_g1 = has_g1 || work[i].g1 == min_g1;
        has_g2 = has_g2 || work[i].g2 == min_g2;
      }
      EXPECT_TRUE(has_g1);
      EXPECT_TRUE(has_g2);
    }
  }
}

TEST(RemoveAllSurvival, RefillsWithCopiesWhenTooFewUnique) {
  std::vector<individual> u{make_individual({0}, 0.1, 0.1), make_individual({0}, 0.1, 0.1),
                            make_individual({1}, 0.5, 0.5), make_individual({1}, 0.5, 0.5)};
  compute_meta(u, 1.0);
  auto chosen = remove_all_survival(u, 3);
  EXPECT_EQ(chosen.size(), 3u);
  EXPECT_EQ(as_set(chosen), (std::set<std::size_t>{0, 2, 1}));
}

// ---------------------------------------------------------------------------
// Stagnation
// ---------------------------------------------------------------------------

TEST(Stagnation, StrictImprovementResets) {
  tuner_state s;
  s.best = make_individual({0}, 0, 0);
  s.best.raw = {5.0, 0.0};
  s.has_best = true;
  s.stagnation = 4;

  std::vector<individual> better{make_individual({1}, 0, 0)};
  better[0].raw = {4.0, 1.0};
  update_stagnation(s, better);
  EXPECT_EQ(s.stagnation, 0u);
  EXPECT_EQ(s.best.raw.f_t_raw, 4.0);

  std::vector<individual> tie{make_individual({2}, 0, 0)};
  tie[0].raw = {4.0, 0.0};
  update_stagnation(s, tie);
  EXPECT_EQ(s.stagnation, 1u);
  EXPECT_EQ(s.best.config, better[0].config);

  std::vector<individual> worse{make_individual({3}, 0, 0)};
  worse[0].raw = {9.0, 0.0};
  update_stagnation(s, worse);
  update_stagnation(s, worse);
  EXPECT_EQ(s.stagnation, 3u);
}

TEST(Stagnation, CountsFromZero) {
  tuner_state s;
  s.best.raw = {1.0, 0.0};
  s.has_best = true;
  std::vector<individual> none;
  for (int i = 0; i < 3; ++i) update_stagnation(s, none);
  EXPECT_EQ(s.stagnation, 3u);
}

// ---------------------------------------------------------------------------
// Main loop
// ---------------------------------------------------------------------------

namespace {

nk_landscape six_bit_landscape(std::uint64_t seed = 3) { return nk_landscape({{2, 2, 2, 2, 2, 2}, 2, seed}); }

void expect_same_run(const tuning_run& a, const tuning_run& b) {
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    const auto& x = a.trajectory[i];
    const auto& y = b.trajectory[i];
    EXPECT_EQ(x.iteration, y.iteration);
    EXPECT_EQ(x.consumed, y.consumed);
    EXPECT_EQ(std::memcmp(&x.w, &y.w, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&x.p_prime, &y.p_prime, sizeof(double)), 0);
    EXPECT_EQ(x.stagnation, y.stagnation);
    EXPECT_EQ(x.best_f_t_raw, y.best_f_t_raw);
  }
  EXPECT_EQ(a.best_by_measurement, b.best_by_measurement);
  EXPECT_EQ(a.best_config, b.best_config);
}

}  // namespace

TEST(RunAdmmo, BudgetEqualToPopulationRunsNoIterations) {
  auto land = six_bit_landscape();
  tuner_params params;
  params.budget = params.population;
  auto run = run_admmo(land, params, 9);
  ASSERT_EQ(run.trajectory.size(), 1u);
  EXPECT_LE(run.consumed(), params.population);

  EXPECT_EQ(run.consumed(), params.population);

  // Replays the first ten distinct draws of the seed.
  auto rng = make_rng(9);
  std::set<configuration> drawn;
  double best = std::numeric_limits<double>::infinity();
  while (drawn.size() < params.population) {
    auto c = random_config(land.space(), rng);
    if (drawn.insert(c).second) best = std::min(best, land.evaluate(c).f_t_raw);
  }
  EXPECT_EQ(run.best.f_t_raw, best);
}

TEST(RunAdmmo, RejectsBudgetBelowPopulation) {
  auto land = six_bit_landscape();
  tuner_params params;
  params.budget = 5;
  EXPECT_THROW(run_admmo(land, params, 1), error);
}

TEST(RunAdmmo, SameSeedSameTrajectory) {
  nk_landscape land({{2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, 3, 8});
  tuner_params params;
  params.budget = 150;
  expect_same_run(run_admmo(land, params, 77), run_admmo(land, params, 77));
}

TEST(RunAdmmo, BudgetSafety) {
  nk_landscape land({{2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, 3, 8});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    tuner_params params;
    params.budget = 30 + 10 * seed;
    auto run = run_admmo(land, params, seed);
    EXPECT_LE(run.consumed(), params.budget);
    EXPECT_EQ(run.consumed(), params.budget);
    for (std::size_t i = 1; i < run.trajectory.size(); ++i) {
      EXPECT_GE(run.trajectory[i].consumed, run.trajectory[i - 1].consumed);
      EXPECT_LE(run.trajectory[i].best_f_t_raw, run.trajectory[i - 1].best_f_t_raw);
      EXPECT_GE(run.trajectory[i].w, 0.0);
      EXPECT_LE(run.trajectory[i].w, 1e3);
    }
    EXPECT_EQ(run.best.f_t_raw, run.best_by_measurement.back());
  }
}

TEST(RunAdmmo, BestIsBoundedByEnumeratedOptimum) {
  auto land = six_bit_landscape(13);
  double optimum = std::numeric_limits<double>::infinity();
  for (const auto& c : enumerate_space(land.space())) optimum = std::min(optimum, land.evaluate(c).f_t_raw);
  tuner_params params;
  params.budget = 64;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto run = run_admmo(land, params, seed);
    EXPECT_GE(run.best.f_t_raw, optimum);
    EXPECT_EQ(land.evaluate(run.best_config).f_t_raw, run.best.f_t_raw);
  }
}

TEST(RunAdmmo, TerminatesWhenSpaceIsExhausted) {
  config_space tiny{{option_spec::binary("a"), option_spec::binary("b"), option_spec::binary("c")}};
  function_oracle oracle{tiny, [](const configuration& c) {
                           return perf_sample{double(c.values[0] + c.values[1] + c.values[2]), double(c.values[0])};
                         }};
  tuner_params params;
  params.population = 4;
  params.budget = 100;
  auto run = run_admmo(oracle, params, 3);
  EXPECT_LE(run.consumed(), 8u);
  EXPECT_EQ(run.best.f_t_raw, 0.0);
}
