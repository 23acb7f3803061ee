#include <gtest/gtest.h>

#include <admmo/harness.hpp>

using namespace admmo;

namespace {

tuning_run finished(double best) {
  tuning_run r;
  r.best.f_t_raw = best;
  r.best_by_measurement = {best};
  return r;
}

case_result cell(std::size_t budget, std::map<std::string, std::vector<double>> bests) {
  case_result cr;
  cr.case_id = "c";
  cr.budget = budget;
  for (auto& [name, values] : bests) {
    cr.optimizers.push_back(name);
    for (double v : values) cr.runs[name].push_back(finished(v));
  }
  return cr;
}

std::vector<benchmark_case> two_cases() {
  return {{"nk_a", std::make_shared<nk_landscape>(landscape_spec{std::vector<std::size_t>(8, 2), 2, 1})},
          {"nk_b", std::make_shared<nk_landscape>(landscape_spec{std::vector<std::size_t>(8, 2), 3, 2})}};
}

std::vector<optimizer_spec> admmo_and_rs() {
  std::vector<optimizer_spec> o(2);
  o[1].kind = optimizer_kind::rs;
  return o;
}

}  // namespace

TEST(Campaign, Cardinality) {
  campaign_config cfg;
  cfg.budgets = {20, 40};
  cfg.repeats = 3;
  auto results = run_campaign(two_cases(), admmo_and_rs(), cfg);
  ASSERT_EQ(results.size(), 4u);
  std::size_t runs = 0;
  for (const auto& cr : results) {
    EXPECT_FALSE(cr.failure);
    for (const auto& [name, rs] : cr.runs) {
      EXPECT_EQ(rs.size(), 3u);
      for (const auto& r : rs) {
        EXPECT_EQ(r.budget, cr.budget);
        EXPECT_EQ(r.consumed(), cr.budget);
        EXPECT_EQ(r.optimizer, name);
      }
      runs += rs.size();
    }
  }
  EXPECT_EQ(runs, 24u);
}

TEST(Campaign, SeedsFollowRepeatIndexAndThreadsDoNotMatter) {
  campaign_config cfg;
  cfg.budgets = {30};
  cfg.repeats = 4;
  cfg.base_seed = 100;
  auto serial = run_campaign(two_cases(), admmo_and_rs(), cfg);
  cfg.jobs = 4;
  auto parallel = run_campaign(two_cases(), admmo_and_rs(), cfg);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    for (const auto& [name, rs] : serial[i].runs) {
      for (std::size_t r = 0; r < rs.size(); ++r) {
        EXPECT_EQ(rs[r].seed, 100 + r);
        EXPECT_EQ(rs[r].best_by_measurement, parallel[i].runs.at(name)[r].best_by_measurement);
      }
    }
  }
}

TEST(Campaign, FailingCaseIsRecordedAndOthersContinue) {
  auto cases = two_cases();
  cases.push_back({"broken", nullptr});
  campaign_config cfg;
  cfg.budgets = {20};
  auto results = run_campaign(cases, admmo_and_rs(), cfg);
  ASSERT_EQ(results.size(), 3u);
  EXPECT_FALSE(results[0].failure);
  EXPECT_TRUE(results[2].failure);
}

TEST(Campaign, RejectsDuplicateLabels) {
  std::vector<optimizer_spec> o(2);
  campaign_config cfg;
  cfg.budgets = {20};
  EXPECT_THROW((void)run_campaign(two_cases(), o, cfg), error);
}

TEST(NormalizedPerformance, MinMaxOverThePool) {
  auto cr = cell(100, {{"a", {10}}, {"b", {20}}, {"c", {30}}});
  auto np = normalized_target_performance({&cr});
  EXPECT_FALSE(np.zero_range);
  EXPECT_DOUBLE_EQ(np.means[100]["a"], 0.0);
  EXPECT_DOUBLE_EQ(np.means[100]["b"], 0.5);
  EXPECT_DOUBLE_EQ(np.means[100]["c"], 1.0);
}

TEST(NormalizedPerformance, PoolSpansBudgets) {
  auto small = cell(100, {{"a", {4, 6}}, {"b", {8, 10}}});
  auto large = cell(200, {{"a", {2, 2}}, {"b", {4, 6}}});
  auto np = normalized_target_performance({&small, &large});
  EXPECT_DOUBLE_EQ(np.means[200]["a"], 0.0);
  EXPECT_DOUBLE_EQ(np.means[100]["b"], 0.875);
  EXPECT_DOUBLE_EQ(np.means[100]["a"], 0.375);
}

TEST(NormalizedPerformance, ZeroRangeGivesZeros) {
  auto cr = cell(100, {{"a", {3, 3}}, {"b", {3}}});
  auto np = normalized_target_performance({&cr});
  EXPECT_TRUE(np.zero_range);
  EXPECT_EQ(np.means[100]["a"], 0.0);
  EXPECT_EQ(np.means[100]["b"], 0.0);
}

TEST(NormalizedPerformance, AffineInvariant) {
  auto rng = make_rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, std::vector<double>> raw;
    std::map<std::string, std::vector<double>> mapped;
    const double scale = 0.1 + 10.0 * uniform01(rng);
    const double shift = 100.0 * uniform01(rng) - 50.0;
    for (const std::string name : {"a", "b", "c"}) {
      for (int r = 0; r < 5; ++r) {
        double v = static_cast<double>(uniform_index(rng, 20));
        raw[name].push_back(v);
        mapped[name].push_back(scale * v + shift);
      }
    }
    auto x = cell(100, raw);
    auto y = cell(100, mapped);
    auto nx = normalized_target_performance({&x});
    auto ny = normalized_target_performance({&y});
    for (const auto& [name, m] : nx.means[100]) EXPECT_NEAR(m, ny.means[100][name], 1e-12);
  }
}

TEST(MeanTrajectory, PadsShortRuns) {
  tuning_run a;
  a.best_by_measurement = {5, 3, 3, 1};
  tuning_run b;
  b.best_by_measurement = {7, 5};
  auto m = mean_trajectory({a, b}, 4);
  EXPECT_EQ(m, (std::vector<double>{6, 4, 4, 3}));
}

TEST(Speedup, FourTimesFaster) {
  std::vector<double> counterpart(400);
  std::vector<double> admmo(400);
  for (std::size_t i = 0; i < 400; ++i) {
    counterpart[i] = 100.0 - 0.25 * static_cast<double>(i);  // reaches 0.25 at 400
    admmo[i] = std::max(0.25, 100.0 - static_cast<double>(i) * (99.75 / 99.0));  // at 100
  }
  auto s = speedup(counterpart, admmo);
  EXPECT_EQ(s.b_star, 400u);
  ASSERT_TRUE(s.achieved());
  EXPECT_EQ(*s.m, 100u);
  EXPECT_DOUBLE_EQ(s.value(), 4.0);
}

TEST(Speedup, IdenticalCurvesGiveOne) {
  std::vector<double> curve{9, 7, 4, 4, 4, 4};
  auto s = speedup(curve, curve);
  EXPECT_EQ(s.b_star, 3u);
  EXPECT_DOUBLE_EQ(s.value(), 1.0);
}

TEST(Speedup, NotAchieved) {
  std::vector<double> counterpart{9, 5, 2};
  std::vector<double> admmo{9, 6, 3};
  EXPECT_FALSE(speedup(counterpart, admmo).achieved());
}

TEST(Speedup, ScaleInvariant) {
  auto rng = make_rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(50);
    std::vector<double> a(50);
    double x = 100.0;
    double y = 100.0;
    for (std::size_t i = 0; i < 50; ++i) {
      x -= static_cast<double>(uniform_index(rng, 3));
      y -= static_cast<double>(uniform_index(rng, 3));
      c[i] = x;
      a[i] = y;
    }
    const double scale = 0.5 + 3.0 * uniform01(rng);
    const double shift = 10.0 * uniform01(rng);
    auto c2 = c;
    auto a2 = a;
    for (auto& v : c2) v = scale * v + shift;
    for (auto& v : a2) v = scale * v + shift;
    auto s1 = speedup(c, a);
    auto s2 = speedup(c2, a2);
    EXPECT_EQ(s1.b_star, s2.b_star);
    EXPECT_EQ(s1.m, s2.m);
  }
}

TEST(Comparisons, EveryPairIsReported) {
  auto cr = cell(100, {{"a", {1, 2, 3}}, {"b", {4, 5, 6}}, {"c", {1, 2, 3}}});
  auto pairs = compare_all_pairs(cr);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].first, "a");
  EXPECT_EQ(pairs[0].second, "b");
  EXPECT_NEAR(pairs[0].p_value, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(pairs[0].a12, 0.0);
  EXPECT_EQ(pairs[0].effect, stats::effect_class::trivial);
  EXPECT_DOUBLE_EQ(pairs[1].a12, 0.5);
}
