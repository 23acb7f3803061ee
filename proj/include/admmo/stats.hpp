#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace admmo::stats {

// Average ranks (1-based) of the pooled samples, ties sharing their mean rank.
inline std::vector<double> midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline constexpr std::size_t exact_wilcoxon_limit = 20;

// Exact permutation distribution of the rank sum (midranks included).
inline double wilcoxon_rank_sum_exact(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  const std::size_t n1 = a.size();
  const std::size_t n = pooled.size();

  // Doubled midranks are integers.
  std::vector<std::size_t> r2(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = static_cast<std::size_t>(std::lround(ranks[i] * 2.0));
    total += r2[i];
  }
  std::size_t observed = 0;
  for (std::size_t i = 0; i < n1; ++i) observed += r2[i];

  // ways[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(total + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
      for (std::size_t s = total; s + 1 > r2[i]; --s) {
        ways[k][s] += ways[k - 1][s - r2[i]];
        if (s == 0) break;
      }
    }
  }
  const double expected2 = static_cast<double>(n1) * static_cast<double>(n + 1);
  const double obs_dev = std::abs(static_cast<double>(observed) - expected2);
  double extreme = 0.0;
  double all = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    all += ways[n1][s];
    if (std::abs(static_cast<double>(s) - expected2) >= obs_dev - 1e-9) extreme += ways[n1][s];
  }
  return std::min(1.0, extreme / all);
}

// Normal approximation with tie and continuity correction.
inline double wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;

  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w += ranks[i];
  const double mean = n1 * (n + 1.0) / 2.0;

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(w - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

// Two-sided rank-sum test for independent samples; exact when the pooled
// size is at most 20.
inline double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw error("rank-sum test needs two nonempty samples");
  if (a.size() + b.size() <= exact_wilcoxon_limit) return wilcoxon_rank_sum_exact(a, b);
  return wilcoxon_rank_sum_normal(a, b);
}

// Vargha-Delaney effect size: P(x > y) with ties counted half.
inline double a12(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw error("A12 needs two nonempty samples");
  double wins = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y)
        wins += 1.0;
      else if (x == y)
        wins += 0.5;
    }
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

enum class effect_class { trivial, small, medium, large };

[[nodiscard]] inline std::string_view to_string(effect_class e) {
  switch (e) {
    case effect_class::trivial:
      return "trivial";
    case effect_class::small:
      return "small";
    case effect_class::medium:
      return "medium";
    case effect_class::large:
      return "large";
  }
  return "trivial";
}

// Significant only when p < alpha and A12 is outside (0.44, 0.56).
[[nodiscard]] inline effect_class classify_effect(double a12_value, double p_value, double alpha = 0.05) {
  if (!(p_value < alpha)) return effect_class::trivial;
  const double v = a12_value;
  if (v >= 0.71 || v <= 0.29) return effect_class::large;
  if (v >= 0.64 || v <= 0.36) return effect_class::medium;
  if (v >= 0.56 || v <= 0.44) return effect_class::small;
  return effect_class::trivial;
}

}  // namespace admmo::stats
