#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "config_space.hpp"
#include "mmo.hpp"
#include "random.hpp"

namespace admmo {

// Fronts as index lists into the population; fronts[0] is nondominated.
using front_partition = std::vector<std::vector<std::size_t>>;

// Fast nondominated sort on (g1, g2). Individuals equal on both objectives
// share a front. Ranks are written back.
inline front_partition nondominated_sort(std::span<individual> pop) {
  const std::size_t n = pop.size();
  front_partition fronts;
  if (n == 0) return fronts;

  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(pop[p], pop[q])) {
        dominated_by[p].push_back(q);
        ++domination_count[q];
      } else if (dominates(pop[q], pop[p])) {
        dominated_by[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (domination_count[p] == 0) current.push_back(p);
  }

  std::size_t rank = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto p : current) {
      pop[p].rank = rank;
      for (auto q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
    ++rank;
  }
  return fronts;
}

// Standard crowding distance on (g1, g2) over the given members.
inline void crowding_distance(std::span<individual> pop, std::span<const std::size_t> front) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t m = front.size();
  if (m == 0) return;
  for (auto i : front) pop[i].crowding = 0.0;
  if (m <= 2) {
    for (auto i : front) pop[i].crowding = inf;
    return;
  }

  std::vector<std::size_t> order(front.begin(), front.end());
  auto accumulate = [&](auto objective) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return objective(pop[a]) < objective(pop[b]); });
    pop[order.front()].crowding = inf;
    pop[order.back()].crowding = inf;
    const double range = objective(pop[order.back()]) - objective(pop[order.front()]);
    if (range <= 0.0) return;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      auto& ind = pop[order[k]];
      if (ind.crowding != inf)
        ind.crowding += (objective(pop[order[k + 1]]) - objective(pop[order[k - 1]])) / range;
    }
  };
  accumulate([](const individual& x) { return x.g1; });
  accumulate([](const individual& x) { return x.g2; });
}

// Members of `front` ordered by descending crowding; ties keep front order.
inline std::vector<std::size_t> sort_by_crowding(std::span<const individual> pop,
                                                 std::vector<std::size_t> front) {
  std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    return pop[a].crowding > pop[b].crowding;
  });
  return front;
}

// Lower rank wins, then larger crowding, otherwise a fair coin.
inline std::size_t tournament_pick(std::span<const individual> pop, rng_type& rng) {
  auto a = uniform_index(rng, pop.size());
  auto b = uniform_index(rng, pop.size());
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
  if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding ? a : b;
  return uniform_index(rng, 2) == 0 ? a : b;
}

inline std::pair<std::size_t, std::size_t> binary_tournament(std::span<const individual> pop,
                                                             rng_type& rng) {
  auto x = tournament_pick(pop, rng);
  auto y = tournament_pick(pop, rng);
  return {x, y};
}

// With probability `rate` the pair is recombined, each gene swapped with
// probability 1/2; otherwise the children are copies of the parents.
inline std::pair<configuration, configuration> uniform_crossover(const configuration& x,
                                                                 const configuration& y,
                                                                 double rate, rng_type& rng) {
  configuration c1 = x;
  configuration c2 = y;
  if (!bernoulli(rng, rate)) return {std::move(c1), std::move(c2)};
  for (std::size_t i = 0; i < c1.values.size(); ++i) {
    if (bernoulli(rng, 0.5)) std::swap(c1.values[i], c2.values[i]);
  }
  return {std::move(c1), std::move(c2)};
}

// Per-gene probability `rate`: integers jump to lo or hi, binaries flip,
// categoricals move to a uniformly chosen different level.
inline configuration boundary_mutation(const configuration& x, double rate, const config_space& space,
                                       rng_type& rng) {
  configuration out = x;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!bernoulli(rng, rate)) continue;
    const auto& opt = space[i];
    auto& v = out.values[i];
    switch (opt.kind()) {
      case option_kind::binary:
        v = 1 - v;
        break;
      case option_kind::integer:
        v = uniform_index(rng, 2) == 0 ? opt.lo() : opt.hi();
        break;
      case option_kind::categorical: {
        auto pick = uniform_index(rng, opt.domain_size() - 1);
        if (pick >= opt.index_of(v)) ++pick;
        v = opt.value_at(pick);
        break;
      }
    }
  }
  return out;
}

}  // namespace admmo
