#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

#include "config_space.hpp"
#include "measurement.hpp"

namespace admmo {

// A measured configuration together with everything derived from it during
// one survival step. Raw values are the source of truth; the rest is
// recomputed whenever the union or the weight changes.
struct individual {
  configuration config;
  perf_sample raw;
  double f_t_norm = 0.0;
  double f_a_norm = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  std::size_t rank = 0;
  double crowding = 0.0;
};

inline constexpr double weight_min = 0.0;
inline constexpr double weight_max = 1e3;

// Per-objective min-max over the union. A zero-range objective maps to 0 so it
// stays inert in both meta-objectives.
inline void normalize_union(std::span<individual> pop) {
  if (pop.empty()) return;
  auto t_min = pop[0].raw.f_t_raw, t_max = t_min;
  auto a_min = pop[0].raw.f_a_raw, a_max = a_min;
  for (const auto& ind : pop) {
    t_min = std::min(t_min, ind.raw.f_t_raw);
    t_max = std::max(t_max, ind.raw.f_t_raw);
    a_min = std::min(a_min, ind.raw.f_a_raw);
    a_max = std::max(a_max, ind.raw.f_a_raw);
  }
  const double t_range = t_max - t_min;
  const double a_range = a_max - a_min;
  for (auto& ind : pop) {
    ind.f_t_norm = t_range > 0.0 ? (ind.raw.f_t_raw - t_min) / t_range : 0.0;
    ind.f_a_norm = a_range > 0.0 ? (ind.raw.f_a_raw - a_min) / a_range : 0.0;
  }
}

inline void compute_meta(individual& ind, double w) {
  ind.g1 = ind.f_t_norm + w * ind.f_a_norm;
  ind.g2 = ind.f_t_norm - w * ind.f_a_norm;
}

inline void compute_meta(std::span<individual> pop, double w) {
  for (auto& ind : pop) compute_meta(ind, w);
}

// The same mapping written as scale-then-rotate: diag(w, 1) applied to
// (f_a, f_t), followed by a sqrt(2)-dilated 45 degree clockwise rotation.
inline std::pair<double, double> geometric_transform(double f_a, double f_t, double w) {
  constexpr double angle = std::numbers::pi / 4.0;
  const double c = std::sqrt(2.0) * std::cos(angle);
  const double s = std::sqrt(2.0) * std::sin(angle);
  const std::array<std::array<double, 2>, 2> rot{{{c, s}, {-s, c}}};
  const std::array<double, 2> scaled{w * f_a, f_t};
  return {rot[0][0] * scaled[0] + rot[0][1] * scaled[1],
          rot[1][0] * scaled[0] + rot[1][1] * scaled[1]};
}

// Pareto dominance on (g1, g2), both minimized.
[[nodiscard]] inline bool dominates(const individual& a, const individual& b) noexcept {
  return a.g1 <= b.g1 && a.g2 <= b.g2 && (a.g1 < b.g1 || a.g2 < b.g2);
}

}  // namespace admmo
