#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace admmo {

enum class option_kind { binary, integer, categorical };

// A single tunable option. Values are stored as integers: binary as 0/1,
// integer ranges as the value itself, categorical as the index of the level.
class option_spec {
public:
  static option_spec binary(std::string name) {
    return option_spec{std::move(name), option_kind::binary, 0, 1, {}};
  }

  static option_spec integer(std::string name, int lo, int hi) {
    if (lo > hi) throw error("option '" + name + "': integer range has lo > hi");
    return option_spec{std::move(name), option_kind::integer, lo, hi, {}};
  }

  static option_spec categorical(std::string name, std::vector<std::string> levels) {
    if (levels.size() < 2)
      throw error("option '" + name + "': categorical needs at least 2 levels");
    if (std::set<std::string>(levels.begin(), levels.end()).size() != levels.size())
      throw error("option '" + name + "': categorical levels must be distinct");
    auto hi = static_cast<int>(levels.size()) - 1;
    return option_spec{std::move(name), option_kind::categorical, 0, hi, std::move(levels)};
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] option_kind kind() const noexcept { return kind_; }
  [[nodiscard]] int lo() const noexcept { return lo_; }
  [[nodiscard]] int hi() const noexcept { return hi_; }
  [[nodiscard]] const std::vector<std::string>& levels() const noexcept { return levels_; }

  [[nodiscard]] std::size_t domain_size() const noexcept {
    return static_cast<std::size_t>(hi_ - lo_) + 1;
  }

  [[nodiscard]] bool contains(int value) const noexcept { return value >= lo_ && value <= hi_; }

  // Position of a value in the domain, 0-based.
  [[nodiscard]] std::size_t index_of(int value) const noexcept {
    return static_cast<std::size_t>(value - lo_);
  }
  [[nodiscard]] int value_at(std::size_t index) const noexcept {
    return lo_ + static_cast<int>(index);
  }

  // Parses a textual cell. Categorical levels are matched by name.
  [[nodiscard]] std::optional<int> parse(const std::string& text) const {
    if (kind_ == option_kind::categorical) {
      auto it = std::find(levels_.begin(), levels_.end(), text);
      if (it == levels_.end()) return std::nullopt;
      return static_cast<int>(it - levels_.begin());
    }
    try {
      std::size_t used = 0;
      int v = std::stoi(text, &used);
      if (used != text.size() || !contains(v)) return std::nullopt;
      return v;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  [[nodiscard]] std::string format(int value) const {
    if (kind_ == option_kind::categorical) return levels_.at(static_cast<std::size_t>(value));
    return std::to_string(value);
  }

private:
  option_spec(std::string name, option_kind kind, int lo, int hi, std::vector<std::string> levels)
      : name_(std::move(name)), kind_(kind), lo_(lo), hi_(hi), levels_(std::move(levels)) {}

  std::string name_;
  option_kind kind_;
  int lo_;
  int hi_;
  std::vector<std::string> levels_;
};

// A point in the configuration space. Identity is componentwise equality of
// the option values; performance never takes part in it.
struct configuration {
  std::vector<int> values;

  friend bool operator==(const configuration&, const configuration&) = default;
  friend auto operator<=>(const configuration&, const configuration&) = default;
};

struct configuration_hash {
  std::size_t operator()(const configuration& c) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int v : c.values) {
      h ^= std::hash<int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline constexpr std::size_t default_enumeration_cap = 1'000'000;

class config_space {
public:
  explicit config_space(std::vector<option_spec> options) : options_(std::move(options)) {
    if (options_.empty()) throw error("configuration space needs at least one option");
    std::set<std::string> names;
    for (const auto& o : options_) {
      if (!names.insert(o.name()).second) throw error("duplicate option name '" + o.name() + "'");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return options_.size(); }
  [[nodiscard]] const std::vector<option_spec>& options() const noexcept { return options_; }
  [[nodiscard]] const option_spec& operator[](std::size_t i) const { return options_[i]; }

  [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < options_.size(); ++i)
      if (options_[i].name() == name) return i;
    return std::nullopt;
  }

  // Number of configurations; saturates at UINT64_MAX.
  [[nodiscard]] std::uint64_t cardinality() const noexcept {
    std::uint64_t total = 1;
    for (const auto& o : options_) {
      auto d = static_cast<std::uint64_t>(o.domain_size());
      if (total > UINT64_MAX / d) return UINT64_MAX;
      total *= d;
    }
    return total;
  }

  friend bool operator==(const config_space& a, const config_space& b) {
    if (a.options_.size() != b.options_.size()) return false;
    for (std::size_t i = 0; i < a.options_.size(); ++i) {
      const auto& x = a.options_[i];
      const auto& y = b.options_[i];
      if (x.name() != y.name() || x.kind() != y.kind() || x.lo() != y.lo() || x.hi() != y.hi() ||
          x.levels() != y.levels())
        return false;
    }
    return true;
  }

private:
  std::vector<option_spec> options_;
};

[[nodiscard]] inline bool validate(const config_space& space, const configuration& config) {
  if (config.values.size() != space.size()) return false;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (!space[i].contains(config.values[i])) return false;
  return true;
}

[[nodiscard]] inline configuration random_config(const config_space& space, rng_type& rng) {
  configuration c;
  c.values.reserve(space.size());
  for (const auto& o : space.options()) c.values.push_back(o.value_at(uniform_index(rng, o.domain_size())));
  return c;
}

// All configurations in lexicographic order (first option most significant).
[[nodiscard]] inline std::vector<configuration> enumerate_space(
    const config_space& space, std::size_t cap = default_enumeration_cap) {
  auto total = space.cardinality();
  if (total > cap)
    throw space_too_large("space too large to enumerate: " + std::to_string(total) +
                          " configurations exceed cap " + std::to_string(cap));

  std::vector<configuration> out;
  out.reserve(static_cast<std::size_t>(total));
  configuration cur;
  for (const auto& o : space.options()) cur.values.push_back(o.lo());
  for (;;) {
    out.push_back(cur);
    std::size_t i = space.size();
    while (i > 0) {
      --i;
      if (cur.values[i] < space[i].hi()) {
        ++cur.values[i];
        break;
      }
      cur.values[i] = space[i].lo();
      if (i == 0) return out;
    }
  }
}

[[nodiscard]] inline std::string format_config(const config_space& space, const configuration& c,
                                               char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    if (i) out += sep;
    out += space[i].format(c.values[i]);
  }
  return out;
}

}  // namespace admmo
