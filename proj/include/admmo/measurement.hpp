#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "config_space.hpp"
#include "error.hpp"
#include "random.hpp"

namespace admmo {

// Both objectives in minimization orientation.
struct perf_sample {
  double f_t_raw = 0.0;
  double f_a_raw = 0.0;

  friend bool operator==(const perf_sample&, const perf_sample&) = default;
};

struct objective_orientation {
  bool t_maximize = false;
  bool a_maximize = false;

  [[nodiscard]] perf_sample apply(perf_sample s) const noexcept {
    if (t_maximize) s.f_t_raw = -s.f_t_raw;
    if (a_maximize) s.f_a_raw = -s.f_a_raw;
    return s;
  }
};

// Source of (f_t, f_a). Implementations are read-only after construction.
class measurement_oracle {
public:
  virtual ~measurement_oracle() = default;
  [[nodiscard]] virtual const config_space& space() const = 0;
  [[nodiscard]] virtual perf_sample evaluate(const configuration& c) const = 0;
};

// Wraps a callable; mostly useful for tests and analytic landscapes.
class function_oracle final : public measurement_oracle {
public:
  using function_type = std::function<perf_sample(const configuration&)>;

  function_oracle(config_space space, function_type fn) : space_(std::move(space)), fn_(std::move(fn)) {}

  [[nodiscard]] const config_space& space() const override { return space_; }
  [[nodiscard]] perf_sample evaluate(const configuration& c) const override { return fn_(c); }

private:
  config_space space_;
  function_type fn_;
};

// Budget-accounted cache of measurements. Only first-time configurations are
// charged; b never exceeds B.
class budget_ledger {
public:
  explicit budget_ledger(std::size_t budget) : budget_(budget) {}

  [[nodiscard]] std::size_t budget() const noexcept { return budget_; }
  [[nodiscard]] std::size_t consumed() const noexcept { return consumed_; }
  [[nodiscard]] bool exhausted() const noexcept { return consumed_ >= budget_; }

  [[nodiscard]] const perf_sample* lookup(const configuration& c) const {
    auto it = cache_.find(c);
    return it == cache_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] bool contains(const configuration& c) const { return cache_.contains(c); }

  // Samples in the order they were charged.
  [[nodiscard]] const std::vector<perf_sample>& history() const noexcept { return history_; }

  void record(const configuration& c, const perf_sample& s) {
    cache_.emplace(c, s);
    history_.push_back(s);
    ++consumed_;
  }

private:
  std::size_t budget_;
  std::size_t consumed_ = 0;
  std::unordered_map<configuration, perf_sample, configuration_hash> cache_;
  std::vector<perf_sample> history_;
};

inline perf_sample measure(const measurement_oracle& oracle, const configuration& config,
                           budget_ledger& ledger) {
  if (!validate(oracle.space(), config))
    throw error("configuration is not valid for the oracle's space");
  if (const auto* cached = ledger.lookup(config)) return *cached;
  if (ledger.exhausted())
    throw budget_exhausted("budget exhausted after " + std::to_string(ledger.consumed()) +
                           " measurements");
  auto sample = oracle.evaluate(config);
  if (!std::isfinite(sample.f_t_raw) || !std::isfinite(sample.f_a_raw))
    throw error("oracle returned a non-finite measurement");
  ledger.record(config, sample);
  return sample;
}

// ---------------------------------------------------------------------------
// Table-backed oracle
// ---------------------------------------------------------------------------

class measurement_table final : public measurement_oracle {
public:
  using row_map = std::unordered_map<configuration, perf_sample, configuration_hash>;

  measurement_table(config_space space, row_map rows) : space_(std::move(space)), rows_(std::move(rows)) {}

  [[nodiscard]] const config_space& space() const override { return space_; }

  [[nodiscard]] perf_sample evaluate(const configuration& c) const override {
    auto it = rows_.find(c);
    if (it == rows_.end())
      throw unmeasured_configuration("unmeasured configuration: " + format_config(space_, c));
    return it->second;
  }

  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
  [[nodiscard]] const row_map& rows() const noexcept { return rows_; }

private:
  config_space space_;
  row_map rows_;
};

struct table_schema {
  std::string target_column;
  std::string auxiliary_column;
  objective_orientation orientation;
  char delimiter = ',';
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Reads delimited text: a header naming every option plus the two objective
// columns, then one row per configuration. '#' lines and blank lines are skipped.
inline measurement_table parse_table(std::istream& in, const config_space& space,
                                     const table_schema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    header = detail::split(t, schema.delimiter);
    break;
  }
  if (header.empty()) throw parse_error(line_no, "missing header row");

  // column index -> option index, or -1 / -2 for target / auxiliary.
  std::vector<int> role(header.size(), -3);
  std::vector<bool> seen(space.size(), false);
  bool have_t = false;
  bool have_a = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == schema.target_column) {
      role[c] = -1;
      have_t = true;
    } else if (name == schema.auxiliary_column) {
      role[c] = -2;
      have_a = true;
    } else if (auto idx = space.find(name)) {
      if (seen[*idx]) throw parse_error(line_no, "duplicate column '" + name + "'");
      seen[*idx] = true;
      role[c] = static_cast<int>(*idx);
    } else {
      throw parse_error(line_no, "unknown option column '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < space.size(); ++i)
    if (!seen[i]) throw parse_error(line_no, "header lacks declared option '" + space[i].name() + "'");
  if (!have_t) throw parse_error(line_no, "header lacks objective column '" + schema.target_column + "'");
  if (!have_a) throw parse_error(line_no, "header lacks objective column '" + schema.auxiliary_column + "'");

  measurement_table::row_map rows;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = detail::split(t, schema.delimiter);
    if (cells.size() != header.size())
      throw parse_error(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
    configuration cfg;
    cfg.values.assign(space.size(), 0);
    perf_sample sample;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (role[c] >= 0) {
        auto idx = static_cast<std::size_t>(role[c]);
        auto v = space[idx].parse(cells[c]);
        if (!v) throw parse_error(line_no, "value '" + cells[c] + "' outside domain of '" + header[c] + "'");
        cfg.values[idx] = *v;
      } else {
        auto v = detail::parse_double(cells[c]);
        if (!v) throw parse_error(line_no, "malformed objective value '" + cells[c] + "'");
        (role[c] == -1 ? sample.f_t_raw : sample.f_a_raw) = *v;
      }
    }
    sample = schema.orientation.apply(sample);
    auto [it, inserted] = rows.emplace(cfg, sample);
    if (!inserted && !(it->second == sample))
      throw parse_error(line_no, "conflicting duplicate row for " + format_config(space, cfg));
  }
  return measurement_table{space, std::move(rows)};
}

inline measurement_table load_table(const std::string& path, const config_space& space,
                                    const table_schema& schema) {
  std::ifstream in(path);
  if (!in) throw error("cannot open measurement table '" + path + "'");
  return parse_table(in, space, schema);
}

// ---------------------------------------------------------------------------
// Synthetic NK-style landscape
// ---------------------------------------------------------------------------

struct landscape_spec {
  std::vector<std::size_t> domain_sizes;  // one per option, each >= 2
  std::size_t k = 1;                      // epistatic neighbours per option
  std::uint64_t seed = 0;
  double correlation = 0.0;  // f_a = c*f_t + sqrt(1-c^2)*independent, c in [-1, 1]
};

// f(x) = mean_i table_i[x_i, x_{i+1}, ..., x_{i+k}] (indices cyclic), tables
// filled with seeded uniform [0,1) values.
class nk_landscape final : public measurement_oracle {
public:
  explicit nk_landscape(landscape_spec spec) : spec_(std::move(spec)), space_(make_space(spec_)) {
    const auto n = spec_.domain_sizes.size();
    if (spec_.k < 1 || spec_.k >= n)
      throw error("landscape ruggedness k must satisfy 1 <= k < n_options");
    if (!(spec_.correlation >= -1.0 && spec_.correlation <= 1.0))
      throw error("landscape correlation must lie in [-1, 1]");

    std::seed_seq t_seq{spec_.seed, std::uint64_t{1}};
    std::seed_seq a_seq{spec_.seed, std::uint64_t{2}};
    rng_type t_rng(t_seq);
    rng_type a_rng(a_seq);
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    t_tables_.resize(n);
    a_tables_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t cells = 1;
      for (std::size_t j = 0; j <= spec_.k; ++j) cells *= spec_.domain_sizes[(i + j) % n];
      t_tables_[i].resize(cells);
      a_tables_[i].resize(cells);
      for (auto& v : t_tables_[i]) v = unit(t_rng);
      for (auto& v : a_tables_[i]) v = unit(a_rng);
    }
  }

  [[nodiscard]] const config_space& space() const override { return space_; }
  [[nodiscard]] const landscape_spec& spec() const noexcept { return spec_; }

  [[nodiscard]] perf_sample evaluate(const configuration& c) const override {
    const auto n = space_.size();
    double t = 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx = 0;
      for (std::size_t j = 0; j <= spec_.k; ++j) {
        auto o = (i + j) % n;
        idx = idx * spec_.domain_sizes[o] + space_[o].index_of(c.values[o]);
      }
      t += t_tables_[i][idx];
      a += a_tables_[i][idx];
    }
    t /= static_cast<double>(n);
    a /= static_cast<double>(n);
    const double rho = spec_.correlation;
    return {t, rho * t + std::sqrt(1.0 - rho * rho) * a};
  }

private:
  static config_space make_space(const landscape_spec& spec) {
    std::vector<option_spec> opts;
    for (std::size_t i = 0; i < spec.domain_sizes.size(); ++i) {
      auto d = spec.domain_sizes[i];
      if (d < 2) throw error("landscape domain sizes must be >= 2");
      auto name = "x" + std::to_string(i);
      opts.push_back(d == 2 ? option_spec::binary(name)
                            : option_spec::integer(name, 0, static_cast<int>(d) - 1));
    }
    return config_space{std::move(opts)};
  }

  landscape_spec spec_;
  config_space space_;
  std::vector<std::vector<double>> t_tables_;
  std::vector<std::vector<double>> a_tables_;
};

inline std::unique_ptr<measurement_oracle> synthetic_landscape(landscape_spec spec) {
  return std::make_unique<nk_landscape>(std::move(spec));
}

}  // namespace admmo
