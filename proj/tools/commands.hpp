#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <admmo/tuner.hpp>

#include "run_spec.hpp"

namespace admmo::cli {

// Provenance lines written at the top of every output file.
struct provenance {
  std::string spec_digest;
  std::uint64_t seed = 0;
};

void write_trajectory_csv(std::ostream& out, const provenance& prov, const std::string& run_id,
                          const tuning_run& run);

struct trajectory_record {
  std::string run_id;
  trajectory_row row;
};

// Reads a file written by write_trajectory_csv. Throws admmo::error when malformed.
std::vector<trajectory_record> read_trajectory_csv(const std::filesystem::path& path);

// One optimizer, one budget, one seed. Returns the process exit status.
int cmd_tune(const std::filesystem::path& spec_path, const overrides& ov, std::ostream& out, std::ostream& err);

struct bench_options {
  overrides ov;
  std::size_t jobs = 1;
  bool force = false;
};

// Full campaign plus statistics; writes trajectories/ and summary.json.
int cmd_bench(const std::filesystem::path& spec_path, const bench_options& opts, std::ostream& out,
              std::ostream& err);

// Renders the tables of a finished campaign and writes plot data under report/.
int cmd_report(const std::filesystem::path& campaign_dir, std::ostream& out, std::ostream& err);

}  // namespace admmo::cli
