#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <admmo/version.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"AdMMO configuration tuner"};
  app.set_version_flag("--version", std::string(admmo::version));
  app.require_subcommand(1);

  admmo::cli::overrides ov;
  std::string spec_path;
  std::string campaign_dir;
  std::size_t jobs = 1;
  bool force = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "run-spec JSON file")->required();
    sub->add_option("--seed", ov.seed, "base random seed");
    sub->add_option("--budget", ov.budget, "measurement budget (replaces the spec's budget list)");
    sub->add_option("--optimizer", ov.optimizer, "optimizer label, or comma-separated labels for bench");
    sub->add_option("--p", ov.p, "target proportion of unique nondominated configurations");
    sub->add_option("--out", ov.out, "output directory");
  };

  auto* tune = app.add_subcommand("tune", "run one optimizer once");
  add_common(tune);

  auto* bench = app.add_subcommand("bench", "run a benchmark campaign");
  add_common(bench);
  bench->add_option("--repeats", ov.repeats, "repeats per optimizer, case and budget");
  bench->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  bench->add_flag("--force", force, "overwrite an existing campaign directory");

  auto* report = app.add_subcommand("report", "render tables and plot data of a campaign");
  report->add_option("campaign", campaign_dir, "campaign output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (tune->parsed()) return admmo::cli::cmd_tune(spec_path, ov, std::cout, std::cerr);
  if (bench->parsed()) {
    admmo::cli::bench_options opts{ov, jobs, force};
    return admmo::cli::cmd_bench(spec_path, opts, std::cout, std::cerr);
  }
  return admmo::cli::cmd_report(campaign_dir, std::cout, std::cerr);
}
