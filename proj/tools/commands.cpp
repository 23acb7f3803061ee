#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include <admmo/harness.hpp>
#include <admmo/version.hpp>

namespace admmo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* trajectory_header = "run_id,iteration,b,w,p_prime,o,best_f_t_raw";

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

double parse_cell_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw error("malformed number '" + s + "'");
  return v;
}

json provenance_json(const provenance& prov) {
  return json{{"artifact_version", version}, {"spec_sha256", prov.spec_digest}, {"seed", prov.seed}};
}

std::string safe_name(std::string s) {
  for (auto& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot write '" + path.string() + "'");
  f << text;
}

json config_json(const config_space& space, const configuration& c) {
  json j = json::object();
  for (std::size_t i = 0; i < space.size(); ++i) j[space[i].name()] = space[i].format(c.values[i]);
  return j;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const provenance& prov, const std::string& run_id,
                          const tuning_run& run) {
  out << "# artifact_version " << version << "\n";
  out << "# spec_sha256 " << prov.spec_digest << "\n";
  out << "# seed " << prov.seed << "\n";
  out << trajectory_header << "\n";
  for (const auto& r : run.trajectory) {
    out << run_id << ',' << r.iteration << ',' << r.consumed << ',' << fmt_double(r.w) << ','
        << fmt_double(r.p_prime) << ',' << r.stagnation << ',' << fmt_double(r.best_f_t_raw) << "\n";
  }
}

std::vector<trajectory_record> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open trajectory '" + path.string() + "'");
  std::vector<trajectory_record> out;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != trajectory_header) throw error(path.string() + ": unexpected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw error(path.string() + ": line " + std::to_string(line_no) + " is malformed");
    try {
      trajectory_record rec;
      rec.run_id = cells[0];
      rec.row.iteration = std::stoull(cells[1]);
      rec.row.consumed = std::stoull(cells[2]);
      rec.row.w = parse_cell_double(cells[3]);
      rec.row.p_prime = parse_cell_double(cells[4]);
      rec.row.stagnation = std::stoull(cells[5]);
      rec.row.best_f_t_raw = parse_cell_double(cells[6]);
      out.push_back(rec);
    } catch (const std::exception&) {
      throw error(path.string() + ": line " + std::to_string(line_no) + " is malformed");
    }
  }
  if (!header_seen) throw error(path.string() + ": missing header");
  return out;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

int cmd_tune(const fs::path& spec_path, const overrides& ov, std::ostream& out, std::ostream& err) {
  try {
    auto spec = load_run_spec(spec_path);
    apply_overrides(spec, ov);
    const auto& kase = spec.cases.front();
    const auto& opt = spec.optimizers.front();
    auto params = spec.params;
    params.budget = spec.budgets.front();

    auto run = run_optimizer(opt, *kase.oracle, params, spec.seed);

    fs::create_directories(spec.output);
    provenance prov{spec.digest, spec.seed};
    const auto run_id = safe_name(kase.id) + "/" + run.optimizer + "/b" + std::to_string(params.budget) +
                        "/s" + std::to_string(spec.seed);
    {
      std::ofstream f(spec.output / "trajectory.csv", std::ios::binary);
      if (!f) throw error("cannot write trajectory into '" + spec.output.string() + "'");
      write_trajectory_csv(f, prov, run_id, run);
    }
    const auto& space = kase.oracle->space();
    json result{{"provenance", provenance_json(prov)},
                {"case", kase.id},
                {"optimizer", run.optimizer},
                {"budget", params.budget},
                {"consumed", run.consumed()},
                {"best_config", config_json(space, run.best_config)},
                {"best_f_t_raw", run.best.f_t_raw},
                {"best_f_a_raw", run.best.f_a_raw}};
    write_text(spec.output / "result.json", result.dump(2) + "\n");

    out << "optimizer " << run.optimizer << " budget " << params.budget << " seed " << spec.seed << "\n";
    out << "measurements " << run.consumed() << "\n";
    out << "best_f_t_raw " << fmt_double(run.best.f_t_raw) << "\n";
    out << "best_config " << format_config(space, run.best_config) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "admmo tune: " << e.what() << "\n";
    return 1;
  }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

namespace {

bool is_reference(const optimizer_spec& o) {
  return o.kind == optimizer_kind::admmo && o.duplicates == duplicates_mode::partial &&
         o.trigger == trigger_mode::progressive;
}

json speedup_json(const speedup_result& s) {
  json j{{"b_star", s.b_star}, {"t_star", s.t_star}};
  if (s.achieved()) {
    j["m"] = *s.m;
    j["s"] = s.value();
  } else {
    j["m"] = nullptr;
    j["s"] = nullptr;
  }
  return j;
}

}  // namespace

int cmd_bench(const fs::path& spec_path, const bench_options& opts, std::ostream& out, std::ostream& err) {
  try {
    auto spec = load_run_spec(spec_path);
    apply_overrides(spec, opts.ov);

    const auto dir = spec.output;
    if (fs::exists(dir) && !fs::is_empty(dir)) {
      if (!opts.force) {
        err << "admmo bench: output directory '" << dir.string()
            << "' is not empty; pass --force to overwrite\n";
        return 2;
      }
      fs::remove_all(dir / "trajectories");
      fs::remove_all(dir / "report");
      fs::remove(dir / "summary.json");
    }
    fs::create_directories(dir / "trajectories");

    campaign_config cfg;
    cfg.budgets = spec.budgets;
    cfg.repeats = spec.repeats;
    cfg.base_seed = spec.seed;
    cfg.params = spec.params;
    cfg.jobs = opts.jobs;
    const auto results = run_campaign(spec.cases, spec.optimizers, cfg);

    std::string reference;
    for (const auto& o : spec.optimizers)
      if (is_reference(o)) {
        reference = label_of(o);
        break;
      }

    json summary{{"provenance", provenance_json({spec.digest, spec.seed})},
                 {"repeats", spec.repeats},
                 {"budgets", spec.budgets},
                 {"reference", reference.empty() ? json(nullptr) : json(reference)}};
    json optimizers = json::array();
    for (const auto& o : spec.optimizers) optimizers.push_back(label_of(o));
    summary["optimizers"] = optimizers;

    json runs = json::array();
    json cases = json::array();
    std::size_t failed = 0;
    std::map<std::string, std::vector<const case_result*>> by_case;
    for (const auto& cr : results)
      if (!cr.failure) by_case[cr.case_id].push_back(&cr);
    std::map<std::string, normalized_performance> normalized;
    for (const auto& [id, list] : by_case) normalized[id] = normalized_target_performance(list);

    for (const auto& cr : results) {
      json c{{"case", cr.case_id}, {"budget", cr.budget}};
      if (cr.failure) {
        ++failed;
        c["failure"] = *cr.failure;
        cases.push_back(c);
        err << "admmo bench: case " << cr.case_id << " budget " << cr.budget << " failed: " << *cr.failure
            << "\n";
        continue;
      }
      c["failure"] = nullptr;
      const auto& norm = normalized.at(cr.case_id);
      if (norm.zero_range) {
        c["warning"] = "all best values identical; normalized performance set to 0";
      }
      json nm = json::object();
      json mean_final = json::object();
      json curves = json::object();
      for (const auto& name : cr.optimizers) {
        nm[name] = norm.means.at(cr.budget).at(name);
        auto finals = cr.final_bests(name);
        double sum = 0.0;
        for (double v : finals) sum += v;
        mean_final[name] = sum / static_cast<double>(finals.size());
        curves[name] = mean_trajectory(cr.runs.at(name), cr.budget);
      }
      c["normalized_mean"] = nm;
      c["mean_final_best"] = mean_final;
      c["mean_curve"] = curves;

      json comps = json::array();
      for (const auto& pc : compare_all_pairs(cr)) {
        comps.push_back({{"first", pc.first},
                         {"second", pc.second},
                         {"p_value", pc.p_value},
                         {"a12", pc.a12},
                         {"effect", std::string(stats::to_string(pc.effect))}});
      }
      c["comparisons"] = comps;

      if (!reference.empty()) {
        json sp = json::object();
        const auto ref_curve = mean_trajectory(cr.runs.at(reference), cr.budget);
        for (const auto& name : cr.optimizers) {
          if (name == reference) continue;
          sp[name] = speedup_json(speedup(mean_trajectory(cr.runs.at(name), cr.budget), ref_curve));
        }
        c["speedup"] = sp;
      }
      cases.push_back(c);

      for (const auto& name : cr.optimizers) {
        const auto& rs = cr.runs.at(name);
        for (std::size_t r = 0; r < rs.size(); ++r) {
          const auto file = safe_name(cr.case_id) + "__" + safe_name(name) + "__b" + std::to_string(cr.budget) +
                            "__r" + std::to_string(r) + ".csv";
          const auto seed = repeat_seed(spec.seed, r);
          std::ofstream f(dir / "trajectories" / file, std::ios::binary);
          if (!f) throw error("cannot write trajectory file '" + file + "'");
          const auto run_id = safe_name(cr.case_id) + "/" + name + "/b" + std::to_string(cr.budget) + "/r" +
                              std::to_string(r);
          write_trajectory_csv(f, {spec.digest, seed}, run_id, rs[r]);
          runs.push_back({{"case", cr.case_id},
                          {"optimizer", name},
                          {"budget", cr.budget},
                          {"repeat", r},
                          {"seed", seed},
                          {"best_f_t_raw", rs[r].best.f_t_raw},
                          {"file", "trajectories/" + file}});
        }
      }
    }
    summary["cases"] = cases;
    summary["runs"] = runs;
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    out << "campaign: " << results.size() - failed << " of " << results.size() << " case-budget cells completed, "
        << runs.size() << " runs\n";
    out << "summary: " << (dir / "summary.json").string() << "\n";
    return failed == results.size() ? 1 : 0;
  } catch (const std::exception& e) {
    err << "admmo bench: " << e.what() << "\n";
    return 1;
  }
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const fs::path& campaign_dir, std::ostream& out, std::ostream& err) {
  try {
    const auto summary_path = campaign_dir / "summary.json";
    if (!fs::exists(summary_path)) throw error("no summary.json in '" + campaign_dir.string() + "'");
    json summary;
    {
      std::ifstream in(summary_path);
      try {
        summary = json::parse(in);
      } catch (const json::exception& e) {
        throw error("corrupt summary.json: " + std::string(e.what()));
      }
    }
    const auto optimizers = summary.at("optimizers").get<std::vector<std::string>>();
    const auto& cases = summary.at("cases");

    // Normalized target performance, one column per case and budget.
    std::ostringstream table;
    std::vector<const json*> ok;
    for (const auto& c : cases)
      if (c.at("failure").is_null()) ok.push_back(&c);
    if (ok.empty()) throw error("campaign has no completed cases");

    std::size_t name_w = 10;
    for (const auto& o : optimizers) name_w = std::max(name_w, o.size() + 2);
    table << "Mean normalized target performance (smaller is better; * marks the best per column)\n";
    table << std::left << std::setw(static_cast<int>(name_w)) << "optimizer";
    for (const auto* c : ok) {
      auto head = c->at("case").get<std::string>() + "@" + std::to_string(c->at("budget").get<std::size_t>());
      table << std::right << std::setw(static_cast<int>(std::max<std::size_t>(head.size(), 9) + 2)) << head;
    }
    table << "\n";
    for (const auto& o : optimizers) {
      table << std::left << std::setw(static_cast<int>(name_w)) << o;
      for (const auto* c : ok) {
        const auto& nm = c->at("normalized_mean");
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [k, v] : nm.items()) best = std::min(best, v.get<double>());
        const double v = nm.at(o).get<double>();
        auto head = c->at("case").get<std::string>() + "@" + std::to_string(c->at("budget").get<std::size_t>());
        auto cell = fixed(v) + (v == best ? "*" : " ");
        table << std::right << std::setw(static_cast<int>(std::max<std::size_t>(head.size(), 9) + 2)) << cell;
      }
      table << "\n";
    }

    // Speedup at the largest budget of every case.
    std::ostringstream sp;
    if (!summary.at("reference").is_null()) {
      const auto ref = summary.at("reference").get<std::string>();
      std::map<std::string, const json*> largest;
      for (const auto* c : ok) {
        const auto id = c->at("case").get<std::string>();
        if (!largest.contains(id) || largest[id]->at("budget") < c->at("budget")) largest[id] = c;
      }
      sp << "Speedup s = b/m of " << ref << " over each counterpart at the largest budget (✗ = not achieved)\n";
      sp << std::left << std::setw(static_cast<int>(name_w)) << "optimizer";
      for (const auto& [id, c] : largest) sp << std::right << std::setw(static_cast<int>(std::max<std::size_t>(id.size(), 8) + 2)) << id;
      sp << "\n";
      for (const auto& o : optimizers) {
        if (o == ref) continue;
        sp << std::left << std::setw(static_cast<int>(name_w)) << o;
        for (const auto& [id, c] : largest) {
          const auto& s = c->at("speedup").at(o);
          const auto cell = s.at("s").is_null() ? std::string("✗") : fixed(s.at("s").get<double>(), 2);
          // The cross mark is three bytes wide in UTF-8 but one column on screen.
          const auto width = std::max<std::size_t>(id.size(), 8) + 2 + (s.at("s").is_null() ? 2 : 0);
          sp << std::right << std::setw(static_cast<int>(width)) << cell;
        }
        sp << "\n";
      }
    }

    // w and p' series from every trajectory.
    std::ostringstream series;
    series << "case,optimizer,budget,repeat,iteration,b,w,p_prime\n";
    for (const auto& r : summary.at("runs")) {
      const auto file = campaign_dir / r.at("file").get<std::string>();
      for (const auto& rec : read_trajectory_csv(file)) {
        series << r.at("case").get<std::string>() << ',' << r.at("optimizer").get<std::string>() << ','
               << r.at("budget").get<std::size_t>() << ',' << r.at("repeat").get<std::size_t>() << ','
               << rec.row.iteration << ',' << rec.row.consumed << ',' << fmt_double(rec.row.w) << ','
               << fmt_double(rec.row.p_prime) << "\n";
      }
    }

    const auto report_dir = campaign_dir / "report";
    fs::create_directories(report_dir);
    write_text(report_dir / "normalized_performance.txt", table.str());
    write_text(report_dir / "speedup.txt", sp.str());
    write_text(report_dir / "weight_series.csv", series.str());

    out << table.str() << "\n" << sp.str();
    out << "\nplot data: " << (report_dir / "weight_series.csv").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "admmo report: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace admmo::cli
