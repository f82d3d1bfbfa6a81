#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "procause/error.hpp"
#include "procause/pipeline.hpp"
#include "procause/synthetic.hpp"

namespace fs = std::filesystem;
using namespace procause;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2 };

struct Options {
  std::string config;
  std::string input;
  std::string format;
  std::string out;
  std::string treatments;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cases;
  std::string log_level = "info";
};

// Default simulate scenario: subgroup effect 0.3 vs 0.0, no confounding.
SyntheticScenario planted_scenario() {
  SyntheticScenario s;
  s.confounder_rate = 0.5;
  s.subgroup_rate = 0.3;
  s.treatment_rate = {0.5, 0.5};
  s.control_outcome = {{{0.2, 0.2}, {0.2, 0.2}}};
  s.treated_outcome = {{{0.2, 0.5}, {0.2, 0.5}}};
  s.n_cases = 20000;
  s.seed = 42;
  return s;
}

PipelineConfig simulation_config(const fs::path& log_file) {
  PipelineConfig c;
  c.input.path = log_file.filename();
  c.input.format = "csv";
  c.input.csv.attributes = {std::string(kConfounderAttribute), std::string(kSubgroupAttribute),
                            std::string(kTreatmentAttribute), std::string(kOutcomeAttribute)};
  c.schema = synthetic_schema(true);
  c.outcome = std::string(kOutcomeAttribute);
  c.positive_labels = {"1"};
  // treated outcome rates are well below the usual 0.55, so the product
  // confidence of a (0 -> 1) rule pair needs a lower bar here
  c.rules.min_confidence = 0.2;
  c.output_dir = "out";
  return c;
}

PipelineConfig load(const Options& o) {
  if (o.config.empty()) throw ConfigError("cli", "--config is required");
  PipelineConfig c = load_config(o.config);
  if (!o.input.empty()) c.input.path = o.input;
  if (!o.format.empty()) c.input.format = o.format;
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  return c;
}

void report(const StageReport& r) {
  for (const auto& p : r.written) spdlog::info("wrote {}", p.string());
  if (!r.warnings.empty()) spdlog::info("{} warning(s)", r.warnings.size());
}

void simulate(const Options& o) {
  SyntheticScenario s = planted_scenario();
  if (!o.scenario.empty()) s = scenario_from_json(read_file(o.scenario));
  if (o.seed) s.seed = *o.seed;
  if (o.cases) s.n_cases = *o.cases;
  s.validate();
  const fs::path dir = o.out.empty() ? fs::path("simulation") : fs::path(o.out);
  fs::create_directories(dir);

  const SyntheticLog sim = generate(s);
  const fs::path log_file = dir / "event_log.csv";
  {
    std::ofstream out(log_file, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("synthetic", fmt::format("cannot write '{}'", log_file.string()));
    write_csv(out, sim.log,
              {std::string(kConfounderAttribute), std::string(kSubgroupAttribute),
               std::string(kTreatmentAttribute), std::string(kOutcomeAttribute)});
  }

  nlohmann::ordered_json truth{{"scenario", nlohmann::ordered_json::parse(scenario_to_json(s))},
                               {"true_cate", {{"subgroup=0", sim.true_cate.at(0)}, {"subgroup=1", sim.true_cate.at(1)}}},
                               {"naive_uplift", naive_uplift(s)}};
  write_file(dir / "ground_truth.json", truth.dump(2) + "\n");
  write_file(dir / "pipeline.json", config_to_json(simulation_config(log_file)));
  spdlog::info("simulated {} cases into {}", s.n_cases, dir.string());
}

int fail(int code, std::string_view module, std::string_view message) {
  std::cerr << fmt::format("procause: {} error: {}\n", module, message);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("procause"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Causal treatment recommendations from process event logs"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);
  Options o;
  app.add_option("--log-level", o.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  const auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (overrides the config)");
  };
  const auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "event log (overrides the config)");
    cmd->add_option("--format", o.format, "xes or csv")->check(CLI::IsMember({"xes", "csv"}));
  };

  auto* run = app.add_subcommand("run", "ingest, mine, uplift and rank in one go");
  add_config(run);
  add_input(run);
  auto* ingest = app.add_subcommand("ingest", "parse and encode the log into a case table");
  add_config(ingest);
  add_input(ingest);
  auto* mine = app.add_subcommand("mine", "mine action rules and candidate treatments");
  add_config(mine);
  auto* uplift = app.add_subcommand("uplift", "fit one uplift tree per treatment");
  add_config(uplift);
  uplift->add_option("--treatments", o.treatments, "treatments file (default: the mined one)")
      ->check(CLI::ExistingFile);
  auto* rank_cmd = app.add_subcommand("rank", "rank segments by net value");
  add_config(rank_cmd);
  auto* sim = app.add_subcommand("simulate", "generate a synthetic log with known effects");
  sim->add_option("--out", o.out, "output directory")->default_str("simulation");
  sim->add_option("--seed", o.seed, "random seed");
  sim->add_option("--cases", o.cases, "number of cases")->check(CLI::PositiveNumber);
  sim->add_option("--scenario", o.scenario, "scenario file (JSON)")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  spdlog::set_level(spdlog::level::from_str(o.log_level));

  try {
    if (*sim) {
      simulate(o);
    } else if (*run) {
      report(run_pipeline(load(o)));
    } else if (*ingest) {
      report(run_ingest(load(o)));
    } else if (*mine) {
      report(run_mine(load(o)));
    } else if (*uplift) {
      std::optional<fs::path> t;
      if (!o.treatments.empty()) t = o.treatments;
      report(run_uplift(load(o), t));
    } else if (*rank_cmd) {
      report(run_rank(load(o)));
    }
  } catch (const ConfigError& e) {
    return fail(kUsage, e.module(), e.what());
  } catch (const ParseError& e) {
    if (e.byte_offset()) return fail(kData, e.module(), fmt::format("{} (byte {})", e.what(), *e.byte_offset()));
    return fail(kData, e.module(), e.what());
  } catch (const Error& e) {
    return fail(kData, e.module(), e.what());
  } catch (const std::exception& e) {
    return fail(kData, "internal", e.what());
  }
  return kOk;
}
