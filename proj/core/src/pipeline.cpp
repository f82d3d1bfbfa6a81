#include "procause/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "procause/error.hpp"

#ifndef PROCAUSE_VERSION
#define PROCAUSE_VERSION "0.0.0"
#endif

namespace procause {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kModule = "cli";

template <typename F>
auto config_guard(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(kModule, fmt::format("invalid config: {}", e.what()));
  }
}

template <typename F>
auto artifact_guard(std::string_view name, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(kModule, fmt::format("invalid {}: {}", name, e.what()));
  }
}

std::string_view kind_name(AttributeKind k) { return k == AttributeKind::numeric ? "numeric" : "categorical"; }

AttributeKind parse_kind(const std::string& s) {
  if (s == "numeric") return AttributeKind::numeric;
  if (s == "categorical") return AttributeKind::categorical;
  throw ConfigError(kModule, fmt::format("unknown attribute kind '{}'", s));
}

std::string_view source_name(AttributeSource::Type t) {
  switch (t) {
    case AttributeSource::Type::raw:
      return "raw";
    case AttributeSource::Type::count:
      return "count";
    case AttributeSource::Type::last_value:
      return "last_value";
  }
  return "raw";
}

AttributeSource::Type parse_source(const std::string& s) {
  if (s == "raw") return AttributeSource::Type::raw;
  if (s == "count") return AttributeSource::Type::count;
  if (s == "last_value") return AttributeSource::Type::last_value;
  throw ConfigError(kModule, fmt::format("unknown attribute source '{}'", s));
}

ordered_json schema_json(const AttributeSchema& a) {
  ordered_json j{{"name", a.name}, {"kind", kind_name(a.kind)}, {"controllable", a.controllable}};
  if (a.source.type != AttributeSource::Type::raw) {
    j["source"] = ordered_json{{"type", source_name(a.source.type)}, {"reference", a.source.reference}};
  }
  return j;
}

template <typename Json>
AttributeSchema schema_from_json(const Json& j) {
  AttributeSchema a;
  a.name = j.at("name").template get<std::string>();
  a.kind = parse_kind(j.value("kind", std::string("categorical")));
  a.controllable = j.value("controllable", false);
  if (j.contains("source")) {
    const auto& s = j.at("source");
    a.source.type = parse_source(s.at("type").template get<std::string>());
    a.source.reference = s.value("reference", std::string{});
  }
  return a;
}

ordered_json cost_json(const CostModel& c) {
  return ordered_json{{"outcome_value", c.outcome_value}, {"impression_cost", c.impression_cost}};
}

template <typename Json>
CostModel cost_from_json(const Json& j) {
  return {j.value("outcome_value", 1.0), j.value("impression_cost", 0.0)};
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

ordered_json condition_json(const PathCondition& c) {
  static constexpr std::string_view ops[] = {"<=", ">", "=", "!="};
  ordered_json j{{"attribute", c.attribute}, {"op", ops[static_cast<int>(c.op)]}};
  if (c.op == PathCondition::Op::less_equal || c.op == PathCondition::Op::greater) {
    j["threshold"] = c.threshold;
  } else {
    j["value"] = c.category;
  }
  return j;
}

template <typename Json>
PathCondition condition_from_json(const Json& j) {
  PathCondition c;
  c.attribute = j.at("attribute").template get<std::string>();
  const auto op = j.at("op").template get<std::string>();
  if (op == "<=") {
    c.op = PathCondition::Op::less_equal;
  } else if (op == ">") {
    c.op = PathCondition::Op::greater;
  } else if (op == "=") {
    c.op = PathCondition::Op::equal;
  } else if (op == "!=") {
    c.op = PathCondition::Op::not_equal;
  } else {
    throw ParseError(kModule, fmt::format("unknown condition operator '{}'", op));
  }
  if (c.op == PathCondition::Op::less_equal || c.op == PathCondition::Op::greater) {
    c.threshold = j.at("threshold").template get<double>();
  } else {
    c.category = j.at("value").template get<std::string>();
  }
  return c;
}

fs::path stage_input(const PipelineConfig& config, std::string_view name) {
  const fs::path p = config.output_dir / name;
  if (!fs::exists(p)) {
    throw DataError(kModule, fmt::format("missing upstream artifact '{}'; run the previous stage first", p.string()));
  }
  return p;
}

void write_artifact(StageReport& report, const fs::path& path, std::string_view content) {
  write_file(path, content);
  report.written.push_back(path);
}

}  // namespace

std::string_view library_version() { return PROCAUSE_VERSION; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(kModule, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(kModule, fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError(kModule, fmt::format("failed writing '{}'", path.string()));
}

// --- config -----------------------------------------------------------------

void PipelineConfig::validate() const {
  if (input.format != "xes" && input.format != "csv") {
    throw ConfigError(kModule, fmt::format("input format must be xes or csv, got '{}'", input.format));
  }
  if (outcome.empty()) throw ConfigError(kModule, "schema.outcome is required");
  if (default_bins < 2) throw ConfigError(kModule, "binning.default_k must be >= 2");
  rules.validate();
  tree.validate();
  if (costs.fallback) costs.fallback->validate();
  for (const auto& [_, c] : costs.per_treatment) c.validate();
  if (output_dir.empty()) throw ConfigError(kModule, "output directory is required");
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  return config_guard([&] {
    const auto j = nlohmann::json::parse(text);
    PipelineConfig c;
    if (j.contains("input")) {
      const auto& in = j.at("input");
      c.input.path = resolve(base_dir, in.value("path", std::string{}));
      c.input.format = in.value("format", c.input.format);
      if (in.contains("csv")) {
        const auto& m = in.at("csv");
        c.input.csv.case_id = m.value("case_id", c.input.csv.case_id);
        c.input.csv.activity = m.value("activity", c.input.csv.activity);
        c.input.csv.timestamp = m.value("timestamp", c.input.csv.timestamp);
        c.input.csv.timestamp_format = m.value("timestamp_format", c.input.csv.timestamp_format);
        c.input.csv.attributes = m.value("attributes", std::vector<std::string>{});
      }
    }
    const auto& schema = j.at("schema");
    c.outcome = schema.at("outcome").get<std::string>();
    c.positive_labels = schema.value("positive_labels", c.positive_labels);
    for (const auto& a : schema.at("attributes")) c.schema.push_back(schema_from_json(a));
    if (std::none_of(c.schema.begin(), c.schema.end(), [&](const auto& a) { return a.name == c.outcome; })) {
      c.schema.push_back({c.outcome, AttributeKind::categorical, false, {}});
    }
    if (c.input.csv.attributes.empty()) {
      std::set<std::string> needed;
      for (const auto& a : c.schema) {
        if (a.source.type == AttributeSource::Type::raw) needed.insert(a.name);
        if (a.source.type == AttributeSource::Type::last_value) needed.insert(a.source.reference);
      }
      c.input.csv.attributes.assign(needed.begin(), needed.end());
    }
    if (j.contains("binning")) {
      const auto& b = j.at("binning");
      c.default_bins = b.value("default_k", c.default_bins);
      if (b.contains("attributes")) {
        for (const auto& [name, rule] : b.at("attributes").items()) {
          if (rule.contains("boundaries")) {
            c.binning[name] = ExplicitBoundaries{rule.at("boundaries").get<std::vector<double>>()};
          } else {
            c.binning[name] = EqualFrequency{rule.value("k", c.default_bins)};
          }
        }
      }
    }
    if (j.contains("rules")) {
      const auto& r = j.at("rules");
      c.rules.min_support = r.value("min_support", c.rules.min_support);
      c.rules.min_confidence = r.value("min_confidence", c.rules.min_confidence);
      c.rules.max_antecedent_length = r.value("max_antecedent_length", c.rules.max_antecedent_length);
    }
    if (j.contains("tree")) {
      const auto& t = j.at("tree");
      c.tree.max_depth = t.value("max_depth", c.tree.max_depth);
      c.tree.min_samples_split = t.value("min_samples_split", c.tree.min_samples_split);
      c.tree.min_samples_treatment = t.value("min_samples_treatment", c.tree.min_samples_treatment);
      c.tree.regularization = t.value("regularization", c.tree.regularization);
      c.tree.divergence = parse_divergence_kind(t.value("divergence", std::string("kl")));
      c.min_uplift = t.value("min_uplift", c.min_uplift);
    }
    if (j.contains("costs")) {
      const auto& k = j.at("costs");
      if (k.contains("default")) {
        if (k.at("default").is_null()) {
          c.costs.fallback.reset();
        } else {
          c.costs.fallback = cost_from_json(k.at("default"));
        }
      }
      if (k.contains("treatments")) {
        for (const auto& [label, model] : k.at("treatments").items()) {
          c.costs.per_treatment[label] = cost_from_json(model);
        }
      }
    }
    c.output_dir = resolve(base_dir, j.value("output_dir", c.output_dir.string()));
    c.validate();
    return c;
  });
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError(kModule, fmt::format("config file '{}' not found", path.string()));
  return parse_config(read_file(path), fs::absolute(path).parent_path());
}

std::string config_to_json(const PipelineConfig& c) {
  ordered_json attrs = ordered_json::array();
  for (const auto& a : c.schema) attrs.push_back(schema_json(a));
  ordered_json bins = ordered_json::object();
  for (const auto& [name, rule] : c.binning) {
    if (const auto* e = std::get_if<EqualFrequency>(&rule)) {
      bins[name] = ordered_json{{"k", e->k}};
    } else {
      bins[name] = ordered_json{{"boundaries", std::get<ExplicitBoundaries>(rule).cuts}};
    }
  }
  ordered_json per_treatment = ordered_json::object();
  for (const auto& [label, model] : c.costs.per_treatment) per_treatment[label] = cost_json(model);
  ordered_json j{
      {"input",
       {{"path", c.input.path.string()},
        {"format", c.input.format},
        {"csv",
         {{"case_id", c.input.csv.case_id},
          {"activity", c.input.csv.activity},
          {"timestamp", c.input.csv.timestamp},
          {"timestamp_format", c.input.csv.timestamp_format},
          {"attributes", c.input.csv.attributes}}}}},
      {"schema", {{"outcome", c.outcome}, {"positive_labels", c.positive_labels}, {"attributes", attrs}}},
      {"binning", {{"default_k", c.default_bins}, {"attributes", bins}}},
      {"rules",
       {{"min_support", c.rules.min_support},
        {"min_confidence", c.rules.min_confidence},
        {"max_antecedent_length", c.rules.max_antecedent_length}}},
      {"tree",
       {{"max_depth", c.tree.max_depth},
        {"min_samples_split", c.tree.min_samples_split},
        {"min_samples_treatment", c.tree.min_samples_treatment},
        {"regularization", c.tree.regularization},
        {"divergence", to_string(c.tree.divergence)},
        {"min_uplift", c.min_uplift}}},
      {"costs",
       {{"default", c.costs.fallback ? cost_json(*c.costs.fallback) : ordered_json(nullptr)},
        {"treatments", per_treatment}}},
      {"output_dir", c.output_dir.string()}};
  return j.dump(2) + "\n";
}

// --- case table -------------------------------------------------------------

std::string write_case_table(const CaseTable& table) {
  ordered_json schema = ordered_json::array();
  for (const auto& a : table.schema) schema.push_back(schema_json(a));
  ordered_json bins = ordered_json::object();
  for (const auto& [name, b] : table.bins) bins[name] = ordered_json{{"cuts", b.cuts}, {"labels", b.labels}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json features = ordered_json::object();
    for (const auto& a : table.schema) {
      const FeatureValue& v = row.features.at(a.name);
      if (const auto* s = std::get_if<std::string>(&v)) {
        features[a.name] = *s;
      } else if (const auto* d = std::get_if<double>(&v)) {
        features[a.name] = *d;
      } else {
        features[a.name] = nullptr;
      }
    }
    ordered_json r{{"case_id", row.case_id}, {"outcome", row.outcome}, {"features", std::move(features)}};
    if (!row.raw_numeric.empty()) r["raw"] = row.raw_numeric;
    rows.push_back(std::move(r));
  }
  ordered_json doc{{"outcome", table.outcome_name}, {"schema", schema}, {"bins", bins}, {"rows", rows}};
  return doc.dump(1) + "\n";
}

CaseTable read_case_table(std::string_view text) {
  return artifact_guard("case table", [&] {
    const auto doc = nlohmann::json::parse(text);
    CaseTable t;
    t.outcome_name = doc.at("outcome").get<std::string>();
    for (const auto& a : doc.at("schema")) t.schema.push_back(schema_from_json(a));
    for (const auto& [name, b] : doc.at("bins").items()) {
      t.bins[name] = Bins{b.at("cuts").get<std::vector<double>>(), b.at("labels").get<std::vector<std::string>>()};
    }
    for (const auto& r : doc.at("rows")) {
      CaseRecord row;
      row.case_id = r.at("case_id").get<std::string>();
      row.outcome = r.at("outcome").get<int>();
      const auto& f = r.at("features");
      for (const auto& a : t.schema) {
        const auto& v = f.at(a.name);
        if (v.is_string()) {
          row.features[a.name] = v.get<std::string>();
        } else if (v.is_number()) {
          row.features[a.name] = v.get<double>();
        } else {
          row.features[a.name] = std::monostate{};
        }
      }
      if (r.contains("raw")) row.raw_numeric = r.at("raw").get<std::map<std::string, double>>();
      t.rows.push_back(std::move(row));
    }
    return t;
  });
}

std::string case_summary(const CaseTable& table) {
  std::size_t positives = 0;
  for (const auto& r : table.rows) positives += static_cast<std::size_t>(r.outcome);
  ordered_json attrs = ordered_json::array();
  for (const auto& a : table.schema) {
    std::set<std::string> distinct;
    std::size_t missing = 0;
    for (const auto& r : table.rows) {
      const FeatureValue& v = r.features.at(a.name);
      if (std::holds_alternative<std::monostate>(v) ||
          (std::holds_alternative<std::string>(v) && std::get<std::string>(v) == kMissingLabel)) {
        ++missing;
      }
      distinct.insert(label_of(v));
    }
    ordered_json entry{{"name", a.name},
                       {"kind", kind_name(a.kind)},
                       {"controllable", a.controllable},
                       {"distinct_values", distinct.size()},
                       {"missing", missing}};
    if (const auto it = table.bins.find(a.name); it != table.bins.end()) entry["bins"] = it->second.labels;
    attrs.push_back(std::move(entry));
  }
  ordered_json doc{{"cases", table.rows.size()},
                   {"outcome", table.outcome_name},
                   {"positive_cases", positives},
                   {"positive_rate", table.rows.empty() ? 0.0 : static_cast<double>(positives) / table.rows.size()},
                   {"attributes", attrs}};
  return doc.dump(2) + "\n";
}

// --- segments ---------------------------------------------------------------

std::string write_segments_file(std::span<const TreatmentResult> results) {
  ordered_json list = ordered_json::array();
  for (const auto& r : results) {
    ordered_json changes = ordered_json::array();
    for (const auto& c : r.treatment.changes) {
      changes.push_back({{"attribute", c.attribute}, {"from", c.from}, {"to", c.to}});
    }
    ordered_json entry{{"treatment", r.treatment.label()}, {"changes", changes}};
    if (r.skipped) {
      entry["status"] = "skipped";
      entry["reason"] = r.reason;
    } else {
      entry["status"] = "ok";
      entry["tree"] = r.tree_file;
      entry["n_treated"] = r.n_treated;
      entry["n_control"] = r.n_control;
      entry["n_excluded"] = r.n_excluded;
      ordered_json segs = ordered_json::array();
      for (const auto& s : r.segments) {
        ordered_json predicate = ordered_json::array();
        for (const auto& c : s.predicate) predicate.push_back(condition_json(c));
        segs.push_back({{"description", s.describe()},
                        {"predicate", predicate},
                        {"uplift", s.uplift},
                        {"p_treat", s.p_treat},
                        {"p_ctrl", s.p_ctrl},
                        {"n_treat", s.n_treat},
                        {"n_ctrl", s.n_ctrl},
                        {"n_reachable", s.n_reachable}});
      }
      entry["segments"] = segs;
    }
    list.push_back(std::move(entry));
  }
  return ordered_json{{"treatments", list}}.dump(2) + "\n";
}

std::vector<TreatmentResult> read_segments_file(std::string_view text) {
  return artifact_guard("segments file", [&] {
    const auto doc = nlohmann::json::parse(text);
    std::vector<TreatmentResult> out;
    for (const auto& e : doc.at("treatments")) {
      TreatmentResult r;
      for (const auto& c : e.at("changes")) {
        r.treatment.changes.push_back({c.at("attribute").get<std::string>(), c.at("from").get<std::string>(),
                                       c.at("to").get<std::string>()});
      }
      r.skipped = e.at("status").get<std::string>() == "skipped";
      if (r.skipped) {
        r.reason = e.value("reason", std::string{});
      } else {
        r.tree_file = e.value("tree", std::string{});
        r.n_treated = e.value("n_treated", std::size_t{0});
        r.n_control = e.value("n_control", std::size_t{0});
        r.n_excluded = e.value("n_excluded", std::size_t{0});
        for (const auto& s : e.at("segments")) {
          Segment seg;
          for (const auto& c : s.at("predicate")) seg.predicate.push_back(condition_from_json(c));
          seg.uplift = s.at("uplift").get<double>();
          seg.p_treat = s.at("p_treat").get<double>();
          seg.p_ctrl = s.at("p_ctrl").get<double>();
          seg.n_treat = s.at("n_treat").get<std::size_t>();
          seg.n_ctrl = s.at("n_ctrl").get<std::size_t>();
          seg.n_reachable = s.at("n_reachable").get<std::size_t>();
          r.segments.push_back(std::move(seg));
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  });
}

std::vector<TreatmentResult> fit_treatments(const CaseTable& table, std::span<const Treatment> treatments,
                                            const TreeParams& params, double min_uplift,
                                            std::vector<std::string>* dot_files) {
  const FeatureMatrix features(table);
  std::vector<TreatmentResult> results(treatments.size());
  std::vector<std::string> dots(treatments.size());

  const auto fit_one = [&](std::size_t i) {
    TreatmentResult& r = results[i];
    r.treatment = treatments[i];
    r.tree_file = fmt::format("{}/treatment_{:03}.dot", artifacts::kTreesDir, i + 1);
    try {
      const TreatmentAssignment groups = assign_groups(table, treatments[i]);
      r.n_treated = groups.treated.size();
      r.n_control = groups.control.size();
      r.n_excluded = groups.excluded.size();
      const UpliftTree tree =
          build_tree(features, groups, treatments[i], candidate_features(table, treatments[i]), params);
      r.segments = extract_segments(tree, table, min_uplift);
      dots[i] = to_dot(tree);
    } catch (const PositivityError& e) {
      r.skipped = true;
      r.reason = e.what();
      r.tree_file.clear();
      r.segments.clear();
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), treatments.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < treatments.size(); i = next++) fit_one(i);
    }));
  }
  for (auto& f : pool) f.get();
  if (dot_files) *dot_files = std::move(dots);
  return results;
}

// --- stages -----------------------------------------------------------------

StageReport run_ingest(const PipelineConfig& config) {
  config.validate();
  StageReport report;
  if (config.input.path.empty()) throw ConfigError(kModule, "input path is required");
  spdlog::info("reading {} log {}", config.input.format, config.input.path.string());
  const EventLog log = config.input.format == "xes" ? parse_xes_file(config.input.path)
                                                    : parse_csv_file(config.input.path, config.input.csv);
  spdlog::info("{} cases, {} events", log.size(), log.event_count());
  EncodingOptions options;
  options.positive_labels = config.positive_labels;
  const CaseTable encoded = encode_cases(log, config.schema, config.outcome, options);
  const CaseTable table = discretize_all(encoded, config.binning, config.default_bins, &report.warnings);
  spdlog::info("encoded {} cases with a known outcome", table.size());
  write_artifact(report, config.output_dir / artifacts::kCaseTable, write_case_table(table));
  write_artifact(report, config.output_dir / artifacts::kCaseSummary, case_summary(table));
  return report;
}

StageReport run_mine(const PipelineConfig& config) {
  config.validate();
  StageReport report;
  const CaseTable table = read_case_table(read_file(stage_input(config, artifacts::kCaseTable)));
  std::vector<ActionRule> rules;
  if (!table.rows.empty()) rules = mine_action_rules(table, config.rules);
  const auto treatments = extract_treatments(rules);
  spdlog::info("{} action rules, {} distinct treatments", rules.size(), treatments.size());
  write_artifact(report, config.output_dir / artifacts::kRules, write_rules_file(rules));
  write_artifact(report, config.output_dir / artifacts::kTreatments, write_treatments_file(treatments));
  return report;
}

StageReport run_uplift(const PipelineConfig& config, const std::optional<fs::path>& treatments_file) {
  config.validate();
  StageReport report;
  const CaseTable table = read_case_table(read_file(stage_input(config, artifacts::kCaseTable)));
  const fs::path tpath = treatments_file ? *treatments_file : stage_input(config, artifacts::kTreatments);
  const auto treatments = read_treatments_file(read_file(tpath));

  const fs::path trees = config.output_dir / artifacts::kTreesDir;
  if (fs::exists(trees)) {
    for (const auto& entry : fs::directory_iterator(trees)) {
      if (entry.path().extension() == ".dot") fs::remove(entry.path());
    }
  }
  std::vector<std::string> dots;
  const auto results = fit_treatments(table, treatments, config.tree, config.min_uplift, &dots);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].skipped) {
      spdlog::warn("skipping treatment: {}", results[i].reason);
      report.warnings.push_back(results[i].reason);
      continue;
    }
    write_artifact(report, config.output_dir / results[i].tree_file, dots[i]);
  }
  write_artifact(report, config.output_dir / artifacts::kSegments, write_segments_file(results));
  return report;
}

StageReport run_rank(const PipelineConfig& config) {
  config.validate();
  StageReport report;
  const auto results = read_segments_file(read_file(stage_input(config, artifacts::kSegments)));
  std::vector<TreatmentSegments> groups;
  std::size_t segment_count = 0;
  for (const auto& r : results) {
    if (r.skipped) continue;
    groups.push_back({r.treatment, r.segments});
    segment_count += r.segments.size();
  }
  const auto ranking = rank(groups, config.costs);
  write_artifact(report, config.output_dir / artifacts::kRanking, write_ranking_csv(ranking));

  ordered_json counts{{"treatments", results.size()},
                      {"treatments_skipped", results.size() - groups.size()},
                      {"segments", segment_count},
                      {"recommendations", ranking.size()}};
  const fs::path summary = config.output_dir / artifacts::kCaseSummary;
  if (fs::exists(summary)) {
    counts["cases"] = artifact_guard("case summary", [&] { return nlohmann::json::parse(read_file(summary)).at("cases"); });
  }
  const fs::path rules = config.output_dir / artifacts::kRules;
  if (fs::exists(rules)) counts["rules"] = read_rules_file(read_file(rules)).size();

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(config.output_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), config.output_dir).generic_string();
    if (rel != artifacts::kManifest) files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  ordered_json manifest{{"tool", "procause"},
                        {"version", library_version()},
                        {"config", ordered_json::parse(config_to_json(config))},
                        {"counts", counts},
                        {"artifacts", files}};
  write_artifact(report, config.output_dir / artifacts::kManifest, manifest.dump(2) + "\n");
  return report;
}

StageReport run_pipeline(const PipelineConfig& config) {
  StageReport all;
  const auto merge = [&](StageReport r) {
    all.warnings.insert(all.warnings.end(), r.warnings.begin(), r.warnings.end());
    all.written.insert(all.written.end(), r.written.begin(), r.written.end());
  };
  merge(run_ingest(config));
  merge(run_mine(config));
  merge(run_uplift(config));
  merge(run_rank(config));
  return all;
}

}  // namespace procause
