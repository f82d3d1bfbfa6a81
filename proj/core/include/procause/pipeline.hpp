#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procause/action_rules.hpp"
#include "procause/case_table.hpp"
#include "procause/event_log.hpp"
#include "procause/ranking.hpp"
#include "procause/uplift_tree.hpp"

namespace procause {

std::string_view library_version();

struct InputConfig {
  std::filesystem::path path;
  std::string format = "xes";  // xes | csv
  CsvColumnMap csv;
};

struct PipelineConfig {
  InputConfig input;
  std::vector<AttributeSchema> schema;  // includes the outcome attribute
  std::string outcome;
  std::vector<std::string> positive_labels{"true", "1"};
  BinningSpec binning;
  int default_bins = 4;
  MiningParams rules;
  TreeParams tree;
  double min_uplift = 0.0;
  CostTable costs;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

// Relative paths inside the file are resolved against `base_dir`.
PipelineConfig parse_config(std::string_view json, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

namespace artifacts {
inline constexpr std::string_view kCaseTable = "case_table.json";
inline constexpr std::string_view kCaseSummary = "case_summary.json";
inline constexpr std::string_view kRules = "action_rules.json";
inline constexpr std::string_view kTreatments = "treatments.json";
inline constexpr std::string_view kSegments = "segments.json";
inline constexpr std::string_view kTreesDir = "trees";
inline constexpr std::string_view kRanking = "recommendations.csv";
inline constexpr std::string_view kManifest = "manifest.json";
}  // namespace artifacts

std::string write_case_table(const CaseTable& table);
CaseTable read_case_table(std::string_view json);
std::string case_summary(const CaseTable& table);

// Uplift stage outcome for one treatment.
struct TreatmentResult {
  Treatment treatment;
  bool skipped = false;
  std::string reason;     // why it was skipped
  std::string tree_file;  // relative to the output directory
  std::size_t n_treated = 0, n_control = 0, n_excluded = 0;
  std::vector<Segment> segments;
};

std::string write_segments_file(std::span<const TreatmentResult> results);
std::vector<TreatmentResult> read_segments_file(std::string_view json);

// Fits one tree per treatment, concurrently; results follow input order.
// Positivity failures mark the treatment as skipped instead of throwing.
std::vector<TreatmentResult> fit_treatments(const CaseTable& table, std::span<const Treatment> treatments,
                                            const TreeParams& params, double min_uplift,
                                            std::vector<std::string>* dot_files = nullptr);

struct StageReport {
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> written;
};

// Each stage reads the previous stage's artifact from config.output_dir and
// throws DataError naming the file when it is missing.
StageReport run_ingest(const PipelineConfig& config);
StageReport run_mine(const PipelineConfig& config);
StageReport run_uplift(const PipelineConfig& config,
                       const std::optional<std::filesystem::path>& treatments_file = std::nullopt);
StageReport run_rank(const PipelineConfig& config);
// ingest, mine, uplift and rank in sequence.
StageReport run_pipeline(const PipelineConfig& config);

// Reads a whole file; DataError naming it when absent.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace procause
