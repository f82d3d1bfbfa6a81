#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "procause/event_log.hpp"

namespace procause {

enum class AttributeKind { categorical, numeric };

struct AttributeSource {
  enum class Type {
    raw,         // attribute of the same name: last event value, else trace value
    count,       // number of events whose activity equals `reference`
    last_value,  // last value of event attribute `reference`, else trace value
  };
  Type type = Type::raw;
  std::string reference;

  bool operator==(const AttributeSource&) const = default;
};

struct AttributeSchema {
  std::string name;
  AttributeKind kind = AttributeKind::categorical;
  bool controllable = false;
  AttributeSource source;

  bool operator==(const AttributeSchema&) const = default;
};

// Missing, numeric, or categorical/interval label.
using FeatureValue = std::variant<std::monostate, double, std::string>;

inline constexpr std::string_view kMissingLabel = "missing";

struct CaseRecord {
  std::string case_id;
  std::map<std::string, FeatureValue> features;
  // Pre-discretization values of discretized numeric attributes.
  std::map<std::string, double> raw_numeric;
  int outcome = 0;

  bool operator==(const CaseRecord&) const = default;
};

// Interior cut points c_0 < ... < c_{k-2}; bin i is (c_{i-1}, c_i] with
// c_{-1} = -inf and c_{k-1} = +inf.
struct Bins {
  std::vector<double> cuts;
  std::vector<std::string> labels;

  std::size_t bin_of(double value) const;
  bool operator==(const Bins&) const = default;
};

// One row per case with a known outcome. `schema` lists the feature
// attributes only; the outcome lives in CaseRecord::outcome.
struct CaseTable {
  std::vector<AttributeSchema> schema;
  std::string outcome_name;
  std::vector<CaseRecord> rows;
  std::map<std::string, Bins> bins;

  const AttributeSchema* find_attribute(std::string_view name) const;
  bool is_discretized(std::string_view name) const { return bins.contains(std::string(name)); }
  // Every attribute is categorical or binned.
  bool fully_discretized() const;
  std::size_t size() const noexcept { return rows.size(); }

  bool operator==(const CaseTable&) const = default;
};

// Label used by rule mining for a feature value: the category or interval
// label, or "missing".
std::string label_of(const FeatureValue& value);

struct EncodingOptions {
  // Text renderings (see to_text) mapped to outcome 1. Booleans render as
  // "true"/"false".
  std::vector<std::string> positive_labels{"true", "1"};
};

// `schema` must contain the outcome attribute; it is removed from the
// resulting table's schema. Cases whose outcome is never observed are dropped.
CaseTable encode_cases(const EventLog& log, const std::vector<AttributeSchema>& schema,
                       std::string_view outcome_name, const EncodingOptions& options = {});

struct EqualFrequency {
  int k = 4;
};

struct ExplicitBoundaries {
  std::vector<double> cuts;
};

using BinningRule = std::variant<EqualFrequency, ExplicitBoundaries>;
using BinningSpec = std::map<std::string, BinningRule>;

// Replaces the named numeric features by interval labels. Equal-frequency
// binning partitions the sorted distinct values into k contiguous groups
// whose sizes differ by at most one. Degenerate inputs produce fewer bins and
// a message in `warnings` (and the log).
CaseTable discretize(const CaseTable& table, const BinningSpec& spec,
                     std::vector<std::string>* warnings = nullptr);

// Same as discretize, with EqualFrequency{default_k} for every numeric
// attribute the spec does not mention.
CaseTable discretize_all(const CaseTable& table, const BinningSpec& spec, int default_k = 4,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace procause
