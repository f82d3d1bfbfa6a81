#include "procause/case_table.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>

#include "procause/error.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "event_log";

const AttributeValue* last_observed(const Trace& trace, std::string_view name) {
  for (auto it = trace.events.rbegin(); it != trace.events.rend(); ++it) {
    if (const AttributeValue* v = it->find(name)) return v;
  }
  return trace.find(name);
}

const AttributeValue* source_value(const Trace& trace, const AttributeSchema& attr) {
  switch (attr.source.type) {
    case AttributeSource::Type::raw:
      return last_observed(trace, attr.name);
    case AttributeSource::Type::last_value:
      return last_observed(trace, attr.source.reference);
    case AttributeSource::Type::count:
      break;
  }
  return nullptr;
}

FeatureValue coerce(const AttributeValue& value, const AttributeSchema& attr,
                    const std::string& case_id) {
  if (attr.kind == AttributeKind::categorical) return to_text(value);
  const auto conflict = [&] {
    return DataError(kModule, fmt::format("attribute '{}' is numeric but case '{}' has value '{}'",
                                          attr.name, case_id, to_text(value)));
  };
  if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&value)) return *d;
  if (const auto* s = std::get_if<std::string>(&value)) {
    double out = 0;
    const char* first = s->data();
    const char* last = s->data() + s->size();
    if (first != last && *first == '+') ++first;
    const auto [p, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || p != last || !std::isfinite(out)) throw conflict();
    return out;
  }
  throw conflict();
}

std::string number_text(double v) { return fmt::format("{}", v); }

// Observed-range labels "[lo-hi]"; the unbounded top bin reads ">x" where x
// is the largest value observed below it. Empty bins fall back to the cuts.
std::vector<std::string> make_labels(const std::vector<double>& cuts,
                                     const std::vector<double>& sorted_values) {
  const std::size_t k = cuts.size() + 1;
  std::vector<std::optional<std::pair<double, double>>> range(k);
  Bins probe{cuts, {}};
  for (double v : sorted_values) {
    auto& r = range[probe.bin_of(v)];
    if (!r) {
      r = std::pair{v, v};
    } else {
      r->second = v;
    }
  }
  std::vector<std::string> labels(k);
  for (std::size_t i = 0; i < k; ++i) {
    const bool top = i + 1 == k && k > 1;
    if (top) {
      const double below = range[i - 1] ? range[i - 1]->second : cuts[i - 1];
      labels[i] = ">" + number_text(below);
    } else if (range[i]) {
      labels[i] = fmt::format("[{}-{}]", number_text(range[i]->first), number_text(range[i]->second));
    } else if (i == 0) {
      labels[i] = "<=" + number_text(cuts[0]);
    } else {
      labels[i] = fmt::format("({}-{}]", number_text(cuts[i - 1]), number_text(cuts[i]));
    }
  }
  return labels;
}

std::vector<double> equal_frequency_cuts(const std::vector<double>& sorted_distinct, int k) {
  const std::size_t d = sorted_distinct.size();
  const std::size_t groups = std::min<std::size_t>(static_cast<std::size_t>(k), d);
  std::vector<double> cuts;
  if (groups < 2) return cuts;
  const std::size_t base = d / groups;
  const std::size_t extra = d % groups;
  std::size_t end = 0;
  for (std::size_t g = 0; g + 1 < groups; ++g) {
    end += base + (g < extra ? 1 : 0);
    cuts.push_back(sorted_distinct[end - 1] + (sorted_distinct[end] - sorted_distinct[end - 1]) / 2);
  }
  return cuts;
}

void warn(std::vector<std::string>* warnings, std::string message) {
  spdlog::warn("{}", message);
  if (warnings) warnings->push_back(std::move(message));
}

}  // namespace

std::size_t Bins::bin_of(double value) const {
  return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

const AttributeSchema* CaseTable::find_attribute(std::string_view name) const {
  for (const auto& a : schema) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool CaseTable::fully_discretized() const {
  return std::all_of(schema.begin(), schema.end(), [&](const AttributeSchema& a) {
    return a.kind == AttributeKind::categorical || is_discretized(a.name);
  });
}

std::string label_of(const FeatureValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* d = std::get_if<double>(&value)) return number_text(*d);
  return std::string(kMissingLabel);
}

CaseTable encode_cases(const EventLog& log, const std::vector<AttributeSchema>& schema,
                       std::string_view outcome_name, const EncodingOptions& options) {
  const AttributeSchema* outcome = nullptr;
  CaseTable table;
  table.outcome_name = outcome_name;
  std::set<std::string> seen;
  for (const auto& attr : schema) {
    if (attr.name.empty()) throw ConfigError(kModule, "schema attribute with empty name");
    if (!seen.insert(attr.name).second) {
      throw ConfigError(kModule, fmt::format("attribute '{}' listed twice in schema", attr.name));
    }
    if (attr.source.type != AttributeSource::Type::raw && attr.source.reference.empty()) {
      throw ConfigError(kModule, fmt::format("derived attribute '{}' has no source", attr.name));
    }
    if (attr.source.type == AttributeSource::Type::count && attr.kind != AttributeKind::numeric) {
      throw ConfigError(kModule, fmt::format("count attribute '{}' must be numeric", attr.name));
    }
    if (attr.name == outcome_name) {
      outcome = &attr;
    } else {
      table.schema.push_back(attr);
    }
  }
  if (!outcome) {
    throw ConfigError(kModule, fmt::format("outcome '{}' is not in the schema", outcome_name));
  }
  if (outcome->controllable) {
    throw ConfigError(kModule, fmt::format("outcome '{}' cannot be controllable", outcome_name));
  }

  for (const auto& trace : log.traces()) {
    const AttributeValue* y = source_value(trace, *outcome);
    if (!y) continue;
    CaseRecord row;
    row.case_id = trace.case_id;
    const std::string y_text = to_text(*y);
    row.outcome = std::find(options.positive_labels.begin(), options.positive_labels.end(),
                            y_text) != options.positive_labels.end()
                      ? 1
                      : 0;
    for (const auto& attr : table.schema) {
      FeatureValue value;
      if (attr.source.type == AttributeSource::Type::count) {
        const auto n = std::count_if(trace.events.begin(), trace.events.end(), [&](const Event& e) {
          return e.activity == attr.source.reference;
        });
        value = static_cast<double>(n);
      } else if (const AttributeValue* v = source_value(trace, attr)) {
        value = coerce(*v, attr, trace.case_id);
      }
      row.features.emplace(attr.name, std::move(value));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty() && !log.empty()) {
    throw DataError(kModule, fmt::format("outcome '{}' is never observed in any case", outcome_name));
  }
  return table;
}

CaseTable discretize(const CaseTable& table, const BinningSpec& spec,
                     std::vector<std::string>* warnings) {
  CaseTable out = table;
  for (const auto& [name, rule] : spec) {
    const AttributeSchema* attr = table.find_attribute(name);
    if (!attr) throw ConfigError(kModule, fmt::format("cannot bin unknown attribute '{}'", name));
    if (attr->kind != AttributeKind::numeric) {
      throw ConfigError(kModule, fmt::format("cannot bin categorical attribute '{}'", name));
    }
    if (table.is_discretized(name)) {
      throw ConfigError(kModule, fmt::format("attribute '{}' is already discretized", name));
    }

    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      if (const auto* d = std::get_if<double>(&row.features.at(name))) values.push_back(*d);
    }
    std::sort(values.begin(), values.end());

    std::vector<double> cuts;
    if (const auto* ef = std::get_if<EqualFrequency>(&rule)) {
      if (ef->k < 2) {
        throw ConfigError(kModule, fmt::format("equal-frequency binning of '{}' needs k >= 2, got {}",
                                               name, ef->k));
      }
      std::vector<double> distinct = values;
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      cuts = equal_frequency_cuts(distinct, ef->k);
      if (cuts.size() + 1 < static_cast<std::size_t>(ef->k)) {
        warn(warnings, fmt::format("attribute '{}' has {} distinct value(s); using {} bin(s) instead of {}",
                                   name, distinct.size(), cuts.size() + 1, ef->k));
      }
    } else {
      cuts = std::get<ExplicitBoundaries>(rule).cuts;
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (!std::isfinite(cuts[i]) || (i > 0 && !(cuts[i - 1] < cuts[i]))) {
          throw ConfigError(kModule,
                            fmt::format("boundaries for '{}' must be finite and strictly increasing", name));
        }
      }
    }

    Bins bins{cuts, make_labels(cuts, values)};
    for (auto& row : out.rows) {
      FeatureValue& v = row.features.at(name);
      if (const auto* d = std::get_if<double>(&v)) {
        row.raw_numeric[name] = *d;
        v = bins.labels[bins.bin_of(*d)];
      } else {
        v = std::string(kMissingLabel);
      }
    }
    out.bins.emplace(name, std::move(bins));
  }
  return out;
}

CaseTable discretize_all(const CaseTable& table, const BinningSpec& spec, int default_k,
                         std::vector<std::string>* warnings) {
  BinningSpec full = spec;
  for (const auto& attr : table.schema) {
    if (attr.kind == AttributeKind::numeric && !table.is_discretized(attr.name)) {
      full.try_emplace(attr.name, EqualFrequency{default_k});
    }
  }
  return discretize(table, full, warnings);
}

}  // namespace procause
