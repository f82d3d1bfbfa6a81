#include "procause/action_rules.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <tuple>

#include "procause/error.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "action_rules";
constexpr std::string_view kAnd = " ∧ ";
constexpr std::string_view kArrow = " → ";
constexpr std::string_view kImplies = " ⟹ ";

using Bits = std::vector<std::uint64_t>;

std::size_t popcount_and(const Bits& a, const Bits& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return n;
}

std::size_t popcount(const Bits& a) {
  std::size_t n = 0;
  for (auto w : a) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

// Row bitsets per (attribute, label), attributes sorted by name.
struct ItemIndex {
  struct Column {
    std::string attribute;
    std::vector<std::string> labels;  // sorted
    std::vector<Bits> rows_with;      // parallel to labels
  };
  std::vector<Column> columns;
  Bits class_rows[2];
  Bits all_rows;
  std::size_t n = 0;
};

void require_minable(const CaseTable& table) {
  if (table.rows.empty()) throw DataError(kModule, "cannot mine rules on an empty case table");
  for (const auto& attr : table.schema) {
    if (attr.kind == AttributeKind::numeric && !table.is_discretized(attr.name)) {
      throw DataError(kModule, fmt::format("numeric attribute '{}' is not discretized", attr.name));
    }
  }
}

ItemIndex build_index(const CaseTable& table) {
  ItemIndex index;
  index.n = table.rows.size();
  const std::size_t words = (index.n + 63) / 64;
  const auto set_bit = [](Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); };

  std::vector<std::string> names;
  for (const auto& a : table.schema) names.push_back(a.name);
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    ItemIndex::Column col;
    col.attribute = name;
    std::vector<std::string> row_labels(index.n);
    for (std::size_t r = 0; r < index.n; ++r) row_labels[r] = label_of(table.rows[r].features.at(name));
    col.labels = row_labels;
    std::sort(col.labels.begin(), col.labels.end());
    col.labels.erase(std::unique(col.labels.begin(), col.labels.end()), col.labels.end());
    col.rows_with.assign(col.labels.size(), Bits(words, 0));
    for (std::size_t r = 0; r < index.n; ++r) {
      const auto it = std::lower_bound(col.labels.begin(), col.labels.end(), row_labels[r]);
      set_bit(col.rows_with[static_cast<std::size_t>(it - col.labels.begin())], r);
    }
    index.columns.push_back(std::move(col));
  }
  index.class_rows[0].assign(words, 0);
  index.class_rows[1].assign(words, 0);
  index.all_rows.assign(words, 0);
  for (std::size_t r = 0; r < index.n; ++r) {
    set_bit(index.class_rows[table.rows[r].outcome ? 1 : 0], r);
    set_bit(index.all_rows, r);
  }
  return index;
}

class RuleEnumerator {
 public:
  RuleEnumerator(const ItemIndex& index, int target_class, double min_support,
                 double min_confidence, int max_length)
      : index_(index),
        target_(index.class_rows[target_class]),
        target_class_(target_class),
        min_support_(min_support),
        min_confidence_(min_confidence),
        max_length_(static_cast<std::size_t>(max_length)) {
    scratch_.assign(max_length_ + 1, Bits(index.all_rows.size(), 0));
  }

  std::vector<ClassificationRule> run() {
    visit(index_.all_rows, 0);
    return std::move(out_);
  }

 private:
  void visit(const Bits& matched, std::size_t first_column) {
    const std::size_t covered = popcount(matched);
    const std::size_t hits = popcount_and(matched, target_);
    const double support = static_cast<double>(hits) / static_cast<double>(index_.n);
    const double confidence =
        covered == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(covered);
    if (covered > 0 && confidence >= min_confidence_) {
      out_.push_back({conditions_, target_class_, support, confidence});
    }
    if (conditions_.size() == max_length_) return;

    Bits& next = scratch_[conditions_.size() + 1];
    for (std::size_t c = first_column; c < index_.columns.size(); ++c) {
      const auto& col = index_.columns[c];
      for (std::size_t v = 0; v < col.labels.size(); ++v) {
        const Bits& with = col.rows_with[v];
        for (std::size_t w = 0; w < next.size(); ++w) next[w] = matched[w] & with[w];
        const std::size_t next_hits = popcount_and(next, target_);
        // Support is anti-monotone: no superset can recover.
        if (static_cast<double>(next_hits) / static_cast<double>(index_.n) < min_support_) continue;
        conditions_.push_back({col.attribute, col.labels[v]});
        visit(next, c + 1);
        conditions_.pop_back();
      }
    }
  }

  const ItemIndex& index_;
  const Bits& target_;
  int target_class_;
  double min_support_;
  double min_confidence_;
  std::size_t max_length_;
  std::vector<Bits> scratch_;
  std::vector<Condition> conditions_;
  std::vector<ClassificationRule> out_;
};

std::vector<ClassificationRule> mine_with_index(const ItemIndex& index, int target_class,
                                                double min_support, double min_confidence,
                                                int max_length) {
  // The empty condition is always visited; gate it on support like the rest.
  RuleEnumerator enumerator(index, target_class, min_support, min_confidence, max_length);
  auto rules = enumerator.run();
  std::erase_if(rules, [&](const ClassificationRule& r) { return r.support < min_support; });
  std::sort(rules.begin(), rules.end(), [](const ClassificationRule& a, const ClassificationRule& b) {
    if (a.conditions.size() != b.conditions.size()) return a.conditions.size() < b.conditions.size();
    return a.conditions < b.conditions;
  });
  return rules;
}

void validate_thresholds(double min_support, double min_confidence, int max_length) {
  if (!(min_support > 0 && min_support <= 1)) {
    throw ConfigError(kModule, fmt::format("min_support must be in (0, 1], got {}", min_support));
  }
  if (!(min_confidence > 0 && min_confidence <= 1)) {
    throw ConfigError(kModule, fmt::format("min_confidence must be in (0, 1], got {}", min_confidence));
  }
  if (max_length < 0) throw ConfigError(kModule, "max_antecedent_length must be >= 0");
}

bool rule_order(const ActionRule& a, const ActionRule& b) {
  if (a.support != b.support) return a.support > b.support;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.stable, a.flexible) < std::tie(b.stable, b.flexible);
}

std::string render_term(const AtomicActionTerm& t) {
  if (t.is_stable()) return fmt::format("({}: {})", t.attribute, t.from);
  return fmt::format("({}: {}{}{})", t.attribute, t.from, kArrow, t.to);
}

AtomicActionTerm parse_term(std::string_view text, bool bracketed) {
  const char open = bracketed ? '[' : '(';
  const char close = bracketed ? ']' : ')';
  if (text.size() < 2 || text.front() != open || text.back() != close) {
    throw ParseError(kModule, fmt::format("malformed action term '{}'", text));
  }
  text = text.substr(1, text.size() - 2);
  const auto colon = text.find(": ");
  if (colon == std::string_view::npos || colon == 0) {
    throw ParseError(kModule, fmt::format("malformed action term '{}'", text));
  }
  AtomicActionTerm term;
  term.attribute = text.substr(0, colon);
  const std::string_view values = text.substr(colon + 2);
  const auto arrow = values.find(kArrow);
  if (arrow == std::string_view::npos) {
    term.from = term.to = values;
  } else {
    term.from = values.substr(0, arrow);
    term.to = values.substr(arrow + kArrow.size());
  }
  return term;
}

using ordered_json = nlohmann::ordered_json;

ordered_json change_json(const AtomicActionTerm& t) {
  return ordered_json{{"attribute", t.attribute}, {"from", t.from}, {"to", t.to}};
}

AtomicActionTerm change_from_json(const ordered_json& j) {
  return {j.at("attribute").get<std::string>(), j.at("from").get<std::string>(),
          j.at("to").get<std::string>()};
}

template <typename F>
auto json_guard(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(kModule, fmt::format("invalid rules file: {}", e.what()));
  }
}

}  // namespace

std::vector<AtomicActionTerm> ActionRule::antecedent() const {
  std::vector<AtomicActionTerm> all = stable;
  all.insert(all.end(), flexible.begin(), flexible.end());
  return all;
}

std::string Treatment::label() const {
  std::string out;
  for (std::size_t i = 0; i < changes.size(); ++i) {
    if (i) out += kAnd;
    out += render_term(changes[i]);
  }
  return out;
}

void MiningParams::validate() const {
  validate_thresholds(min_support, min_confidence, max_antecedent_length);
}

std::vector<ClassificationRule> mine_classification_rules(const CaseTable& table, int target_class,
                                                          double min_support, double min_confidence,
                                                          int max_antecedent_length) {
  validate_thresholds(min_support, min_confidence, max_antecedent_length);
  if (target_class != 0 && target_class != 1) throw ConfigError(kModule, "target class must be 0 or 1");
  require_minable(table);
  return mine_with_index(build_index(table), target_class, min_support, min_confidence,
                         max_antecedent_length);
}

std::vector<ActionRule> mine_action_rules(const CaseTable& table, const MiningParams& params) {
  params.validate();
  require_minable(table);
  std::set<std::string> controllable;
  for (const auto& a : table.schema) {
    if (a.controllable) controllable.insert(a.name);
  }
  if (controllable.empty()) return {};

  const ItemIndex index = build_index(table);
  const auto negative = mine_with_index(index, 0, params.min_support, params.min_confidence,
                                        params.max_antecedent_length);
  const auto positive = mine_with_index(index, 1, params.min_support, params.min_confidence,
                                        params.max_antecedent_length);

  // (uncontrollable conditions, controllable attributes) -> rule indices
  using Key = std::pair<std::vector<Condition>, std::vector<std::string>>;
  const auto key_of = [&](const ClassificationRule& r) {
    Key key;
    for (const auto& c : r.conditions) {
      if (controllable.contains(c.attribute)) {
        key.second.push_back(c.attribute);
      } else {
        key.first.push_back(c);
      }
    }
    return key;
  };
  std::map<Key, std::vector<std::size_t>> positive_by_key;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    Key key = key_of(positive[i]);
    if (!key.second.empty()) positive_by_key[std::move(key)].push_back(i);
  }

  std::set<std::pair<std::vector<AtomicActionTerm>, std::vector<AtomicActionTerm>>> seen;
  std::vector<ActionRule> rules;
  for (const auto& r0 : negative) {
    const Key key = key_of(r0);
    if (key.second.empty()) continue;
    const auto it = positive_by_key.find(key);
    if (it == positive_by_key.end()) continue;
    for (std::size_t j : it->second) {
      const auto& r1 = positive[j];
      ActionRule rule;
      bool all_differ = true;
      // Both condition lists are sorted by attribute and share attributes.
      for (std::size_t c = 0; c < r0.conditions.size(); ++c) {
        const auto& from = r0.conditions[c];
        const auto& to = r1.conditions[c];
        if (controllable.contains(from.attribute)) {
          if (from.value == to.value) {
            all_differ = false;
            break;
          }
          rule.flexible.push_back({from.attribute, from.value, to.value});
        } else {
          rule.stable.push_back({from.attribute, from.value, from.value});
        }
      }
      if (!all_differ) continue;
      rule.consequent = {table.outcome_name, "0", "1"};
      rule.support = std::min(r0.support, r1.support);
      rule.confidence = r0.confidence * r1.confidence;
      if (rule.support < params.min_support || rule.confidence < params.min_confidence) continue;
      if (!seen.emplace(rule.stable, rule.flexible).second) continue;
      rules.push_back(std::move(rule));
    }
  }
  std::sort(rules.begin(), rules.end(), rule_order);
  return rules;
}

std::vector<Treatment> extract_treatments(std::span<const ActionRule> rules) {
  std::map<std::vector<AtomicActionTerm>, double> best_support;
  for (const auto& rule : rules) {
    if (rule.flexible.empty()) continue;
    auto [it, inserted] = best_support.emplace(rule.flexible, rule.support);
    if (!inserted) it->second = std::max(it->second, rule.support);
  }
  std::vector<std::pair<double, Treatment>> ordered;
  for (const auto& [changes, support] : best_support) ordered.push_back({support, Treatment{changes}});
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Treatment> out;
  out.reserve(ordered.size());
  for (auto& [_, t] : ordered) out.push_back(std::move(t));
  return out;
}

RuleMeasures measure(const ActionRule& rule, const CaseTable& table) {
  if (table.rows.empty()) throw DataError(kModule, "cannot measure a rule on an empty case table");
  for (const auto& term : rule.antecedent()) {
    if (!table.find_attribute(term.attribute)) {
      throw DataError(kModule, fmt::format("rule refers to unknown attribute '{}'", term.attribute));
    }
  }
  std::size_t from_rows = 0, from_negative = 0, to_rows = 0, to_positive = 0;
  for (const auto& row : table.rows) {
    bool stable_ok = true;
    for (const auto& t : rule.stable) {
      if (label_of(row.features.at(t.attribute)) != t.from) {
        stable_ok = false;
        break;
      }
    }
    if (!stable_ok) continue;
    bool matches_from = true;
    bool matches_to = true;
    for (const auto& t : rule.flexible) {
      const std::string label = label_of(row.features.at(t.attribute));
      matches_from = matches_from && label == t.from;
      matches_to = matches_to && label == t.to;
    }
    if (matches_from) {
      ++from_rows;
      if (row.outcome == 0) ++from_negative;
    }
    if (matches_to) {
      ++to_rows;
      if (row.outcome == 1) ++to_positive;
    }
  }
  const double n = static_cast<double>(table.rows.size());
  const double support0 = static_cast<double>(from_negative) / n;
  const double support1 = static_cast<double>(to_positive) / n;
  const double conf0 = from_rows ? static_cast<double>(from_negative) / static_cast<double>(from_rows) : 0.0;
  const double conf1 = to_rows ? static_cast<double>(to_positive) / static_cast<double>(to_rows) : 0.0;
  return {std::min(support0, support1), conf0 * conf1};
}

std::string to_string(const ActionRule& rule) {
  std::string out = "[";
  const auto terms = rule.antecedent();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += kAnd;
    out += render_term(terms[i]);
  }
  out += "]";
  out += kImplies;
  out += fmt::format("[{}: {}{}{}]", rule.consequent.attribute, rule.consequent.from, kArrow,
                     rule.consequent.to);
  return out;
}

ActionRule parse_action_rule(std::string_view text) {
  const auto implies = text.find(kImplies);
  if (implies == std::string_view::npos) {
    throw ParseError(kModule, fmt::format("action rule without '⟹': '{}'", text));
  }
  std::string_view lhs = text.substr(0, implies);
  const std::string_view rhs = text.substr(implies + kImplies.size());
  if (lhs.size() < 2 || lhs.front() != '[' || lhs.back() != ']') {
    throw ParseError(kModule, fmt::format("malformed antecedent '{}'", lhs));
  }
  lhs = lhs.substr(1, lhs.size() - 2);

  ActionRule rule;
  while (!lhs.empty()) {
    const auto sep = lhs.find(kAnd);
    const std::string_view piece = lhs.substr(0, sep);
    AtomicActionTerm term = parse_term(piece, false);
    (term.is_stable() ? rule.stable : rule.flexible).push_back(std::move(term));
    if (sep == std::string_view::npos) break;
    lhs = lhs.substr(sep + kAnd.size());
  }
  rule.consequent = parse_term(rhs, true);
  return rule;
}

std::string write_rules_file(std::span<const ActionRule> rules) {
  ordered_json list = ordered_json::array();
  for (const auto& rule : rules) {
    ordered_json stable = ordered_json::array();
    for (const auto& t : rule.stable) stable.push_back({{"attribute", t.attribute}, {"value", t.from}});
    ordered_json flexible = ordered_json::array();
    for (const auto& t : rule.flexible) flexible.push_back(change_json(t));
    list.push_back(ordered_json{{"rule", to_string(rule)},
                                {"stable", std::move(stable)},
                                {"flexible", std::move(flexible)},
                                {"consequent", change_json(rule.consequent)},
                                {"support", rule.support},
                                {"confidence", rule.confidence}});
  }
  ordered_json doc{{"rules", std::move(list)}};
  return doc.dump(2) + "\n";
}

std::vector<ActionRule> read_rules_file(std::string_view text) {
  return json_guard([&] {
    const auto doc = ordered_json::parse(text);
    std::vector<ActionRule> rules;
    for (const auto& j : doc.at("rules")) {
      ActionRule rule;
      for (const auto& s : j.at("stable")) {
        const auto value = s.at("value").get<std::string>();
        rule.stable.push_back({s.at("attribute").get<std::string>(), value, value});
      }
      for (const auto& f : j.at("flexible")) rule.flexible.push_back(change_from_json(f));
      rule.consequent = change_from_json(j.at("consequent"));
      rule.support = j.at("support").get<double>();
      rule.confidence = j.at("confidence").get<double>();
      rules.push_back(std::move(rule));
    }
    return rules;
  });
}

std::string write_treatments_file(std::span<const Treatment> treatments) {
  ordered_json list = ordered_json::array();
  for (const auto& t : treatments) {
    ordered_json changes = ordered_json::array();
    for (const auto& c : t.changes) changes.push_back(change_json(c));
    list.push_back(ordered_json{{"label", t.label()}, {"changes", std::move(changes)}});
  }
  ordered_json doc{{"treatments", std::move(list)}};
  return doc.dump(2) + "\n";
}

std::vector<Treatment> read_treatments_file(std::string_view text) {
  return json_guard([&] {
    const auto doc = ordered_json::parse(text);
    std::vector<Treatment> out;
    for (const auto& j : doc.at("treatments")) {
      Treatment t;
      for (const auto& c : j.at("changes")) t.changes.push_back(change_from_json(c));
      std::sort(t.changes.begin(), t.changes.end());
      if (t.changes.empty()) throw ParseError(kModule, "treatment with no changes");
      for (std::size_t i = 0; i < t.changes.size(); ++i) {
        if (t.changes[i].is_stable()) {
          throw ParseError(kModule, fmt::format("treatment change on '{}' does not change the value",
                                                t.changes[i].attribute));
        }
        if (i && t.changes[i].attribute == t.changes[i - 1].attribute) {
          throw ParseError(kModule, fmt::format("treatment changes '{}' twice", t.changes[i].attribute));
        }
      }
      out.push_back(std::move(t));
    }
    return out;
  });
}

}  // namespace procause
