#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procause/case_table.hpp"

namespace procause {

// attribute = value
struct Condition {
  std::string attribute;
  std::string value;

  auto operator<=>(const Condition&) const = default;
};

struct ClassificationRule {
  std::vector<Condition> conditions;  // sorted by attribute
  int target_class = 1;
  double support = 0;
  double confidence = 0;

  bool operator==(const ClassificationRule&) const = default;
};

// (m: from -> to); a stable term has from == to and renders as (m: from).
struct AtomicActionTerm {
  std::string attribute;
  std::string from;
  std::string to;

  bool is_stable() const { return from == to; }
  auto operator<=>(const AtomicActionTerm&) const = default;
};

// Antecedent = stable terms (uncontrollable preconditions) plus flexible
// terms (controllable changes); consequent = (outcome: 0 -> 1).
struct ActionRule {
  std::vector<AtomicActionTerm> stable;    // sorted by attribute
  std::vector<AtomicActionTerm> flexible;  // sorted by attribute
  AtomicActionTerm consequent;
  double support = 0;
  double confidence = 0;

  std::vector<AtomicActionTerm> antecedent() const;
  bool operator==(const ActionRule&) const = default;
};

// The flexible part of an action rule.
struct Treatment {
  std::vector<AtomicActionTerm> changes;  // sorted by attribute, from != to

  // "(NoOfTerms: [6-48] → [97-120]) ∧ (MonthlyCost: ...)"
  std::string label() const;
  auto operator<=>(const Treatment&) const = default;
};

struct MiningParams {
  double min_support = 0.03;
  double min_confidence = 0.55;
  int max_antecedent_length = 4;

  void validate() const;
};

struct RuleMeasures {
  double support = 0;
  double confidence = 0;
};

// Exhaustive enumeration of attribute=value conjunctions (length capped) whose
// support count(cond ∧ class)/N and confidence count(cond ∧ class)/count(cond)
// meet the minima. Ordered by length, then conditions lexicographically.
std::vector<ClassificationRule> mine_classification_rules(const CaseTable& table, int target_class,
                                                          double min_support, double min_confidence,
                                                          int max_antecedent_length);

// Pairs a class-0 rule with a class-1 rule that has the same uncontrollable
// conditions and the same controllable attributes, every one of which takes a
// different value. support = min of the two supports, confidence = product.
// Ordered by support, then confidence (both descending), then terms.
std::vector<ActionRule> mine_action_rules(const CaseTable& table, const MiningParams& params);

// Distinct flexible-term sets ordered by the largest support of any rule that
// carries them, ties broken by the terms.
std::vector<Treatment> extract_treatments(std::span<const ActionRule> rules);

// Recomputes support and confidence of `rule` from scratch.
RuleMeasures measure(const ActionRule& rule, const CaseTable& table);

// Text form: [(CreditScore: low) ∧ (NoOfTerms: [6-48] → [97-120])] ⟹ [Selected: 0 → 1]
std::string to_string(const ActionRule& rule);
// Inverse of to_string for the rule part (support and confidence are zero).
ActionRule parse_action_rule(std::string_view text);

// Machine-readable rules file (JSON). write(read(x)) == x byte for byte for
// any x produced by write.
std::string write_rules_file(std::span<const ActionRule> rules);
std::vector<ActionRule> read_rules_file(std::string_view text);

std::string write_treatments_file(std::span<const Treatment> treatments);
std::vector<Treatment> read_treatments_file(std::string_view text);

}  // namespace procause
