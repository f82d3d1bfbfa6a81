#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procause/case_table.hpp"
#include "procause/event_log.hpp"

namespace procause {

// Binary causal scenario: confounder L -> treatment A, L -> outcome Y,
// A -> Y, and a subgroup X that modifies the effect. L and X are independent.
// Outcome tables are indexed [l][x].
struct SyntheticScenario {
  double confounder_rate = 0.5;               // P(L = 1)
  double subgroup_rate = 0.5;                 // P(X = 1)
  std::array<double, 2> treatment_rate{0.5, 0.5};  // P(A = 1 | L = l)
  std::array<std::array<double, 2>, 2> treated_outcome{};  // P(Y^1 = 1 | L, X)
  std::array<std::array<double, 2>, 2> control_outcome{};  // P(Y^0 = 1 | L, X)
  std::size_t n_cases = 1000;
  std::uint64_t seed = 1;

  // ConfigError when a probability leaves [0, 1] or P(A=1|L) is 0 or 1.
  void validate() const;
  bool operator==(const SyntheticScenario&) const = default;
};

// Column names of the generated log.
inline constexpr std::string_view kConfounderAttribute = "confounder";
inline constexpr std::string_view kSubgroupAttribute = "subgroup";
inline constexpr std::string_view kTreatmentAttribute = "treatment";
inline constexpr std::string_view kOutcomeAttribute = "outcome";

struct SyntheticLog {
  EventLog log;
  std::map<int, double> true_cate;  // subgroup value -> CATE
};

// One trace per case with a single "register" event carrying the four
// attributes as "0"/"1" text. Y is the potential outcome of the received
// treatment.
//
// Random source: std::mt19937_64 seeded with `seed`; a uniform draw is
// (next() >> 11) * 2^-53 and Bernoulli(p) is `uniform < p`. Per case the draws
// are taken in the order L, X, A, Y^1, Y^0.
SyntheticLog generate(const SyntheticScenario& scenario);

// sum_l P(L=l) (P(Y^1=1|l,x) - P(Y^0=1|l,x)); `subgroup` must be 0 or 1.
double true_cate(const SyntheticScenario& scenario, int subgroup);

// CATE within one confounder stratum, optionally within one subgroup cell.
double true_stratum_cate(const SyntheticScenario& scenario, int confounder, std::optional<int> subgroup);

// Population-level naive contrast P(Y=1|A=1) - P(Y=1|A=0) implied by the
// scenario (closed form).
double naive_uplift(const SyntheticScenario& scenario);

// Schema for encoding a generated log: confounder and subgroup uncontrollable
// (the confounder only when `include_confounder`), treatment controllable.
std::vector<AttributeSchema> synthetic_schema(bool include_confounder = true);

SyntheticScenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const SyntheticScenario& scenario);

}  // namespace procause
