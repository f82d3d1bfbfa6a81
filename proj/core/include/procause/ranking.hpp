#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "procause/action_rules.hpp"
#include "procause/uplift_tree.hpp"

namespace procause {

// Benefit of one positive outcome and fixed cost of treating one case.
struct CostModel {
  double outcome_value = 1.0;
  double impression_cost = 0.0;

  void validate() const;
  bool operator==(const CostModel&) const = default;
};

// Per-treatment cost models keyed by Treatment::label(), with an optional
// fallback.
struct CostTable {
  std::optional<CostModel> fallback = CostModel{};
  std::map<std::string, CostModel> per_treatment;

  // Throws ConfigError naming the treatment when nothing applies.
  const CostModel& lookup(const Treatment& treatment) const;
};

// n * (u * v - c)
double net_value(double n, double uplift, const CostModel& model);

struct Recommendation {
  Treatment treatment;
  Segment segment;
  std::size_t n = 0;
  double uplift = 0;
  double incremental_value = 0;  // n * u * v
  double incremental_cost = 0;   // n * c
  double net = 0;

  bool profitable() const { return net >= 0; }
};

struct TreatmentSegments {
  Treatment treatment;
  std::vector<Segment> segments;
};

// One recommendation per (treatment, segment) with n = segment.n_reachable,
// ordered by net, then uplift (both descending), then treatment label and
// segment description. Unprofitable entries are kept.
std::vector<Recommendation> rank(std::span<const TreatmentSegments> segments, const CostTable& costs);

// Columns: treatment, segment, n, uplift, incremental_value,
// incremental_cost, net, flag.
std::string write_ranking_csv(std::span<const Recommendation> recommendations);

}  // namespace procause
