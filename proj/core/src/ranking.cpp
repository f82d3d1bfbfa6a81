#include "procause/ranking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "procause/csv.hpp"
#include "procause/error.hpp"

namespace procause {

namespace {
constexpr const char* kModule = "ranking";
}

void CostModel::validate() const {
  if (!(outcome_value >= 0) || !std::isfinite(outcome_value)) {
    throw ConfigError(kModule, fmt::format("outcome value must be >= 0, got {}", outcome_value));
  }
  if (!(impression_cost >= 0) || !std::isfinite(impression_cost)) {
    throw ConfigError(kModule, fmt::format("impression cost must be >= 0, got {}", impression_cost));
  }
}

const CostModel& CostTable::lookup(const Treatment& treatment) const {
  const auto label = treatment.label();
  if (const auto it = per_treatment.find(label); it != per_treatment.end()) return it->second;
  if (fallback) return *fallback;
  throw ConfigError(kModule, fmt::format("no cost model for treatment {}", label));
}

double net_value(double n, double uplift, const CostModel& model) {
  return n * (uplift * model.outcome_value - model.impression_cost);
}

std::vector<Recommendation> rank(std::span<const TreatmentSegments> segments, const CostTable& costs) {
  struct Keyed {
    Recommendation rec;
    std::string treatment_label;
    std::string segment_label;
  };
  std::vector<Keyed> keyed;
  for (const auto& group : segments) {
    const CostModel& model = costs.lookup(group.treatment);
    model.validate();
    for (const auto& segment : group.segments) {
      Recommendation r;
      r.treatment = group.treatment;
      r.segment = segment;
      r.n = segment.n_reachable;
      r.uplift = segment.uplift;
      const double n = static_cast<double>(r.n);
      r.incremental_value = n * r.uplift * model.outcome_value;
      r.incremental_cost = n * model.impression_cost;
      r.net = net_value(n, r.uplift, model);
      keyed.push_back({std::move(r), group.treatment.label(), segment.describe()});
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.rec.net != b.rec.net) return a.rec.net > b.rec.net;
    if (a.rec.uplift != b.rec.uplift) return a.rec.uplift > b.rec.uplift;
    if (a.treatment_label != b.treatment_label) return a.treatment_label < b.treatment_label;
    return a.segment_label < b.segment_label;
  });
  std::vector<Recommendation> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.rec));
  return out;
}

std::string write_ranking_csv(std::span<const Recommendation> recommendations) {
  std::ostringstream out;
  csv::write_row(out, {"treatment", "segment", "n", "uplift", "incremental_value", "incremental_cost",
                       "net", "flag"});
  for (const auto& r : recommendations) {
    csv::write_row(out, {r.treatment.label(), r.segment.describe(), std::to_string(r.n),
                         fmt::format("{}", r.uplift), fmt::format("{}", r.incremental_value),
                         fmt::format("{}", r.incremental_cost), fmt::format("{}", r.net),
                         r.profitable() ? "profitable" : "unprofitable"});
  }
  return out.str();
}

}  // namespace procause
