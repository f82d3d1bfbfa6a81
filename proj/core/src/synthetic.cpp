#include "procause/synthetic.hpp"

#include <fmt/format.h>

#include <nlohmann/json.hpp>
#include <random>

#include "procause/error.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "synthetic";

void check_probability(double p, std::string_view what) {
  if (!(p >= 0 && p <= 1)) throw ConfigError(kModule, fmt::format("{} = {} is not a probability", what, p));
}

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}
  bool bernoulli(double p) { return uniform() < p; }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 engine_;
};

std::string bit(bool b) { return b ? "1" : "0"; }

}  // namespace

void SyntheticScenario::validate() const {
  check_probability(confounder_rate, "confounder_rate");
  check_probability(subgroup_rate, "subgroup_rate");
  for (int l = 0; l < 2; ++l) {
    const double a = treatment_rate[static_cast<std::size_t>(l)];
    check_probability(a, fmt::format("treatment_rate[{}]", l));
    if (a <= 0 || a >= 1) {
      throw ConfigError(kModule, fmt::format("positivity violated: P(A=1 | L={}) = {}", l, a));
    }
    for (int x = 0; x < 2; ++x) {
      check_probability(treated_outcome[l][x], fmt::format("treated_outcome[{}][{}]", l, x));
      check_probability(control_outcome[l][x], fmt::format("control_outcome[{}][{}]", l, x));
    }
  }
  if (n_cases == 0) throw ConfigError(kModule, "n_cases must be positive");
}

SyntheticLog generate(const SyntheticScenario& scenario) {
  scenario.validate();
  Draws draws(scenario.seed);
  SyntheticLog out;
  const Timestamp start = std::chrono::sys_days{std::chrono::year{2020} / 1 / 1};
  const int width = static_cast<int>(std::to_string(scenario.n_cases).size());
  for (std::size_t i = 0; i < scenario.n_cases; ++i) {
    const bool l = draws.bernoulli(scenario.confounder_rate);
    const bool x = draws.bernoulli(scenario.subgroup_rate);
    const bool a = draws.bernoulli(scenario.treatment_rate[l]);
    const bool y1 = draws.bernoulli(scenario.treated_outcome[l][x]);
    const bool y0 = draws.bernoulli(scenario.control_outcome[l][x]);
    const bool y = a ? y1 : y0;

    Trace trace;
    trace.case_id = fmt::format("case-{:0{}}", i + 1, width);
    Event e;
    e.activity = "register";
    e.case_id = trace.case_id;
    e.timestamp = start + std::chrono::seconds{static_cast<long long>(i)};
    e.attributes = {{std::string(kConfounderAttribute), bit(l)},
                    {std::string(kSubgroupAttribute), bit(x)},
                    {std::string(kTreatmentAttribute), bit(a)},
                    {std::string(kOutcomeAttribute), bit(y)}};
    trace.events.push_back(std::move(e));
    out.log.add(std::move(trace));
  }
  out.true_cate = {{0, true_cate(scenario, 0)}, {1, true_cate(scenario, 1)}};
  return out;
}

double true_stratum_cate(const SyntheticScenario& scenario, int confounder, std::optional<int> subgroup) {
  if (confounder != 0 && confounder != 1) {
    throw DataError(kModule, fmt::format("unknown confounder stratum {}", confounder));
  }
  const auto cell = [&](int x) {
    return scenario.treated_outcome[confounder][x] - scenario.control_outcome[confounder][x];
  };
  if (subgroup) {
    if (*subgroup != 0 && *subgroup != 1) throw DataError(kModule, fmt::format("unknown subgroup cell {}", *subgroup));
    return cell(*subgroup);
  }
  return scenario.subgroup_rate * cell(1) + (1 - scenario.subgroup_rate) * cell(0);
}

double true_cate(const SyntheticScenario& scenario, int subgroup) {
  if (subgroup != 0 && subgroup != 1) throw DataError(kModule, fmt::format("unknown subgroup cell {}", subgroup));
  return scenario.confounder_rate * true_stratum_cate(scenario, 1, subgroup) +
         (1 - scenario.confounder_rate) * true_stratum_cate(scenario, 0, subgroup);
}

double naive_uplift(const SyntheticScenario& s) {
  // P(Y=1 | A=a) = sum_{l,x} P(l) P(x) P(A=a|l) P(Y^a=1|l,x) / P(A=a)
  double treated_mass = 0, treated_pos = 0, control_mass = 0, control_pos = 0;
  for (int l = 0; l < 2; ++l) {
    const double pl = l ? s.confounder_rate : 1 - s.confounder_rate;
    for (int x = 0; x < 2; ++x) {
      const double px = x ? s.subgroup_rate : 1 - s.subgroup_rate;
      const double pa = s.treatment_rate[static_cast<std::size_t>(l)];
      treated_mass += pl * px * pa;
      treated_pos += pl * px * pa * s.treated_outcome[l][x];
      control_mass += pl * px * (1 - pa);
      control_pos += pl * px * (1 - pa) * s.control_outcome[l][x];
    }
  }
  return treated_pos / treated_mass - control_pos / control_mass;
}

std::vector<AttributeSchema> synthetic_schema(bool include_confounder) {
  std::vector<AttributeSchema> schema;
  if (include_confounder) {
    schema.push_back({std::string(kConfounderAttribute), AttributeKind::categorical, false, {}});
  }
  schema.push_back({std::string(kSubgroupAttribute), AttributeKind::categorical, false, {}});
  schema.push_back({std::string(kTreatmentAttribute), AttributeKind::categorical, true, {}});
  schema.push_back({std::string(kOutcomeAttribute), AttributeKind::categorical, false, {}});
  return schema;
}

SyntheticScenario scenario_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SyntheticScenario s;
    s.confounder_rate = j.value("confounder_rate", s.confounder_rate);
    s.subgroup_rate = j.value("subgroup_rate", s.subgroup_rate);
    if (j.contains("treatment_rate")) s.treatment_rate = j.at("treatment_rate").get<std::array<double, 2>>();
    s.treated_outcome = j.at("treated_outcome").get<std::array<std::array<double, 2>, 2>>();
    s.control_outcome = j.at("control_outcome").get<std::array<std::array<double, 2>, 2>>();
    s.n_cases = j.value("n_cases", s.n_cases);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(kModule, fmt::format("invalid scenario file: {}", e.what()));
  }
}

std::string scenario_to_json(const SyntheticScenario& s) {
  nlohmann::ordered_json j{{"confounder_rate", s.confounder_rate},
                           {"subgroup_rate", s.subgroup_rate},
                           {"treatment_rate", s.treatment_rate},
                           {"treated_outcome", s.treated_outcome},
                           {"control_outcome", s.control_outcome},
                           {"n_cases", s.n_cases},
                           {"seed", s.seed}};
  return j.dump(2) + "\n";
}

}  // namespace procause
