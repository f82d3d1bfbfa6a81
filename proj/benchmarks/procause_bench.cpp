#include <benchmark/benchmark.h>
#include <fmt/format.h>

#include <random>
#include <sstream>
#include <string>

#include "procause/action_rules.hpp"
#include "procause/event_log.hpp"
#include "procause/synthetic.hpp"
#include "procause/uplift_tree.hpp"

using namespace procause;

namespace {

SyntheticScenario scenario(std::size_t n) {
  SyntheticScenario s;
  s.confounder_rate = 0.5;
  s.subgroup_rate = 0.3;
  s.treatment_rate = {0.3, 0.7};
  s.control_outcome = {{{0.2, 0.2}, {0.4, 0.4}}};
  s.treated_outcome = {{{0.2, 0.5}, {0.4, 0.7}}};
  s.n_cases = n;
  s.seed = 11;
  return s;
}

CaseTable synthetic_table(std::size_t n) {
  EncodingOptions o;
  o.positive_labels = {"1"};
  return encode_cases(generate(scenario(n)).log, synthetic_schema(true), kOutcomeAttribute, o);
}

// Numeric noise columns make the split search do real threshold work.
CaseTable with_numeric_noise(CaseTable t, int columns) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise;
  for (int c = 0; c < columns; ++c) {
    const std::string name = fmt::format("z{}", c);
    t.schema.push_back({name, AttributeKind::numeric, false, {}});
    for (auto& r : t.rows) r.features[name] = noise(rng);
  }
  return t;
}

std::string xes_text(std::size_t traces, std::size_t events_per_trace) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n";
  for (std::size_t t = 0; t < traces; ++t) {
    out += fmt::format("<trace><string key=\"concept:name\" value=\"case{}\"/><float key=\"Amount\" value=\"{}\"/>\n",
                       t, 1000.0 + static_cast<double>(t));
    for (std::size_t e = 0; e < events_per_trace; ++e) {
      out += fmt::format(
          "<event><string key=\"concept:name\" value=\"step{}\"/>"
          "<date key=\"time:timestamp\" value=\"2016-01-01T10:{:02}:{:02}.000+01:00\"/>"
          "<int key=\"Offers\" value=\"{}\"/></event>\n",
          e % 7, e / 60 % 60, e % 60, e);
    }
    out += "</trace>\n";
  }
  return out + "</log>\n";
}

void BM_BuildTree(benchmark::State& state) {
  const CaseTable t = with_numeric_noise(synthetic_table(static_cast<std::size_t>(state.range(0))), 4);
  const Treatment tr{{{std::string(kTreatmentAttribute), "0", "1"}}};
  const auto groups = assign_groups(t, tr);
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(t, groups, tr, TreeParams{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildTree)->Arg(5000)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_MineActionRules(benchmark::State& state) {
  std::mt19937_64 rng(9);
  const int attributes = static_cast<int>(state.range(0));
  CaseTable t;
  t.outcome_name = "Y";
  for (int a = 0; a < attributes; ++a) {
    t.schema.push_back({fmt::format("A{}", a), AttributeKind::categorical, a % 2 == 1, {}});
  }
  std::uniform_int_distribution<int> value(0, 3);
  for (int i = 0; i < 20000; ++i) {
    CaseRecord r;
    r.case_id = std::to_string(i);
    int score = 0;
    for (int a = 0; a < attributes; ++a) {
      const int v = value(rng);
      score += v;
      r.features[t.schema[static_cast<std::size_t>(a)].name] = fmt::format("v{}", v);
    }
    r.outcome = std::bernoulli_distribution(score > 1.5 * attributes ? 0.8 : 0.3)(rng) ? 1 : 0;
    t.rows.push_back(std::move(r));
  }
  const MiningParams p{0.03, 0.55, 4};
  for (auto _ : state) benchmark::DoNotOptimize(mine_action_rules(t, p));
}
BENCHMARK(BM_MineActionRules)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ParseXes(benchmark::State& state) {
  const std::string text = xes_text(static_cast<std::size_t>(state.range(0)), 38);
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(parse_xes(in));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseXes)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
