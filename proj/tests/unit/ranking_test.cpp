#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "procause/error.hpp"
#include "procause/ranking.hpp"

namespace procause {
namespace {

Treatment treat(std::string to) { return Treatment{{{"Offer", "none", std::move(to)}}}; }

Segment segment(std::size_t n, double uplift, std::string category = "a") {
  Segment s;
  s.predicate = {{"G", PathCondition::Op::equal, 0, std::move(category)}};
  s.n_reachable = n;
  s.uplift = uplift;
  return s;
}

TEST(NetValue, Arithmetic) {
  EXPECT_DOUBLE_EQ(net_value(100, 0.1, {50, 2}), 300.0);
  EXPECT_DOUBLE_EQ(net_value(40, 0.0, {50, 2}), -80.0);
  EXPECT_EQ(net_value(1234, 0.04, {50, 2}), 0.0);
}

TEST(NetValue, LinearInNAndV) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1, 1), pos(0, 100);
  for (int i = 0; i < 1000; ++i) {
    const double n = std::floor(pos(rng)), up = u(rng), v = pos(rng), c = pos(rng);
    EXPECT_NEAR(net_value(2 * n, up, {v, c}), 2 * net_value(n, up, {v, c}), 1e-9);
    EXPECT_NEAR(net_value(n, up, {2 * v, 0}), 2 * net_value(n, up, {v, 0}), 1e-9);
  }
}

TEST(Rank, OrdersByNetAndFlagsLosses) {
  CostTable costs;
  costs.fallback = CostModel{50, 2};
  const std::vector<TreatmentSegments> in{{treat("gift"), {segment(100, 0.1), segment(10, 0.02, "b")}}};
  const auto out = rank(in, costs);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].net, 300.0);
  EXPECT_TRUE(out[0].profitable());
  EXPECT_DOUBLE_EQ(out[1].net, -10.0);
  EXPECT_FALSE(out[1].profitable());
  for (const auto& r : out) EXPECT_DOUBLE_EQ(r.net, r.incremental_value - r.incremental_cost);
}

TEST(Rank, EqualNetsPreferHigherUplift) {
  CostTable costs;
  const std::vector<TreatmentSegments> in{{treat("a"), {segment(200, 0.2, "low")}},
                                          {treat("b"), {segment(100, 0.4, "x"), segment(150, 0.3, "y")}}};
  costs.fallback = CostModel{1, 0.1};
  // nets: 200*(0.1)=20, 100*(0.3)=30, 150*(0.2)=30
  const auto out = rank(in, costs);
  EXPECT_DOUBLE_EQ(out[0].uplift, 0.4);
  EXPECT_DOUBLE_EQ(out[1].uplift, 0.3);
  EXPECT_DOUBLE_EQ(out[2].uplift, 0.2);
}

TEST(Rank, PerTreatmentOverridesAndMissingModel) {
  CostTable costs;
  costs.fallback.reset();
  costs.per_treatment[treat("gift").label()] = CostModel{10, 1};
  const std::vector<TreatmentSegments> ok{{treat("gift"), {segment(10, 0.5)}}};
  EXPECT_DOUBLE_EQ(rank(ok, costs)[0].net, 40.0);
  const std::vector<TreatmentSegments> missing{{treat("call"), {segment(10, 0.5)}}};
  try {
    rank(missing, costs);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(treat("call").label()), std::string::npos);
  }
}

TEST(Rank, NegativeCostRejected) {
  CostTable costs;
  costs.fallback = CostModel{1, -1};
  const std::vector<TreatmentSegments> in{{treat("a"), {segment(1, 0.1)}}};
  EXPECT_THROW(rank(in, costs), ConfigError);
}

TEST(RankProperty, PermutationAndCostMonotonicity) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto key = [](const Recommendation& r) { return r.treatment.label() + "|" + r.segment.describe(); };
  for (int trial = 0; trial < 200; ++trial) {
    // Same n everywhere, so a uniform cost change shifts every net equally.
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 500)(rng);
    std::vector<TreatmentSegments> in;
    std::set<std::string> inputs;
    for (int t = 0; t < 3; ++t) {
      TreatmentSegments g{treat("t" + std::to_string(t)), {}};
      for (int s = 0; s < 4; ++s) g.segments.push_back(segment(n, u(rng), "s" + std::to_string(s)));
      in.push_back(std::move(g));
    }
    for (const auto& g : in) {
      for (const auto& s : g.segments) inputs.insert(g.treatment.label() + "|" + s.describe());
    }
    CostTable high, low;
    high.fallback = CostModel{10, 2};
    low.fallback = CostModel{10, 1};
    const auto a = rank(in, high);
    const auto b = rank(in, low);
    std::set<std::string> outputs;
    for (const auto& r : a) outputs.insert(key(r));
    EXPECT_EQ(outputs, inputs);
    ASSERT_EQ(a.size(), inputs.size());
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GE(a[i - 1].net, a[i].net);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(key(a[i]), key(b[i]));
  }
}

TEST(Csv, Columns) {
  CostTable costs;
  const std::vector<TreatmentSegments> in{{treat("gift"), {segment(100, 0.25)}}};
  const std::string csv = write_ranking_csv(rank(in, costs));
  EXPECT_EQ(csv,
            "treatment,segment,n,uplift,incremental_value,incremental_cost,net,flag\n"
            "(Offer: none → gift),G = a,100,0.25,25,0,25,profitable\n");
}

}  // namespace
}  // namespace procause
