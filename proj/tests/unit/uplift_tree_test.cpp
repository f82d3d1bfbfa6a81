#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "procause/error.hpp"
#include "procause/synthetic.hpp"
#include "procause/uplift_tree.hpp"
#include "support/oracles.hpp"
#include "support/tables.hpp"

namespace procause {
namespace {

using boost::multiprecision::cpp_rational;
using testing::append;
using testing::categorical_table;
using testing::repeat;

constexpr DivergenceKind kAllKinds[] = {DivergenceKind::kl, DivergenceKind::euclid, DivergenceKind::chi_squared};

Treatment treat(std::string attribute, std::string from, std::string to) {
  return Treatment{{{std::move(attribute), std::move(from), std::move(to)}}};
}

// Columns X, T, Y. Left (X=L): treated 4/4 positive, control 1/4.
// Right (X=R): treated 2/4, control 2/4.
CaseTable sixteen_rows() {
  std::vector<std::vector<std::string>> rows;
  append(rows, repeat({"L", "1", "1"}, 4));
  append(rows, repeat({"L", "0", "1"}, 1));
  append(rows, repeat({"L", "0", "0"}, 3));
  append(rows, repeat({"R", "1", "1"}, 2));
  append(rows, repeat({"R", "1", "0"}, 2));
  append(rows, repeat({"R", "0", "1"}, 2));
  append(rows, repeat({"R", "0", "0"}, 2));
  return categorical_table({{"X", AttributeKind::categorical, false, {}},
                            {"T", AttributeKind::categorical, true, {}}},
                           rows);
}

TreeParams small_params(double regularization = 1, DivergenceKind kind = DivergenceKind::kl) {
  TreeParams p;
  p.max_depth = 3;
  p.min_samples_split = 2;
  p.min_samples_treatment = 1;
  p.regularization = regularization;
  p.divergence = kind;
  return p;
}

NodeStats counts(std::size_t nt, std::size_t nc) { return smoothed_stats(nt, 0, nc, 0, 0.5, 0.5, 1); }

// --- divergence ---------------------------------------------------------------

TEST(Divergence, IdenticalIsZero) {
  for (auto k : kAllKinds) EXPECT_EQ(divergence(0.5, 0.5, k), 0.0);
}

TEST(Divergence, HandValues) {
  EXPECT_NEAR(divergence(0.75, 0.25, DivergenceKind::kl), 0.5 * std::log2(3.0), 1e-15);
  EXPECT_NEAR(divergence(0.75, 0.25, DivergenceKind::kl), 0.79248, 1e-5);
  EXPECT_EQ(divergence(0.75, 0.25, DivergenceKind::euclid), 0.5);
  // (0.5^2)/0.25 + (0.5^2)/0.75
  EXPECT_NEAR(divergence(0.75, 0.25, DivergenceKind::chi_squared), 1.0 + 1.0 / 3.0, 1e-15);
}

TEST(Divergence, GeneralDistributions) {
  const std::vector<double> p{0.2, 0.3, 0.5}, q{0.4, 0.4, 0.2};
  double kl = 0;
  for (int i = 0; i < 3; ++i) kl += p[i] * std::log2(p[i] / q[i]);
  EXPECT_NEAR(divergence(p, q, DivergenceKind::kl), kl, 1e-15);
}

TEST(Divergence, RejectsBadArguments) {
  EXPECT_THROW(divergence(0.0, 0.5, DivergenceKind::kl), DataError);
  EXPECT_THROW(divergence(0.5, 1.0, DivergenceKind::euclid), DataError);
  const std::vector<double> p{0.2, 0.2}, q{0.5, 0.5};
  EXPECT_THROW(divergence(p, q, DivergenceKind::kl), DataError);
}

TEST(Divergence, KindNames) {
  EXPECT_EQ(parse_divergence_kind("KL"), DivergenceKind::kl);
  EXPECT_EQ(parse_divergence_kind(to_string(DivergenceKind::chi_squared)), DivergenceKind::chi_squared);
  EXPECT_THROW(parse_divergence_kind("hellinger"), ConfigError);
}

// --- normalization ---------------------------------------------------------------

TEST(Normalization, BalancedIdenticalSplit) {
  EXPECT_EQ(normalization(counts(100, 100), counts(50, 50), counts(50, 50), DivergenceKind::kl), 1.5);
}

TEST(Normalization, EverythingLeft) {
  EXPECT_EQ(normalization(counts(30, 70), counts(30, 70), counts(0, 0), DivergenceKind::kl), 0.5);
}

TEST(Normalization, ConfoundedSplitCostsMore) {
  const double balanced = normalization(counts(100, 100), counts(50, 50), counts(50, 50), DivergenceKind::kl);
  const double skewed = normalization(counts(100, 100), counts(90, 10), counts(10, 90), DivergenceKind::kl);
  // 1 * KL((.9,.1),(.1,.9)) + 0.5 H(.9) + 0.5 H(.1) + 0.5
  const double h = -(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1));
  const double kl = 0.9 * std::log2(9.0) + 0.1 * std::log2(1.0 / 9.0);
  EXPECT_NEAR(skewed, kl + h + 0.5, 1e-12);
  EXPECT_GT(skewed, balanced);
}

TEST(Normalization, GiniForEuclid) {
  // Gini(.5,.5) = .5 for every term; divergence term is zero.
  EXPECT_EQ(normalization(counts(100, 100), counts(50, 50), counts(50, 50), DivergenceKind::euclid), 1.0);
}

// Holding the overall left share fixed, moving treated and control apart
// never lowers I(A).
TEST(NormalizationProperty, MonotoneInDisparity) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0, 1);
  const double total = 1e8;
  for (int trial = 0; trial < 500; ++trial) {
    const double w = 0.02 + 0.96 * u(rng);
    const double q = 0.05 + 0.9 * u(rng);
    const auto nt = static_cast<std::size_t>(w * total), nc = static_cast<std::size_t>((1 - w) * total);
    const double wt = static_cast<double>(nt) / static_cast<double>(nt + nc);
    const double dmax = std::min({(1 - q) / (1 - wt), q / wt, q / (1 - wt), (1 - q) / wt}) * 0.99;
    double d1 = u(rng) * dmax, d2 = u(rng) * dmax;
    if (d1 > d2) std::swap(d1, d2);
    if (d2 - d1 < 1e-3) continue;
    const auto value = [&](double d) {
      const auto lt = static_cast<std::size_t>(std::llround((q + d * (1 - wt)) * static_cast<double>(nt)));
      const auto lc = static_cast<std::size_t>(std::llround((q - d * wt) * static_cast<double>(nc)));
      return normalization(counts(nt, nc), counts(lt, lc), counts(nt - lt, nc - lc), DivergenceKind::kl);
    };
    EXPECT_LE(value(d1), value(d2) + 1e-9) << "w=" << w << " q=" << q;
  }
}

// --- gain ---------------------------------------------------------------------

TEST(Gain, NoSeparationIsZero) {
  // Priors equal to the raw rates keep smoothing from moving anything.
  const NodeStats parent = smoothed_stats(20, 10, 20, 6, 0.5, 0.3, 10);
  const NodeStats left = smoothed_stats(10, 5, 10, 3, parent.p_treat, parent.p_ctrl, 10);
  EXPECT_NEAR(divergence_gain(parent, left, left, DivergenceKind::kl), 0.0, 1e-15);
}

TEST(Gain, PositiveWhenChildSeparatesEqualParent) {
  const NodeStats parent = smoothed_stats(20, 10, 20, 10, 0.5, 0.5, 10);
  const NodeStats left = smoothed_stats(10, 8, 10, 2, parent.p_treat, parent.p_ctrl, 10);
  const NodeStats right = smoothed_stats(10, 2, 10, 8, parent.p_treat, parent.p_ctrl, 10);
  for (auto k : kAllKinds) EXPECT_GT(divergence_gain(parent, left, right, k), 0.0);
}

cpp_rational smoothed(std::size_t pos, std::size_t n, const cpp_rational& prior, const cpp_rational& w) {
  return (cpp_rational(pos) + w * prior) / (cpp_rational(n) + w);
}

cpp_rational euclid(const cpp_rational& p, const cpp_rational& q) { return 2 * (p - q) * (p - q); }

TEST(Gain, SixteenRowsExactRational) {
  const CaseTable t = sixteen_rows();
  const auto g = assign_groups(t, treat("T", "0", "1"));
  const TreeParams params = small_params(3, DivergenceKind::euclid);
  const FeatureMatrix fm(t);
  const cpp_rational w(3);
  const cpp_rational prior(9, 16);
  const NodeStats parent = smoothed_stats(8, 6, 8, 3, 9.0 / 16, 9.0 / 16, 3);
  const std::vector<std::string> attrs{"X"};
  const auto split = best_split(fm, attrs, g.treated, g.control, parent, params);
  ASSERT_TRUE(split.has_value());

  const cpp_rational pt = smoothed(6, 8, prior, w), pc = smoothed(3, 8, prior, w);
  const cpp_rational lt = smoothed(4, 4, pt, w), lc = smoothed(1, 4, pc, w);
  const cpp_rational rt = smoothed(2, 4, pt, w), rc = smoothed(2, 4, pc, w);
  const cpp_rational gain = cpp_rational(1, 2) * euclid(lt, lc) + cpp_rational(1, 2) * euclid(rt, rc) - euclid(pt, pc);
  // Balanced groups and identical split shares: 1/2 * G(1/2) * 2 + 1/2 = 1.
  const cpp_rational norm(1);
  EXPECT_NEAR(split->gain, static_cast<double>(gain), 1e-15);
  EXPECT_EQ(split->normalizer, static_cast<double>(norm));
  EXPECT_NEAR(split->score, static_cast<double>(gain / norm), 1e-15);
  EXPECT_GT(gain, 0);
}

TEST(Gain, SixteenRowsMatchesOracleForEveryKind) {
  const CaseTable t = sixteen_rows();
  const auto g = assign_groups(t, treat("T", "0", "1"));
  for (auto kind : kAllKinds) {
    const TreeParams params = small_params(2, kind);
    const auto want = testing::exhaustive_root_split(t, g, {"X"}, params);
    const UpliftTree tree = build_tree(t, g, treat("T", "0", "1"), params);
    ASSERT_TRUE(want.has_value());
    ASSERT_TRUE(tree.nodes[0].test.has_value());
    EXPECT_EQ(tree.nodes[0].test->category, want->category);
    const auto& l = tree.nodes[static_cast<std::size_t>(tree.nodes[0].left)].stats;
    const auto& r = tree.nodes[static_cast<std::size_t>(tree.nodes[0].right)].stats;
    EXPECT_NEAR(divergence_gain(tree.nodes[0].stats, l, r, kind), static_cast<double>(want->gain), 1e-12);
  }
}

// --- groups -------------------------------------------------------------------

TEST(AssignGroups, EightRowTable) {
  const auto g = assign_groups(testing::eight_row_table(), treat("F", "a", "b"));
  EXPECT_EQ(g.treated, (std::vector<std::size_t>{3, 4, 5, 7}));
  EXPECT_EQ(g.control, (std::vector<std::size_t>{0, 1, 2, 6}));
  EXPECT_TRUE(g.excluded.empty());
}

TEST(AssignGroups, ThirdValueExcluded) {
  CaseTable t = testing::eight_row_table();
  t.rows[0].features["F"] = std::string("c");
  const auto g = assign_groups(t, treat("F", "a", "b"));
  EXPECT_EQ(g.excluded, (std::vector<std::size_t>{0}));
  EXPECT_EQ(g.treated.size() + g.control.size() + g.excluded.size(), t.size());
}

TEST(AssignGroups, CompoundTreatmentIsConjunction) {
  const CaseTable t = categorical_table({{"F", AttributeKind::categorical, true, {}},
                                         {"G", AttributeKind::categorical, true, {}}},
                                        {{"b", "y", "1"}, {"b", "x", "0"}, {"a", "x", "0"}, {"a", "y", "1"}});
  const Treatment tr{{{"F", "a", "b"}, {"G", "x", "y"}}};
  const auto g = assign_groups(t, tr);
  EXPECT_EQ(g.treated, (std::vector<std::size_t>{0}));
  EXPECT_EQ(g.control, (std::vector<std::size_t>{2}));
  EXPECT_EQ(g.excluded, (std::vector<std::size_t>{1, 3}));
}

TEST(AssignGroups, PositivityErrorNamesTreatment) {
  try {
    assign_groups(testing::eight_row_table(), treat("F", "a", "zzz"));
    FAIL();
  } catch (const PositivityError& e) {
    EXPECT_EQ(e.treatment(), "(F: a → zzz)");
  }
}

TEST(AssignGroups, UnknownAttribute) {
  EXPECT_THROW(assign_groups(testing::eight_row_table(), treat("Q", "a", "b")), DataError);
}

// --- best split / tree ----------------------------------------------------------

TEST(BestSplit, SingleDistinctVectorHasNone) {
  std::vector<std::vector<std::string>> rows;
  append(rows, repeat({"k", "1", "1"}, 5));
  append(rows, repeat({"k", "0", "0"}, 5));
  append(rows, repeat({"k", "1", "0"}, 2));
  const CaseTable t = categorical_table({{"X", AttributeKind::categorical, false, {}},
                                         {"T", AttributeKind::categorical, true, {}}},
                                        rows);
  const UpliftTree tree = build_tree(t, assign_groups(t, treat("T", "0", "1")), treat("T", "0", "1"), small_params());
  EXPECT_EQ(tree.nodes.size(), 1u);
}

TEST(BestSplit, TieGoesToFirstAttributeName) {
  CaseTable t = sixteen_rows();
  t.schema.push_back({"A", AttributeKind::categorical, false, {}});
  for (auto& r : t.rows) r.features["A"] = r.features["X"];
  const UpliftTree tree = build_tree(t, assign_groups(t, treat("T", "0", "1")), treat("T", "0", "1"), small_params());
  ASSERT_TRUE(tree.nodes[0].test.has_value());
  EXPECT_EQ(tree.nodes[0].test->attribute, "A");
  EXPECT_EQ(tree.nodes[0].test->category, "L");
}

TEST(BuildTree, IndependentOutcomeIsOneLeaf) {
  std::vector<std::vector<std::string>> rows;
  for (const char* x : {"p", "q", "r"}) {
    for (const char* a : {"0", "1"}) {
      append(rows, repeat({x, a, "1"}, 40));
      append(rows, repeat({x, a, "0"}, 40));
    }
  }
  const CaseTable t = categorical_table({{"X", AttributeKind::categorical, false, {}},
                                         {"T", AttributeKind::categorical, true, {}}},
                                        rows);
  const UpliftTree tree = build_tree(t, assign_groups(t, treat("T", "0", "1")), treat("T", "0", "1"), small_params());
  EXPECT_EQ(tree.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(tree.nodes[0].stats.uplift(), 0.0);
}

TEST(BuildTree, ConstantOutcomeIsOneLeaf) {
  std::vector<std::vector<std::string>> rows;
  append(rows, repeat({"p", "1", "0"}, 10));
  append(rows, repeat({"q", "0", "0"}, 10));
  const CaseTable t = categorical_table({{"X", AttributeKind::categorical, false, {}},
                                         {"T", AttributeKind::categorical, true, {}}},
                                        rows);
  EXPECT_EQ(build_tree(t, assign_groups(t, treat("T", "0", "1")), treat("T", "0", "1"), small_params()).nodes.size(),
            1u);
}

TEST(BuildTree, ExperimentSettingsAreTheDefaults) {
  const TreeParams p;
  EXPECT_EQ(p.max_depth, 5);
  EXPECT_EQ(p.min_samples_split, 200u);
  EXPECT_EQ(p.min_samples_treatment, 50u);
  EXPECT_EQ(p.regularization, 100.0);
  EXPECT_EQ(p.divergence, DivergenceKind::kl);
  EXPECT_NO_THROW(p.validate());
  TreeParams bad;
  bad.regularization = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(BuildTree, RootPositivityUsesTreatedMinimum) {
  const CaseTable t = sixteen_rows();
  TreeParams p = small_params();
  p.min_samples_treatment = 9;
  EXPECT_THROW(build_tree(t, assign_groups(t, treat("T", "0", "1")), treat("T", "0", "1"), p), PositivityError);
}

TEST(BuildTree, TreatmentAttributeIsNotOffered) {
  const auto f = candidate_features(sixteen_rows(), treat("T", "0", "1"));
  EXPECT_EQ(f, std::vector<std::string>{"X"});
}

CaseTable planted(std::size_t n, std::uint64_t seed, bool with_confounder) {
  SyntheticScenario s;
  s.subgroup_rate = 0.3;
  s.control_outcome = {{{0.2, 0.2}, {0.2, 0.2}}};
  s.treated_outcome = {{{0.2, 0.5}, {0.2, 0.5}}};
  s.n_cases = n;
  s.seed = seed;
  return encode_cases(generate(s).log, synthetic_schema(with_confounder), kOutcomeAttribute, {{"1"}});
}

TEST(BuildTree, PlantedSubgroupIsFirstSplit) {
  const CaseTable t = planted(20000, 42, true);
  const Treatment tr = treat("treatment", "0", "1");
  const UpliftTree tree = build_tree(t, assign_groups(t, tr), tr, TreeParams{});
  ASSERT_TRUE(tree.nodes[0].test.has_value());
  EXPECT_EQ(tree.nodes[0].test->attribute, "subgroup");
}

TEST(BuildTreeProperty, StructuralInvariants) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    CaseTable t = testing::random_categorical_table(rng, 4, 400, 4, 0b0001);
    for (auto& r : t.rows) r.features["A0"] = std::string(std::bernoulli_distribution(0.5)(rng) ? "v1" : "v0");
    const Treatment tr = treat("A0", "v0", "v1");
    TreeParams p;
    p.max_depth = 4;
    p.min_samples_split = 40;
    p.min_samples_treatment = 10;
    p.regularization = 5;
    p.divergence = kAllKinds[trial % 3];
    const auto g = assign_groups(t, tr);
    const UpliftTree tree = build_tree(t, g, tr, p);
    EXPECT_LE(tree.depth(), p.max_depth);
    for (const auto& node : tree.nodes) {
      EXPECT_GE(node.stats.n_treat, p.min_samples_treatment);
      EXPECT_GE(node.stats.n_ctrl, 1u);
      EXPECT_GT(node.stats.p_treat, 0.0);
      EXPECT_LT(node.stats.p_treat, 1.0);
      if (node.is_leaf()) continue;
      EXPECT_GE(node.stats.n(), p.min_samples_split);
      const auto& l = tree.nodes[static_cast<std::size_t>(node.left)].stats;
      const auto& r = tree.nodes[static_cast<std::size_t>(node.right)].stats;
      EXPECT_EQ(l.n_treat + r.n_treat, node.stats.n_treat);
      EXPECT_EQ(l.n_ctrl + r.n_ctrl, node.stats.n_ctrl);
      EXPECT_EQ(l.pos_treat + r.pos_treat, node.stats.pos_treat);
      EXPECT_EQ(l.pos_ctrl + r.pos_ctrl, node.stats.pos_ctrl);
    }
    EXPECT_EQ(to_dot(build_tree(t, g, tr, p)), to_dot(tree));
  }
}

// Small random tables with numeric (tied, partly missing) and categorical
// features; the root split must equal exhaustive search.
TEST(BuildTreeProperty, RootSplitMatchesExhaustiveSearch) {
  std::mt19937_64 rng(37);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = std::uniform_int_distribution<int>(6, 32)(rng);
    const int n_attr = std::uniform_int_distribution<int>(1, 3)(rng);
    CaseTable t;
    t.outcome_name = "Y";
    t.schema.push_back({"T", AttributeKind::categorical, true, {}});
    for (int a = 0; a < n_attr; ++a) {
      const bool numeric = std::bernoulli_distribution(0.5)(rng);
      t.schema.push_back({std::string(1, static_cast<char>('a' + a)),
                          numeric ? AttributeKind::numeric : AttributeKind::categorical, false, {}});
    }
    for (int i = 0; i < n; ++i) {
      CaseRecord r;
      r.case_id = std::to_string(i);
      r.features["T"] = std::string(i % 2 ? "1" : "0");
      for (std::size_t a = 1; a < t.schema.size(); ++a) {
        if (t.schema[a].kind == AttributeKind::numeric) {
          if (std::bernoulli_distribution(0.1)(rng)) {
            r.features[t.schema[a].name] = std::monostate{};
          } else {
            r.features[t.schema[a].name] = static_cast<double>(std::uniform_int_distribution<int>(0, 9)(rng));
          }
        } else {
          r.features[t.schema[a].name] = std::string(1, static_cast<char>('p' + std::uniform_int_distribution<int>(0, 2)(rng)));
        }
      }
      r.outcome = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
      t.rows.push_back(std::move(r));
    }
    const Treatment tr = treat("T", "0", "1");
    const auto g = assign_groups(t, tr);
    const int pooled = std::count_if(t.rows.begin(), t.rows.end(), [](const CaseRecord& r) { return r.outcome == 1; });
    if (pooled == 0 || pooled == n) continue;
    TreeParams p = small_params(std::uniform_real_distribution<double>(0.5, 10)(rng), kAllKinds[trial % 3]);
    p.max_depth = 1;
    const UpliftTree tree = build_tree(t, g, tr, p);
    const auto want = testing::exhaustive_root_split(t, g, candidate_features(t, tr), p);
    ASSERT_EQ(tree.nodes[0].test.has_value(), want.has_value()) << "trial " << trial;
    if (!want) continue;
    ++compared;
    const SplitTest& got = *tree.nodes[0].test;
    EXPECT_EQ(got.attribute, want->attribute);
    EXPECT_EQ(got.numeric, want->numeric);
    EXPECT_EQ(got.threshold, want->threshold);
    EXPECT_EQ(got.category, want->category);
  }
  EXPECT_GT(compared, 50);
}

// --- segments -------------------------------------------------------------------

TEST(Segments, AboveOneIsEmpty) {
  const CaseTable t = sixteen_rows();
  const Treatment tr = treat("T", "0", "1");
  const UpliftTree tree = build_tree(t, assign_groups(t, tr), tr, small_params());
  EXPECT_TRUE(extract_segments(tree, t, 1.1).empty());
  const auto all = extract_segments(tree, t, -1.0);
  std::size_t leaves = 0;
  for (const auto& n : tree.nodes) leaves += n.is_leaf() ? 1 : 0;
  EXPECT_EQ(all.size(), leaves);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GE(all[i - 1].uplift, all[i].uplift);
}

TEST(Segments, SingleLeaf) {
  const CaseTable t = sixteen_rows();
  UpliftTree tree;
  tree.treatment = treat("T", "0", "1");
  TreeNode root;
  root.stats = NodeStats{4, 4, 3, 1, 0.75, 0.25};
  tree.nodes.push_back(root);
  const auto segments = extract_segments(tree, t, 0.4);
  ASSERT_EQ(segments.size(), 1u);
  EXPECT_DOUBLE_EQ(segments[0].uplift, 0.5);
  EXPECT_EQ(segments[0].n_reachable, t.size());
  EXPECT_EQ(segments[0].describe(), "all cases");
}

TEST(Segments, PredicateWording) {
  Segment s;
  s.predicate = {{"CreditScore", PathCondition::Op::greater, 899.5, {}},
                 {"CreditScore", PathCondition::Op::less_equal, 943.5, {}},
                 {"FirstWithdrawalAmount", PathCondition::Op::less_equal, 8304, {}},
                 {"LoanGoal", PathCondition::Op::equal, 0, "Car"}};
  EXPECT_EQ(s.describe(), "899.5 < CreditScore <= 943.5 and FirstWithdrawalAmount <= 8304 and LoanGoal = Car");
}

TEST(Segments, PathConditionsMatchRows) {
  CaseRecord r;
  r.features["x"] = 3.0;
  r.features["g"] = std::string("a");
  EXPECT_TRUE((PathCondition{"x", PathCondition::Op::less_equal, 3.0, {}}.matches(r)));
  EXPECT_FALSE((PathCondition{"x", PathCondition::Op::greater, 3.0, {}}.matches(r)));
  EXPECT_TRUE((PathCondition{"g", PathCondition::Op::not_equal, 0, "b"}.matches(r)));
  r.features["x"] = std::monostate{};
  EXPECT_TRUE((PathCondition{"x", PathCondition::Op::greater, 3.0, {}}.matches(r)));
}

TEST(Dot, LabelsCarryNodeStatistics) {
  const CaseTable t = sixteen_rows();
  const Treatment tr = treat("T", "0", "1");
  const std::string dot = to_dot(build_tree(t, assign_groups(t, tr), tr, small_params()));
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  for (const char* key : {"n_treat=", "n_ctrl=", "p_treat=", "p_ctrl=", "uplift="}) {
    EXPECT_NE(dot.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace procause
