#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procause/action_rules.hpp"
#include "procause/case_table.hpp"

namespace procause {

enum class DivergenceKind { kl, euclid, chi_squared };

std::string_view to_string(DivergenceKind kind);
DivergenceKind parse_divergence_kind(std::string_view text);

// D(p : q) over two discrete distributions of equal length.
//   KL     = sum p_i log2(p_i / q_i)
//   Euclid = sum (p_i - q_i)^2
//   ChiSq  = sum (p_i - q_i)^2 / q_i
// Every component must lie strictly inside (0, 1) and each side must sum to
// one; DataError otherwise.
double divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind);

// Binary outcome shorthand: divergence((p, 1-p), (q, 1-q)).
double divergence(double p, double q, DivergenceKind kind);

// Rows of the case table split by treatment status.
struct TreatmentAssignment {
  std::vector<std::size_t> treated;   // match every `to` value
  std::vector<std::size_t> control;   // match every `from` value
  std::vector<std::size_t> excluded;  // everything else
};

// Throws PositivityError when either group is empty.
TreatmentAssignment assign_groups(const CaseTable& table, const Treatment& treatment);

struct NodeStats {
  std::size_t n_treat = 0;
  std::size_t n_ctrl = 0;
  std::size_t pos_treat = 0;
  std::size_t pos_ctrl = 0;
  double p_treat = 0;  // smoothed P(Y=1 | treated)
  double p_ctrl = 0;   // smoothed P(Y=1 | control)

  std::size_t n() const { return n_treat + n_ctrl; }
  double uplift() const { return p_treat - p_ctrl; }
  bool operator==(const NodeStats&) const = default;
};

// p = (positives + weight * prior) / (n + weight), per group.
NodeStats smoothed_stats(std::size_t n_treat, std::size_t pos_treat, std::size_t n_ctrl,
                         std::size_t pos_ctrl, double prior_treat, double prior_ctrl,
                         double regularization);

// D_after - D_before where D_after weighs each child by its share of
// treated+control rows.
double divergence_gain(const NodeStats& parent, const NodeStats& left, const NodeStats& right,
                       DivergenceKind kind);

// I(A) = H(N^T/N, N^C/N) D(P^T(A) : P^C(A)) + N^T/N H(P^T(A)) + N^C/N H(P^C(A)) + 1/2
// with P^T(A), P^C(A) the left/right shares of the treated and control rows.
// H is binary entropy (base 2) for KL and the Gini index for Euclid and
// ChiSq, whose matching divergence replaces KL. Zero shares use 0 log 0 = 0.
double normalization(const NodeStats& parent, const NodeStats& left, const NodeStats& right,
                     DivergenceKind kind);

// A binary test on one attribute. Numeric: value <= threshold goes left
// (missing values go right). Categorical: label == category goes left.
struct SplitTest {
  std::string attribute;
  bool numeric = false;
  double threshold = 0;
  std::string category;

  bool operator==(const SplitTest&) const = default;
};

struct Split {
  SplitTest test;
  NodeStats left;
  NodeStats right;
  double gain = 0;
  double normalizer = 0;
  double score = 0;  // gain / normalizer
  std::vector<std::size_t> left_treated, left_control, right_treated, right_control;
};

struct TreeParams {
  int max_depth = 5;
  std::size_t min_samples_split = 200;
  std::size_t min_samples_treatment = 50;
  double regularization = 100;
  DivergenceKind divergence = DivergenceKind::kl;

  void validate() const;
};

// Column view of the case table used for split search. Built once and shared
// read-only across trees.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(const CaseTable& table);

  struct Column {
    std::string attribute;
    bool numeric = false;
    std::vector<double> values;       // numeric; NaN when missing
    std::vector<std::string> labels;  // categorical: sorted distinct labels
    std::vector<std::uint32_t> codes; // categorical: index into labels
  };

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column* find(std::string_view attribute) const;
  const std::vector<int>& outcomes() const noexcept { return outcomes_; }
  std::size_t rows() const noexcept { return outcomes_.size(); }

  // True when row satisfies the test on its column.
  bool goes_left(const SplitTest& test, std::size_t row) const;

 private:
  std::vector<Column> columns_;  // sorted by attribute
  std::vector<int> outcomes_;
};

// Candidate splits: numeric thresholds at midpoints between consecutive
// distinct values (at most 100, evenly spaced over the midpoints);
// categorical one-vs-rest per label. Picks the largest gain/I(A) among splits
// whose children keep >= min_samples_treatment treated and >= 1 control row;
// scores within 1e-12 relative of the best go to the first attribute name,
// then the lower threshold or label. None unless the best score is > 0.
std::optional<Split> best_split(const FeatureMatrix& features,
                                std::span<const std::string> attributes,
                                std::span<const std::size_t> treated,
                                std::span<const std::size_t> control, const NodeStats& parent,
                                const TreeParams& params);

struct TreeNode {
  NodeStats stats;
  int depth = 0;
  std::optional<SplitTest> test;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return !test.has_value(); }
};

struct UpliftTree {
  Treatment treatment;
  TreeParams params;
  std::vector<std::string> features;  // attributes offered to the splits
  std::vector<TreeNode> nodes;        // nodes[0] is the root

  int depth() const;
};

// Every attribute of the table except the treatment's own.
std::vector<std::string> candidate_features(const CaseTable& table, const Treatment& treatment);

UpliftTree build_tree(const CaseTable& table, const TreatmentAssignment& assignment,
                      const Treatment& treatment, const TreeParams& params);
UpliftTree build_tree(const FeatureMatrix& features, const TreatmentAssignment& assignment,
                      const Treatment& treatment, std::vector<std::string> attributes,
                      const TreeParams& params);

// One step of a root-to-leaf path.
struct PathCondition {
  enum class Op { less_equal, greater, equal, not_equal };
  std::string attribute;
  Op op = Op::equal;
  double threshold = 0;
  std::string category;

  bool matches(const CaseRecord& row) const;
  std::string to_string() const;
  bool operator==(const PathCondition&) const = default;
};

struct Segment {
  std::vector<PathCondition> predicate;
  double uplift = 0;
  double p_treat = 0;
  double p_ctrl = 0;
  std::size_t n_treat = 0;
  std::size_t n_ctrl = 0;
  std::size_t n_reachable = 0;  // all table rows satisfying the predicate

  bool matches(const CaseRecord& row) const;
  // Conditions on one attribute are merged: "899.5 < CreditScore <= 943.5 and LoanGoal = Car".
  std::string describe() const;
};

// Leaves with uplift >= min_uplift, sorted by uplift descending.
std::vector<Segment> extract_segments(const UpliftTree& tree, const CaseTable& table,
                                      double min_uplift);

std::vector<PathCondition> path_to(const UpliftTree& tree, int node);

// Graphviz rendering: one box per node with n_treat, n_ctrl, p_treat, p_ctrl
// and uplift; edges carry the split condition.
std::string to_dot(const UpliftTree& tree);

}  // namespace procause
