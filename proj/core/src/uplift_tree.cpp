#include "procause/uplift_tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "procause/error.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "uplift_tree";
constexpr std::size_t kMaxThresholds = 100;
constexpr double kTieTolerance = 1e-12;

std::string number_text(double v) { return fmt::format("{}", v); }

struct GroupCounts {
  std::size_t n_treat = 0, pos_treat = 0, n_ctrl = 0, pos_ctrl = 0;

  void add(bool treated, int outcome) {
    if (treated) {
      ++n_treat;
      pos_treat += static_cast<std::size_t>(outcome);
    } else {
      ++n_ctrl;
      pos_ctrl += static_cast<std::size_t>(outcome);
    }
  }
  GroupCounts minus(const GroupCounts& o) const {
    return {n_treat - o.n_treat, pos_treat - o.pos_treat, n_ctrl - o.n_ctrl, pos_ctrl - o.pos_ctrl};
  }
};

struct Candidate {
  SplitTest test;
  GroupCounts left;
  double score = 0;
};

// Midpoint indices kept when a column has more distinct values than the cap.
std::vector<std::size_t> threshold_positions(std::size_t midpoints) {
  std::vector<std::size_t> pos;
  if (midpoints <= kMaxThresholds) {
    pos.resize(midpoints);
    for (std::size_t i = 0; i < midpoints; ++i) pos[i] = i;
    return pos;
  }
  pos.reserve(kMaxThresholds);
  for (std::size_t j = 1; j <= kMaxThresholds; ++j) pos.push_back(j * midpoints / (kMaxThresholds + 1));
  return pos;
}

double optional_feature(const CaseRecord& row, const std::string& attribute, bool& present) {
  if (const auto it = row.raw_numeric.find(attribute); it != row.raw_numeric.end()) {
    present = true;
    return it->second;
  }
  if (const auto it = row.features.find(attribute); it != row.features.end()) {
    if (const auto* d = std::get_if<double>(&it->second)) {
      present = true;
      return *d;
    }
  }
  present = false;
  return 0;
}

}  // namespace

TreatmentAssignment assign_groups(const CaseTable& table, const Treatment& treatment) {
  if (treatment.changes.empty()) throw ConfigError(kModule, "treatment has no changes");
  for (const auto& c : treatment.changes) {
    const AttributeSchema* attr = table.find_attribute(c.attribute);
    if (!attr) {
      throw DataError(kModule, fmt::format("treatment attribute '{}' is not in the case table", c.attribute));
    }
    if (attr->kind == AttributeKind::numeric && !table.is_discretized(c.attribute)) {
      throw DataError(kModule, fmt::format("treatment attribute '{}' is not discretized", c.attribute));
    }
  }
  TreatmentAssignment a;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool is_treated = true;
    bool is_control = true;
    for (const auto& c : treatment.changes) {
      const std::string label = label_of(table.rows[r].features.at(c.attribute));
      is_treated = is_treated && label == c.to;
      is_control = is_control && label == c.from;
    }
    if (is_treated) {
      a.treated.push_back(r);
    } else if (is_control) {
      a.control.push_back(r);
    } else {
      a.excluded.push_back(r);
    }
  }
  if (a.treated.empty() || a.control.empty()) {
    throw PositivityError(kModule,
                          fmt::format("treatment {} has {} treated and {} control cases",
                                      treatment.label(), a.treated.size(), a.control.size()),
                          treatment.label());
  }
  return a;
}

void TreeParams::validate() const {
  if (max_depth < 0) throw ConfigError(kModule, "max_depth must be >= 0");
  if (!(regularization > 0) || !std::isfinite(regularization)) {
    throw ConfigError(kModule, fmt::format("regularization must be > 0, got {}", regularization));
  }
}

FeatureMatrix::FeatureMatrix(const CaseTable& table) {
  std::vector<const AttributeSchema*> attrs;
  for (const auto& a : table.schema) attrs.push_back(&a);
  std::sort(attrs.begin(), attrs.end(), [](auto* a, auto* b) { return a->name < b->name; });
  const std::size_t n = table.rows.size();
  for (const auto* attr : attrs) {
    Column col;
    col.attribute = attr->name;
    col.numeric = attr->kind == AttributeKind::numeric;
    if (col.numeric) {
      col.values.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        bool present = false;
        const double v = optional_feature(table.rows[r], attr->name, present);
        col.values[r] = present ? v : std::numeric_limits<double>::quiet_NaN();
      }
    } else {
      std::vector<std::string> row_labels(n);
      for (std::size_t r = 0; r < n; ++r) row_labels[r] = label_of(table.rows[r].features.at(attr->name));
      col.labels = row_labels;
      std::sort(col.labels.begin(), col.labels.end());
      col.labels.erase(std::unique(col.labels.begin(), col.labels.end()), col.labels.end());
      col.codes.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        col.codes[r] = static_cast<std::uint32_t>(
            std::lower_bound(col.labels.begin(), col.labels.end(), row_labels[r]) - col.labels.begin());
      }
    }
    columns_.push_back(std::move(col));
  }
  outcomes_.resize(n);
  for (std::size_t r = 0; r < n; ++r) outcomes_[r] = table.rows[r].outcome;
}

const FeatureMatrix::Column* FeatureMatrix::find(std::string_view attribute) const {
  const auto it = std::lower_bound(columns_.begin(), columns_.end(), attribute,
                                   [](const Column& c, std::string_view a) { return c.attribute < a; });
  return it != columns_.end() && it->attribute == attribute ? &*it : nullptr;
}

bool FeatureMatrix::goes_left(const SplitTest& test, std::size_t row) const {
  const Column* col = find(test.attribute);
  if (!col) throw DataError(kModule, fmt::format("unknown split attribute '{}'", test.attribute));
  if (test.numeric) return col->values[row] <= test.threshold;  // NaN goes right
  return col->labels[col->codes[row]] == test.category;
}

std::optional<Split> best_split(const FeatureMatrix& features,
                                std::span<const std::string> attributes,
                                std::span<const std::size_t> treated,
                                std::span<const std::size_t> control, const NodeStats& parent,
                                const TreeParams& params) {
  if (treated.empty() || control.empty()) return std::nullopt;
  const auto& outcomes = features.outcomes();
  GroupCounts total;
  for (std::size_t r : treated) total.add(true, outcomes[r]);
  for (std::size_t r : control) total.add(false, outcomes[r]);

  std::vector<Candidate> candidates;
  const auto consider = [&](SplitTest test, const GroupCounts& left) {
    const GroupCounts right = total.minus(left);
    if (left.n_treat < params.min_samples_treatment || right.n_treat < params.min_samples_treatment ||
        left.n_ctrl < 1 || right.n_ctrl < 1) {
      return;
    }
    const NodeStats l = smoothed_stats(left.n_treat, left.pos_treat, left.n_ctrl, left.pos_ctrl,
                                       parent.p_treat, parent.p_ctrl, params.regularization);
    const NodeStats r = smoothed_stats(right.n_treat, right.pos_treat, right.n_ctrl, right.pos_ctrl,
                                       parent.p_treat, parent.p_ctrl, params.regularization);
    const double gain = divergence_gain(parent, l, r, params.divergence);
    const double norm = normalization(parent, l, r, params.divergence);
    candidates.push_back({std::move(test), left, gain / norm});
  };

  std::vector<std::string> ordered(attributes.begin(), attributes.end());
  std::sort(ordered.begin(), ordered.end());
  struct Item {
    double value;
    bool treated;
    int outcome;
  };
  std::vector<Item> items;
  for (const auto& name : ordered) {
    const FeatureMatrix::Column* col = features.find(name);
    if (!col) throw DataError(kModule, fmt::format("unknown feature '{}'", name));
    if (col->numeric) {
      items.clear();
      for (std::size_t r : treated) {
        if (!std::isnan(col->values[r])) items.push_back({col->values[r], true, outcomes[r]});
      }
      for (std::size_t r : control) {
        if (!std::isnan(col->values[r])) items.push_back({col->values[r], false, outcomes[r]});
      }
      std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.value < b.value; });
      // Cumulative counts at the end of each run of equal values.
      std::vector<double> run_values;
      std::vector<GroupCounts> run_counts;
      GroupCounts acc;
      for (std::size_t i = 0; i < items.size(); ++i) {
        acc.add(items[i].treated, items[i].outcome);
        if (i + 1 == items.size() || items[i + 1].value != items[i].value) {
          run_values.push_back(items[i].value);
          run_counts.push_back(acc);
        }
      }
      if (run_values.size() < 2) continue;
      for (std::size_t m : threshold_positions(run_values.size() - 1)) {
        const double threshold = run_values[m] + (run_values[m + 1] - run_values[m]) / 2;
        consider(SplitTest{name, true, threshold, {}}, run_counts[m]);
      }
    } else {
      std::vector<GroupCounts> per_label(col->labels.size());
      for (std::size_t r : treated) per_label[col->codes[r]].add(true, outcomes[r]);
      for (std::size_t r : control) per_label[col->codes[r]].add(false, outcomes[r]);
      std::size_t present = 0;
      for (const auto& c : per_label) present += (c.n_treat + c.n_ctrl) > 0 ? 1 : 0;
      if (present < 2) continue;
      for (std::size_t code = 0; code < per_label.size(); ++code) {
        if (per_label[code].n_treat + per_label[code].n_ctrl == 0) continue;
        consider(SplitTest{name, false, 0, col->labels[code]}, per_label[code]);
      }
    }
  }

  if (candidates.empty()) return std::nullopt;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::max(best, c.score);
  if (!(best > 0)) return std::nullopt;
  const double floor = best - kTieTolerance * std::abs(best);
  const auto chosen = std::find_if(candidates.begin(), candidates.end(),
                                   [&](const Candidate& c) { return c.score >= floor; });

  Split split;
  split.test = chosen->test;
  const GroupCounts right = total.minus(chosen->left);
  split.left = smoothed_stats(chosen->left.n_treat, chosen->left.pos_treat, chosen->left.n_ctrl,
                              chosen->left.pos_ctrl, parent.p_treat, parent.p_ctrl, params.regularization);
  split.right = smoothed_stats(right.n_treat, right.pos_treat, right.n_ctrl, right.pos_ctrl,
                               parent.p_treat, parent.p_ctrl, params.regularization);
  split.gain = divergence_gain(parent, split.left, split.right, params.divergence);
  split.normalizer = normalization(parent, split.left, split.right, params.divergence);
  split.score = chosen->score;
  for (std::size_t r : treated) {
    (features.goes_left(split.test, r) ? split.left_treated : split.right_treated).push_back(r);
  }
  for (std::size_t r : control) {
    (features.goes_left(split.test, r) ? split.left_control : split.right_control).push_back(r);
  }
  return split;
}

int UpliftTree::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::vector<std::string> candidate_features(const CaseTable& table, const Treatment& treatment) {
  std::set<std::string> skip;
  for (const auto& c : treatment.changes) skip.insert(c.attribute);
  std::vector<std::string> out;
  for (const auto& a : table.schema) {
    if (!skip.contains(a.name)) out.push_back(a.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& features, const std::vector<std::string>& attributes,
             const TreeParams& params, UpliftTree& tree)
      : features_(features), attributes_(attributes), params_(params), tree_(tree) {}

  void grow(int node, const std::vector<std::size_t>& treated, const std::vector<std::size_t>& control) {
    const TreeNode& current = tree_.nodes[static_cast<std::size_t>(node)];
    if (current.depth >= params_.max_depth) return;
    if (current.stats.n() < params_.min_samples_split) return;
    const NodeStats parent = current.stats;
    auto split = best_split(features_, attributes_, treated, control, parent, params_);
    if (!split) return;

    const int depth = current.depth + 1;
    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{split->left, depth, std::nullopt, -1, -1});
    const int right = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{split->right, depth, std::nullopt, -1, -1});
    TreeNode& self = tree_.nodes[static_cast<std::size_t>(node)];
    self.test = split->test;
    self.left = left;
    self.right = right;
    grow(left, split->left_treated, split->left_control);
    grow(right, split->right_treated, split->right_control);
  }

 private:
  const FeatureMatrix& features_;
  const std::vector<std::string>& attributes_;
  const TreeParams& params_;
  UpliftTree& tree_;
};

}  // namespace

UpliftTree build_tree(const FeatureMatrix& features, const TreatmentAssignment& assignment,
                      const Treatment& treatment, std::vector<std::string> attributes,
                      const TreeParams& params) {
  params.validate();
  if (assignment.treated.empty() || assignment.control.empty() ||
      assignment.treated.size() < params.min_samples_treatment) {
    throw PositivityError(kModule,
                          fmt::format("treatment {} has {} treated (minimum {}) and {} control cases",
                                      treatment.label(), assignment.treated.size(),
                                      std::max<std::size_t>(1, params.min_samples_treatment),
                                      assignment.control.size()),
                          treatment.label());
  }
  std::sort(attributes.begin(), attributes.end());
  UpliftTree tree;
  tree.treatment = treatment;
  tree.params = params;
  tree.features = attributes;

  const auto& outcomes = features.outcomes();
  std::size_t pos_treat = 0, pos_ctrl = 0;
  for (std::size_t r : assignment.treated) pos_treat += static_cast<std::size_t>(outcomes[r]);
  for (std::size_t r : assignment.control) pos_ctrl += static_cast<std::size_t>(outcomes[r]);
  const std::size_t n_treat = assignment.treated.size();
  const std::size_t n_ctrl = assignment.control.size();
  const double pooled = static_cast<double>(pos_treat + pos_ctrl) / static_cast<double>(n_treat + n_ctrl);

  const NodeStats root = smoothed_stats(n_treat, pos_treat, n_ctrl, pos_ctrl, pooled, pooled,
                                        params.regularization);
  tree.nodes.push_back(TreeNode{root, 0, std::nullopt, -1, -1});
  // A pooled rate of 0 or 1 leaves no outcome variation to split on.
  if (pooled > 0 && pooled < 1) {
    TreeGrower(features, tree.features, params, tree).grow(0, assignment.treated, assignment.control);
  }
  return tree;
}

UpliftTree build_tree(const CaseTable& table, const TreatmentAssignment& assignment,
                      const Treatment& treatment, const TreeParams& params) {
  const FeatureMatrix features(table);
  return build_tree(features, assignment, treatment, candidate_features(table, treatment), params);
}

bool PathCondition::matches(const CaseRecord& row) const {
  switch (op) {
    case Op::less_equal:
    case Op::greater: {
      bool present = false;
      const double v = optional_feature(row, attribute, present);
      const bool left = present && v <= threshold;
      return op == Op::less_equal ? left : !left;
    }
    case Op::equal:
    case Op::not_equal: {
      const auto it = row.features.find(attribute);
      const std::string label = it == row.features.end() ? std::string(kMissingLabel) : label_of(it->second);
      return (label == category) == (op == Op::equal);
    }
  }
  return false;
}

std::string PathCondition::to_string() const {
  switch (op) {
    case Op::less_equal:
      return fmt::format("{} <= {}", attribute, number_text(threshold));
    case Op::greater:
      return fmt::format("{} > {}", attribute, number_text(threshold));
    case Op::equal:
      return fmt::format("{} = {}", attribute, category);
    case Op::not_equal:
      return fmt::format("{} != {}", attribute, category);
  }
  return {};
}

bool Segment::matches(const CaseRecord& row) const {
  return std::all_of(predicate.begin(), predicate.end(),
                     [&](const PathCondition& c) { return c.matches(row); });
}

std::string Segment::describe() const {
  if (predicate.empty()) return "all cases";
  std::vector<std::string> order;
  struct Merged {
    std::optional<double> lower, upper;
    std::optional<std::string> equal;
    std::vector<std::string> excluded;
  };
  std::map<std::string, Merged> merged;
  for (const auto& c : predicate) {
    if (!merged.contains(c.attribute)) order.push_back(c.attribute);
    Merged& m = merged[c.attribute];
    switch (c.op) {
      case PathCondition::Op::less_equal:
        m.upper = m.upper ? std::min(*m.upper, c.threshold) : c.threshold;
        break;
      case PathCondition::Op::greater:
        m.lower = m.lower ? std::max(*m.lower, c.threshold) : c.threshold;
        break;
      case PathCondition::Op::equal:
        m.equal = c.category;
        break;
      case PathCondition::Op::not_equal:
        m.excluded.push_back(c.category);
        break;
    }
  }
  std::string out;
  for (const auto& name : order) {
    const Merged& m = merged[name];
    std::string part;
    if (m.equal) {
      part = fmt::format("{} = {}", name, *m.equal);
    } else if (m.lower || m.upper) {
      if (m.lower && m.upper) {
        part = fmt::format("{} < {} <= {}", number_text(*m.lower), name, number_text(*m.upper));
      } else if (m.upper) {
        part = fmt::format("{} <= {}", name, number_text(*m.upper));
      } else {
        part = fmt::format("{} > {}", name, number_text(*m.lower));
      }
    }
    if (!m.equal && !m.excluded.empty()) {
      std::string excluded;
      for (std::size_t i = 0; i < m.excluded.size(); ++i) excluded += (i ? ", " : "") + m.excluded[i];
      const std::string clause = m.excluded.size() == 1 ? fmt::format("{} != {}", name, excluded)
                                                        : fmt::format("{} not in {{{}}}", name, excluded);
      part = part.empty() ? clause : part + " and " + clause;
    }
    if (!out.empty()) out += " and ";
    out += part;
  }
  return out;
}

std::vector<PathCondition> path_to(const UpliftTree& tree, int node) {
  std::vector<int> parent(tree.nodes.size(), -1);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    if (n.left >= 0) parent[static_cast<std::size_t>(n.left)] = static_cast<int>(i);
    if (n.right >= 0) parent[static_cast<std::size_t>(n.right)] = static_cast<int>(i);
  }
  std::vector<PathCondition> path;
  for (int child = node; parent[static_cast<std::size_t>(child)] >= 0;) {
    const int p = parent[static_cast<std::size_t>(child)];
    const TreeNode& pn = tree.nodes[static_cast<std::size_t>(p)];
    const bool left = pn.left == child;
    PathCondition c;
    c.attribute = pn.test->attribute;
    if (pn.test->numeric) {
      c.op = left ? PathCondition::Op::less_equal : PathCondition::Op::greater;
      c.threshold = pn.test->threshold;
    } else {
      c.op = left ? PathCondition::Op::equal : PathCondition::Op::not_equal;
      c.category = pn.test->category;
    }
    path.push_back(std::move(c));
    child = p;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Segment> extract_segments(const UpliftTree& tree, const CaseTable& table, double min_uplift) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (!node.is_leaf() || node.stats.uplift() < min_uplift) continue;
    Segment s;
    s.predicate = path_to(tree, static_cast<int>(i));
    s.uplift = node.stats.uplift();
    s.p_treat = node.stats.p_treat;
    s.p_ctrl = node.stats.p_ctrl;
    s.n_treat = node.stats.n_treat;
    s.n_ctrl = node.stats.n_ctrl;
    s.n_reachable = static_cast<std::size_t>(
        std::count_if(table.rows.begin(), table.rows.end(), [&](const CaseRecord& r) { return s.matches(r); }));
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) { return a.uplift > b.uplift; });
  return out;
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out;
}

}  // namespace

std::string to_dot(const UpliftTree& tree) {
  std::string out = "digraph uplift_tree {\n";
  out += fmt::format("  label=\"{}\";\n  labelloc=t;\n  node [shape=box, fontname=\"Helvetica\"];\n",
                     dot_escape(tree.treatment.label()));
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const NodeStats& s = tree.nodes[i].stats;
    out += fmt::format(
        "  n{} [label=\"n_treat={}\\nn_ctrl={}\\np_treat={:.4f}\\np_ctrl={:.4f}\\nuplift={:.4f}\"];\n", i,
        s.n_treat, s.n_ctrl, s.p_treat, s.p_ctrl, s.uplift());
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) continue;
    const auto& t = *n.test;
    const std::string yes = t.numeric ? fmt::format("{} <= {}", t.attribute, number_text(t.threshold))
                                      : fmt::format("{} = {}", t.attribute, t.category);
    const std::string no = t.numeric ? fmt::format("{} > {}", t.attribute, number_text(t.threshold))
                                     : fmt::format("{} != {}", t.attribute, t.category);
    out += fmt::format("  n{} -> n{} [label=\"{}\"];\n", i, n.left, dot_escape(yes));
    out += fmt::format("  n{} -> n{} [label=\"{}\"];\n", i, n.right, dot_escape(no));
  }
  out += "}\n";
  return out;
}

}  // namespace procause
