#include <fmt/format.h>

#include <array>
#include <cmath>
#include <limits>

#include "procause/error.hpp"
#include "procause/uplift_tree.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "uplift_tree";
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_distribution(std::span<const double> p, const char* name) {
  double total = 0;
  for (double x : p) {
    if (!(x > 0 && x < 1)) {
      throw DataError(kModule, fmt::format("divergence argument {} has component {} outside (0, 1)",
                                           name, x));
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DataError(kModule, fmt::format("divergence argument {} sums to {}, not 1", name, total));
  }
}

// Divergence with 0 log 0 = 0; a positive mass against a zero reference is
// infinite.
double divergence_with_zeros(std::span<const double> p, std::span<const double> q,
                             DivergenceKind kind) {
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    switch (kind) {
      case DivergenceKind::kl:
        if (p[i] > 0) d += q[i] > 0 ? p[i] * std::log2(p[i] / q[i]) : kInf;
        break;
      case DivergenceKind::euclid:
        d += (p[i] - q[i]) * (p[i] - q[i]);
        break;
      case DivergenceKind::chi_squared:
        if (q[i] > 0) {
          d += (p[i] - q[i]) * (p[i] - q[i]) / q[i];
        } else if (p[i] > 0) {
          d += kInf;
        }
        break;
    }
  }
  return d;
}

double impurity(double a, double b, DivergenceKind kind) {
  if (kind == DivergenceKind::kl) {
    double h = 0;
    if (a > 0) h -= a * std::log2(a);
    if (b > 0) h -= b * std::log2(b);
    return h;
  }
  return 1.0 - a * a - b * b;
}

}  // namespace

std::string_view to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kl:
      return "kl";
    case DivergenceKind::euclid:
      return "euclid";
    case DivergenceKind::chi_squared:
      return "chi_squared";
  }
  return "kl";
}

DivergenceKind parse_divergence_kind(std::string_view text) {
  if (text == "kl" || text == "KL") return DivergenceKind::kl;
  if (text == "euclid" || text == "ED") return DivergenceKind::euclid;
  if (text == "chi_squared" || text == "chi" || text == "Chi") return DivergenceKind::chi_squared;
  throw ConfigError(kModule, fmt::format("unknown divergence '{}' (kl, euclid, chi_squared)", text));
}

double divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind) {
  if (p.size() != q.size() || p.empty()) {
    throw DataError(kModule, "divergence arguments must be non-empty and of equal length");
  }
  check_distribution(p, "p");
  check_distribution(q, "q");
  return divergence_with_zeros(p, q, kind);
}

double divergence(double p, double q, DivergenceKind kind) {
  const std::array<double, 2> pp{p, 1.0 - p};
  const std::array<double, 2> qq{q, 1.0 - q};
  return divergence(pp, qq, kind);
}

NodeStats smoothed_stats(std::size_t n_treat, std::size_t pos_treat, std::size_t n_ctrl,
                         std::size_t pos_ctrl, double prior_treat, double prior_ctrl,
                         double regularization) {
  NodeStats s;
  s.n_treat = n_treat;
  s.n_ctrl = n_ctrl;
  s.pos_treat = pos_treat;
  s.pos_ctrl = pos_ctrl;
  s.p_treat = (static_cast<double>(pos_treat) + regularization * prior_treat) /
              (static_cast<double>(n_treat) + regularization);
  s.p_ctrl = (static_cast<double>(pos_ctrl) + regularization * prior_ctrl) /
             (static_cast<double>(n_ctrl) + regularization);
  return s;
}

double divergence_gain(const NodeStats& parent, const NodeStats& left, const NodeStats& right,
                       DivergenceKind kind) {
  const double n = static_cast<double>(parent.n());
  const double before = divergence(parent.p_treat, parent.p_ctrl, kind);
  const double after = static_cast<double>(left.n()) / n * divergence(left.p_treat, left.p_ctrl, kind) +
                       static_cast<double>(right.n()) / n * divergence(right.p_treat, right.p_ctrl, kind);
  return after - before;
}

double normalization(const NodeStats& parent, const NodeStats& left, const NodeStats& right,
                     DivergenceKind kind) {
  const double nt = static_cast<double>(parent.n_treat);
  const double nc = static_cast<double>(parent.n_ctrl);
  const double n = nt + nc;
  if (parent.n_treat == 0 || parent.n_ctrl == 0) {
    throw DataError(kModule, "normalization needs treated and control rows in the parent");
  }
  const std::array<double, 2> treated_share{static_cast<double>(left.n_treat) / nt,
                                            static_cast<double>(right.n_treat) / nt};
  const std::array<double, 2> control_share{static_cast<double>(left.n_ctrl) / nc,
                                            static_cast<double>(right.n_ctrl) / nc};
  const double group_balance = impurity(nt / n, nc / n, kind);
  return group_balance * divergence_with_zeros(treated_share, control_share, kind) +
         nt / n * impurity(treated_share[0], treated_share[1], kind) +
         nc / n * impurity(control_share[0], control_share[1], kind) + 0.5;
}

}  // namespace procause
