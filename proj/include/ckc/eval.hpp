#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ckc/error.hpp"
#include "ckc/solution.hpp"

namespace ckc {

using Labels = std::vector<std::int64_t>;

struct MetricsReport {
  double cost = 0.0;
  double purity = 0.0;
  double nmi = 0.0;
  double ri = 0.0;
  std::optional<double> ratio;
};

inline double cost(const ClusteringSolution& sol) { return sol.realized_radius; }

namespace detail {

struct Contingency {
  std::size_t n = 0;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> joint;
  std::map<std::int64_t, std::size_t> rows, cols;
};

inline Contingency contingency(std::span<const std::int64_t> s, std::span<const std::int64_t> l) {
  if (s.size() != l.size()) throw InputError("labelings differ in length");
  Contingency t;
  t.n = s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    ++t.joint[{s[i], l[i]}];
    ++t.rows[s[i]];
    ++t.cols[l[i]];
  }
  return t;
}

inline double entropy(const std::map<std::int64_t, std::size_t>& counts, std::size_t n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

inline std::uint64_t pairs(std::uint64_t c) { return c * (c - (c > 0 ? 1 : 0)) / 2; }

}  // namespace detail

/// Share of points whose predicted cluster's majority truth class matches
/// theirs. s is the truth, l the prediction.
inline double purity(std::span<const std::int64_t> s, std::span<const std::int64_t> l) {
  const auto t = detail::contingency(s, l);
  if (t.n == 0) throw InputError("purity of an empty labeling");
  std::map<std::int64_t, std::size_t> best;
  for (const auto& [key, c] : t.joint) best[key.second] = std::max(best[key.second], c);
  std::size_t sum = 0;
  for (const auto& [label, c] : best) sum += c;
  return static_cast<double>(sum) / static_cast<double>(t.n);
}

/// Mutual information over the mean of the two entropies. Two constant
/// labelings score 1; exactly one constant labeling scores 0.
inline double nmi(std::span<const std::int64_t> s, std::span<const std::int64_t> l) {
  const auto t = detail::contingency(s, l);
  if (t.n == 0) throw InputError("nmi of an empty labeling");
  const double hs = detail::entropy(t.rows, t.n);
  const double hl = detail::entropy(t.cols, t.n);
  if (t.rows.size() == 1 || t.cols.size() == 1) {
    return t.rows.size() == 1 && t.cols.size() == 1 ? 1.0 : 0.0;
  }
  // Same partition up to renaming: MI equals both entropies.
  if (t.joint.size() == t.rows.size() && t.joint.size() == t.cols.size()) return 1.0;
  const double n = static_cast<double>(t.n);
  double mi = 0.0;
  for (const auto& [key, c] : t.joint) {
    const double pxy = static_cast<double>(c) / n;
    const double px = static_cast<double>(t.rows.at(key.first)) / n;
    const double py = static_cast<double>(t.cols.at(key.second)) / n;
    mi += pxy * std::log(pxy / (px * py));
  }
  return std::clamp(mi / ((hs + hl) / 2.0), 0.0, 1.0);
}

/// Fraction of point pairs on which the two labelings agree (same/same or
/// different/different), counted from the contingency table.
inline double rand_index(std::span<const std::int64_t> s, std::span<const std::int64_t> l) {
  const auto t = detail::contingency(s, l);
  if (t.n < 2) throw InputError("rand index needs at least two points");
  std::uint64_t same_both = 0, same_s = 0, same_l = 0;
  for (const auto& [key, c] : t.joint) same_both += detail::pairs(c);
  for (const auto& [label, c] : t.rows) same_s += detail::pairs(c);
  for (const auto& [label, c] : t.cols) same_l += detail::pairs(c);
  const std::uint64_t total = detail::pairs(t.n);
  const std::uint64_t diff_both = total - same_s - same_l + same_both;
  return static_cast<double>(same_both + diff_both) / static_cast<double>(total);
}

/// Worst realized radius over the runs, divided by the planted optimum.
inline double empirical_ratio(std::span<const double> results, double r_star) {
  if (!(r_star > 0.0)) throw InputError("r_star must be positive");
  if (results.empty()) throw InputError("no results to take a ratio of");
  return *std::max_element(results.begin(), results.end()) / r_star;
}

inline MetricsReport evaluate(const ClusteringSolution& sol,
                              std::span<const std::int64_t> truth,
                              std::optional<double> r_star = std::nullopt) {
  const Labels predicted = sol.labels();
  MetricsReport report;
  report.cost = cost(sol);
  report.purity = purity(truth, predicted);
  report.nmi = nmi(truth, predicted);
  report.ri = rand_index(truth, predicted);
  if (r_star) {
    const double r = report.cost;
    report.ratio = empirical_ratio(std::span<const double>(&r, 1), *r_star);
  }
  return report;
}

}  // namespace ckc
