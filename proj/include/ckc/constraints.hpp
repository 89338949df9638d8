#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ckc/core.hpp"
#include "ckc/error.hpp"
#include "ckc/rng.hpp"

namespace ckc {

/// Disjoint, transitively closed must-link sets of point ids, ordered by
/// smallest member.
struct MLCollection {
  std::vector<std::vector<PointId>> sets;
};

enum class CLMode { disjoint, intersected };

/// Cannot-link sets. Ids are point ids as read from input, entity ids after
/// lift_cl().
struct CLCollection {
  std::vector<std::vector<std::size_t>> sets;
  CLMode mode = CLMode::disjoint;
};

struct Violation {
  std::string code;
  std::string message;
  std::vector<std::size_t> ids;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
  }
};

/// Thrown by the solvers when validate() reports anything.
class ValidationFailed : public InputError {
 public:
  explicit ValidationFailed(ValidationReport report)
      : InputError(summarize(report)), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  static std::string summarize(const ValidationReport& report) {
    std::string text = "constraint validation failed:";
    for (const auto& v : report.violations) text += "\n  " + v.code + ": " + v.message;
    return text;
  }
  ValidationReport report_;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Union-find closure of must-link sets (pairs are sets of size two).
/// Overlapping inputs merge; sets that end up with one point are dropped.
inline MLCollection normalize_ml(const std::vector<std::vector<PointId>>& raw, std::size_t n) {
  detail::UnionFind uf(n);
  std::vector<char> touched(n, 0);
  for (const auto& set : raw) {
    for (PointId p : set) {
      if (p >= n) {
        throw InputError("must-link id " + std::to_string(p) + " out of range (n = " +
                         std::to_string(n) + ")");
      }
      touched[p] = 1;
    }
    for (std::size_t i = 1; i < set.size(); ++i) uf.unite(set[0], set[i]);
  }
  std::map<std::size_t, std::vector<PointId>> groups;
  for (PointId p = 0; p < n; ++p) {
    if (touched[p]) groups[uf.find(p)].push_back(p);
  }
  MLCollection out;
  for (auto& [root, members] : groups) {
    if (members.size() >= 2) out.sets.push_back(std::move(members));
  }
  // Roots are the smallest member, so map order is already smallest-member order.
  return out;
}

/// Maps cannot-link point sets onto entities of the contracted space.
/// Throws ConstraintConflict when two points of one set share an entity.
inline CLCollection lift_cl(const CLCollection& point_sets, const ContractedSpace& space) {
  CLCollection out;
  out.mode = point_sets.mode;
  out.sets.reserve(point_sets.sets.size());
  for (std::size_t s = 0; s < point_sets.sets.size(); ++s) {
    std::vector<EntityId> lifted;
    std::set<PointId> seen_points;
    for (PointId p : point_sets.sets[s]) {
      if (!seen_points.insert(p).second) continue;
      const EntityId e = space.entity_of(p);
      if (std::find(lifted.begin(), lifted.end(), e) != lifted.end()) {
        throw ConstraintConflict("cannot-link set " + std::to_string(s) +
                                 " has two points inside must-link entity " +
                                 std::to_string(e));
      }
      lifted.push_back(e);
    }
    out.sets.push_back(std::move(lifted));
  }
  return out;
}

/// Collects every problem with a constraint instance. Cannot-link ids are
/// point ids; overlap between cannot-link sets is judged after must-link
/// contraction, since that is what the solver sees.
inline ValidationReport validate(const MLCollection& ml, const CLCollection& cl, std::size_t k,
                                 std::size_t n) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message, std::vector<std::size_t> ids) {
    report.violations.push_back(Violation{std::move(code), std::move(message), std::move(ids)});
  };

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> ml_owner(n, kNone);
  for (std::size_t s = 0; s < ml.sets.size(); ++s) {
    for (PointId p : ml.sets[s]) {
      if (p >= n) {
        add("ID_OUT_OF_RANGE", "must-link set " + std::to_string(s) + " references point " +
                                   std::to_string(p),
            {p});
        continue;
      }
      if (ml_owner[p] != kNone && ml_owner[p] != s) {
        add("ML_SETS_OVERLAP", "point " + std::to_string(p) + " is in must-link sets " +
                                   std::to_string(ml_owner[p]) + " and " + std::to_string(s),
            {p});
      }
      ml_owner[p] = s;
    }
  }
  // Entity key: ML set index offset past n, else the point itself.
  auto entity_key = [&](PointId p) { return ml_owner[p] == kNone ? p : n + ml_owner[p]; };

  std::map<std::size_t, std::size_t> entity_to_cl;
  for (std::size_t s = 0; s < cl.sets.size(); ++s) {
    const auto& set = cl.sets[s];
    if (set.size() > k) {
      add("CL_SET_EXCEEDS_K", "cannot-link set " + std::to_string(s) + " has " +
                                  std::to_string(set.size()) + " points but k = " +
                                  std::to_string(k),
          set);
    }
    std::set<PointId> seen;
    std::map<std::size_t, PointId> entities_here;
    for (PointId p : set) {
      if (p >= n) {
        add("ID_OUT_OF_RANGE", "cannot-link set " + std::to_string(s) + " references point " +
                                   std::to_string(p),
            {p});
        continue;
      }
      if (!seen.insert(p).second) {
        add("CL_DUPLICATE_ID", "cannot-link set " + std::to_string(s) + " lists point " +
                                   std::to_string(p) + " twice",
            {p});
        continue;
      }
      const std::size_t key = entity_key(p);
      if (auto it = entities_here.find(key); it != entities_here.end()) {
        add("ML_CL_CONFLICT", "points " + std::to_string(it->second) + " and " +
                                  std::to_string(p) + " are must-linked but in cannot-link set " +
                                  std::to_string(s),
            {it->second, p});
        continue;
      }
      entities_here.emplace(key, p);
    }
    if (cl.mode == CLMode::disjoint) {
      for (const auto& [key, p] : entities_here) {
        auto [it, inserted] = entity_to_cl.emplace(key, s);
        if (!inserted) {
          add("CL_SETS_OVERLAP", "cannot-link sets " + std::to_string(it->second) + " and " +
                                     std::to_string(s) + " share point " + std::to_string(p) +
                                     (key >= n ? " (through a must-link set)" : ""),
              {it->second, s});
        }
      }
    }
  }
  return report;
}

enum class SampleMode { disjoint, intersected, biased };

struct SamplerConfig {
  SampleMode mode = SampleMode::disjoint;
  double fraction = 0.05;      // share of points that receive a constraint
  double repeat_ratio = 0.0;   // intersected only: share of picks drawn again
  std::uint64_t seed = 0;
  std::size_t participants = 1;
  std::size_t max_ml_size = 5;
};

struct SampledConstraints {
  MLCollection ml;
  CLCollection cl;
};

namespace detail {

inline void form_sets(std::span<const PointId> picks, std::span<const std::int64_t> labels,
                      std::size_t k, std::size_t distinct_labels, const SamplerConfig& cfg,
                      Rng& rng, std::vector<std::vector<PointId>>& ml_out,
                      std::vector<std::vector<PointId>>& cl_out) {
  const std::size_t half = picks.size() / 2;
  std::vector<PointId> ml_pool(picks.begin(), picks.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<PointId> cl_pool(picks.begin() + static_cast<std::ptrdiff_t>(half), picks.end());
  const std::size_t max_cl = std::min(k, distinct_labels);
  if (max_cl < 2) {
    ml_pool.insert(ml_pool.end(), cl_pool.begin(), cl_pool.end());
    cl_pool.clear();
  }

  // Must-link: chunk each label group; a lone point moves to the CL pool.
  const std::size_t first_ml = ml_out.size();
  std::map<std::int64_t, std::vector<PointId>> by_label;
  std::vector<std::int64_t> label_order;
  for (PointId p : ml_pool) {
    auto [it, inserted] = by_label.try_emplace(labels[p]);
    if (inserted) label_order.push_back(labels[p]);
    it->second.push_back(p);
  }
  std::vector<PointId> leftovers;
  for (std::int64_t label : label_order) {
    auto& group = by_label[label];
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
    if (group.size() < 2) {
      auto& target = max_cl >= 2 ? cl_pool : leftovers;
      target.insert(target.end(), group.begin(), group.end());
      continue;
    }
    std::size_t at = 0;
    while (at < group.size()) {
      const std::size_t room = group.size() - at;
      std::size_t size = 2 + uniform_index(rng, std::max<std::size_t>(cfg.max_ml_size, 2) - 1);
      size = std::min(size, room);
      if (room - size == 1) ++size;
      ml_out.emplace_back(group.begin() + static_cast<std::ptrdiff_t>(at),
                          group.begin() + static_cast<std::ptrdiff_t>(at + size));
      at += size;
    }
  }

  // Cannot-link: scan the pool taking points with labels not yet in the set.
  const std::size_t first_cl = cl_out.size();
  std::vector<char> used(cl_pool.size(), 0);
  for (std::size_t start = 0; start < cl_pool.size(); ++start) {
    if (used[start]) continue;
    const std::size_t target = 2 + uniform_index(rng, max_cl - 1);
    std::vector<PointId> set;
    std::set<std::int64_t> labels_in;
    std::vector<std::size_t> taken;
    for (std::size_t i = start; i < cl_pool.size() && set.size() < target; ++i) {
      if (used[i]) continue;
      const PointId p = cl_pool[i];
      if (labels_in.count(labels[p]) || std::find(set.begin(), set.end(), p) != set.end()) {
        continue;
      }
      labels_in.insert(labels[p]);
      set.push_back(p);
      taken.push_back(i);
    }
    if (set.size() >= 2) {
      for (std::size_t i : taken) used[i] = 1;
      cl_out.push_back(std::move(set));
    } else {
      used[start] = 1;
      leftovers.push_back(cl_pool[start]);
    }
  }

  // Leftovers join a same-label ML set, else a CL set missing their label.
  for (PointId p : leftovers) {
    bool placed = false;
    for (std::size_t s = first_ml; s < ml_out.size() && !placed; ++s) {
      if (labels[ml_out[s].front()] == labels[p]) {
        if (std::find(ml_out[s].begin(), ml_out[s].end(), p) == ml_out[s].end()) {
          ml_out[s].push_back(p);
        }
        placed = true;
      }
    }
    for (std::size_t s = first_cl; s < cl_out.size() && !placed; ++s) {
      auto& set = cl_out[s];
      const bool clash = std::any_of(set.begin(), set.end(),
                                     [&](PointId q) { return labels[q] == labels[p]; });
      if (!clash && set.size() < k) {
        set.push_back(p);
        placed = true;
      }
    }
  }
}

}  // namespace detail

/// Draws floor(fraction * n) constrained points from labeled data and turns
/// them into must-link sets (same label) and cannot-link sets (pairwise
/// different labels, at most k each). Deterministic for a fixed seed.
inline SampledConstraints sample_constraints(std::span<const std::int64_t> labels,
                                             const SamplerConfig& cfg, std::size_t k) {
  const std::size_t n = labels.size();
  if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0)) {
    throw InputError("constraint fraction must lie in (0, 1]");
  }
  if (cfg.repeat_ratio < 0.0 || cfg.repeat_ratio > 1.0) {
    throw InputError("repeat ratio must lie in [0, 1]");
  }
  if (cfg.participants == 0) throw InputError("participants must be positive");
  if (k == 0) throw InputError("k must be positive");
  const auto total = static_cast<std::size_t>(std::floor(cfg.fraction * static_cast<double>(n)));
  if (total < 2) {
    throw InputError("fraction * n = " + std::to_string(cfg.fraction * static_cast<double>(n)) +
                     " leaves fewer than two points to constrain");
  }

  Rng rng(cfg.seed);
  std::map<std::int64_t, std::vector<PointId>> classes;
  for (PointId p = 0; p < n; ++p) classes[labels[p]].push_back(p);

  std::vector<PointId> picks;
  picks.reserve(total);
  if (cfg.mode == SampleMode::biased) {
    const std::size_t per_class = total / classes.size();
    std::size_t extra = total % classes.size();
    for (auto& [label, members] : classes) {
      const std::size_t want = per_class + (extra > 0 ? 1 : 0);
      if (extra > 0) --extra;
      if (members.size() < want) {
        throw InputError("class " + std::to_string(label) + " has " +
                         std::to_string(members.size()) + " points, biased sampling needs " +
                         std::to_string(want));
      }
      std::vector<PointId> pool = members;
      shuffle(std::span<PointId>(pool), rng);
      picks.insert(picks.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    }
    shuffle(std::span<PointId>(picks), rng);
  } else {
    std::size_t repeats = 0;
    if (cfg.mode == SampleMode::intersected) {
      repeats = static_cast<std::size_t>(std::floor(cfg.repeat_ratio * static_cast<double>(total)));
      repeats = std::min(repeats, total - 2);
    }
    std::vector<PointId> pool(n);
    std::iota(pool.begin(), pool.end(), PointId{0});
    shuffle(std::span<PointId>(pool), rng);
    picks.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(total - repeats));
    const std::size_t unique = picks.size();
    for (std::size_t i = 0; i < repeats; ++i) picks.push_back(picks[uniform_index(rng, unique)]);
    shuffle(std::span<PointId>(picks), rng);
  }

  // Each participant owns a contiguous share of the picks and forms its own sets.
  std::vector<std::vector<PointId>> ml_raw, cl_raw;
  const std::size_t parts = std::min(cfg.participants, picks.size() / 2);
  for (std::size_t part = 0; part < parts; ++part) {
    const std::size_t lo = picks.size() * part / parts;
    const std::size_t hi = picks.size() * (part + 1) / parts;
    detail::form_sets(std::span<const PointId>(picks).subspan(lo, hi - lo), labels, k,
                      classes.size(), cfg, rng, ml_raw, cl_raw);
  }

  SampledConstraints out;
  out.ml = normalize_ml(ml_raw, n);
  out.cl.sets = std::move(cl_raw);
  out.cl.mode = cfg.mode == SampleMode::intersected ? CLMode::intersected : CLMode::disjoint;
  return out;
}

}  // namespace ckc
