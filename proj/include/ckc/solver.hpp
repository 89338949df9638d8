#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckc/constraints.hpp"
#include "ckc/core.hpp"
#include "ckc/error.hpp"
#include "ckc/pair_index.hpp"
#include "ckc/rds.hpp"
#include "ckc/solution.hpp"

namespace ckc {

struct FeasibilityOutcome {
  bool feasible = false;
  std::vector<EntityId> centers;  // ascending; the partial set when infeasible
  std::string reason;
};

/// Computes a maximum RDS from a graph and one of its maximum matchings.
using RdsEngine =
    std::function<std::optional<RDSResult>(const AuxiliaryGraph&, const Matching&)>;

struct ThresholdOptions {
  RdsEngine engine;                                // greedy_max_rds when empty
  std::function<void(const RdsEvent&)> on_graph;   // every graph the CL sweep examines
  /// After each pass over the CL sets: (|C| before, |C| after, found an RDS).
  std::function<void(std::size_t, std::size_t, bool)> on_pass;
};

namespace detail {

inline void insert_sorted(std::vector<EntityId>& set, EntityId e) {
  set.insert(std::lower_bound(set.begin(), set.end(), e), e);
}

}  // namespace detail

/// Threshold solver for cannot-link k-center on contracted entities.
///
/// Sweeps the cannot-link sets in order; whenever the auxiliary graph of a set
/// against the current centers has a maximum RDS (Y', C'), the centers become
/// (C \ C') ∪ Y'. Passes repeat until one finds no RDS. Every entity still not
/// within eta of a center then becomes a center itself (the unconstrained
/// threshold rule). Fails as soon as more than k centers are needed.
///
/// An entity serving as its own center covers its members at the
/// representative's eccentricity, so a threshold below the widest must-link
/// set's eccentricity is rejected outright.
inline FeasibilityOutcome cl_kcenter_with_threshold(const ContractedSpace& space,
                                                    const CLCollection& cl, std::size_t k,
                                                    double eta,
                                                    const ThresholdOptions& opts = {}) {
  if (!(eta >= 0.0)) throw InputError("threshold must be non-negative");
  FeasibilityOutcome out;
  if (space.max_self_coverage() > eta) {
    out.reason = "a must-link set cannot be covered by its own representative within " +
                 std::to_string(eta);
    return out;
  }
  auto dist = [&](EntityId y, EntityId c) { return space.center_distance(y, c); };
  auto& centers = out.centers;

  for (;;) {
    const std::size_t before = centers.size();
    bool found = false;
    for (const auto& y_set : cl.sets) {
      AuxiliaryGraph g = build_auxiliary_graph(y_set, centers, eta, dist);
      Matching m = maximum_matching(g);
      std::optional<RDSResult> rds = opts.engine ? opts.engine(g, m) : greedy_max_rds(g, m);
      if (opts.on_graph) opts.on_graph(RdsEvent{g, m, rds});
      if (!rds) continue;

      std::vector<char> drop(g.right.size(), 0);
      for (std::size_t z : rds->c_prime) drop[z] = 1;
      std::vector<EntityId> next;
      next.reserve(centers.size() + rds->y_prime.size());
      for (std::size_t j = 0; j < g.right.size(); ++j) {
        if (!drop[j]) next.push_back(g.right[j]);
      }
      for (std::size_t y : rds->y_prime) next.push_back(g.left[y]);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      centers = std::move(next);
      found = true;
      if (centers.size() > k) {
        out.reason = "cannot-link sets need more than " + std::to_string(k) + " centers";
        return out;
      }
    }
    if (opts.on_pass) opts.on_pass(before, centers.size(), found);
    if (!found) break;
  }

  for (EntityId e = 0; e < space.size(); ++e) {
    const bool covered = std::any_of(centers.begin(), centers.end(),
                                     [&](EntityId c) { return dist(e, c) <= eta; });
    if (covered) continue;
    detail::insert_sorted(centers, e);
    if (centers.size() > k) {
      out.reason = "covering every point within " + std::to_string(eta) + " needs more than " +
                   std::to_string(k) + " centers";
      return out;
    }
  }
  out.feasible = true;
  return out;
}

/// Per-entity center for a feasible center set: each cannot-link set goes
/// through a perfect matching in its auxiliary graph (later sets overwrite
/// earlier ones when sets overlap); everything else takes its nearest center.
inline std::vector<EntityId> assign(const ContractedSpace& space,
                                    std::span<const EntityId> centers, const CLCollection& cl,
                                    double eta) {
  if (centers.empty()) throw InputError("cannot assign without centers");
  constexpr EntityId kUnset = std::numeric_limits<EntityId>::max();
  auto dist = [&](EntityId y, EntityId c) { return space.center_distance(y, c); };
  std::vector<EntityId> entity_center(space.size(), kUnset);
  for (std::size_t s = 0; s < cl.sets.size(); ++s) {
    AuxiliaryGraph g = build_auxiliary_graph(cl.sets[s], centers, eta, dist);
    Matching m = maximum_matching(g);
    if (!m.saturates_left()) {
      throw DefectError("cannot-link set " + std::to_string(s) +
                        " has no perfect matching into the accepted centers");
    }
    for (std::size_t y = 0; y < g.left.size(); ++y) {
      entity_center[g.left[y]] = g.right[m.left_to_right[y]];
    }
  }
  for (EntityId e = 0; e < space.size(); ++e) {
    if (entity_center[e] != kUnset) continue;
    double best = std::numeric_limits<double>::infinity();
    for (EntityId c : centers) {
      const double d = dist(e, c);
      if (d < best) {
        best = d;
        entity_center[e] = c;
      }
    }
  }
  return entity_center;
}

struct SolveOptions {
  /// Up to this many points the candidate radii are materialized and searched
  /// by median pruning; above it the search walks them through a kd-tree.
  std::size_t explicit_limit = 4096;
  bool audit = false;
  bool dump_rds = false;
  ThresholdOptions threshold;
};

namespace detail {

struct SearchResult {
  double chosen_r = 0.0;
  FeasibilityOutcome outcome;
  std::vector<TraceEntry> trace;
};

template <typename Test>
SearchResult search_explicit(const std::vector<double>& psi, Test&& test) {
  SearchResult res;
  std::size_t lo = 0, hi = psi.size() - 1;
  std::optional<FeasibilityOutcome> at_hi;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;  // lower median of psi[lo..hi]
    FeasibilityOutcome out = test(psi[mid], res.trace);
    if (out.feasible) {
      hi = mid;
      at_hi = std::move(out);
    } else {
      lo = mid + 1;
    }
  }
  if (!at_hi) {
    at_hi = test(psi[hi], res.trace);
    if (!at_hi->feasible) throw InfeasibleError(at_hi->reason);
  }
  res.chosen_r = psi[hi];
  res.outcome = std::move(*at_hi);
  return res;
}

template <typename Test>
SearchResult search_implicit(const Dataset& data, Test&& test) {
  SearchResult res;
  const PairDistanceIndex index(data);
  double hi = index.diameter_upper_bound();
  FeasibilityOutcome top = test(hi, res.trace);
  if (!top.feasible) throw InfeasibleError(top.reason);

  // lo stays infeasible; x is where the walk over candidate radii starts.
  double x = -1.0;
  if (!test(0.0, res.trace).feasible) {
    double lo = 0.0;
    for (;;) {
      const double mid = lo + (hi - lo) / 2.0;
      if (mid <= lo || mid >= hi) break;
      (test(mid, res.trace).feasible ? hi : lo) = mid;
    }
    x = lo;
  }
  for (;;) {
    const std::optional<double> next = index.next_above(x);
    if (!next) throw DefectError("candidate walk ran past the largest pairwise distance");
    FeasibilityOutcome out = test(*next, res.trace);
    if (out.feasible) {
      res.chosen_r = *next;
      res.outcome = std::move(out);
      return res;
    }
    x = *next;
  }
}

inline ClusteringSolution solve_contracted(const ContractedSpace& space, const CLCollection& cl,
                                           std::size_t k, const SolveOptions& options) {
  const Dataset& data = space.base();
  auto test = [&](double r, std::vector<TraceEntry>& trace) {
    FeasibilityOutcome out = cl_kcenter_with_threshold(space, cl, k, 2.0 * r, options.threshold);
    trace.push_back(TraceEntry{r, out.feasible, out.centers.size()});
    return out;
  };

  SearchResult found;
  std::optional<CandidateRadii> psi;
  if (data.size() <= options.explicit_limit || options.audit) psi = candidate_radii(data);
  if (data.size() <= options.explicit_limit) {
    found = search_explicit(psi->values, test);
  } else {
    found = search_implicit(data, test);
  }

  const double eta = 2.0 * found.chosen_r;
  const auto entity_center = assign(space, found.outcome.centers, cl, eta);
  ClusteringSolution sol = make_solution(space, k, found.outcome.centers, entity_center, cl);
  sol.chosen_r = found.chosen_r;
  sol.threshold = eta;
  sol.trace = std::move(found.trace);

  if (options.audit) {
    AuditReport audit;
    bool seen_feasible = false;
    for (double r : psi->values) {
      const auto out = cl_kcenter_with_threshold(space, cl, k, 2.0 * r, options.threshold);
      audit.scan.push_back(TraceEntry{r, out.feasible, out.centers.size()});
      if (seen_feasible && !out.feasible) audit.monotone = false;
      seen_feasible = seen_feasible || out.feasible;
    }
    sol.audit = std::move(audit);
  }
  if (options.dump_rds) {
    ThresholdOptions capture = options.threshold;
    capture.on_graph = [&](const RdsEvent& ev) {
      sol.rds_dump.push_back(ev);
      if (options.threshold.on_graph) options.threshold.on_graph(ev);
    };
    cl_kcenter_with_threshold(space, cl, k, eta, capture);
  }
  return sol;
}

inline ClusteringSolution solve_checked(const Dataset& data,
                                        const std::vector<std::vector<PointId>>& ml_raw,
                                        CLCollection cl_points, std::size_t k,
                                        const SolveOptions& options) {
  if (k == 0) throw InputError("k must be at least 1");
  if (data.size() < 2) throw InputError("need at least two points");
  const MLCollection ml = normalize_ml(ml_raw, data.size());
  ValidationReport report = validate(ml, cl_points, k, data.size());
  if (!report.ok()) throw ValidationFailed(std::move(report));
  const ContractedSpace space = contract(data, ml.sets);
  const CLCollection cl = lift_cl(cl_points, space);
  return solve_contracted(space, cl, k, options);
}

}  // namespace detail

/// ML/CL k-center: contract must-link sets, then search the candidate radii
/// for the smallest r whose threshold test at 2r succeeds. The result covers
/// every point within 2 * chosen_r of its center's representative and
/// honours every constraint. Cannot-link sets must be disjoint.
inline ClusteringSolution solve(const Dataset& data,
                                const std::vector<std::vector<PointId>>& ml_raw,
                                CLCollection cl_points, std::size_t k,
                                const SolveOptions& options = {}) {
  cl_points.mode = CLMode::disjoint;
  return detail::solve_checked(data, ml_raw, std::move(cl_points), k, options);
}

/// Best-effort variant for overlapping cannot-link sets. Center finding is
/// unchanged; assignment takes each set's matching in input order, so an
/// entity listed twice keeps its last assignment. Broken pairs are reported
/// in `violations`.
inline ClusteringSolution solve_intersected(const Dataset& data,
                                            const std::vector<std::vector<PointId>>& ml_raw,
                                            CLCollection cl_points, std::size_t k,
                                            const SolveOptions& options = {}) {
  cl_points.mode = CLMode::intersected;
  return detail::solve_checked(data, ml_raw, std::move(cl_points), k, options);
}

inline constexpr std::size_t kOracleMaxPoints = 14;
inline constexpr std::size_t kOracleMaxK = 4;

struct OracleResult {
  double radius = 0.0;
  std::vector<EntityId> centers;
  std::vector<EntityId> entity_center;
};

/// Exhaustive optimum over center sets of at most k entities, measuring
/// coverage point-to-representative. Small instances only.
inline OracleResult exact_small_oracle(const Dataset& data,
                                       const std::vector<std::vector<PointId>>& ml_raw,
                                       const CLCollection& cl_points, std::size_t k) {
  const std::size_t n = data.size();
  if (n > kOracleMaxPoints || k > kOracleMaxK) {
    throw GuardError("exact oracle limited to n <= " + std::to_string(kOracleMaxPoints) +
                     " and k <= " + std::to_string(kOracleMaxK));
  }
  if (k == 0 || n == 0) throw InputError("oracle needs k >= 1 and a nonempty dataset");
  const MLCollection ml = normalize_ml(ml_raw, n);
  const ContractedSpace space = contract(data, ml.sets);
  const CLCollection cl = lift_cl(cl_points, space);
  const std::size_t m = space.size();

  std::vector<int> cl_of(m, -1);
  for (std::size_t s = 0; s < cl.sets.size(); ++s) {
    for (EntityId e : cl.sets[s]) {
      if (cl_of[e] >= 0) throw GuardError("exact oracle handles disjoint cannot-link sets only");
      cl_of[e] = static_cast<int>(s);
    }
  }

  // coverage[e][c]: farthest member of e from the representative of c.
  std::vector<std::vector<double>> coverage(m, std::vector<double>(m, 0.0));
  for (EntityId e = 0; e < m; ++e) {
    for (EntityId c = 0; c < m; ++c) {
      const auto rep = data.coords(space.entity(c).representative);
      for (PointId p : space.entity(e).members) {
        coverage[e][c] = std::max(coverage[e][c], base_distance(data.coords(p), rep));
      }
    }
  }

  std::vector<double> radii{0.0};
  if (n >= 2) {
    const auto psi = candidate_radii(data).values;
    radii.insert(radii.end(), psi.begin(), psi.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  }

  // Injective assignment of set members into centers by plain backtracking.
  std::function<bool(const std::vector<EntityId>&, std::size_t, const std::vector<EntityId>&,
                     double, std::vector<char>&, std::vector<EntityId>&)>
      place = [&](const std::vector<EntityId>& set, std::size_t at,
                  const std::vector<EntityId>& centers, double r, std::vector<char>& used,
                  std::vector<EntityId>& chosen) {
        if (at == set.size()) return true;
        for (std::size_t j = 0; j < centers.size(); ++j) {
          if (used[j] || coverage[set[at]][centers[j]] > r) continue;
          used[j] = 1;
          chosen[at] = centers[j];
          if (place(set, at + 1, centers, r, used, chosen)) return true;
          used[j] = 0;
        }
        return false;
      };

  auto feasible = [&](const std::vector<EntityId>& centers, double r,
                      std::vector<EntityId>* witness) {
    if (witness) witness->assign(m, 0);
    for (EntityId e = 0; e < m; ++e) {
      if (cl_of[e] >= 0) continue;
      bool ok = false;
      double best = std::numeric_limits<double>::infinity();
      for (EntityId c : centers) {
        if (coverage[e][c] <= r) {
          ok = true;
          if (witness && coverage[e][c] < best) {
            best = coverage[e][c];
            (*witness)[e] = c;
          }
        }
      }
      if (!ok) return false;
    }
    for (const auto& set : cl.sets) {
      std::vector<char> used(centers.size(), 0);
      std::vector<EntityId> chosen(set.size());
      if (!place(set, 0, centers, r, used, chosen)) return false;
      if (witness) {
        for (std::size_t i = 0; i < set.size(); ++i) (*witness)[set[i]] = chosen[i];
      }
    }
    return true;
  };

  std::optional<OracleResult> best;
  std::size_t best_index = radii.size();
  std::vector<EntityId> subset;
  std::function<void(EntityId)> enumerate = [&](EntityId from) {
    if (!subset.empty() && best_index > 0) {
      // Smallest feasible radius index below the current best, if any.
      std::size_t lo = 0, hi = best_index;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(subset, radii[mid], nullptr)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      if (lo < best_index) {
        best_index = lo;
        OracleResult res;
        res.radius = radii[lo];
        res.centers = subset;
        feasible(subset, radii[lo], &res.entity_center);
        best = std::move(res);
      }
    }
    if (subset.size() == k) return;
    for (EntityId e = from; e < m; ++e) {
      subset.push_back(e);
      enumerate(e + 1);
      subset.pop_back();
    }
  };
  enumerate(0);

  if (!best) throw InfeasibleError("no clustering with at most " + std::to_string(k) +
                                   " centers satisfies the constraints");
  return *best;
}

}  // namespace ckc
