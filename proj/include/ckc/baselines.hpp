#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckc/constraints.hpp"
#include "ckc/core.hpp"
#include "ckc/error.hpp"
#include "ckc/rds.hpp"
#include "ckc/rng.hpp"
#include "ckc/solution.hpp"

namespace ckc {

enum class BaselineKind { traditional, greedy, matching };

/// Gonzalez traversal over entities: each next center is the entity whose
/// coverage by the current centers is worst. Ties go to the lowest id.
inline std::vector<EntityId> farthest_first(const ContractedSpace& space, std::size_t k,
                                            EntityId first) {
  const std::size_t m = space.size();
  space.check(first);
  std::vector<EntityId> centers{first};
  std::vector<double> gap(m);
  for (EntityId e = 0; e < m; ++e) gap[e] = space.center_distance(e, first);
  while (centers.size() < std::min(k, m)) {
    EntityId far = 0;
    for (EntityId e = 1; e < m; ++e) {
      if (gap[e] > gap[far]) far = e;
    }
    if (gap[far] <= 0.0 && std::find(centers.begin(), centers.end(), far) != centers.end()) {
      // Everything is covered at zero; take the lowest unused id instead.
      far = 0;
      while (std::find(centers.begin(), centers.end(), far) != centers.end()) ++far;
    }
    centers.push_back(far);
    for (EntityId e = 0; e < m; ++e) gap[e] = std::min(gap[e], space.center_distance(e, far));
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

namespace detail {

inline EntityId nearest_center(const ContractedSpace& space, EntityId e,
                               std::span<const EntityId> centers) {
  EntityId best = centers.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (EntityId c : centers) {
    const double d = space.center_distance(e, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

inline ClusteringSolution finish_baseline(const ContractedSpace& space, std::size_t k,
                                          std::vector<EntityId> centers,
                                          std::span<const EntityId> entity_center,
                                          const CLCollection& cl) {
  ClusteringSolution sol = make_solution(space, k, std::move(centers), entity_center, cl);
  sol.chosen_r = sol.realized_radius;
  sol.threshold = sol.realized_radius;
  return sol;
}

struct BaselineSetup {
  ContractedSpace space;
  CLCollection cl;
  std::vector<EntityId> centers;
};

inline BaselineSetup setup_baseline(const Dataset& data,
                                    const std::vector<std::vector<PointId>>& ml_raw,
                                    const CLCollection& cl_points, std::size_t k,
                                    std::uint64_t seed) {
  if (k == 0) throw InputError("k must be at least 1");
  if (data.size() == 0) throw InputError("empty dataset");
  const MLCollection ml = normalize_ml(ml_raw, data.size());
  ContractedSpace space = contract(data, ml.sets);
  CLCollection cl = lift_cl(cl_points, space);
  Rng rng(seed);
  const auto first = static_cast<EntityId>(uniform_index(rng, space.size()));
  auto centers = farthest_first(space, k, first);
  return BaselineSetup{std::move(space), std::move(cl), std::move(centers)};
}

// Cannot-link partners of each entity (entities sharing any set with it).
inline std::vector<std::vector<EntityId>> cl_partners(const CLCollection& cl, std::size_t m) {
  std::vector<std::vector<EntityId>> partners(m);
  for (const auto& set : cl.sets) {
    for (EntityId a : set) {
      for (EntityId b : set) {
        if (a != b) partners[a].push_back(b);
      }
    }
  }
  return partners;
}

constexpr EntityId kUnassigned = std::numeric_limits<EntityId>::max();

// Nearest center not already taken by an assigned cannot-link partner; the
// plain nearest center when every center is taken.
inline EntityId admissible_center(const ContractedSpace& space, EntityId e,
                                  std::span<const EntityId> centers,
                                  const std::vector<EntityId>& partners,
                                  const std::vector<EntityId>& entity_center) {
  EntityId best = kUnassigned;
  double best_d = std::numeric_limits<double>::infinity();
  for (EntityId c : centers) {
    const bool taken = std::any_of(partners.begin(), partners.end(),
                                   [&](EntityId p) { return entity_center[p] == c; });
    if (taken) continue;
    const double d = space.center_distance(e, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best == kUnassigned ? nearest_center(space, e, centers) : best;
}

}  // namespace detail

/// Unconstrained farthest-first k-center over points with nearest-center
/// assignment. The seed picks the first center.
inline ClusteringSolution traditional_kcenter(const Dataset& data, std::size_t k,
                                              std::uint64_t seed) {
  if (k == 0) throw InputError("k must be at least 1");
  if (k > data.size()) {
    throw InputError("k = " + std::to_string(k) + " exceeds the number of points (" +
                     std::to_string(data.size()) + ")");
  }
  const ContractedSpace space = contract(data, {});
  Rng rng(seed);
  const auto first = static_cast<EntityId>(uniform_index(rng, space.size()));
  auto centers = farthest_first(space, k, first);
  std::vector<EntityId> entity_center(space.size());
  for (EntityId e = 0; e < space.size(); ++e) {
    entity_center[e] = detail::nearest_center(space, e, centers);
  }
  return detail::finish_baseline(space, k, std::move(centers), entity_center, CLCollection{});
}

/// Farthest-first centers over entities, then entities in id order each take
/// the nearest center no assigned cannot-link partner holds (nearest overall
/// when none is left). Broken pairs show up in `violations`.
inline ClusteringSolution greedy_baseline(const Dataset& data,
                                          const std::vector<std::vector<PointId>>& ml_raw,
                                          const CLCollection& cl_points, std::size_t k,
                                          std::uint64_t seed) {
  auto setup = detail::setup_baseline(data, ml_raw, cl_points, k, seed);
  const auto& space = setup.space;
  const auto partners = detail::cl_partners(setup.cl, space.size());
  std::vector<EntityId> entity_center(space.size(), detail::kUnassigned);
  for (EntityId e = 0; e < space.size(); ++e) {
    entity_center[e] =
        detail::admissible_center(space, e, setup.centers, partners[e], entity_center);
  }
  return detail::finish_baseline(space, k, std::move(setup.centers), entity_center, setup.cl);
}

/// Min-max perfect matching of `y_set` into `centers` under `dist`, as
/// (left index -> right index), or nullopt when no perfect matching exists.
template <typename Distance>
std::optional<std::vector<std::size_t>> bottleneck_assignment(
    std::span<const EntityId> y_set, std::span<const EntityId> centers, Distance&& dist) {
  if (y_set.size() > centers.size()) return std::nullopt;
  std::vector<double> weights;
  weights.reserve(y_set.size() * centers.size());
  for (EntityId y : y_set) {
    for (EntityId c : centers) weights.push_back(dist(y, c));
  }
  std::sort(weights.begin(), weights.end());
  weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
  auto try_at = [&](double eta) {
    return maximum_matching(build_auxiliary_graph(y_set, centers, eta, dist));
  };
  if (weights.empty()) return std::vector<std::size_t>{};
  if (!try_at(weights.back()).saturates_left()) return std::nullopt;
  std::size_t lo = 0, hi = weights.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (try_at(weights[mid]).saturates_left()) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return try_at(weights[hi]).left_to_right;
}

/// Same centers as greedy_baseline. Each cannot-link set is placed by a
/// bottleneck perfect matching when one exists, otherwise greedily; the
/// remaining entities take their nearest center.
inline ClusteringSolution matching_baseline(const Dataset& data,
                                            const std::vector<std::vector<PointId>>& ml_raw,
                                            const CLCollection& cl_points, std::size_t k,
                                            std::uint64_t seed) {
  auto setup = detail::setup_baseline(data, ml_raw, cl_points, k, seed);
  const auto& space = setup.space;
  const auto& centers = setup.centers;
  const auto partners = detail::cl_partners(setup.cl, space.size());
  auto dist = [&](EntityId y, EntityId c) { return space.center_distance(y, c); };
  std::vector<EntityId> entity_center(space.size(), detail::kUnassigned);
  for (const auto& set : setup.cl.sets) {
    if (auto match = bottleneck_assignment(set, centers, dist)) {
      for (std::size_t i = 0; i < set.size(); ++i) entity_center[set[i]] = centers[(*match)[i]];
      continue;
    }
    for (EntityId e : set) entity_center[e] = detail::kUnassigned;
    for (EntityId e : set) {
      entity_center[e] = detail::admissible_center(space, e, centers, partners[e], entity_center);
    }
  }
  for (EntityId e = 0; e < space.size(); ++e) {
    if (entity_center[e] == detail::kUnassigned) {
      entity_center[e] = detail::nearest_center(space, e, centers);
    }
  }
  return detail::finish_baseline(space, k, std::move(setup.centers), entity_center, setup.cl);
}

inline ClusteringSolution run_baseline(BaselineKind kind, const Dataset& data,
                                       const std::vector<std::vector<PointId>>& ml_raw,
                                       const CLCollection& cl_points, std::size_t k,
                                       std::uint64_t seed) {
  switch (kind) {
    case BaselineKind::traditional:
      return traditional_kcenter(data, k, seed);
    case BaselineKind::greedy:
      return greedy_baseline(data, ml_raw, cl_points, k, seed);
    case BaselineKind::matching:
      return matching_baseline(data, ml_raw, cl_points, k, seed);
  }
  throw DefectError("unknown baseline kind");
}

}  // namespace ckc
