#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ckc/constraints.hpp"
#include "ckc/core.hpp"
#include "ckc/rds.hpp"

namespace ckc {

struct CenterInfo {
  EntityId entity = 0;
  PointId representative = 0;
  std::vector<PointId> members;
};

/// One threshold test made by the radius search.
struct TraceEntry {
  double r = 0.0;
  bool feasible = false;
  std::size_t centers = 0;
};

/// Feasibility of every candidate radius, in ascending order.
struct AuditReport {
  std::vector<TraceEntry> scan;
  bool monotone = true;
};

/// One auxiliary graph examined by the threshold solver, in entity ids.
struct RdsEvent {
  AuxiliaryGraph graph;
  Matching matching;
  std::optional<RDSResult> rds;
};

struct ClusteringSolution {
  std::size_t k = 0;
  std::vector<CenterInfo> centers;    // ascending entity id
  std::vector<EntityId> assignment;   // per point: entity id of its center
  double realized_radius = 0.0;       // max point-to-representative distance
  double chosen_r = 0.0;
  double threshold = 0.0;             // 2 * chosen_r for the threshold solver
  std::size_t violations = 0;         // cannot-link pairs sharing a center
  std::vector<TraceEntry> trace;
  std::optional<AuditReport> audit;
  std::vector<RdsEvent> rds_dump;

  PointId center_point(PointId p) const {
    for (const auto& c : centers) {
      if (c.entity == assignment.at(p)) return c.representative;
    }
    throw DefectError("point assigned to an entity that is not a center");
  }

  /// Per-point cluster labels (the center entity id).
  std::vector<std::int64_t> labels() const {
    return std::vector<std::int64_t>(assignment.begin(), assignment.end());
  }
};

/// Unordered entity pairs inside a cannot-link set that share a center.
inline std::size_t count_cl_violations(const CLCollection& entity_sets,
                                       std::span<const EntityId> entity_center) {
  std::size_t count = 0;
  for (const auto& set : entity_sets.sets) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        if (entity_center[set[i]] == entity_center[set[j]]) ++count;
      }
    }
  }
  return count;
}

/// Fills the point-level view of an entity-level clustering.
inline ClusteringSolution make_solution(const ContractedSpace& space, std::size_t k,
                                        std::vector<EntityId> centers,
                                        std::span<const EntityId> entity_center,
                                        const CLCollection& entity_cl) {
  std::sort(centers.begin(), centers.end());
  ClusteringSolution sol;
  sol.k = k;
  for (EntityId c : centers) {
    const auto& e = space.entity(c);
    sol.centers.push_back(CenterInfo{c, e.representative, e.members});
  }
  const auto& data = space.base();
  sol.assignment.resize(data.size());
  for (PointId p = 0; p < data.size(); ++p) {
    const EntityId c = entity_center[space.point_to_entity()[p]];
    sol.assignment[p] = c;
    sol.realized_radius =
        std::max(sol.realized_radius, data.distance(p, space.representative(c)));
  }
  sol.violations = count_cl_violations(entity_cl, entity_center);
  return sol;
}

}  // namespace ckc
