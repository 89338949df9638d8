#pragma once

// Shared fixtures for the test suites: random instances and an independent
// checker for solver output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ckc/ckc.hpp"

namespace ckc::testing {

inline Dataset line(std::vector<double> xs) { return Dataset(1, std::move(xs)); }

inline Dataset random_dataset(Rng& rng, std::size_t n, std::size_t dim, double side = 10.0) {
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = uniform_real(rng, 0.0, side);
  return Dataset(dim, std::move(coords));
}

/// Integer grid coordinates: plenty of distance ties.
inline Dataset grid_dataset(Rng& rng, std::size_t n, std::size_t dim, std::size_t side = 6) {
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = static_cast<double>(uniform_index(rng, side));
  return Dataset(dim, std::move(coords));
}

struct RandomConstraints {
  std::vector<std::vector<PointId>> ml;
  CLCollection cl;
};

/// Disjoint ML sets and CL sets over a random permutation; every CL set has
/// at most k points drawn from distinct ML groups.
inline RandomConstraints random_constraints(Rng& rng, std::size_t n, std::size_t k,
                                            std::size_t ml_sets, std::size_t cl_sets) {
  std::vector<PointId> perm(n);
  for (PointId i = 0; i < n; ++i) perm[i] = i;
  shuffle(std::span<PointId>(perm), rng);
  RandomConstraints out;
  std::size_t at = 0;
  for (std::size_t s = 0; s < ml_sets && at + 2 <= n; ++s) {
    const std::size_t size = 2 + uniform_index(rng, 2);
    if (at + size > n) break;
    out.ml.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(at),
                        perm.begin() + static_cast<std::ptrdiff_t>(at + size));
    at += size;
  }
  for (std::size_t s = 0; s < cl_sets && k >= 2 && at + 2 <= n; ++s) {
    const std::size_t size = std::min<std::size_t>(2 + uniform_index(rng, k - 1), n - at);
    if (size < 2) break;
    out.cl.sets.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(at),
                             perm.begin() + static_cast<std::ptrdiff_t>(at + size));
    at += size;
  }
  return out;
}

/// Checks a solution against the raw inputs without using the solver's own
/// bookkeeping. Returns an empty string when sound.
inline std::string soundness_failure(const Dataset& data,
                                     const std::vector<std::vector<PointId>>& ml,
                                     const CLCollection& cl, std::size_t k,
                                     const ClusteringSolution& sol, double bound) {
  if (sol.centers.size() > k) return "more than k centers";
  if (sol.assignment.size() != data.size()) return "assignment not total";
  std::map<EntityId, PointId> rep;
  for (const auto& c : sol.centers) rep[c.entity] = c.representative;
  for (PointId p = 0; p < data.size(); ++p) {
    auto it = rep.find(sol.assignment[p]);
    if (it == rep.end()) return "point " + std::to_string(p) + " assigned to a non-center";
    if (base_distance(data.coords(p), data.coords(it->second)) > bound) {
      return "point " + std::to_string(p) + " farther than the bound from its center";
    }
  }
  for (const auto& set : ml) {
    for (PointId p : set) {
      if (sol.assignment[p] != sol.assignment[set.front()]) return "must-link set split";
    }
  }
  for (const auto& set : cl.sets) {
    std::set<EntityId> seen;
    for (PointId p : set) {
      if (!seen.insert(sol.assignment[p]).second) return "cannot-link set shares a center";
    }
  }
  return {};
}

}  // namespace ckc::testing
