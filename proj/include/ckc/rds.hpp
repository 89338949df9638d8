#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ckc/core.hpp"
#include "ckc/error.hpp"

namespace ckc {

/// Bipartite graph between a cannot-link set (left) and the current centers
/// (right). Edge (y, z) iff their distance is at most the threshold.
/// Vertices are addressed by local index; left[i] / right[j] give entity ids.
struct AuxiliaryGraph {
  std::vector<EntityId> left;
  std::vector<EntityId> right;
  std::vector<std::vector<std::size_t>> adjacency;  // per left vertex, ascending right indices
  double threshold = 0.0;

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& row : adjacency) m += row.size();
    return m;
  }

  /// Graph with abstract vertices 0..num_left-1 / 0..num_right-1.
  static AuxiliaryGraph from_edges(std::size_t num_left, std::size_t num_right,
                                   std::span<const std::pair<std::size_t, std::size_t>> edges) {
    AuxiliaryGraph g;
    g.left.resize(num_left);
    g.right.resize(num_right);
    for (std::size_t i = 0; i < num_left; ++i) g.left[i] = i;
    for (std::size_t j = 0; j < num_right; ++j) g.right[j] = j;
    g.adjacency.resize(num_left);
    for (auto [y, z] : edges) {
      if (y >= num_left || z >= num_right) throw InputError("edge endpoint out of range");
      g.adjacency[y].push_back(z);
    }
    for (auto& row : g.adjacency) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return g;
  }
};

/// Builds the graph with an arbitrary distance callable dist(y_entity, c_entity).
template <typename Distance>
AuxiliaryGraph build_auxiliary_graph(std::span<const EntityId> y_set,
                                     std::span<const EntityId> centers, double eta,
                                     Distance&& dist) {
  if (!(eta >= 0.0)) throw InputError("threshold must be non-negative");
  AuxiliaryGraph g;
  g.left.assign(y_set.begin(), y_set.end());
  g.right.assign(centers.begin(), centers.end());
  g.threshold = eta;
  g.adjacency.resize(g.left.size());
  for (std::size_t i = 0; i < g.left.size(); ++i) {
    for (std::size_t j = 0; j < g.right.size(); ++j) {
      if (dist(g.left[i], g.right[j]) <= eta) g.adjacency[i].push_back(j);
    }
  }
  return g;
}

inline AuxiliaryGraph build_auxiliary_graph(std::span<const EntityId> y_set,
                                            std::span<const EntityId> centers, double eta,
                                            const ContractedSpace& space) {
  return build_auxiliary_graph(y_set, centers, eta, [&](EntityId y, EntityId c) {
    return space.refined_distance(y, c);
  });
}

struct Matching {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> left_to_right;
  std::vector<std::size_t> right_to_left;

  std::size_t size() const {
    return static_cast<std::size_t>(
        std::count_if(left_to_right.begin(), left_to_right.end(),
                      [](std::size_t r) { return r != npos; }));
  }
  bool saturates_left() const { return size() == left_to_right.size(); }
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t y = 0; y < left_to_right.size(); ++y) {
      if (left_to_right[y] != npos) out.emplace_back(y, left_to_right[y]);
    }
    return out;
  }
};

/// Hopcroft-Karp. Layers are built breadth-first from free left vertices and
/// augmenting paths are taken in ascending vertex order, so the result is a
/// pure function of the graph.
inline Matching maximum_matching(const AuxiliaryGraph& g) {
  constexpr std::size_t npos = Matching::npos;
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  const std::size_t nl = g.left.size();
  const std::size_t nr = g.right.size();
  Matching m{std::vector<std::size_t>(nl, npos), std::vector<std::size_t>(nr, npos)};
  std::vector<std::size_t> layer(nl);
  std::vector<std::size_t> next_edge(nl);

  auto bfs = [&] {
    std::queue<std::size_t> queue;
    bool reachable_free = false;
    for (std::size_t y = 0; y < nl; ++y) {
      if (m.left_to_right[y] == npos) {
        layer[y] = 0;
        queue.push(y);
      } else {
        layer[y] = inf;
      }
    }
    while (!queue.empty()) {
      const std::size_t y = queue.front();
      queue.pop();
      for (std::size_t z : g.adjacency[y]) {
        const std::size_t mate = m.right_to_left[z];
        if (mate == npos) {
          reachable_free = true;
        } else if (layer[mate] == inf) {
          layer[mate] = layer[y] + 1;
          queue.push(mate);
        }
      }
    }
    return reachable_free;
  };

  // Iterative DFS along the layered graph.
  auto augment = [&](std::size_t root) {
    std::vector<std::size_t> path{root};
    while (!path.empty()) {
      const std::size_t y = path.back();
      bool advanced = false;
      while (next_edge[y] < g.adjacency[y].size()) {
        const std::size_t z = g.adjacency[y][next_edge[y]];
        const std::size_t mate = m.right_to_left[z];
        if (mate == npos) {
          // Flip the path: path[i] takes the right vertex it was trying.
          for (std::size_t i = path.size(); i-- > 0;) {
            const std::size_t yi = path[i];
            const std::size_t zi = g.adjacency[yi][next_edge[yi]];
            m.left_to_right[yi] = zi;
            m.right_to_left[zi] = yi;
          }
          return true;
        }
        if (layer[mate] == layer[y] + 1) {
          path.push_back(mate);
          advanced = true;
          break;
        }
        ++next_edge[y];
      }
      if (!advanced) {
        layer[y] = inf;
        path.pop_back();
        if (!path.empty()) ++next_edge[path.back()];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(next_edge.begin(), next_edge.end(), 0);
    for (std::size_t y = 0; y < nl; ++y) {
      if (m.left_to_right[y] == npos) augment(y);
    }
  }
  return m;
}

/// A reverse dominating set (Y', C') in local vertex indices, with
/// C' = N_G(Y') and value = |Y'| - |C'| >= 1.
struct RDSResult {
  std::vector<std::size_t> y_prime;  // ascending
  std::vector<std::size_t> c_prime;  // ascending
  std::size_t value = 0;
};

/// Observes the growth loop after each round: (Y', C', M).
using RdsTraceHook = std::function<void(std::span<const std::size_t>,
                                        std::span<const std::size_t>, const Matching&)>;

/// Maximum RDS grown from the left vertices a maximum matching leaves free:
/// repeatedly C' <- C' ∪ N_G(Y'), Y' <- Y' ∪ N_M(C') until C' = N_G(Y').
/// Returns nullopt exactly when the matching saturates the left side.
inline std::optional<RDSResult> greedy_max_rds(const AuxiliaryGraph& g, const Matching& m,
                                               const RdsTraceHook& trace = {}) {
  const std::size_t nl = g.left.size();
  const std::size_t nr = g.right.size();
  std::vector<char> in_y(nl, 0), in_c(nr, 0);
  std::vector<std::size_t> frontier;
  for (std::size_t y = 0; y < nl; ++y) {
    if (m.left_to_right[y] == Matching::npos) {
      in_y[y] = 1;
      frontier.push_back(y);
    }
  }
  if (frontier.empty()) return std::nullopt;

  auto collect = [](const std::vector<char>& flags) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) out.push_back(i);
    }
    return out;
  };

  // Only the newest Y' vertices can contribute neighbors outside C'.
  while (!frontier.empty()) {
    std::vector<std::size_t> new_c;
    for (std::size_t y : frontier) {
      for (std::size_t z : g.adjacency[y]) {
        if (!in_c[z]) {
          in_c[z] = 1;
          new_c.push_back(z);
        }
      }
    }
    frontier.clear();
    for (std::size_t z : new_c) {
      const std::size_t mate = m.right_to_left[z];
      if (mate != Matching::npos && !in_y[mate]) {
        in_y[mate] = 1;
        frontier.push_back(mate);
      }
    }
    if (trace) {
      const auto ys = collect(in_y);
      const auto cs = collect(in_c);
      trace(ys, cs, m);
    }
  }

  RDSResult out{collect(in_y), collect(in_c), 0};
  if (out.y_prime.size() <= out.c_prime.size()) {
    throw DefectError("greedy RDS ended with |Y'| <= |C'|; matching was not maximum");
  }
  out.value = out.y_prime.size() - out.c_prime.size();
  return out;
}

inline std::optional<RDSResult> greedy_max_rds(const AuxiliaryGraph& g) {
  return greedy_max_rds(g, maximum_matching(g));
}

inline constexpr std::size_t kBruteForceRdsLimit = 20;

/// Exhaustive maximum RDS: every nonempty Y' with C' = N_G(Y'). Ties go to
/// the lexicographically smallest Y'.
inline std::optional<RDSResult> brute_force_max_rds(const AuxiliaryGraph& g) {
  const std::size_t nl = g.left.size();
  const std::size_t nr = g.right.size();
  if (nl > kBruteForceRdsLimit) {
    throw GuardError("brute-force RDS limited to " + std::to_string(kBruteForceRdsLimit) +
                     " left vertices, got " + std::to_string(nl));
  }
  const std::size_t words = (nr + 63) / 64;
  std::vector<std::vector<std::uint64_t>> nbr(nl, std::vector<std::uint64_t>(words, 0));
  for (std::size_t y = 0; y < nl; ++y) {
    for (std::size_t z : g.adjacency[y]) nbr[y][z / 64] |= std::uint64_t{1} << (z % 64);
  }

  std::optional<RDSResult> best;
  std::vector<std::uint64_t> cover(words);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nl); ++mask) {
    std::fill(cover.begin(), cover.end(), 0);
    std::size_t ys = 0;
    for (std::size_t y = 0; y < nl; ++y) {
      if (mask >> y & 1) {
        ++ys;
        for (std::size_t w = 0; w < words; ++w) cover[w] |= nbr[y][w];
      }
    }
    std::size_t cs = 0;
    for (auto w : cover) cs += static_cast<std::size_t>(__builtin_popcountll(w));
    if (ys <= cs) continue;
    RDSResult cand;
    for (std::size_t y = 0; y < nl; ++y) {
      if (mask >> y & 1) cand.y_prime.push_back(y);
    }
    for (std::size_t z = 0; z < nr; ++z) {
      if (cover[z / 64] >> (z % 64) & 1) cand.c_prime.push_back(z);
    }
    cand.value = ys - cs;
    if (!best || cand.value > best->value ||
        (cand.value == best->value && cand.y_prime < best->y_prime)) {
      best = std::move(cand);
    }
  }
  return best;
}

/// The linear program maximize sum(y) - sum(z) s.t. y - z <= 0 per edge,
/// 0 <= y, z <= 1. Variables are laid out left vertices first, then right.
struct RdsLpInstance {
  std::size_t num_left = 0;
  std::size_t num_right = 0;
  std::vector<std::pair<std::size_t, std::size_t>> rows;  // (y, z) per edge

  std::size_t variable_count() const { return num_left + num_right; }

  double objective(std::span<const double> x) const {
    check(x);
    double v = 0.0;
    for (std::size_t i = 0; i < num_left; ++i) v += x[i];
    for (std::size_t j = 0; j < num_right; ++j) v -= x[num_left + j];
    return v;
  }

  bool feasible(std::span<const double> x) const {
    check(x);
    for (double xi : x) {
      if (xi < 0.0 || xi > 1.0) return false;
    }
    for (auto [y, z] : rows) {
      if (x[y] - x[num_left + z] > 0.0) return false;
    }
    return true;
  }

  /// 0/1 vector with Y' and C' set.
  std::vector<double> indicator(const RDSResult& rds) const {
    std::vector<double> x(variable_count(), 0.0);
    for (std::size_t y : rds.y_prime) x[y] = 1.0;
    for (std::size_t z : rds.c_prime) x[num_left + z] = 1.0;
    return x;
  }

 private:
  void check(std::span<const double> x) const {
    if (x.size() != variable_count()) {
      throw InputError("assignment has " + std::to_string(x.size()) + " entries, LP has " +
                       std::to_string(variable_count()) + " variables");
    }
  }
};

inline RdsLpInstance build_rds_lp(const AuxiliaryGraph& g) {
  RdsLpInstance lp;
  lp.num_left = g.left.size();
  lp.num_right = g.right.size();
  for (std::size_t y = 0; y < g.adjacency.size(); ++y) {
    for (std::size_t z : g.adjacency[y]) lp.rows.emplace_back(y, z);
  }
  return lp;
}

}  // namespace ckc
