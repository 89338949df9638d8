#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ckc/error.hpp"

namespace ckc {

using PointId = std::size_t;
using EntityId = std::size_t;

/// Datasets up to this many points keep a dense lower-triangular distance
/// table; larger ones compute distances on demand.
inline constexpr std::size_t kDefaultCacheLimit = 4096;

struct Point {
  std::span<const double> coords;
  PointId id = 0;
};

/// Euclidean distance. Summation runs in coordinate order so every caller
/// gets the same double for the same pair.
inline double base_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double base_distance(const Point& a, const Point& b) {
  return base_distance(a.coords, b.coords);
}

/// Immutable point set stored row-major.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t dim, std::vector<double> coords,
          std::size_t cache_limit = kDefaultCacheLimit)
      : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) throw InputError("dataset dimension must be at least 1");
    if (coords_.size() % dim_ != 0) {
      throw InputError("coordinate count is not a multiple of the dimension");
    }
    for (double c : coords_) {
      if (!std::isfinite(c)) throw InputError("non-finite coordinate in dataset");
    }
    size_ = coords_.size() / dim_;
    if (size_ >= 2 && size_ <= cache_limit) build_cache();
  }

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::size_t cache_limit = kDefaultCacheLimit) {
    if (rows.empty()) throw InputError("dataset has no points");
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != dim) {
        throw InputError("row " + std::to_string(i) + " has " +
                         std::to_string(rows[i].size()) + " coordinates, expected " +
                         std::to_string(dim));
      }
      flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return Dataset(dim, std::move(flat), cache_limit);
  }

  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  bool cached() const { return cache_ != nullptr; }
  std::span<const double> raw() const { return coords_; }

  std::span<const double> coords(PointId i) const {
    return std::span<const double>(coords_).subspan(i * dim_, dim_);
  }

  Point point(PointId i) const {
    check(i);
    return Point{coords(i), i};
  }

  double distance(PointId i, PointId j) const {
    check(i);
    check(j);
    if (i == j) return 0.0;
    if (cache_) {
      if (i < j) std::swap(i, j);
      return (*cache_)[i * (i - 1) / 2 + j];
    }
    return base_distance(coords(i), coords(j));
  }

  void check(PointId i) const {
    if (i >= size_) {
      throw InputError("point id " + std::to_string(i) + " out of range (n = " +
                       std::to_string(size_) + ")");
    }
  }

 private:
  void build_cache() {
    auto table = std::make_shared<std::vector<double>>(size_ * (size_ - 1) / 2);
    std::size_t at = 0;
    for (std::size_t i = 1; i < size_; ++i) {
      for (std::size_t j = 0; j < i; ++j) (*table)[at++] = base_distance(coords(i), coords(j));
    }
    cache_ = std::move(table);
  }

  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::vector<double> coords_;
  std::shared_ptr<const std::vector<double>> cache_;
};

enum class EntityKind { singleton, big };

struct Entity {
  EntityKind kind = EntityKind::singleton;
  std::vector<PointId> members;  // ascending
  PointId representative = 0;
};

/// The dataset seen with every must-link set collapsed into one entity.
/// Entities are ordered by their smallest member, so with no must-link sets
/// entity i is point i. Holds a pointer to the dataset, which must outlive it.
class ContractedSpace {
 public:
  ContractedSpace(const Dataset& base, std::vector<Entity> entities)
      : base_(&base), entities_(std::move(entities)), point_to_entity_(base.size()) {
    self_coverage_.resize(entities_.size(), 0.0);
    diameter_.resize(entities_.size(), 0.0);
    for (EntityId e = 0; e < entities_.size(); ++e) {
      const auto& members = entities_[e].members;
      for (PointId p : members) point_to_entity_[p] = e;
      for (PointId p : members) {
        self_coverage_[e] =
            std::max(self_coverage_[e], base.distance(p, entities_[e].representative));
        for (PointId q : members) diameter_[e] = std::max(diameter_[e], base.distance(p, q));
      }
      max_self_coverage_ = std::max(max_self_coverage_, self_coverage_[e]);
    }
  }

  const Dataset& base() const { return *base_; }
  std::size_t size() const { return entities_.size(); }
  std::span<const Entity> entities() const { return entities_; }
  std::span<const EntityId> point_to_entity() const { return point_to_entity_; }

  const Entity& entity(EntityId e) const {
    check(e);
    return entities_[e];
  }
  EntityId entity_of(PointId p) const {
    base_->check(p);
    return point_to_entity_[p];
  }
  PointId representative(EntityId e) const { return entity(e).representative; }
  bool is_big(EntityId e) const { return entity(e).kind == EntityKind::big; }

  /// Max over member pairs. For i == j this is the diameter of the entity.
  double refined_distance(EntityId i, EntityId j) const {
    check(i);
    check(j);
    if (i == j) return diameter_[i];
    const auto& a = entities_[i].members;
    const auto& b = entities_[j].members;
    if (a.size() == 1 && b.size() == 1) return base_->distance(a[0], b[0]);
    double best = 0.0;
    for (PointId p : a) {
      for (PointId q : b) best = std::max(best, base_->distance(p, q));
    }
    return best;
  }

  /// Largest distance from a member to the representative.
  double self_coverage(EntityId e) const {
    check(e);
    return self_coverage_[e];
  }
  double max_self_coverage() const { return max_self_coverage_; }
  double diameter(EntityId e) const {
    check(e);
    return diameter_[e];
  }

  /// Distance used when entity e is served by center c: the refined distance,
  /// or the representative's eccentricity when e serves itself.
  double center_distance(EntityId e, EntityId c) const {
    return e == c ? self_coverage(e) : refined_distance(e, c);
  }

  void check(EntityId e) const {
    if (e >= entities_.size()) {
      throw InputError("entity id " + std::to_string(e) + " out of range (" +
                       std::to_string(entities_.size()) + " entities)");
    }
  }

 private:
  const Dataset* base_;
  std::vector<Entity> entities_;
  std::vector<EntityId> point_to_entity_;
  std::vector<double> self_coverage_;
  std::vector<double> diameter_;
  double max_self_coverage_ = 0.0;
};

inline double refined_distance(EntityId i, EntityId j, const ContractedSpace& space) {
  return space.refined_distance(i, j);
}

/// min over c in centers of refined_distance(i, c).
inline double entity_to_centerset_distance(EntityId i, std::span<const EntityId> centers,
                                           const ContractedSpace& space) {
  if (centers.empty()) throw InputError("center set is empty");
  double best = std::numeric_limits<double>::infinity();
  for (EntityId c : centers) best = std::min(best, space.refined_distance(i, c));
  return best;
}

/// Member minimizing the maximum distance to the other members, lowest id on ties.
inline PointId min_eccentricity_member(const Dataset& data, std::span<const PointId> members) {
  PointId best = members.front();
  double best_ecc = std::numeric_limits<double>::infinity();
  for (PointId p : members) {
    double ecc = 0.0;
    for (PointId q : members) ecc = std::max(ecc, data.distance(p, q));
    if (ecc < best_ecc || (ecc == best_ecc && p < best)) {
      best = p;
      best_ecc = ecc;
    }
  }
  return best;
}

inline ContractedSpace contract(const Dataset& data,
                                const std::vector<std::vector<PointId>>& ml_sets) {
  const std::size_t n = data.size();
  std::vector<std::size_t> owner(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t s = 0; s < ml_sets.size(); ++s) {
    if (ml_sets[s].size() < 2) {
      throw InputError("must-link set " + std::to_string(s) + " has fewer than two points");
    }
    for (PointId p : ml_sets[s]) {
      data.check(p);
      if (owner[p] != std::numeric_limits<std::size_t>::max()) {
        throw InputError("point " + std::to_string(p) + " appears in more than one must-link set");
      }
      owner[p] = s;
    }
  }

  std::vector<Entity> entities;
  entities.reserve(n);
  for (PointId p = 0; p < n; ++p) {
    if (owner[p] == std::numeric_limits<std::size_t>::max()) {
      entities.push_back(Entity{EntityKind::singleton, {p}, p});
      continue;
    }
    const auto& set = ml_sets[owner[p]];
    if (*std::min_element(set.begin(), set.end()) != p) continue;
    Entity big{EntityKind::big, set, 0};
    std::sort(big.members.begin(), big.members.end());
    big.representative = min_eccentricity_member(data, big.members);
    entities.push_back(std::move(big));
  }
  return ContractedSpace(data, std::move(entities));
}

// The space keeps a pointer to the dataset.
ContractedSpace contract(const Dataset&& data, const std::vector<std::vector<PointId>>& ml_sets) = delete;

struct CandidateRadii {
  std::vector<double> values;  // strictly increasing
};

/// Sorted, deduplicated distances over all pairs of distinct original points.
inline CandidateRadii candidate_radii(const Dataset& data) {
  const std::size_t n = data.size();
  if (n < 2) throw InputError("candidate radii need at least two points");
  CandidateRadii out;
  out.values.reserve(n * (n - 1) / 2);
  for (PointId i = 1; i < n; ++i) {
    for (PointId j = 0; j < i; ++j) out.values.push_back(data.distance(i, j));
  }
  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  return out;
}

}  // namespace ckc
