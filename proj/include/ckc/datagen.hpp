#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ckc/core.hpp"
#include "ckc/error.hpp"
#include "ckc/rng.hpp"

namespace ckc {

struct PlantedInstance {
  Dataset dataset;
  std::vector<std::int64_t> truth_labels;
  double r_star = 0.0;
  std::vector<std::vector<double>> cluster_centers;
};

namespace detail {

// Latent coordinates sit on a grid of r_star / 16 so that center +- r_star
// along one axis is exact and the planted radius comes out bit-exact.
inline double snap(double x, double r_star) {
  const double step = r_star / 16.0;
  return std::round(x / step) * step;
}

inline std::vector<std::vector<double>> place_latent_centers(std::size_t k, std::size_t dim,
                                                             double r_star, Rng& rng) {
  const double per_axis = std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(dim)));
  double side = 8.0 * r_star * (per_axis + 1.0);
  std::vector<std::vector<double>> centers;
  std::size_t misses = 0;
  while (centers.size() < k) {
    std::vector<double> c(dim);
    for (auto& x : c) x = snap(uniform_real(rng, 0.0, side), r_star);
    bool apart = true;
    for (const auto& o : centers) {
      if (!(base_distance(c, o) > 4.0 * r_star)) {
        apart = false;
        break;
      }
    }
    if (apart) {
      centers.push_back(std::move(c));
      misses = 0;
    } else if (++misses == 1000) {
      side *= 2.0;
      misses = 0;
    }
  }
  return centers;
}

}  // namespace detail

/// Planted instance with optimum radius exactly r_star (discrete centers):
/// every cluster holds a point at its latent center, an antipodal pair at
/// +-r_star along a random axis, and uniform points in the r_star-ball.
/// Latent centers are more than 4 r_star apart. Needs n >= 3k.
inline PlantedInstance generate(std::size_t k, std::size_t n, double r_star, std::size_t dim,
                                std::uint64_t seed) {
  if (k < 1) throw InputError("k must be at least 1");
  if (dim < 1) throw InputError("dim must be at least 1");
  if (!(r_star > 0.0) || !std::isfinite(r_star)) throw InputError("radius must be positive");
  if (n < 3 * k) {
    throw InputError("n must be at least 3k (n >= " + std::to_string(3 * k) +
                     "): each cluster needs a center point and an antipodal pair");
  }
  Rng rng(seed);
  auto latent = detail::place_latent_centers(k, dim, r_star, rng);

  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> labels;
  rows.reserve(n);
  labels.reserve(n);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = n / k + (c < n % k ? 1 : 0);
    const auto& center = latent[c];
    const std::size_t axis = uniform_index(rng, dim);
    std::vector<double> plus = center, minus = center;
    plus[axis] += r_star;
    minus[axis] -= r_star;
    rows.push_back(center);
    rows.push_back(std::move(plus));
    rows.push_back(std::move(minus));
    for (std::size_t i = 3; i < size;) {
      std::vector<double> dir(dim);
      double norm = 0.0;
      for (auto& x : dir) {
        x = standard_normal(rng);
        norm += x * x;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      const double radius = r_star * std::pow(uniform_unit(rng), 1.0 / static_cast<double>(dim));
      std::vector<double> p(dim);
      for (std::size_t d = 0; d < dim; ++d) p[d] = center[d] + dir[d] / norm * radius;
      if (base_distance(p, center) > r_star) continue;
      rows.push_back(std::move(p));
      ++i;
    }
    labels.insert(labels.end(), size, static_cast<std::int64_t>(c));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<std::vector<double>> shuffled_rows(n);
  std::vector<std::int64_t> shuffled_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    shuffled_rows[i] = std::move(rows[order[i]]);
    shuffled_labels[i] = labels[order[i]];
  }
  return PlantedInstance{Dataset::from_rows(shuffled_rows), std::move(shuffled_labels), r_star,
                         std::move(latent)};
}

}  // namespace ckc
