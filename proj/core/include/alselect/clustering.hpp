#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace alselect {

using Point = std::vector<double>;

struct KMeansOptions {
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

struct Clustering {
  std::vector<Point> centroids;
  std::vector<std::size_t> assignment;  // point index -> cluster index
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after seeding, then after each Lloyd update; nonincreasing.
  std::vector<double> inertia_trace;

  std::size_t k() const { return centroids.size(); }
};

/// Lloyd's algorithm with seeded k-means++ initialization. Stops once the
/// largest centroid movement drops below tol or after max_iter updates. A
/// cluster left empty takes the point farthest from its current centroid.
Clustering kmeans(std::span<const Point> points, const KMeansOptions& options);

/// For each cluster, the index of its member nearest the centroid (lowest index
/// on ties; nearest point overall if the cluster is empty), deduplicated in
/// cluster order.
std::vector<std::size_t> representatives(std::span<const Point> points,
                                         const Clustering& clustering);

double squared_distance(std::span<const double> x, std::span<const double> y);

}  // namespace alselect
