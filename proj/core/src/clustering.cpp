#include "alselect/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "alselect/error.hpp"
#include "alselect/random.hpp"

namespace alselect {
namespace {

std::size_t nearest(std::span<const double> point, const std::vector<Point>& centroids,
                    double* best_distance = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_distance) *best_distance = best_d;
  return best;
}

std::vector<Point> seed_plus_plus(std::span<const Point> points, std::size_t k, Rng& rng) {
  std::vector<Point> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.index(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);
  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave the cursor on a zero-weight tail point.
      while (d2[pick] <= 0.0 && pick > 0) --pick;
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
    }
  }
  return centroids;
}

}  // namespace

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

Clustering kmeans(std::span<const Point> points, const KMeansOptions& options) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "k-means over zero points");
  if (options.k < 1 || options.k > points.size()) {
    throw Error(ErrorCode::kBadK, "k=" + std::to_string(options.k) + " outside [1, " +
                                      std::to_string(points.size()) + "]");
  }
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::kDimMismatch, "k-means points differ in dimension");
    for (double x : p) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kNonFiniteValue, "k-means point not finite");
    }
  }

  Rng rng(derive_seed(options.seed, 0x6b6d));
  Clustering out;
  out.centroids = seed_plus_plus(points, options.k, rng);
  out.assignment.assign(points.size(), 0);
  std::vector<double> dist(points.size());

  auto assign = [&] {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.assignment[i] = nearest(points[i], out.centroids, &dist[i]);
      inertia += dist[i];
    }
    return inertia;
  };

  out.inertia = assign();
  out.inertia_trace.push_back(out.inertia);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    std::vector<Point> sums(options.k, Point(dim, 0.0));
    std::vector<std::size_t> counts(options.k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& s = sums[out.assignment[i]];
      for (std::size_t j = 0; j < dim; ++j) s[j] += points[i][j];
      ++counts[out.assignment[i]];
    }
    // Refill empty clusters from the worst-fit points, never reusing one.
    std::vector<bool> taken(points.size(), false);
    for (std::size_t c = 0; c < options.k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = points.size();
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!taken[i] && counts[out.assignment[i]] > 1 && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      if (far == points.size()) continue;
      taken[far] = true;
      auto& from = sums[out.assignment[far]];
      for (std::size_t j = 0; j < dim; ++j) from[j] -= points[far][j];
      --counts[out.assignment[far]];
      sums[c] = points[far];
      counts[c] = 1;
      out.assignment[far] = c;
      dist[far] = 0.0;
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < options.k; ++c) {
      if (counts[c] == 0) continue;
      Point next(dim);
      for (std::size_t j = 0; j < dim; ++j) next[j] = sums[c][j] / static_cast<double>(counts[c]);
      movement = std::max(movement, std::sqrt(squared_distance(next, out.centroids[c])));
      out.centroids[c] = std::move(next);
    }
    out.inertia = assign();
    out.inertia_trace.push_back(out.inertia);
    out.iterations = iter + 1;
    if (movement < options.tol) break;
  }
  return out;
}

std::vector<std::size_t> representatives(std::span<const Point> points,
                                         const Clustering& clustering) {
  // Members are searched first so distinct clusters yield distinct points; an
  // empty cluster falls back to the nearest point overall.
  const std::size_t k = clustering.k();
  std::vector<std::size_t> best(k, points.size());
  std::vector<double> best_d(k, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = clustering.assignment[i];
    const double d = squared_distance(points[i], clustering.centroids[c]);
    if (d < best_d[c]) {
      best_d[c] = d;
      best[c] = i;
    }
  }
  std::vector<std::size_t> reps;
  reps.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (best[c] == points.size()) {
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = squared_distance(points[i], clustering.centroids[c]);
        if (d < best_d[c]) {
          best_d[c] = d;
          best[c] = i;
        }
      }
    }
    if (std::find(reps.begin(), reps.end(), best[c]) == reps.end()) reps.push_back(best[c]);
  }
  return reps;
}

}  // namespace alselect
