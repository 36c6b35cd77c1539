#pragma once

// Applications built on d_Q: k-center and k-means over hyperplanes or curve
// embeddings, the kernel density estimate over regressors, the repeated-median
// (Siegel) line fit, and the distribution of Siegel fits on uncertain data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hyperdist/core.hpp"
#include "hyperdist/metrics.hpp"
#include "hyperdist/parallel.hpp"
#include "hyperdist/random.hpp"
#include "hyperdist/sensitivity.hpp"
#include "hyperdist/trajectories.hpp"

namespace hyperdist {

// ---------------------------------------------------------------------------
// Gonzalez farthest-point k-center

struct KCenterResult {
  std::vector<std::size_t> centers;     // item indices, in selection order
  std::vector<std::size_t> assignment;  // per item, position in `centers`
  std::vector<double> radii;            // radius after 1, 2, .., k centers

  double radius() const { return radii.back(); }
};

/// Farthest-point traversal starting from item 0; `distance(i, j)` must be a
/// metric for the 2-approximation to hold. Ties pick the lowest index.
template <typename Distance>
KCenterResult gonzalez_k_center(std::size_t count, Distance&& distance, std::size_t k) {
  if (k < 1 || k > count) detail::fail(Errc::BadK, "k must satisfy 1 <= k <= item count");

  KCenterResult out;
  out.centers.push_back(0);
  out.assignment.assign(count, 0);
  std::vector<double> nearest(count);
  for (std::size_t i = 0; i < count; ++i) nearest[i] = distance(std::size_t{0}, i);

  auto farthest = [&] {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < count; ++i)
      if (nearest[i] > nearest[arg]) arg = i;
    return arg;
  };

  std::size_t next = farthest();
  out.radii.push_back(nearest[next]);
  while (out.centers.size() < k) {
    const std::size_t c = next;
    const std::size_t slot = out.centers.size();
    out.centers.push_back(c);
    for (std::size_t i = 0; i < count; ++i) {
      const double dv = distance(c, i);
      if (dv < nearest[i]) {
        nearest[i] = dv;
        out.assignment[i] = slot;
      }
    }
    nearest[c] = 0.0;
    out.assignment[c] = slot;
    next = farthest();
    out.radii.push_back(nearest[next]);
  }
  return out;
}

inline KCenterResult gonzalez_k_center(const PointSet& Q, std::span<const Hyperplane> items, std::size_t k) {
  return gonzalez_k_center(
      items.size(), [&](std::size_t i, std::size_t j) { return dist(Q, items[i], items[j]); }, k);
}

// ---------------------------------------------------------------------------
// Lloyd's k-means with k-means++ seeding

struct KMeansResult {
  Eigen::MatrixXd centers;              // k x dim
  std::vector<std::size_t> assignment;
  std::vector<double> wcss_history;     // after each assignment step
  double wcss = 0.0;
  int iterations = 0;
};

inline constexpr int kMaxLloydIterations = 100;

namespace detail {

inline double assign_nearest(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers,
                             std::vector<std::size_t>& assignment) {
  double wcss = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centers.rows(); ++c) {
      const double dv = (X.row(i) - centers.row(c)).squaredNorm();
      if (dv < best_d) {
        best_d = dv;
        best = static_cast<std::size_t>(c);
      }
    }
    assignment[static_cast<std::size_t>(i)] = best;
    wcss += best_d;
  }
  return wcss;
}

}  // namespace detail

/// Rows of X are the vectors. Stops at an assignment fixpoint or after
/// kMaxLloydIterations rounds; a cluster that empties keeps its old center.
inline KMeansResult lloyds_k_means(const Eigen::MatrixXd& X, std::size_t k, std::uint64_t seed) {
  const auto count = static_cast<std::size_t>(X.rows());
  if (k < 1 || k > count) detail::fail(Errc::BadK, "k must satisfy 1 <= k <= vector count");

  Rng rng(seed);
  KMeansResult out;
  out.centers.resize(static_cast<Index>(k), X.cols());
  out.centers.row(0) = X.row(static_cast<Index>(rng.uniform_index(count)));
  Vector d2(X.rows());
  for (std::size_t c = 1; c < k; ++c) {
    for (Index i = 0; i < X.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < c; ++j)
        best = std::min(best, (X.row(i) - out.centers.row(static_cast<Index>(j))).squaredNorm());
      d2[i] = best;
    }
    const Index pick = d2.sum() > 0.0 ? detail::DiscreteSampler(d2).draw(rng)
                                      : static_cast<Index>(rng.uniform_index(count));
    out.centers.row(static_cast<Index>(c)) = X.row(pick);
  }

  out.assignment.assign(count, 0);
  std::vector<std::size_t> previous;
  for (int it = 0; it < kMaxLloydIterations; ++it) {
    out.wcss = detail::assign_nearest(X, out.centers, out.assignment);
    out.wcss_history.push_back(out.wcss);
    out.iterations = it + 1;
    if (out.assignment == previous) break;
    previous = out.assignment;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Index>(k), X.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < count; ++i) {
      sums.row(static_cast<Index>(out.assignment[i])) += X.row(static_cast<Index>(i));
      ++sizes[out.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (sizes[c] > 0) out.centers.row(static_cast<Index>(c)) = sums.row(static_cast<Index>(c)) / static_cast<double>(sizes[c]);
  }
  return out;
}

inline KMeansResult lloyds_k_means(std::span<const Vector> vectors, std::size_t k, std::uint64_t seed) {
  detail::require(!vectors.empty(), Errc::EmptyInput, "k-means needs at least one vector");
  Eigen::MatrixXd X(static_cast<Index>(vectors.size()), vectors.front().size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    detail::require(vectors[i].size() == X.cols(), Errc::DimensionMismatch, "vectors differ in length");
    X.row(static_cast<Index>(i)) = vectors[i].transpose();
  }
  return lloyds_k_means(X, k, seed);
}

// ---------------------------------------------------------------------------
// Kernel density over regressors

/// (1/|H|) sum_i exp(-d_Q(h, h_i)^2), normalisation Z = 1.
inline double kde(const PointSet& Q, std::span<const Hyperplane> H, const Hyperplane& h) {
  detail::require(!H.empty(), Errc::EmptyInput, "kde needs at least one hyperplane");
  double total = 0.0;
  for (const auto& hi : H) {
    const double dq = dist(Q, h, hi);
    total += std::exp(-dq * dq);
  }
  return total / static_cast<double>(H.size());
}

/// ceil((d^2 + ln(1/delta)) / eps^2): subsample size for an eps-accurate kde.
inline std::size_t kde_sample_size(Index d, double eps, double delta) {
  detail::require(eps > 0.0 && delta > 0.0 && delta < 1.0, Errc::BadParameter,
                  "need eps > 0 and delta in (0, 1)");
  const double dd = static_cast<double>(d);
  return static_cast<std::size_t>(std::ceil((dd * dd + std::log(1.0 / delta)) / (eps * eps) - 1e-9));
}

/// d_Q(h_star, h_hat): how far a coreset's fitted model lands from the full-data model.
inline double coreset_quality(const PointSet& Q, const Hyperplane& h_star, const Hyperplane& h_hat) {
  return dist(Q, h_star, h_hat);
}

// ---------------------------------------------------------------------------
// Siegel repeated-median estimator

struct SiegelFit {
  double slope = 0.0;
  double intercept = 0.0;
  Hyperplane line;  // canonical form of y = slope x + intercept
};

namespace detail {

inline double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace detail

/// Slope: median over i of the median over j != i of pairwise slopes
/// (pairs with equal x skipped; a point with no usable partner contributes
/// nothing). Intercept: median of y_i - slope x_i.
inline SiegelFit siegel_estimator(std::span<const Point2> P) {
  detail::require(P.size() >= 2, Errc::TooFewPoints, "Siegel fit needs at least two points");
  std::vector<double> outer;
  outer.reserve(P.size());
  std::vector<double> inner;
  inner.reserve(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) {
    inner.clear();
    for (std::size_t j = 0; j < P.size(); ++j) {
      if (j == i || P[j].x() == P[i].x()) continue;
      inner.push_back((P[j].y() - P[i].y()) / (P[j].x() - P[i].x()));
    }
    if (!inner.empty()) outer.push_back(detail::median_inplace(inner));
  }
  if (outer.empty()) detail::fail(Errc::DegenerateX, "all points share one x coordinate");
  const double slope = detail::median_inplace(outer);

  std::vector<double> offsets;
  offsets.reserve(P.size());
  for (const auto& p : P) offsets.push_back(p.y() - slope * p.x());
  const double intercept = detail::median_inplace(offsets);
  return {slope, intercept, canonicalize(Vector{{slope, -1.0, intercept}})};
}

// ---------------------------------------------------------------------------
// Siegel fits over traversals of uncertain points

/// n uncertain points; point i is one of locations[i], uniformly.
struct UncertainPointSet {
  std::vector<std::vector<Point2>> locations;

  explicit UncertainPointSet(std::vector<std::vector<Point2>> locs) : locations(std::move(locs)) {
    detail::require(!locations.empty(), Errc::EmptyInput, "need at least one uncertain point");
    for (const auto& l : locations)
      detail::require(!l.empty(), Errc::EmptyInput, "every uncertain point needs a location");
  }

  std::size_t size() const noexcept { return locations.size(); }

  /// Every candidate location, as the base set Q for d_Q.
  PointSet all_locations() const {
    std::size_t total = 0;
    for (const auto& l : locations) total += l.size();
    PointMatrix M(static_cast<Index>(total), 2);
    Index r = 0;
    for (const auto& l : locations)
      for (const auto& p : l) M.row(r++) = p.transpose();
    return PointSet(std::move(M));
  }
};

struct EstimatorSample {
  std::vector<Hyperplane> lines;
};

inline constexpr int kMaxTraversalRetries = 100;

/// N independent traversals (one location per point, uniformly), each fitted
/// by siegel_estimator. Traversal t draws from derive_seed(seed, t), so the
/// multiset and its order are fixed by the seed.
inline EstimatorSample uncertain_siegel_distribution(const UncertainPointSet& P, std::size_t N,
                                                     std::uint64_t seed) {
  detail::require(N >= 1, Errc::BadParameter, "sample count must be >= 1");
  std::vector<std::optional<Hyperplane>> fits(N);
  parallel_for(N, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<Point2> traversal(P.size());
    for (int attempt = 0;; ++attempt) {
      for (std::size_t i = 0; i < P.size(); ++i)
        traversal[i] = P.locations[i][rng.uniform_index(P.locations[i].size())];
      try {
        fits[t] = siegel_estimator(traversal).line;
        return;
      } catch (const Error& e) {
        if (e.code() != Errc::DegenerateX || attempt + 1 >= kMaxTraversalRetries) throw;
      }
    }
  });
  EstimatorSample out;
  out.lines.reserve(N);
  for (auto& f : fits) out.lines.push_back(std::move(*f));
  return out;
}

/// Default N = ceil(4 / eps^2 ln(2 / delta)).
inline std::size_t siegel_sample_size(double eps, double delta) {
  detail::require(eps > 0.0 && delta > 0.0 && delta < 1.0, Errc::BadParameter,
                  "need eps > 0 and delta in (0, 1)");
  return static_cast<std::size_t>(std::ceil(4.0 / (eps * eps) * std::log(2.0 / delta) - 1e-9));
}

/// Fraction of T inside the closed ball {h : d_Q(z, h) <= r}. r may be +inf.
inline double empirical_ball_probability(const EstimatorSample& T, const PointSet& Q, const Hyperplane& z,
                                         double r) {
  if (T.lines.empty()) return 0.0;
  std::size_t inside = 0;
  for (const auto& h : T.lines)
    if (dist(Q, z, h) <= r) ++inside;
  return static_cast<double>(inside) / static_cast<double>(T.lines.size());
}

}  // namespace hyperdist
