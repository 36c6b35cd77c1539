#pragma once

// k-piecewise-linear curves in the plane, their (k+2)-line representation,
// the curve distance built from d_Q, and means of oriented lines and curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hyperdist/core.hpp"
#include "hyperdist/metrics.hpp"
#include "hyperdist/sensitivity.hpp"

namespace hyperdist {

using Point2 = Eigen::Vector2d;

/// Segments shorter than this are rejected.
inline constexpr double kMinSegmentLength = 1e-12;
/// |sin| of the turn between consecutive segments at or below this means
/// they share a support line.
inline constexpr double kParallelTolerance = 1e-12;

/// A curve made of k >= 1 ordered segments through k + 1 vertices.
class CurveK {
 public:
  explicit CurveK(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    detail::require(vertices_.size() >= 2, Errc::TooFewPoints, "a curve needs at least two vertices");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      detail::require(vertices_[i].allFinite(), Errc::Parse, "curve vertices must be finite");
      if (i > 0 && (vertices_[i] - vertices_[i - 1]).norm() <= kMinSegmentLength)
        detail::fail(Errc::DegenerateSegment, "segment " + std::to_string(i) + " has zero length");
    }
  }

  Index k() const noexcept { return static_cast<Index>(vertices_.size()) - 1; }
  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const Point2& vertex(std::size_t i) const { return vertices_[i]; }

 private:
  std::vector<Point2> vertices_;
};

/// Lines l_0 .. l_{k+1}: l_j supports segment j (1 <= j <= k); l_0 and
/// l_{k+1} are the perpendicular caps through the two endpoints.
struct LineRepresentation {
  std::vector<Hyperplane> lines;

  Index k() const noexcept { return static_cast<Index>(lines.size()) - 2; }
};

namespace detail {

inline Point2 direction(const Point2& a, const Point2& b) { return (b - a).normalized(); }

/// Oriented line through p whose normal is `normal` (unit).
inline Hyperplane oriented_line(const Point2& normal, const Point2& p) {
  return canonicalize(Vector{{normal.x(), normal.y(), -normal.dot(p)}}, true);
}

/// Travel direction t -> normal t rotated by +90 degrees.
inline Point2 left_normal(const Point2& t) { return {-t.y(), t.x()}; }
/// Inverse of left_normal.
inline Point2 travel_direction(const Hyperplane& h) { return {h.coeffs()[1], -h.coeffs()[0]}; }

inline double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline Point2 intersect(const Hyperplane& l1, const Hyperplane& l2) {
  const double a1 = l1.coeffs()[0], b1 = l1.coeffs()[1], c1 = l1.coeffs()[2];
  const double a2 = l2.coeffs()[0], b2 = l2.coeffs()[1], c2 = l2.coeffs()[2];
  const double det = a1 * b2 - a2 * b1;
  if (std::abs(det) <= kParallelTolerance) fail(Errc::ParallelLines, "consecutive lines do not intersect");
  return {(b1 * c2 - b2 * c1) / det, (a2 * c1 - a1 * c2) / det};
}

inline void require_plane(const PointSet& Q) {
  require(Q.dim() == 2, Errc::DimensionMismatch, "curve distances need points in R^2");
}

}  // namespace detail

/// Each line is oriented: the normal of a support line is the direction of
/// travel rotated by +90 degrees, and a cap's normal is the travel direction
/// of its adjacent segment.
inline LineRepresentation curve_to_lines(const CurveK& curve) {
  const auto& v = curve.vertices();
  const std::size_t k = v.size() - 1;
  std::vector<Point2> dirs(k);
  for (std::size_t i = 0; i < k; ++i) dirs[i] = detail::direction(v[i], v[i + 1]);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (std::abs(detail::cross(dirs[i], dirs[i + 1])) <= kParallelTolerance)
      detail::fail(Errc::DegenerateTurn,
                   "segments " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                       " share a support line");
  }

  LineRepresentation rep;
  rep.lines.reserve(k + 2);
  rep.lines.push_back(detail::oriented_line(dirs.front(), v.front()));
  for (std::size_t i = 0; i < k; ++i) rep.lines.push_back(detail::oriented_line(detail::left_normal(dirs[i]), v[i]));
  rep.lines.push_back(detail::oriented_line(dirs.back(), v.back()));
  return rep;
}

/// Vertex i is the intersection of l_i and l_{i+1}.
inline CurveK lines_to_curve(const LineRepresentation& rep) {
  detail::require(rep.lines.size() >= 3, Errc::TooFewPoints, "a line representation needs k + 2 >= 3 lines");
  for (const auto& l : rep.lines)
    detail::require(l.dim() == 2, Errc::DimensionMismatch, "curve lines must live in R^2");
  std::vector<Point2> vertices;
  vertices.reserve(rep.lines.size() - 1);
  for (std::size_t i = 0; i + 1 < rep.lines.size(); ++i)
    vertices.push_back(detail::intersect(rep.lines[i], rep.lines[i + 1]));
  return CurveK(std::move(vertices));
}

inline double dist_curves(const PointSet& Q, const LineRepresentation& r1, const LineRepresentation& r2) {
  detail::require_plane(Q);
  detail::require(r1.lines.size() == r2.lines.size(), Errc::MismatchedK, "curves differ in segment count");
  double total = 0.0;
  for (std::size_t i = 0; i < r1.lines.size(); ++i) {
    const double d = dist(Q, r1.lines[i], r2.lines[i]);
    total += d * d;
  }
  return std::sqrt(total);
}

/// d^k_Q: root-sum-square of d_Q over the k + 2 corresponding lines.
inline double dist_curves(const PointSet& Q, const CurveK& g1, const CurveK& g2) {
  detail::require(g1.k() == g2.k(), Errc::MismatchedK, "curves differ in segment count");
  return dist_curves(Q, curve_to_lines(g1), curve_to_lines(g2));
}

/// Concatenated per-line embeddings; length (k + 2) n. Euclidean distance
/// between two of these equals dist_curves.
inline Vector curve_embed(const PointSet& Q, const CurveK& curve) {
  detail::require_plane(Q);
  const auto rep = curve_to_lines(curve);
  const Index n = Q.size();
  Vector out(static_cast<Index>(rep.lines.size()) * n);
  for (std::size_t i = 0; i < rep.lines.size(); ++i)
    out.segment(static_cast<Index>(i) * n, n) = embed(Q, rep.lines[i]).values;
  return out;
}

/// N = ceil(2(k + 2) / (delta eps^2)) points for a curve-distance coreset.
inline std::size_t curve_coreset_size(Index k, double eps, double delta) {
  detail::require(eps > 0.0 && delta > 0.0, Errc::BadParameter, "eps and delta must be positive");
  return static_cast<std::size_t>(
      std::ceil(2.0 * static_cast<double>(k + 2) / (delta * eps * eps) - 1e-9));
}

/// Curve distance with every per-line d_Q replaced by its coreset estimate.
inline double estimate_dist_curves(const PointSet& Q, const Coreset& coreset, const CurveK& g1,
                                   const CurveK& g2) {
  detail::require_plane(Q);
  detail::require(g1.k() == g2.k(), Errc::MismatchedK, "curves differ in segment count");
  const auto r1 = curve_to_lines(g1);
  const auto r2 = curve_to_lines(g2);
  double total = 0.0;
  for (std::size_t i = 0; i < r1.lines.size(); ++i) {
    const double d = estimate_dist(Q, coreset, r1.lines[i], r2.lines[i]);
    total += d * d;
  }
  return std::sqrt(total);
}

// ---------------------------------------------------------------------------
// Douglas-Peucker down to exactly k segments.

namespace detail {

inline double segment_distance(const Point2& a, const Point2& b, const Point2& p) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

}  // namespace detail

/// Keep the k + 1 most important vertices in Douglas-Peucker order: the
/// range whose farthest interior point deviates most from its chord is split
/// first (ties go to the earlier range, then the earlier point). Consecutive
/// duplicate input points are dropped before ranking.
inline CurveK simplify_to_k(const std::vector<Point2>& polyline, Index k) {
  detail::require(k >= 1, Errc::BadK, "k must be >= 1");
  std::vector<Point2> pts;
  pts.reserve(polyline.size());
  for (const auto& p : polyline) {
    detail::require(p.allFinite(), Errc::Parse, "polyline points must be finite");
    if (pts.empty() || (p - pts.back()).norm() > kMinSegmentLength) pts.push_back(p);
  }
  if (static_cast<Index>(pts.size()) < k + 1)
    detail::fail(Errc::TooFewPoints, "polyline has fewer than k + 1 distinct points");

  struct Range {
    std::size_t first, last, split;
    double deviation;
  };
  auto make_range = [&pts](std::size_t first, std::size_t last) {
    Range r{first, last, first + 1, -1.0};
    for (std::size_t i = first + 1; i < last; ++i) {
      const double dv = detail::segment_distance(pts[first], pts[last], pts[i]);
      if (dv > r.deviation) {
        r.deviation = dv;
        r.split = i;
      }
    }
    return r;
  };
  auto lower_priority = [](const Range& a, const Range& b) {
    if (a.deviation != b.deviation) return a.deviation < b.deviation;
    return a.first > b.first;
  };
  std::priority_queue<Range, std::vector<Range>, decltype(lower_priority)> queue(lower_priority);

  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  Index kept = 2;
  if (pts.size() > 2) queue.push(make_range(0, pts.size() - 1));
  while (kept < k + 1 && !queue.empty()) {
    const Range r = queue.top();
    queue.pop();
    keep[r.split] = true;
    ++kept;
    if (r.split - r.first >= 2) queue.push(make_range(r.first, r.split));
    if (r.last - r.split >= 2) queue.push(make_range(r.split, r.last));
  }

  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(k + 1));
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(pts[i]);
  return CurveK(std::move(out));
}

// ---------------------------------------------------------------------------
// Mean of oriented lines.

struct OrientedMean {
  Hyperplane line;
  /// sum_i d_Q(line, l_i)^2
  double objective = 0.0;
  /// Lagrange multiplier of the unit-normal constraint (rotated frame).
  double multiplier = 0.0;
  /// Max absolute residual of the stationarity system at the returned point.
  double stationarity_residual = 0.0;
};

namespace detail {

/// e1 a^2 + e2 b^2 + e3 a + e4 b on the unit circle, in the eigenbasis.
struct CircleQuadratic {
  double e1, e2, e3, e4;

  double value(double a, double b) const { return e1 * a * a + e2 * b * b + e3 * a + e4 * b; }

  double multiplier(double a, double b) const {
    return -(e1 * a * a + e2 * b * b + 0.5 * (e3 * a + e4 * b));
  }

  double residual(double a, double b) const {
    const double lambda = multiplier(a, b);
    return std::max({std::abs(2.0 * (e1 + lambda) * a + e3), std::abs(2.0 * (e2 + lambda) * b + e4),
                     std::abs(a * a + b * b - 1.0)});
  }

  /// Newton on the angle; stops early where the curvature is not positive.
  std::array<double, 2> polish(double a, double b) const {
    double theta = std::atan2(b, a);
    for (int it = 0; it < 60; ++it) {
      const double s = std::sin(theta), c = std::cos(theta);
      const double g1 = (e2 - e1) * 2.0 * s * c - e3 * s + e4 * c;
      const double g2 = 2.0 * (e2 - e1) * (c * c - s * s) - e3 * c - e4 * s;
      if (!(g2 > 0.0)) break;
      const double step = g1 / g2;
      theta -= step;
      if (std::abs(step) < 1e-16) break;
    }
    return {std::cos(theta), std::sin(theta)};
  }
};

/// Real parts of the roots of the monic quartic x^4 + c3 x^3 + c2 x^2 + c1 x + c0,
/// as eigenvalues of its companion matrix.
inline std::vector<std::complex<double>> quartic_roots(double c3, double c2, double c1, double c0) {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  companion(0, 3) = -c0;
  companion(1, 3) = -c1;
  companion(2, 3) = -c2;
  companion(3, 3) = -c3;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (Index i = 0; i < 4; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

inline bool canonical_sign(double a, double b, double c) {
  for (double x : {a, b, c})
    if (std::abs(x) > kSignTolerance) return x > 0.0;
  return true;
}

}  // namespace detail

/// Oriented line minimising sum_i d_Q(l, l_i)^2.
///
/// The offset is eliminated in closed form, which leaves a quadratic in the
/// unit normal. In the eigenbasis of its 2x2 matrix the Lagrange conditions
/// reduce to a quartic in the multiplier, solved through its companion
/// matrix. Every root (real part) and the four axis points seed a Newton
/// polish on the circle, and the best stationary point wins; ties go to the
/// candidate whose coefficients have canonical sign.
inline OrientedMean mean_oriented_lines_detailed(std::span<const Hyperplane> lines, const PointSet& Q) {
  detail::require(!lines.empty(), Errc::EmptyInput, "mean needs at least one line");
  detail::require_plane(Q);
  for (const auto& l : lines) {
    detail::require(l.dim() == 2, Errc::DimensionMismatch, "mean lines must live in R^2");
    detail::require(l.oriented(), Errc::OrientationMismatch, "mean is defined on oriented lines");
  }

  const Index n = Q.size();
  const double nd = static_cast<double>(n);
  const auto& P = Q.points();
  const double mx = P.col(0).mean(), my = P.col(1).mean();
  const Vector xc = P.col(0).array() - mx;
  const Vector yc = P.col(1).array() - my;

  // Normalised objective F(a, b, c) = mean over (line i, point j) of
  // (a x_j + b y_j + c - d_ij)^2 with d_ij = v_{Q_j}(l_i).
  double d_mean = 0.0, xd = 0.0, yd = 0.0;
  const double count = static_cast<double>(lines.size()) * nd;
  std::vector<Vector> d(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    d[i] = signed_distances(Q, lines[i]);
    d_mean += d[i].sum();
    xd += xc.dot(d[i]);
    yd += yc.dot(d[i]);
  }
  d_mean /= count;
  xd /= count;
  yd /= count;

  const double alpha1 = xc.squaredNorm() / nd;
  const double alpha2 = yc.squaredNorm() / nd;
  const double alpha3 = 2.0 * xc.dot(yc) / nd;
  const double alpha4 = -2.0 * xd;
  const double alpha5 = -2.0 * yd;

  Eigen::Matrix2d A;
  A << alpha1, 0.5 * alpha3, 0.5 * alpha3, alpha2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(A);
  const Eigen::Matrix2d& R = eig.eigenvectors();
  const Eigen::Vector2d e34 = R.transpose() * Eigen::Vector2d(alpha4, alpha5);
  const detail::CircleQuadratic f{eig.eigenvalues()[0], eig.eigenvalues()[1], e34[0], e34[1]};

  // e3^2 (e2 + l)^2 + e4^2 (e1 + l)^2 = 4 (e1 + l)^2 (e2 + l)^2, made monic.
  const double s = f.e1 + f.e2, q = f.e1 * f.e2;
  const double e3s = f.e3 * f.e3, e4s = f.e4 * f.e4;
  const auto roots = detail::quartic_roots(2.0 * s, s * s + 2.0 * q - 0.25 * (e3s + e4s),
                                           2.0 * s * q - 0.5 * (f.e2 * e3s + f.e1 * e4s),
                                           q * q - 0.25 * (f.e2 * f.e2 * e3s + f.e1 * f.e1 * e4s));

  std::vector<std::array<double, 2>> seeds = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  for (const auto& root : roots) {
    const double lambda = root.real();
    const double den1 = 2.0 * (f.e1 + lambda), den2 = 2.0 * (f.e2 + lambda);
    if (den1 == 0.0 || den2 == 0.0) continue;
    const double a = -f.e3 / den1, b = -f.e4 / den2;
    const double r = std::hypot(a, b);
    if (r > 0.0 && std::isfinite(r)) seeds.push_back({a / r, b / r});
  }

  const double tie = 1e-12 * (1.0 + std::abs(f.e1) + std::abs(f.e2) + std::abs(f.e3) + std::abs(f.e4));
  bool have = false;
  double best_value = 0.0;
  Eigen::Vector3d best;
  std::array<double, 2> best_rot{};
  for (const auto& seed : seeds) {
    const auto ab = f.polish(seed[0], seed[1]);
    const double value = f.value(ab[0], ab[1]);
    const Eigen::Vector2d normal = R * Eigen::Vector2d(ab[0], ab[1]);
    const double c = d_mean - normal.x() * mx - normal.y() * my;
    const Eigen::Vector3d coeffs(normal.x(), normal.y(), c);
    bool better = !have || value < best_value - tie;
    if (have && !better && std::abs(value - best_value) <= tie) {
      better = detail::canonical_sign(coeffs[0], coeffs[1], coeffs[2]) &&
               !detail::canonical_sign(best[0], best[1], best[2]);
    }
    if (better) {
      have = true;
      best_value = value;
      best = coeffs;
      best_rot = ab;
    }
  }

  Hyperplane line = canonicalize(Vector{{best[0], best[1], best[2]}}, true);
  double objective = 0.0;
  for (const auto& l : lines) {
    const double dq = dist(Q, line, l);
    objective += dq * dq;
  }
  return {std::move(line), objective, f.multiplier(best_rot[0], best_rot[1]),
          f.residual(best_rot[0], best_rot[1])};
}

inline Hyperplane mean_oriented_lines(std::span<const Hyperplane> lines, const PointSet& Q) {
  return mean_oriented_lines_detailed(lines, Q).line;
}

/// Mean of curves with a common k under d^k_Q.
///
/// Support lines 1..k are per-index oriented-line means. Each cap is the
/// perpendicular to the adjacent mean line through the projection, onto that
/// line, of the centroid of the corresponding curve endpoints.
inline CurveK mean_curve(std::span<const CurveK> curves, const PointSet& Q) {
  detail::require(!curves.empty(), Errc::EmptyInput, "mean needs at least one curve");
  detail::require_plane(Q);
  const Index k = curves.front().k();
  for (const auto& c : curves)
    detail::require(c.k() == k, Errc::MismatchedK, "curves differ in segment count");

  std::vector<LineRepresentation> reps;
  reps.reserve(curves.size());
  for (const auto& c : curves) reps.push_back(curve_to_lines(c));

  LineRepresentation mean;
  mean.lines.reserve(static_cast<std::size_t>(k + 2));
  std::vector<Hyperplane> support;
  support.reserve(static_cast<std::size_t>(k));
  std::vector<Hyperplane> column;
  for (Index i = 1; i <= k; ++i) {
    column.clear();
    for (const auto& r : reps) column.push_back(r.lines[static_cast<std::size_t>(i)]);
    support.push_back(mean_oriented_lines(column, Q));
  }

  auto cap = [&](const Hyperplane& adjacent, bool first) {
    Point2 centroid = Point2::Zero();
    for (const auto& c : curves) centroid += first ? c.vertices().front() : c.vertices().back();
    centroid /= static_cast<double>(curves.size());
    const Point2 normal(adjacent.coeffs()[0], adjacent.coeffs()[1]);
    const Point2 foot = centroid - signed_distance(adjacent, centroid) * normal;
    return detail::oriented_line(detail::travel_direction(adjacent), foot);
  };

  mean.lines.push_back(cap(support.front(), true));
  for (auto& l : support) mean.lines.push_back(l);
  mean.lines.push_back(cap(support.back(), false));
  return lines_to_curve(mean);
}

}  // namespace hyperdist
