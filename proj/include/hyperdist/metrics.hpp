#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hyperdist/core.hpp"

namespace hyperdist {

namespace detail {

inline void check_pair(const PointSet& Q, const Hyperplane& h1, const Hyperplane& h2) {
  require(h1.dim() == h2.dim(), Errc::DimensionMismatch, "hyperplanes differ in dimension");
  require(Q.dim() == h1.dim(), Errc::DimensionMismatch,
          "point set dimension differs from hyperplane dimension");
  require(h1.oriented() == h2.oriented(), Errc::OrientationMismatch,
          "cannot compare an oriented hyperplane with an unoriented one");
}

/// sum_i w(i) * (<u_{1..d}, q_i> + u_{d+1})^2, in index order.
template <typename WeightFn>
double weighted_square_sum(const PointSet& Q, const Vector& u, WeightFn&& weight) {
  const Index d = Q.dim();
  double total = 0.0;
  for (Index i = 0; i < Q.size(); ++i) {
    double r = u[d];
    for (Index j = 0; j < d; ++j) r += u[j] * Q.points()(i, j);
    total += weight(i) * (r * r);
  }
  return total;
}

}  // namespace detail

/// d_Q(h1, h2) = ||v_Q(h1) - v_Q(h2)|| / sqrt(n).
///
/// Q's weights are ignored here; see dist_weighted. Evaluated through the
/// coefficient difference u1 - u2, so it equals ||A_Q (u1 - u2)|| / sqrt(n)
/// and is exactly symmetric.
inline double dist(const PointSet& Q, const Hyperplane& h1, const Hyperplane& h2) {
  detail::check_pair(Q, h1, h2);
  const Vector u = h1.coeffs() - h2.coeffs();
  const double w = 1.0 / static_cast<double>(Q.size());
  return std::sqrt(detail::weighted_square_sum(Q, u, [w](Index) { return w; }));
}

/// d_{Q,W}(h1, h2) = (sum_i w_i (v_i(h1) - v_i(h2))^2)^{1/2} with Q's weights.
/// With the default weights 1/n this reproduces dist bit for bit.
inline double dist_weighted(const PointSet& Q, const Hyperplane& h1, const Hyperplane& h2) {
  detail::check_pair(Q, h1, h2);
  const Vector u = h1.coeffs() - h2.coeffs();
  const Vector& w = Q.weights();
  return std::sqrt(detail::weighted_square_sum(Q, u, [&w](Index i) { return w[i]; }));
}

/// Unsigned variant: the same average but over |v_i|. Never exceeds dist.
inline double dist_unsigned(const PointSet& Q, const Hyperplane& h1, const Hyperplane& h2) {
  detail::check_pair(Q, h1, h2);
  const Vector v1 = signed_distances(Q, h1);
  const Vector v2 = signed_distances(Q, h2);
  return std::sqrt((v1.cwiseAbs() - v2.cwiseAbs()).squaredNorm() /
                   static_cast<double>(Q.size()));
}

/// Row i holds the vector from q_i to its closest point on h.
struct ProjectionMatrix {
  PointMatrix rows;
};

inline ProjectionMatrix projection_matrix(const PointSet& Q, const Hyperplane& h) {
  const Vector v = signed_distances(Q, h);
  PointMatrix rows(Q.size(), Q.dim());
  for (Index i = 0; i < Q.size(); ++i) rows.row(i) = -v[i] * h.normal().transpose();
  return {std::move(rows)};
}

/// Frobenius variant ||V_{Q,h1} - V_{Q,h2}||_F. Carries no 1/sqrt(n), so it
/// grows with |Q| where dist does not.
inline double dist_frobenius(const PointSet& Q, const Hyperplane& h1, const Hyperplane& h2) {
  detail::check_pair(Q, h1, h2);
  return (projection_matrix(Q, h1).rows - projection_matrix(Q, h2).rows).norm();
}

/// Whether d_Q is a true metric on Q or only a pseudometric.
enum class MetricStatus { Metric, Pseudometric };

inline MetricStatus metric_status(const PointSet& Q) {
  return is_full_rank(Q) ? MetricStatus::Metric : MetricStatus::Pseudometric;
}

// ---------------------------------------------------------------------------
// Lifting map: the closed ball {h : d_Q(h0, h) <= r} as a halfspace in the
// monomials y_j = u_j, y_{j,j'} = u_j u_j'.

/// Distance band around the sphere d_Q(h0, h) = r inside which membership is
/// decided generously (the ball is closed).
inline constexpr double kBallBoundaryBand = 1e-9;

struct LiftedBall {
  Index dim = 0;             // d
  Index n = 0;               // |Q|
  double radius = 0.0;
  double constant = 0.0;     // a_0
  Vector linear;             // a_1 .. a_{d+1}
  Eigen::MatrixXd quadratic; // a_{j,j'} in the upper triangle, j <= j'

  /// d' = 2(d+1) + C(d+1, 2): number of lifted variables y.
  static constexpr Index lifted_dimension(Index d) { return (d * d + 5 * d + 4) / 2; }

  /// a_0 plus every a_j and a_{j,j'}.
  Index coefficient_count() const { return lifted_dimension(dim) + 1; }

  /// Coefficients flattened as (a_0, a_1..a_{d+1}, a_{1,1}, a_{1,2}, .., a_{d+1,d+1}).
  Vector flattened() const {
    Vector out(coefficient_count());
    Index k = 0;
    out[k++] = constant;
    for (Index j = 0; j <= dim; ++j) out[k++] = linear[j];
    for (Index j = 0; j <= dim; ++j)
      for (Index jj = j; jj <= dim; ++jj) out[k++] = quadratic(j, jj);
    return out;
  }
};

inline LiftedBall lift_ball(const PointSet& Q, const Hyperplane& h0, double r) {
  detail::require(r >= 0.0 && std::isfinite(r), Errc::BadParameter, "radius must be finite and >= 0");
  detail::require(Q.dim() == h0.dim(), Errc::DimensionMismatch,
                  "point set dimension differs from hyperplane dimension");
  if (!is_full_rank(Q)) detail::fail(Errc::NotFullRank, "lifting map needs a full-rank point set");

  const Index d = Q.dim();
  const Index n = Q.size();
  const Vector v0 = signed_distances(Q, h0);
  const auto& X = Q.points();

  LiftedBall ball;
  ball.dim = d;
  ball.n = n;
  ball.radius = r;
  ball.constant = v0.squaredNorm() - static_cast<double>(n) * r * r;
  ball.linear = Vector::Zero(d + 1);
  ball.quadratic = Eigen::MatrixXd::Zero(d + 1, d + 1);
  for (Index j = 0; j < d; ++j) ball.linear[j] = -2.0 * X.col(j).dot(v0);
  ball.linear[d] = -2.0 * v0.sum();
  for (Index j = 0; j < d; ++j) {
    ball.quadratic(j, j) = X.col(j).squaredNorm();
    for (Index jj = j + 1; jj < d; ++jj) ball.quadratic(j, jj) = 2.0 * X.col(j).dot(X.col(jj));
    ball.quadratic(j, d) = 2.0 * X.col(j).sum();
  }
  ball.quadratic(d, d) = static_cast<double>(n);
  return ball;
}

/// Value of the lifted linear form at h; equals n (d_Q(h0,h)^2 - r^2).
inline double lifted_value(const LiftedBall& ball, const Hyperplane& h) {
  detail::require(h.dim() == ball.dim, Errc::DimensionMismatch,
                  "hyperplane dimension differs from the ball's");
  const Vector& u = h.coeffs();
  double value = ball.constant + ball.linear.dot(u);
  for (Index j = 0; j <= ball.dim; ++j)
    for (Index jj = j; jj <= ball.dim; ++jj) value += ball.quadratic(j, jj) * (u[j] * u[jj]);
  return value;
}

/// Halfspace test for the lifted form. Agrees with dist(Q, h0, h) <= r
/// whenever |dist - r| exceeds kBallBoundaryBand.
inline bool lift_membership(const LiftedBall& ball, const Hyperplane& h) {
  const Vector& u = h.coeffs();
  // Rounding in the expanded polynomial is bounded by the magnitude of its terms.
  double magnitude = std::abs(ball.constant) + ball.linear.cwiseAbs().dot(u.cwiseAbs());
  for (Index j = 0; j <= ball.dim; ++j)
    for (Index jj = j; jj <= ball.dim; ++jj)
      magnitude += std::abs(ball.quadratic(j, jj) * u[j] * u[jj]);
  const double n = static_cast<double>(ball.n);
  const double band = kBallBoundaryBand;
  const double slack = n * (2.0 * ball.radius * band + band * band) +
                       64.0 * std::numeric_limits<double>::epsilon() * magnitude;
  return lifted_value(ball, h) <= slack;
}

}  // namespace hyperdist
