#pragma once

// Point sets, canonical hyperplanes and the signed-distance embedding that
// every distance in this library is built on.

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hyperdist/errors.hpp"

namespace hyperdist {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Entries with magnitude at or below this are treated as zero when picking
/// the sign of a canonical coefficient vector.
inline constexpr double kSignTolerance = 1e-12;
/// A normal with norm at or below this does not define a hyperplane.
inline constexpr double kDegenerateNormal = 1e-12;

/// The base data Q: n points in R^d with strictly positive weights.
/// Without explicit weights every point carries 1/n.
class PointSet {
 public:
  explicit PointSet(PointMatrix points) : points_(std::move(points)) {
    validate_points();
    weights_ = Vector::Constant(points_.rows(), 1.0 / static_cast<double>(points_.rows()));
  }

  PointSet(PointMatrix points, Vector weights)
      : points_(std::move(points)), weights_(std::move(weights)), explicit_weights_(true) {
    validate_points();
    detail::require(weights_.size() == points_.rows(), Errc::DimensionMismatch,
                    "weight count differs from point count");
    for (Index i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
        detail::fail(Errc::NonpositiveWeight, "weight " + std::to_string(i) + " is not positive");
    }
  }

  Index size() const noexcept { return points_.rows(); }
  Index dim() const noexcept { return points_.cols(); }

  const PointMatrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }
  bool has_explicit_weights() const noexcept { return explicit_weights_; }

  auto point(Index i) const { return points_.row(i); }

  /// Weights rescaled to a probability measure (sum one).
  Vector probabilities() const { return weights_ / weights_.sum(); }

 private:
  void validate_points() const {
    detail::require(points_.rows() >= 1, Errc::EmptyInput, "point set needs at least one point");
    detail::require(points_.cols() >= 1, Errc::DimensionMismatch, "points need dimension >= 1");
    detail::require(points_.allFinite(), Errc::Parse, "point coordinates must be finite");
  }

  PointMatrix points_;
  Vector weights_;
  bool explicit_weights_ = false;
};

class Hyperplane;
Hyperplane canonicalize(const Eigen::Ref<const Vector>& raw, bool oriented = false);

/// A hyperplane {x : <u_{1..d}, x> + u_{d+1} = 0} with unit normal.
///
/// Unoriented hyperplanes are stored in canonical form (first entry with
/// magnitude above kSignTolerance is positive), so equal hyperplanes have
/// equal coefficients. Oriented ones keep the caller's sign: u and -u are
/// then distinct.
class Hyperplane {
 public:
  const Vector& coeffs() const noexcept { return coeffs_; }
  Index dim() const noexcept { return coeffs_.size() - 1; }
  bool oriented() const noexcept { return oriented_; }

  auto normal() const { return coeffs_.head(dim()); }
  double offset() const { return coeffs_[dim()]; }

  /// Same hyperplane with the normal flipped; only meaningful when oriented.
  Hyperplane reversed() const { return Hyperplane(-coeffs_, oriented_); }

  friend Hyperplane canonicalize(const Eigen::Ref<const Vector>& raw, bool oriented);

 private:
  Hyperplane(Vector coeffs, bool oriented) : coeffs_(std::move(coeffs)), oriented_(oriented) {}

  Vector coeffs_;
  bool oriented_ = false;
};

/// Scale `raw` so the normal part has unit length and, unless oriented, flip
/// the sign so the first significant entry is positive. Idempotent.
inline Hyperplane canonicalize(const Eigen::Ref<const Vector>& raw, bool oriented) {
  detail::require(raw.size() >= 2, Errc::DimensionMismatch,
                  "hyperplane needs at least two coefficients");
  detail::require(raw.allFinite(), Errc::Parse, "hyperplane coefficients must be finite");
  const Index d = raw.size() - 1;
  const double norm = raw.head(d).norm();
  if (!(norm > kDegenerateNormal)) detail::fail(Errc::DegenerateNormal, "normal vector is zero");

  Vector u = raw;
  // Already-unit input is left untouched so a second pass reproduces the
  // first bit for bit.
  if (std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) u /= norm;

  if (!oriented) {
    for (Index j = 0; j < u.size(); ++j) {
      if (std::abs(u[j]) > kSignTolerance) {
        if (u[j] < 0.0) u = -u;
        break;
      }
    }
  }
  return Hyperplane(std::move(u), oriented);
}

inline Hyperplane canonicalize(std::initializer_list<double> raw, bool oriented = false) {
  Vector v(static_cast<Index>(raw.size()));
  Index j = 0;
  for (double x : raw) v[j++] = x;
  return canonicalize(v, oriented);
}

/// <u_{1..d}, q> + u_{d+1}: the distance from q to h, signed by side.
template <typename Derived>
double signed_distance(const Hyperplane& h, const Eigen::MatrixBase<Derived>& q) {
  detail::require(q.size() == h.dim(), Errc::DimensionMismatch,
                  "point dimension differs from hyperplane dimension");
  double s = h.offset();
  for (Index j = 0; j < h.dim(); ++j) s += h.coeffs()[j] * q.derived().coeff(j);
  return s;
}

/// Signed distances from every point of Q to h (unscaled).
inline Vector signed_distances(const PointSet& Q, const Hyperplane& h) {
  detail::require(Q.dim() == h.dim(), Errc::DimensionMismatch,
                  "point set dimension differs from hyperplane dimension");
  Vector v(Q.size());
  for (Index i = 0; i < Q.size(); ++i) v[i] = signed_distance(h, Q.point(i));
  return v;
}

/// v_Q(h) / sqrt(n): the point of R^n that h maps to.
struct EmbeddingVector {
  Vector values;
  Index source_n = 0;
};

inline EmbeddingVector embed(const PointSet& Q, const Hyperplane& h) {
  Vector v = signed_distances(Q, h);
  v /= std::sqrt(static_cast<double>(Q.size()));
  return {std::move(v), Q.size()};
}

namespace detail {

/// n x (d+1) matrix with rows (q_i, 1).
inline Eigen::MatrixXd augmented(const PointSet& Q) {
  Eigen::MatrixXd A(Q.size(), Q.dim() + 1);
  A.leftCols(Q.dim()) = Q.points();
  A.col(Q.dim()).setOnes();
  return A;
}

/// Singular values below this are treated as zero.
inline double rank_threshold(Index rows, Index cols, double largest_singular) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         largest_singular;
}

inline Index numerical_rank(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double cut = rank_threshold(A.rows(), A.cols(), s[0]);
  Index r = 0;
  for (Index k = 0; k < s.size(); ++k)
    if (s[k] > cut) ++r;
  return r;
}

}  // namespace detail

/// True iff the rows (q_i, 1) span R^{d+1}; the condition under which d_Q is
/// a metric rather than a pseudometric.
inline bool is_full_rank(const PointSet& Q) {
  if (Q.size() < Q.dim() + 1) return false;
  return detail::numerical_rank(detail::augmented(Q)) == Q.dim() + 1;
}

}  // namespace hyperdist
