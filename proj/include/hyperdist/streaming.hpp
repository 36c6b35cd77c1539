#pragma once

// Online row sampling over the design-matrix stream: each row is kept with
// probability proportional to its ridge leverage against what has been kept
// so far, rescaled by 1/sqrt(p).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hyperdist/core.hpp"
#include "hyperdist/metrics.hpp"
#include "hyperdist/random.hpp"

namespace hyperdist {

struct SketchParams {
  double eps = 0.0;
  double delta = 0.0;
  double lambda = 0.0;  // delta / eps
  double c = 0.0;       // oversampling factor

  /// c = 8 ln(D / eps^2) with D the number of columns being sketched.
  static double default_c(Index columns, double eps) {
    return 8.0 * std::log(static_cast<double>(columns) / (eps * eps));
  }
};

class Sketch {
 public:
  struct Offer {
    double probability = 0.0;
    bool accepted = false;
  };

  /// Empty sketch for points in R^point_dim (rows of length point_dim + 1).
  Sketch(Index point_dim, double eps, double delta, std::uint64_t seed,
         std::optional<double> c_override = std::nullopt)
      : columns_(point_dim + 1), seed_(seed), rng_(seed) {
    detail::require(point_dim >= 1, Errc::BadParameter, "point dimension must be >= 1");
    detail::require(eps > 0.0 && eps < 1.0, Errc::BadParameter, "eps must lie in (0, 1)");
    detail::require(delta > 0.0 && std::isfinite(delta), Errc::BadParameter, "delta must be > 0");
    params_.eps = eps;
    params_.delta = delta;
    params_.lambda = delta / eps;
    params_.c = c_override.value_or(SketchParams::default_c(columns_, eps));
    detail::require(params_.c > 0.0 && std::isfinite(params_.c), Errc::BadParameter,
                    "oversampling factor c must be positive");
    gram_ = Eigen::MatrixXd::Zero(columns_, columns_);
    refactor();
  }

  /// Rebuild a finished sketch from its stored rows (e.g. read back from a
  /// file). Further offers continue with a generator freshly seeded by `seed`.
  static Sketch from_rows(Index point_dim, const SketchParams& params, std::vector<Vector> rows,
                          std::size_t seen_count, std::uint64_t seed) {
    Sketch s(point_dim, params.eps, params.delta, seed, params.c);
    for (auto& r : rows) {
      detail::require(r.size() == s.columns_, Errc::DimensionMismatch, "sketch row length mismatch");
      s.gram_.noalias() += r * r.transpose();
      s.rows_.push_back(std::move(r));
    }
    s.seen_ = std::max(seen_count, s.rows_.size());
    s.refactor();
    return s;
  }

  Index columns() const noexcept { return columns_; }
  Index point_dim() const noexcept { return columns_ - 1; }
  const SketchParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t accepted_count() const noexcept { return rows_.size(); }
  std::size_t seen_count() const noexcept { return seen_; }
  const std::vector<Vector>& rows() const noexcept { return rows_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  /// Stored rows stacked into a matrix (accepted_count x columns).
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd M(static_cast<Index>(rows_.size()), columns_);
    for (std::size_t i = 0; i < rows_.size(); ++i) M.row(static_cast<Index>(i)) = rows_[i];
    return M;
  }

  /// min(c (1+eps) a^T (G + lambda I)^{-1} a, 1) for the current sketch.
  double probability(const Eigen::Ref<const Vector>& a) const {
    detail::require(a.size() == columns_, Errc::DimensionMismatch, "row length differs from sketch");
    const double q = a.dot(factor_.solve(a));
    return std::clamp(params_.c * (1.0 + params_.eps) * q, 0.0, 1.0);
  }

  Offer offer(const Eigen::Ref<const Vector>& a) {
    const double p = probability(a);
    ++seen_;
    // Always draw so the generator advances once per row.
    const bool accepted = rng_.bernoulli(p);
    if (accepted) {
      Vector scaled = a / std::sqrt(p);
      gram_.noalias() += scaled * scaled.transpose();
      rows_.push_back(std::move(scaled));
      refactor();
    }
    return {p, accepted};
  }

  /// Offer the design-matrix row (q, 1).
  template <typename Derived>
  Offer offer_point(const Eigen::MatrixBase<Derived>& q) {
    detail::require(q.size() == point_dim(), Errc::DimensionMismatch,
                    "point dimension differs from sketch");
    Vector a(columns_);
    for (Index j = 0; j < point_dim(); ++j) a[j] = q.derived().coeff(j);
    a[point_dim()] = 1.0;
    return offer(a);
  }

  /// ||A~ u||^2, summed over stored rows.
  double squared_norm(const Eigen::Ref<const Vector>& u) const {
    detail::require(u.size() == columns_, Errc::DimensionMismatch, "vector length differs from sketch");
    double total = 0.0;
    for (const auto& r : rows_) {
      const double t = r.dot(u);
      total += t * t;
    }
    return total;
  }

 private:
  void refactor() {
    factor_.compute(gram_ + params_.lambda * Eigen::MatrixXd::Identity(columns_, columns_));
  }

  Index columns_;
  SketchParams params_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<Vector> rows_;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  std::size_t seen_ = 0;
};

/// Feed every point of Q through a fresh sketch.
inline Sketch sketch_points(const PointSet& Q, double eps, double delta, std::uint64_t seed,
                            std::optional<double> c_override = std::nullopt) {
  Sketch s(Q.dim(), eps, delta, seed, c_override);
  for (Index i = 0; i < Q.size(); ++i) s.offer_point(Q.point(i));
  return s;
}

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

namespace detail {

inline Vector coefficient_difference(Index columns, const Hyperplane& h1, const Hyperplane& h2) {
  require(h1.dim() == h2.dim() && h1.dim() + 1 == columns, Errc::DimensionMismatch,
          "hyperplane dimension differs from sketch");
  require(h1.oriented() == h2.oriented(), Errc::OrientationMismatch,
          "cannot compare an oriented hyperplane with an unoriented one");
  return h1.coeffs() - h2.coeffs();
}

inline Interval sandwich(double eps, double n, double norm_sq, double slack) {
  return {std::sqrt(std::max(0.0, norm_sq / n - slack / n)) / (1.0 + eps),
          std::sqrt(norm_sq / n + slack / n) / (1.0 - eps)};
}

}  // namespace detail

/// Interval for d_Q(h1, h2) from a sketch of an n-row stream, assuming both
/// hyperplanes pass within `Delta` of the origin, so ||u1 - u2||^2 <= 4(1 + Delta^2).
inline Interval sketch_bounds(const Sketch& s, std::size_t n, const Hyperplane& h1,
                              const Hyperplane& h2, double Delta) {
  const double eps = s.params().eps;
  detail::require(eps < 1.0, Errc::BadParameter, "bounds need eps < 1");
  detail::require(Delta >= 0.0, Errc::BadParameter, "Delta must be >= 0");
  detail::require(n >= 1, Errc::BadParameter, "stream length must be >= 1");
  const Vector u = detail::coefficient_difference(s.columns(), h1, h2);
  const double delta_prime = 4.0 * (1.0 + Delta * Delta);
  return detail::sandwich(eps, static_cast<double>(n), s.squared_norm(u),
                          delta_prime * s.params().delta);
}

/// Same interval with the exact ||u1 - u2||^2 in place of the Delta bound.
inline Interval sketch_bounds_exact(const Sketch& s, std::size_t n, const Hyperplane& h1,
                                    const Hyperplane& h2) {
  const double eps = s.params().eps;
  detail::require(eps < 1.0, Errc::BadParameter, "bounds need eps < 1");
  detail::require(n >= 1, Errc::BadParameter, "stream length must be >= 1");
  const Vector u = detail::coefficient_difference(s.columns(), h1, h2);
  return detail::sandwich(eps, static_cast<double>(n), s.squared_norm(u),
                          s.params().delta * u.squaredNorm());
}

/// Median over independent sketches of ||A~_k u||^2 (mean of the two middle
/// values for an even count).
inline double median_estimate(std::span<const Sketch> sketches, const Hyperplane& h1,
                              const Hyperplane& h2) {
  detail::require(!sketches.empty(), Errc::EmptyInput, "median needs at least one sketch");
  std::vector<double> values;
  values.reserve(sketches.size());
  for (const auto& s : sketches) {
    detail::require(s.columns() == sketches.front().columns(), Errc::DimensionMismatch,
                    "sketches differ in dimension");
    values.push_back(s.squared_norm(detail::coefficient_difference(s.columns(), h1, h2)));
  }
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

/// (d+1) ln(d+1) ln(eps ||A||_2^2 / delta) / eps^2: the accepted-row bound
/// without its constant factor.
inline double row_count_scale(Index columns, double eps, double delta, double spectral_norm_sq) {
  const double D = static_cast<double>(columns);
  return D * std::log(D) * std::log(eps * spectral_norm_sq / delta) / (eps * eps);
}

}  // namespace hyperdist
