#pragma once

// Sensitivities of the squared-linear function family, computed as leverage
// scores, and the sensitivity-sampling coreset built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hyperdist/core.hpp"
#include "hyperdist/metrics.hpp"
#include "hyperdist/random.hpp"

namespace hyperdist {

/// A_Q: n x (d+1), row i = (q_i, 1).
struct DesignMatrix {
  Eigen::MatrixXd rows;
};

inline DesignMatrix design_matrix(const PointSet& Q) { return {detail::augmented(Q)}; }

/// tau_i = a_i^T (A^T A)^+ a_i for every row a_i of A.
///
/// Uses the thin SVD A = U S V^T: tau_i is the squared norm of row i of U
/// restricted to singular values above the rank threshold, so the scores lie
/// in [0, 1] and sum to rank(A) even for rank-deficient A.
inline Vector leverage_scores(const Eigen::MatrixXd& A) {
  Vector tau = Vector::Zero(A.rows());
  if (A.size() == 0) return tau;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return tau;
  const double cut = detail::rank_threshold(A.rows(), A.cols(), s[0]);
  const Eigen::MatrixXd& U = svd.matrixU();
  for (Index i = 0; i < A.rows(); ++i) {
    double t = 0.0;
    for (Index k = 0; k < s.size(); ++k)
      if (s[k] > cut) t += U(i, k) * U(i, k);
    tau[i] = t;
  }
  return tau;
}

inline Vector leverage_scores(const DesignMatrix& A) { return leverage_scores(A.rows); }

/// sigma(q_i) = tau_i / p_i, the leverage of row a_i sqrt(p_i) divided by the
/// point's mass. p is Q's weights normalised to a probability measure.
/// sum_i sigma_i p_i = d + 1.
inline Vector sensitivities(const PointSet& Q) {
  if (!is_full_rank(Q)) detail::fail(Errc::NotFullRank, "sensitivities need a full-rank point set");
  const Vector p = Q.probabilities();
  Eigen::MatrixXd A = detail::augmented(Q);
  for (Index i = 0; i < A.rows(); ++i) A.row(i) *= std::sqrt(p[i]);
  return leverage_scores(A).cwiseQuotient(p);
}

/// Sample size for relative error eps with failure probability delta.
/// `function_dim` is the dimension of the function family: d + 1 by default
/// for hyperplanes in R^d, d for the bound exactly as printed in the source.
inline std::size_t coreset_size(Index function_dim, double eps, double delta) {
  detail::require(eps > 0.0 && delta > 0.0, Errc::BadParameter, "eps and delta must be positive");
  return static_cast<std::size_t>(
      std::ceil(static_cast<double>(function_dim) / (delta * eps * eps) - 1e-9));
}

/// Weighted subsample: indices into Q and weights (d+1) / (N sigma).
struct Coreset {
  std::vector<Index> indices;
  Vector weights;

  std::size_t size() const noexcept { return indices.size(); }
};

namespace detail {

/// Inverse-CDF draws from an unnormalised discrete distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Vector& mass) : cumulative_(static_cast<std::size_t>(mass.size())) {
    double running = 0.0;
    for (Index i = 0; i < mass.size(); ++i) {
      running += mass[i];
      cumulative_[static_cast<std::size_t>(i)] = running;
    }
  }

  Index draw(Rng& rng) const {
    const double target = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    return static_cast<Index>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

/// N iid draws with Pr(q_i) = sigma_i p_i / (d+1) (sigma / (n(d+1)) for
/// uniform p); deterministic given seed.
inline Coreset sensitivity_sample(const PointSet& Q, const Vector& sigma, std::size_t N,
                                  std::uint64_t seed) {
  detail::require(N >= 1, Errc::BadParameter, "coreset size must be at least 1");
  detail::require(sigma.size() == Q.size(), Errc::DimensionMismatch,
                  "one sensitivity per point required");
  const double total = static_cast<double>(Q.dim() + 1);
  const Vector mass = sigma.cwiseProduct(Q.probabilities());
  const detail::DiscreteSampler sampler(mass);
  Rng rng(seed);

  Coreset c;
  c.indices.reserve(N);
  c.weights.resize(static_cast<Index>(N));
  for (std::size_t j = 0; j < N; ++j) {
    const Index i = sampler.draw(rng);
    c.indices.push_back(i);
    c.weights[static_cast<Index>(j)] = total / (static_cast<double>(N) * sigma[i]);
  }
  return c;
}

inline Coreset sensitivity_sample(const PointSet& Q, std::size_t N, std::uint64_t seed) {
  return sensitivity_sample(Q, sensitivities(Q), N, seed);
}

/// d_{Q~,W}(h1, h2) = (sum_j w_j (v_j(h1) - v_j(h2))^2)^{1/2} over the coreset.
///
/// With weights (d+1)/(N sigma) the squared value is an unbiased estimate of
/// sum_i p_i (v_i(h1) - v_i(h2))^2, which is d_Q^2 under uniform p.
inline double estimate_dist(const PointSet& Q, const Coreset& coreset, const Hyperplane& h1,
                            const Hyperplane& h2) {
  detail::check_pair(Q, h1, h2);
  const Vector u = h1.coeffs() - h2.coeffs();
  const Index d = Q.dim();
  double total = 0.0;
  for (std::size_t j = 0; j < coreset.size(); ++j) {
    const Index i = coreset.indices[j];
    detail::require(i >= 0 && i < Q.size(), Errc::DimensionMismatch, "coreset index out of range");
    double r = u[d];
    for (Index k = 0; k < d; ++k) r += u[k] * Q.points()(i, k);
    total += coreset.weights[static_cast<Index>(j)] * (r * r);
  }
  return std::sqrt(total);
}

}  // namespace hyperdist
