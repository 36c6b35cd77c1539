// Coreset and streaming estimates against the exact distance.

#include <cstdio>
#include <vector>

#include "hyperdist/hyperdist.hpp"

using namespace hyperdist;

int main() {
  Rng rng(2024);
  const Index n = 5000, d = 3;
  PointMatrix P(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) P(i, j) = 2.0 * rng.uniform() - 1.0;
  const PointSet Q(P);

  const Hyperplane h1 = canonicalize({1, 2, -1, 0.3}), h2 = canonicalize({1, 1.5, -1, -0.2});
  const double exact = dist(Q, h1, h2);

  const std::size_t N = coreset_size(d + 1, 0.2, 0.1);
  const Coreset C = sensitivity_sample(Q, N, 7);
  std::printf("exact distance      %.6f\n", exact);
  std::printf("coreset (N = %zu)  %.6f\n", N, estimate_dist(Q, C, h1, h2));

  std::vector<Sketch> runs;
  for (std::uint64_t r = 0; r < 9; ++r) runs.push_back(sketch_points(Q, 0.25, 0.1, derive_seed(7, r)));
  const Interval iv = sketch_bounds(runs[0], static_cast<std::size_t>(n), h1, h2, 1.0);
  std::printf("sketch rows kept    %zu of %ld\n", runs[0].accepted_count(), static_cast<long>(n));
  std::printf("sketch interval     [%.6f, %.6f]\n", iv.lower, iv.upper);
  std::printf("median of 9 runs    %.6f\n", std::sqrt(median_estimate(runs, h1, h2) / static_cast<double>(n)));
}
