#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "hyperdist/hyperdist.hpp"
#include "support/oracles.hpp"

using namespace hyperdist;

namespace {

double euclid(const std::vector<Vector>& v, std::size_t i, std::size_t j) { return (v[i] - v[j]).norm(); }

/// `per` points around each of `centers`, spread `spread`.
std::vector<Vector> blobs(oracle::Gen& gen, const std::vector<Vector>& centers, int per, double spread) {
  std::vector<Vector> out;
  for (const auto& c : centers)
    for (int i = 0; i < per; ++i) out.push_back(c + spread * gen.normal_vector(c.size()));
  return out;
}

}  // namespace

TEST(KCenter, TrivialCases) {
  oracle::Gen gen(90);
  std::vector<Vector> v;
  for (int i = 0; i < 7; ++i) v.push_back(gen.normal_vector(3));
  auto D = [&](std::size_t i, std::size_t j) { return euclid(v, i, j); };
  const KCenterResult all = gonzalez_k_center(v.size(), D, v.size());
  EXPECT_EQ(all.radius(), 0.0);
  const KCenterResult one = gonzalez_k_center(v.size(), D, 1);
  double far = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) far = std::max(far, D(0, i));
  EXPECT_EQ(one.radius(), far);
  EXPECT_EQ(one.centers, std::vector<std::size_t>{0});
  EXPECT_THROW(gonzalez_k_center(v.size(), D, 0), Error);
  try {
    gonzalez_k_center(v.size(), D, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadK);
  }
}

TEST(KCenter, ElbowOnSeparatedClusters) {
  oracle::Gen gen(91);
  const std::vector<Vector> v =
      blobs(gen, {Vector{{0.0, 0.0}}, Vector{{10.0, 0.0}}, Vector{{0.0, 10.0}}}, 15, 0.1);
  const KCenterResult r =
      gonzalez_k_center(v.size(), [&](std::size_t i, std::size_t j) { return euclid(v, i, j); }, 3);
  ASSERT_EQ(r.radii.size(), 3u);
  EXPECT_GE(r.radii[1], 5.0 * r.radii[2]);
}

TEST(KCenter, TwoApproximationAndMonotoneRadii) {
  oracle::Gen gen(92);
  for (int t = 0; t < 200; ++t) {
    const auto count = static_cast<std::size_t>(gen.integer(1, 8));
    std::vector<Vector> v;
    for (std::size_t i = 0; i < count; ++i) v.push_back(gen.normal_vector(2));
    auto D = [&](std::size_t i, std::size_t j) { return euclid(v, i, j); };
    const auto k = static_cast<std::size_t>(gen.integer(1, static_cast<long>(count)));
    const KCenterResult r = gonzalez_k_center(count, D, k);
    for (std::size_t i = 1; i < r.radii.size(); ++i) EXPECT_LE(r.radii[i], r.radii[i - 1]);
    EXPECT_LE(r.radius(), 2.0 * oracle::exhaustive_k_center(count, D, k) + 1e-12);
    // every item is assigned to its nearest chosen center
    for (std::size_t i = 0; i < count; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (auto c : r.centers) nearest = std::min(nearest, D(i, c));
      EXPECT_EQ(D(i, r.centers[r.assignment[i]]), nearest);
    }
  }
}

TEST(KCenter, OverHyperplanes) {
  oracle::Gen gen(93);
  const PointSet Q = gen.full_rank_points(20, 2);
  std::vector<Hyperplane> H;
  for (int i = 0; i < 8; ++i) H.push_back(gen.hyperplane(2));
  const KCenterResult r = gonzalez_k_center(Q, H, 3);
  auto D = [&](std::size_t i, std::size_t j) { return dist(Q, H[i], H[j]); };
  EXPECT_LE(r.radius(), 2.0 * oracle::exhaustive_k_center(H.size(), D, 3) + 1e-12);
}

TEST(KMeans, SingleClusterIsMean) {
  oracle::Gen gen(94);
  std::vector<Vector> v;
  for (int i = 0; i < 20; ++i) v.push_back(gen.normal_vector(4));
  const KMeansResult r = lloyds_k_means(v, 1, 3);
  Vector mean = Vector::Zero(4);
  for (const auto& x : v) mean += x;
  mean /= 20.0;
  EXPECT_LE((r.centers.row(0).transpose() - mean).norm(), 1e-12);
}

TEST(KMeans, SeparatesClustersAndWcssNonincreasing) {
  oracle::Gen gen(95);
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::vector<Vector> v = blobs(gen, {Vector::Zero(5), Vector::Constant(5, 20.0)}, 10, 0.5);
    const KMeansResult r = lloyds_k_means(v, 2, seed);
    for (std::size_t i = 1; i < r.wcss_history.size(); ++i) EXPECT_LE(r.wcss_history[i], r.wcss_history[i - 1] + 1e-9);
    bool ok = true;
    for (int i = 0; i < 20; ++i) ok &= r.assignment[static_cast<std::size_t>(i)] == r.assignment[i < 10 ? 0u : 10u];
    ok &= r.assignment[0] != r.assignment[10];
    exact += ok;
  }
  EXPECT_GE(exact, 99);
}

TEST(KMeans, DeterministicAndBadK) {
  oracle::Gen gen(96);
  std::vector<Vector> v;
  for (int i = 0; i < 30; ++i) v.push_back(gen.normal_vector(3));
  const KMeansResult a = lloyds_k_means(v, 4, 8), b = lloyds_k_means(v, 4, 8);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_THROW(lloyds_k_means(v, 31, 1), Error);
  EXPECT_THROW(lloyds_k_means(v, 0, 1), Error);
}

TEST(Kde, Examples) {
  oracle::Gen gen(97);
  const PointSet Q(gen.points(10, 2));
  const Hyperplane h = gen.hyperplane(2);
  const std::vector<Hyperplane> H{h};
  EXPECT_EQ(kde(Q, H, h), 1.0);
  Vector far = h.coeffs();
  far[2] += 6.0;
  EXPECT_LE(kde(Q, H, canonicalize(far)), std::exp(-36.0) * (1 + 1e-12));
  const std::vector<Hyperplane> none;
  EXPECT_THROW(kde(Q, none, h), Error);
}

TEST(Kde, SubsampleWithinEps) {
  oracle::Gen gen(98);
  const PointSet Q(gen.points(30, 2));
  std::vector<Hyperplane> H;
  for (int i = 0; i < 3000; ++i) H.push_back(gen.hyperplane(2, 1.0));
  const double eps = 0.1, delta = 0.1;
  const std::size_t J = kde_sample_size(2, eps, delta);
  EXPECT_EQ(J, static_cast<std::size_t>(std::ceil((4.0 + std::log(10.0)) / 0.01)));
  int within = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    std::vector<Hyperplane> sub;
    for (std::size_t j = 0; j < J; ++j) sub.push_back(H[rng.uniform_index(H.size())]);
    const Hyperplane q = gen.hyperplane(2, 1.0);
    within += std::abs(kde(Q, H, q) - kde(Q, sub, q)) <= eps;
  }
  EXPECT_GE(within, static_cast<int>((1.0 - delta) * seeds));
}

TEST(CoresetQuality, Examples) {
  oracle::Gen gen(99);
  const PointSet Q(gen.points(10, 2));
  const Hyperplane h = gen.hyperplane(2);
  EXPECT_EQ(coreset_quality(Q, h, h), 0.0);
  Vector u = h.coeffs();
  u[2] += 0.3;
  EXPECT_NEAR(coreset_quality(Q, h, canonicalize(u)), 0.3, 1e-12);
}

TEST(Siegel, ExactLine) {
  std::vector<Point2> P;
  for (int i = -3; i <= 3; ++i) P.emplace_back(i, 2.0 * i + 1.0);
  const SiegelFit fit = siegel_estimator(P);
  EXPECT_EQ(fit.slope, 2.0);
  EXPECT_EQ(fit.intercept, 1.0);
  EXPECT_LE((fit.line.coeffs() - canonicalize({2, -1, 1}).coeffs()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Siegel, ResistsTwoOutliersOfSeven) {
  std::vector<Point2> P;
  for (int i = 0; i < 5; ++i) P.emplace_back(i, 2.0 * i + 1.0);
  P.emplace_back(1.5, 40.0);
  P.emplace_back(2.5, -30.0);
  const SiegelFit fit = siegel_estimator(P);
  const auto [a, b] = oracle::repeated_median(P);
  EXPECT_EQ(fit.slope, a);
  EXPECT_EQ(fit.intercept, b);
  EXPECT_EQ(fit.slope, 2.0);
  EXPECT_EQ(fit.intercept, 1.0);
}

TEST(Siegel, TwoPointsInterpolate) {
  const std::vector<Point2> P{Point2(1, 2), Point2(3, 8)};
  const SiegelFit fit = siegel_estimator(P);
  EXPECT_DOUBLE_EQ(fit.slope, 3.0);
  EXPECT_DOUBLE_EQ(fit.intercept, -1.0);
}

TEST(Siegel, MatchesDefinitionAndIsShiftEquivariant) {
  oracle::Gen gen(100);
  for (int t = 0; t < 300; ++t) {
    std::vector<Point2> P;
    const long n = gen.integer(2, 15);
    for (long i = 0; i < n; ++i) P.emplace_back(std::round(gen.uniform(-5, 5)), std::round(gen.uniform(-5, 5)));
    bool distinct_x = false;
    for (const auto& p : P) distinct_x |= p.x() != P[0].x();
    if (!distinct_x) {
      EXPECT_THROW(siegel_estimator(P), Error);
      continue;
    }
    const SiegelFit fit = siegel_estimator(P);
    const auto [a, b] = oracle::repeated_median(P);
    EXPECT_EQ(fit.slope, a);
    EXPECT_EQ(fit.intercept, b);
    auto shifted = P;
    for (auto& p : shifted) p.y() += 3.0;
    const SiegelFit moved = siegel_estimator(shifted);
    EXPECT_EQ(moved.slope, fit.slope);
    EXPECT_NEAR(moved.intercept, fit.intercept + 3.0, 1e-12);
  }
}

TEST(Siegel, BreakdownBounded) {
  oracle::Gen gen(101);
  for (int t = 0; t < 200; ++t) {
    const int n = static_cast<int>(gen.integer(5, 15));
    const double a = gen.uniform(-3, 3), b = gen.uniform(-3, 3);
    std::vector<Point2> P;
    for (int i = 0; i < n; ++i) P.emplace_back(i + gen.uniform(0, 0.5), 0.0);
    for (auto& p : P) p.y() = a * p.x() + b;
    const int bad = (n - 2) / 2;  // clean points keep a strict majority of every inner median
    for (int i = 0; i < bad; ++i) P[static_cast<std::size_t>(gen.integer(0, n - 1))].y() = gen.uniform(-1e6, 1e6);
    EXPECT_NEAR(siegel_estimator(P).slope, a, 1e-6 * (1 + std::abs(a)) + 1e-9);
  }
}

TEST(Siegel, Errors) {
  const std::vector<Point2> vertical{Point2(1, 0), Point2(1, 5), Point2(1, 2)};
  try {
    siegel_estimator(vertical);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateX);
  }
  const std::vector<Point2> one{Point2(0, 0)};
  EXPECT_THROW(siegel_estimator(one), Error);
}

TEST(Uncertain, SingletonsGiveCopies) {
  std::vector<std::vector<Point2>> locs{{Point2(0, 1)}, {Point2(1, 3)}, {Point2(2, 5.5)}};
  const UncertainPointSet P(locs);
  const EstimatorSample T = uncertain_siegel_distribution(P, 25, 4);
  ASSERT_EQ(T.lines.size(), 25u);
  const std::vector<Point2> pts{Point2(0, 1), Point2(1, 3), Point2(2, 5.5)};
  const Hyperplane expect = siegel_estimator(pts).line;
  for (const auto& h : T.lines) EXPECT_EQ(h.coeffs(), expect.coeffs());
}

TEST(Uncertain, DeterministicPerSeed) {
  oracle::Gen gen(102);
  std::vector<std::vector<Point2>> locs(6);
  for (auto& l : locs)
    for (int j = 0; j < 3; ++j) l.emplace_back(gen.uniform(-2, 2), gen.uniform(-2, 2));
  const UncertainPointSet P(locs);
  const auto a = uncertain_siegel_distribution(P, 200, 5), b = uncertain_siegel_distribution(P, 200, 5);
  for (std::size_t i = 0; i < a.lines.size(); ++i) EXPECT_EQ(a.lines[i].coeffs(), b.lines[i].coeffs());
}

TEST(Uncertain, ResamplesDegenerateTraversals) {
  // Each point may sit on x = 0; a traversal with every point there is
  // degenerate and must be redrawn.
  std::vector<std::vector<Point2>> locs{{Point2(0, 0), Point2(1, 1)}, {Point2(0, 1), Point2(2, 2)}};
  const auto T = uncertain_siegel_distribution(UncertainPointSet(locs), 500, 1);
  EXPECT_EQ(T.lines.size(), 500u);
  const std::vector<std::vector<Point2>> hopeless{{Point2(0, 0)}, {Point2(0, 1)}};
  try {
    uncertain_siegel_distribution(UncertainPointSet(hopeless), 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateX);
  }
  EXPECT_THROW(UncertainPointSet({{Point2(0, 0)}, {}}), Error);
}

TEST(Uncertain, MatchesExhaustiveTraversals) {
  oracle::Gen gen(103);
  std::vector<std::vector<Point2>> locs(4);
  for (auto& l : locs)
    for (int j = 0; j < 2; ++j) l.emplace_back(gen.uniform(-2, 2), gen.uniform(-2, 2));
  const UncertainPointSet P(locs);
  const PointSet Q = P.all_locations();
  const std::size_t N = 4000;
  const EstimatorSample T = uncertain_siegel_distribution(P, N, 17);

  std::vector<std::pair<Hyperplane, double>> exact;
  oracle::for_each_traversal(locs, [&](const std::vector<Point2>& pick, double prob) {
    exact.emplace_back(siegel_estimator(pick).line, prob);
  });
  ASSERT_EQ(exact.size(), 16u);

  int good = 0;
  for (int t = 0; t < 20; ++t) {
    const Hyperplane z = exact[static_cast<std::size_t>(gen.integer(0, 15))].first;
    const double r = gen.uniform(0.0, 1.5);
    double truth = 0.0;
    for (const auto& [h, p] : exact)
      if (dist(Q, z, h) <= r) truth += p;
    good += std::abs(empirical_ball_probability(T, Q, z, r) - truth) <= 2.0 / std::sqrt(static_cast<double>(N));
  }
  EXPECT_GE(good, 19);
}

TEST(Uncertain, BallProbabilityEdges) {
  std::vector<std::vector<Point2>> locs{{Point2(0, 0), Point2(0, 1)}, {Point2(1, 0), Point2(1, 2)}};
  const UncertainPointSet P(locs);
  const EstimatorSample T = uncertain_siegel_distribution(P, 100, 2);
  const PointSet Q = P.all_locations();
  const Hyperplane z = canonicalize({1, 0, -100});
  EXPECT_EQ(empirical_ball_probability(T, Q, z, 0.0), 0.0);
  EXPECT_EQ(empirical_ball_probability(T, Q, z, std::numeric_limits<double>::infinity()), 1.0);
}

TEST(Uncertain, SampleSize) {
  EXPECT_EQ(siegel_sample_size(0.1, 0.1), static_cast<std::size_t>(std::ceil(400.0 * std::log(20.0))));
  EXPECT_THROW(siegel_sample_size(0.0, 0.1), Error);
}
