#include <gtest/gtest.h>

#include <cmath>

#include "hyperdist/hyperdist.hpp"
#include "support/oracles.hpp"

using namespace hyperdist;

TEST(Sketch, NewSketch) {
  const Sketch s(3, 0.5, 0.5, 7);
  EXPECT_EQ(s.params().lambda, 1.0);
  EXPECT_EQ(s.accepted_count(), 0u);
  EXPECT_EQ(s.seen_count(), 0u);
  EXPECT_EQ(s.columns(), 4);
  EXPECT_NEAR(s.params().c, 8.0 * std::log(4.0 / 0.25), 1e-12);
  EXPECT_EQ(Sketch(3, 0.5, 0.5, 7, 2.5).params().c, 2.5);
}

TEST(Sketch, RejectsBadParameters) {
  for (auto [eps, delta] : {std::pair{0.0, 0.1}, {1.0, 0.1}, {-0.1, 0.1}, {0.5, 0.0}, {0.5, -1.0}}) {
    try {
      Sketch(2, eps, delta, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::BadParameter);
    }
  }
  EXPECT_THROW(Sketch(0, 0.5, 0.5, 1), Error);
}

TEST(Sketch, FirstLargeRowAlwaysAccepted) {
  Sketch s(2, 0.5, 0.5, 3);
  const double lambda = s.params().lambda, c = s.params().c;
  Vector a{{1.0, 0.0, 0.0}};
  a *= std::sqrt(lambda / (c * 1.5)) * 1.01;
  EXPECT_NEAR(s.probability(a), 1.0, 0.0);
  const auto offer = s.offer(a);
  EXPECT_TRUE(offer.accepted);
  EXPECT_EQ(offer.probability, 1.0);
  EXPECT_EQ(s.accepted_count(), 1u);

  Sketch s2(2, 0.5, 0.5, 3);
  const Vector small{{0.01, 0.0, 0.0}};
  EXPECT_NEAR(s2.probability(small), c * 1.5 * 1e-4 / lambda, 1e-15);
}

TEST(Sketch, ZeroRowNeverAccepted) {
  Sketch s(2, 0.3, 0.1, 1);
  for (int i = 0; i < 100; ++i) {
    const auto offer = s.offer(Vector::Zero(3));
    EXPECT_EQ(offer.probability, 0.0);
    EXPECT_FALSE(offer.accepted);
  }
  EXPECT_EQ(s.seen_count(), 100u);
}

TEST(Sketch, DimensionMismatch) {
  Sketch s(2, 0.3, 0.1, 1);
  try {
    s.offer(Vector::Ones(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
  EXPECT_THROW(s.offer_point(Vector::Ones(3)), Error);
}

TEST(Sketch, ProbabilitiesInRangeAndGramConsistent) {
  oracle::Gen gen(60);
  Sketch s(4, 0.25, 0.1, 5);
  for (int i = 0; i < 3000; ++i) {
    const auto offer = s.offer_point(gen.normal_vector(4));
    EXPECT_GE(offer.probability, 0.0);
    EXPECT_LE(offer.probability, 1.0);
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(5, 5);
  for (const auto& r : s.rows()) G += r * r.transpose();
  EXPECT_LE((G - s.gram()).norm(), 1e-9 * G.norm());
  EXPECT_LE((s.matrix().transpose() * s.matrix() - G).norm(), 1e-9 * G.norm());
  EXPECT_EQ(s.seen_count(), 3000u);
}

TEST(Sketch, Deterministic) {
  oracle::Gen gen(61);
  const PointSet Q(gen.points(500, 3));
  const Sketch a = sketch_points(Q, 0.3, 0.1, 11), b = sketch_points(Q, 0.3, 0.1, 11);
  ASSERT_EQ(a.accepted_count(), b.accepted_count());
  for (std::size_t i = 0; i < a.rows().size(); ++i) EXPECT_EQ(a.rows()[i], b.rows()[i]);
}

TEST(Sketch, ProbabilityMonotoneUnderAddedRows) {
  oracle::Gen gen(62);
  for (int t = 0; t < 50; ++t) {
    Sketch s(2, 0.3, 0.2, static_cast<std::uint64_t>(t));
    const Vector probe = gen.normal_vector(3);
    double last = s.probability(probe);
    for (int i = 0; i < 200; ++i) {
      s.offer(gen.normal_vector(3));
      const double p = s.probability(probe);
      EXPECT_LE(p, last + 1e-12);
      last = p;
    }
  }
}

TEST(Sketch, FromRowsRebuildsState) {
  oracle::Gen gen(63);
  const Sketch a = sketch_points(PointSet(gen.points(400, 2)), 0.3, 0.1, 4);
  const Sketch b = Sketch::from_rows(2, a.params(), a.rows(), a.seen_count(), 4);
  EXPECT_EQ(b.accepted_count(), a.accepted_count());
  EXPECT_EQ(b.seen_count(), a.seen_count());
  EXPECT_LE((b.gram() - a.gram()).norm(), 1e-12 * a.gram().norm());
}

TEST(SketchBounds, IdenticalHyperplanes) {
  oracle::Gen gen(64);
  const Sketch s = sketch_points(PointSet(gen.points(300, 2)), 0.25, 0.1, 1);
  const Hyperplane h = gen.hyperplane(2);
  const double Delta = 2.0, n = 300.0;
  const Interval iv = sketch_bounds(s, 300, h, h, Delta);
  EXPECT_EQ(iv.lower, 0.0);
  EXPECT_NEAR(iv.upper, std::sqrt(4.0 * (1.0 + Delta * Delta) * 0.1 / n) / 0.75, 1e-15);
}

TEST(SketchBounds, VanishingDeltaCollapses) {
  oracle::Gen gen(65);
  const PointSet Q(gen.points(300, 2));
  const Sketch s = sketch_points(Q, 0.25, 1e-300, 2);
  const Hyperplane h1 = gen.hyperplane(2), h2 = gen.hyperplane(2);
  const Interval iv = sketch_bounds(s, 300, h1, h2, 1.0);
  const double base = std::sqrt(s.squared_norm(h1.coeffs() - h2.coeffs()) / 300.0);
  EXPECT_NEAR(iv.lower, base / 1.25, 1e-12);
  EXPECT_NEAR(iv.upper, base / 0.75, 1e-12);
}

TEST(SketchBounds, ContainsTruthMostOfTheTime) {
  oracle::Gen gen(66);
  const PointSet Q(gen.points(400, 2, 1.0));
  int hits = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Sketch s = sketch_points(Q, 0.25, 0.1, seed);
    for (int p = 0; p < 5; ++p) {
      const Hyperplane h1 = gen.hyperplane(2, 1.0), h2 = gen.hyperplane(2, 1.0);
      hits += sketch_bounds(s, 400, h1, h2, 1.0).contains(dist(Q, h1, h2));
      ++total;
    }
  }
  EXPECT_GE(hits, static_cast<int>((1.0 - 1.0 / 3.0) * total));
}

TEST(SketchBounds, RejectsMismatch) {
  const Sketch s(2, 0.25, 0.1, 1);
  EXPECT_THROW(sketch_bounds(s, 10, canonicalize({1, 0, 0}), canonicalize({1, 0, 0, 0}), 1.0), Error);
  EXPECT_THROW(sketch_bounds(s, 10, canonicalize({1, 0, 0}), canonicalize({1, 0, 0}), -1.0), Error);
}

TEST(MedianEstimate, Examples) {
  std::vector<Sketch> one;
  one.push_back(Sketch::from_rows(1, Sketch(1, 0.5, 0.5, 0).params(), {Vector{{1.0, 0.0}}}, 1, 0));
  const Hyperplane h1 = canonicalize({1, 0}), h2 = canonicalize({1, -1});
  // u = (0, 1): row (1, 0) contributes 0
  EXPECT_EQ(median_estimate(one, h1, h2), 0.0);

  const SketchParams params = Sketch(1, 0.5, 0.5, 0).params();
  auto with_value = [&](double v) { return Sketch::from_rows(1, params, {Vector{{0.0, std::sqrt(v)}}}, 1, 0); };
  std::vector<Sketch> three{with_value(1), with_value(100), with_value(5)};
  EXPECT_NEAR(median_estimate(three, h1, h2), 5.0, 1e-12);
  std::vector<Sketch> four{with_value(1), with_value(100), with_value(5), with_value(7)};
  EXPECT_NEAR(median_estimate(four, h1, h2), 6.0, 1e-12);

  std::vector<Sketch> none;
  try {
    median_estimate(none, h1, h2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(MedianEstimate, IdenticalSketchesGiveCommonValue) {
  oracle::Gen gen(67);
  const PointSet Q(gen.points(200, 2));
  std::vector<Sketch> runs(5, sketch_points(Q, 0.3, 0.1, 9));
  const Hyperplane h1 = gen.hyperplane(2), h2 = gen.hyperplane(2);
  EXPECT_EQ(median_estimate(runs, h1, h2), runs[0].squared_norm(h1.coeffs() - h2.coeffs()));
}

TEST(SpectralSandwich, HoldsOnSmallStreams) {
  oracle::Gen gen(68);
  int holds = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PointSet Q(gen.points(500, 3));
    const Sketch s = sketch_points(Q, 0.25, 0.1, seed);
    const Eigen::MatrixXd A = design_matrix(Q).rows;
    const Eigen::MatrixXd G = A.transpose() * A;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd lower = s.gram() - (0.75 * G - 0.1 * I);
    const Eigen::MatrixXd upper = (1.25 * G + 0.1 * I) - s.gram();
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lower).eigenvalues().minCoeff();
    const double hi = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(upper).eigenvalues().minCoeff();
    holds += lo >= 0.0 && hi >= 0.0;
  }
  EXPECT_GE(holds, 18);
}

TEST(RowCountScale, Formula) {
  EXPECT_NEAR(row_count_scale(6, 0.25, 0.1, 1000.0), 6.0 * std::log(6.0) * std::log(2500.0) / 0.0625, 1e-9);
}
