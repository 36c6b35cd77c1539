// Distances between lines over a small point set.

#include <cstdio>

#include "hyperdist/hyperdist.hpp"

using namespace hyperdist;

int main() {
  PointMatrix P(4, 2);
  P << 0, 0, 1, 0, 0, 1, 1, 1;
  const PointSet Q(P);

  const Hyperplane x0 = canonicalize({1, 0, 0});      // x = 0
  const Hyperplane y0 = canonicalize({0, 1, 0});      // y = 0
  const Hyperplane x_half = canonicalize({2, 0, -1});  // x = 1/2

  std::printf("status: %s\n", metric_status(Q) == MetricStatus::Metric ? "metric" : "pseudometric");
  std::printf("d(x=0, y=0)    = %.6f\n", dist(Q, x0, y0));
  std::printf("d(x=0, x=1/2)  = %.6f (parallel lines: offset gap)\n", dist(Q, x0, x_half));
  std::printf("unsigned       = %.6f\n", dist_unsigned(Q, x0, y0));
  std::printf("frobenius      = %.6f\n", dist_frobenius(Q, x0, y0));

  const LiftedBall ball = lift_ball(Q, x0, 0.6);
  std::printf("ball r=0.6 around x=0 holds x=1/2: %s, y=0: %s\n", lift_membership(ball, x_half) ? "yes" : "no",
              lift_membership(ball, y0) ? "yes" : "no");
}
