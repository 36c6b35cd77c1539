// Curve distances, simplification and the mean of two curves.

#include <cstdio>
#include <vector>

#include "hyperdist/hyperdist.hpp"

using namespace hyperdist;

namespace {

void print_curve(const char* label, const CurveK& c) {
  std::printf("%s:", label);
  for (const auto& v : c.vertices()) std::printf(" (%.3f, %.3f)", v.x(), v.y());
  std::printf("\n");
}

}  // namespace

int main() {
  PointMatrix P(9, 2);
  for (int i = 0; i < 9; ++i) P.row(i) << i % 3, i / 3;
  const PointSet Q(P);

  const CurveK a({{0, 0}, {2, 0}, {2, 2}});
  const CurveK b({{0, 0.3}, {1.8, 0.3}, {1.8, 2}});
  std::printf("d(a, b) = %.6f\n", dist_curves(Q, a, b));

  const std::vector<Point2> noisy{{0, 0}, {0.5, 0.05}, {1, -0.04}, {1.5, 0.02}, {2, 0}, {2.03, 1}, {2, 2}};
  print_curve("simplified", simplify_to_k(noisy, 2));

  const std::vector<CurveK> pair{a, b};
  print_curve("mean", mean_curve(pair, Q));
}
