#include "doctest.h"
#include "rmirt/metrics.hpp"

using namespace rmirt;

TEST_CASE("mse") {
  const GridGeom g(2, 2);
  const Image a(g, {0.1, 0.2, 0.3, 0.4});
  CHECK(mse(a, a) == 0.0);
  const Image shifted(g, {0.35, 0.45, 0.55, 0.65});
  CHECK(mse(shifted, a) == doctest::Approx(0.0625));
  // hand sum: (0.5^2 + 0.1^2 + 0 + 0.2^2) / 4
  const Image b(g, {0.6, 0.1, 0.3, 0.6});
  CHECK(mse(b, a) == doctest::Approx(0.075));
  CHECK(mse(b, a) == mse(a, b));
  CHECK_THROWS_AS(mse(a, Image(GridGeom(4, 2))), DimensionError);
}

TEST_CASE("mse scales quadratically along a direction") {
  const GridGeom g(2, 2);
  const Image t(g, {0.2, 0.5, 0.1, 0.3});
  const Vec d{0.1, -0.2, 0.05, 0.0};
  auto at = [&](double s) {
    Vec v = t.vec();
    for (int k = 0; k < 4; ++k) v[k] += s * d[k];
    return mse(Image(g, v), t);
  };
  CHECK(at(3.0) == doctest::Approx(9.0 * at(1.0)));
}

TEST_CASE("dice") {
  const GridGeom g(2, 2);
  const MaskStack a(g, 1, Vec{1, 1, 0, 0});
  CHECK(dice(a, a)[0] == 1.0);
  CHECK(dice(a, MaskStack(g, 1, Vec{0, 0, 1, 1}))[0] == 0.0);
  CHECK(dice(a, MaskStack(g, 1, Vec{0, 1, 1, 0}))[0] == doctest::Approx(0.5));
  CHECK(dice(MaskStack(g, 1), MaskStack(g, 1))[0] == 1.0);
  CHECK_THROWS_AS(dice(MaskStack(g, 1, 0.5), a), DomainError);
  CHECK_THROWS_AS(dice(a, MaskStack(g, 2)), DimensionError);

  const MaskStack two(g, 2, Vec{1, 1, 0, 0, 1, 0, 0, 0});
  const MaskStack ref(g, 2, Vec{1, 1, 0, 0, 1, 1, 0, 0});
  const auto d = dice(two, ref);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == doctest::Approx(2.0 / 3.0));
  CHECK(mean_dice(two, ref) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
  // swapping subscan order in both stacks permutes the scores
  const MaskStack two_sw(g, 2, Vec{1, 0, 0, 0, 1, 1, 0, 0});
  const MaskStack ref_sw(g, 2, Vec{1, 1, 0, 0, 1, 1, 0, 0});
  CHECK(dice(two_sw, ref_sw)[0] == d[1]);
  CHECK(dice(ref, two) == d);
}

TEST_CASE("param error") {
  const MotionParams a(MotionModel::scale2, 2, {1.0, 0.99, 1.2, 1.1}, {});
  const MotionParams b(MotionModel::scale2, 2, {0.99, 0.99, 1.25, 1.0}, {});
  const Vec e = param_error(a, b);
  CHECK(e[0] == doctest::Approx(0.01));
  CHECK(e[1] == 0.0);
  CHECK(e[2] == doctest::Approx(0.05));
  CHECK(e[3] == doctest::Approx(0.1));
  CHECK(param_error(a, a) == Vec(4, 0.0));
  CHECK_THROWS_AS(param_error(a, MotionParams(MotionModel::scale2, 3, {})), DimensionError);
  CHECK_THROWS_AS(param_error(a, MotionParams(MotionModel::scale_rot_trans, 2, {})),
                  DimensionError);
}
