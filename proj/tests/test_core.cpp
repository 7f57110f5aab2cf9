#include <cmath>

#include "doctest.h"
#include "rmirt/core.hpp"

using namespace rmirt;

TEST_CASE("grid geometry") {
  const GridGeom g(32, 20, 0.5);
  CHECK(g.size() == 640);
  CHECK(g.center_col() == 15.5);
  CHECK(g.center_row() == 9.5);
  CHECK_THROWS_AS(GridGeom(1, 4), DomainError);
  CHECK_THROWS_AS(GridGeom(4, 4, 0.0), DomainError);
}

TEST_CASE("image shape and box check") {
  const GridGeom g(3, 2);
  CHECK_THROWS_AS(Image(g, Vec(5, 0.0)), DimensionError);
  CHECK_THROWS_AS(Image(g, Vec{0, 0, 0, 0, 0, NAN}), DomainError);
  Image x(g, {0.0, 0.5, 1.0, 0.2, 0.3, 0.4});
  CHECK(x(1, 2) == 0.4);
  CHECK(x.in_unit_box());
  x(0, 0) = -0.1;
  CHECK_FALSE(x.in_unit_box());
}

TEST_CASE("mask stack blocks and validation") {
  const GridGeom g(2, 2);
  CHECK_THROWS_AS(MaskStack(g, 0), DimensionError);
  CHECK_THROWS_AS(MaskStack(g, 2, 1.5), DomainError);
  CHECK_THROWS_AS(MaskStack(g, 2, Vec(7, 0.0)), DimensionError);
  CHECK_THROWS_AS(MaskStack(g, 1, Vec{0, 0, 2, 0}), DomainError);

  MaskStack m(g, 2, Vec{0, 1, 0, 1, 0.5, 0.5, 0.5, 0.5});
  CHECK(m.block(1)[2] == 0.5);
  CHECK_FALSE(m.is_binary());
  CHECK_THROWS_AS(m.block(2), DimensionError);

  const MaskStack r = MaskStack::replicate(Image(g, {1, 0, 0, 1}), 3);
  CHECK(r.n_subscans() == 3);
  CHECK(r.is_binary());
  CHECK(r.block(2)[3] == 1.0);
}

TEST_CASE("motion parameters") {
  CHECK(param_count(MotionModel::scale2) == 2);
  CHECK(param_count(MotionModel::scale_rot_trans) == 5);
  CHECK(identity_params(MotionModel::scale_rot_trans) == Vec{1, 1, 0, 0, 0});
  CHECK(motion_model_from_string("scale2") == MotionModel::scale2);
  CHECK(to_string(MotionModel::scale_rot_trans) == "scale_rot_trans");
  CHECK_THROWS_AS(motion_model_from_string("rigid"), DomainError);

  MotionParams p(MotionModel::scale2, 3, {4.0, 5.0});
  CHECK(p.vec() == Vec(6, 1.0));
  CHECK(p.center() == GridPoint{4.0, 5.0});
  p.block(1)[1] = 1.2;
  CHECK(p.vec()[3] == 1.2);
  CHECK_NOTHROW(p.validate());
  p.block(2)[0] = -0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_THROWS_AS(MotionParams(MotionModel::scale2, 2, Vec(5, 1.0), {}), DimensionError);
}

TEST_CASE("uniform projection geometry splits subscans evenly") {
  const ProjGeom g = ProjGeom::uniform(180, M_PI, 64, 1.0, 5);
  CHECK(g.n_angles() == 180);
  CHECK(g.n_subscans() == 5);
  CHECK(g.subscan_bounds == std::vector<int>{0, 36, 72, 108, 144, 180});
  CHECK(g.subscan_angles(1).size() == 36);
  CHECK(g.subscan_angles(1)[0] == doctest::Approx(36 * M_PI / 180));
  CHECK(g.angles.back() < M_PI);
  CHECK_THROWS_AS(ProjGeom::uniform(4, M_PI, 8, 1.0, 5), DimensionError);
  CHECK_THROWS_AS(ProjGeom({0.0, 0.0}, 8, 1.0, {0, 2}), DomainError);
}

TEST_CASE("sinogram blocks follow subscan bounds") {
  const ProjGeom g({0.0, 0.1, 0.2}, 2, 1.0, {0, 1, 3});
  Sinogram s(g, {1, 2, 3, 4, 5, 6});
  CHECK(s.block(0).size() == 2);
  CHECK(s.block(1).size() == 4);
  CHECK(s.block(1)[0] == 3);
  CHECK_THROWS_AS(Sinogram(g, Vec(5, 0.0)), DimensionError);
}

TEST_CASE("penetrating product and complement") {
  const GridGeom g(2, 2);
  const Image x(g, {2.0, 3.0, 4.0, 0.0});
  const MaskStack a(g, 2, Vec{1.0, 0.0, 0.5, 1.0, 0.5, 0.25, 0.0, 0.0});
  CHECK(penetrating_product(a, x) == Vec{2.0, 0.0, 2.0, 0.0, 1.0, 0.75, 0.0, 0.0});
  CHECK(complement(a).vec() == Vec{0.0, 1.0, 0.5, 0.0, 0.5, 0.75, 1.0, 1.0});
  CHECK_THROWS_AS(penetrating_product(MaskStack(GridGeom(3, 3), 1), x), DimensionError);
}

TEST_CASE("vector helpers") {
  const Vec a{3.0, 4.0};
  CHECK(dot(a, Vec{1.0, 2.0}) == 11.0);
  CHECK(norm2(a) == 5.0);
  CHECK(all_finite(a));
  CHECK_FALSE(all_finite(Vec{1.0, INFINITY}));
  CHECK_THROWS_AS(dot(a, Vec{1.0}), DimensionError);
}

TEST_CASE("divergence error names block and iteration") {
  const DivergenceError e("p gradient", 7);
  CHECK(e.block() == "p gradient");
  CHECK(e.iteration() == 7);
  CHECK(std::string(e.what()).find("iteration 7") != std::string::npos);
}
