#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include "crossdict/patchwork.hpp"

using namespace crossdict;

namespace {

Tensor ramp(Shape shape) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::sin(0.37 * static_cast<double>(i)) + 2.0;
  return t;
}

}  // namespace

TEST_CASE("patch counts") {
  CHECK(patch_count({256, 256}, {8, 8}, {1, 1}) == 249 * 249);
  CHECK(patch_count({256, 256}, {8, 8}, {8, 8}) == 32 * 32);
  CHECK(patch_count({10, 10, 4}, {4, 4, 4}, {3, 2, 1}) == 3 * 4 * 1);
  CHECK_THROWS_AS(patch_count({4, 4}, {5, 4}, {1, 1}), DimensionError);
  CHECK_THROWS_AS(patch_count({4, 4}, {2, 2}, {0, 1}), DimensionError);
  CHECK_THROWS_AS(patch_count({4, 4}, {2, 2, 1}, {1, 1, 1}), DimensionError);
}

TEST_CASE("patch vectors use row-major cell order") {
  const Tensor t = ramp({6, 5, 3});
  const PatchSet ps = extract_patches(t, {2, 2, 3}, {2, 2, 3}, false);
  const Shape& origin = ps.grid.origins[4];
  const auto offs = patch_offsets(t.shape(), {2, 2, 3}, origin);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const std::size_t k = (r * 2 + c) * 3 + ch;
        CHECK(ps.columns(static_cast<Eigen::Index>(k), 4) == t.at({origin[0] + r, origin[1] + c, ch}));
        CHECK(offs[k] == t.offset(std::vector<std::size_t>{origin[0] + r, origin[1] + c, ch}));
      }
    }
  }
}

TEST_CASE("extract then aggregate reproduces the signal") {
  for (const auto& [shape, patch, stride] : std::vector<std::tuple<Shape, Shape, Shape>>{
           {{16, 16}, {8, 8}, {1, 1}},
           {{16, 16}, {8, 8}, {8, 8}},
           {{12, 12, 8}, {4, 4, 8}, {2, 2, 1}},
           {{8, 8, 3, 3}, {4, 4, 3, 3}, {4, 2, 1, 1}}}) {
    const Tensor t = ramp(shape);
    for (bool dc : {false, true}) {
      const PatchSet ps = extract_patches(t, patch, stride, dc);
      if (dc) {
        REQUIRE(ps.grid.dc_values.has_value());
        CHECK(std::abs(ps.columns.col(0).mean()) < 1e-12);
      }
      const Aggregate a = aggregate_patches(ps.columns, ps.grid, dc);
      CHECK(a.uncovered_cells == 0);
      CHECK((a.signal.vec() - t.vec()).norm() < 1e-12 * t.vec().norm());
    }
  }
}

TEST_CASE("uncovered cells are reported and left at zero") {
  const Tensor t = ramp({10, 10});
  const PatchSet ps = extract_patches(t, {4, 4}, {4, 4}, false);
  const Aggregate a = aggregate_patches(ps.columns, ps.grid, false);
  CHECK(a.uncovered_cells == 100 - 64);
  CHECK(a.signal.at({9, 9}) == 0.0);
  CHECK(a.signal.at({7, 7}) == t.at({7, 7}));
  CHECK_THROWS_AS(aggregate_patches(ps.columns.leftCols(2), ps.grid, false), DimensionError);
}

TEST_CASE("overlapping patches are averaged uniformly") {
  const Tensor t({3, 3});
  const PatchGrid g = make_patch_grid(t.shape(), {2, 2}, {1, 1});
  Eigen::MatrixXd cols(4, 4);
  for (Eigen::Index p = 0; p < 4; ++p) cols.col(p).setConstant(static_cast<double>(p));
  const Aggregate a = aggregate_patches(cols, g, false);
  CHECK(a.signal.at({1, 1}) == doctest::Approx(1.5));
  CHECK(a.signal.at({0, 0}) == 0.0);
  CHECK(a.signal.at({0, 1}) == doctest::Approx(0.5));
}
