#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include "crossdict/sensing.hpp"

using namespace crossdict;
using testing::random_vector;

namespace {

void check_adjoint(const LinearOperator& op, std::mt19937_64& rng) {
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd x = random_vector(static_cast<Eigen::Index>(op.input_dim()), rng);
    const Eigen::VectorXd y = random_vector(static_cast<Eigen::Index>(op.output_dim()), rng);
    const double lhs = op.apply(x).dot(y);
    const double rhs = x.dot(op.adjoint(y));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
  const Eigen::MatrixXd a = to_dense(op);
  const Eigen::VectorXd x = random_vector(static_cast<Eigen::Index>(op.input_dim()), rng);
  CHECK((a * x - op.apply(x)).norm() < 1e-12 * std::max(1.0, x.norm()));
}

}  // namespace

TEST_CASE("adjoint consistency on every operator kind") {
  std::mt19937_64 rng(1);
  check_adjoint(*make_identity(7), rng);
  check_adjoint(*make_mask(10, {1, 4, 5, 10}), rng);
  check_adjoint(*make_channel_mosaic(16, 3, bayer_rggb_assignment(4, 4)), rng);
  check_adjoint(*make_channel_mosaic(16, 8, random_channel_assignment(16, 8, rng)), rng);
  check_adjoint(*make_temporal_code(9, 8, random_temporal_code(9, 8, rng)), rng);
  std::vector<std::uint8_t> dense_code(9 * 4);
  for (std::size_t i = 0; i < dense_code.size(); ++i) dense_code[i] = (i % 3 != 1) ? 1 : 0;
  check_adjoint(*make_temporal_code(9, 4, dense_code), rng);
  check_adjoint(*make_angular_sample(3, 3, {1, 3, 5, 7, 9}, 4), rng);
  check_adjoint(*make_dense(testing::random_matrix(5, 8, rng)), rng);
}

TEST_CASE("operator kinds and names") {
  CHECK(make_identity(2)->kind() == OperatorKind::identity);
  CHECK(std::string(to_string(OperatorKind::temporal_code)) == "temporal-code");
}

TEST_CASE("mask picks the listed cells") {
  const auto op = make_mask(5, {2, 5});
  Eigen::VectorXd x(5);
  x << 10, 20, 30, 40, 50;
  const Eigen::VectorXd y = op->apply(x);
  REQUIRE(y.size() == 2);
  CHECK(y(0) == 20);
  CHECK(y(1) == 50);
  CHECK_THROWS_AS(make_mask(5, {}), ConfigError);
  CHECK_THROWS_AS(make_mask(5, {2, 2}), ConfigError);
  CHECK_THROWS_AS(make_mask(5, {6}), ConfigError);
  CHECK_THROWS_AS(make_mask(5, {0}), ConfigError);
  CHECK_THROWS_AS(op->apply(Eigen::VectorXd::Zero(4)), DimensionError);
  CHECK_THROWS_AS(op->adjoint(Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("bayer layout") {
  const auto a = bayer_rggb_assignment(2, 4);
  CHECK(a == std::vector<std::uint32_t>{1, 2, 1, 2, 2, 3, 2, 3});
}

TEST_CASE("channel mosaic reads one channel per pixel") {
  const auto op = make_channel_mosaic(2, 3, {3, 1});
  Eigen::VectorXd x(6);
  x << 1, 2, 3, 4, 5, 6;
  const Eigen::VectorXd y = op->apply(x);
  CHECK(y(0) == 3);
  CHECK(y(1) == 4);
  CHECK_THROWS_AS(make_channel_mosaic(2, 3, {4, 1}), ConfigError);
  CHECK_THROWS_AS(make_channel_mosaic(2, 3, {1}), DimensionError);
}

TEST_CASE("temporal code sums active frames") {
  const auto op = make_temporal_code(2, 3, {1, 0, 1, 0, 1, 0});
  Eigen::VectorXd x(6);
  x << 1, 2, 3, 4, 5, 6;
  const Eigen::VectorXd y = op->apply(x);
  CHECK(y(0) == 4);
  CHECK(y(1) == 5);
  CHECK_THROWS_AS(make_temporal_code(2, 3, {1, 0, 1, 0, 0, 0}), ConfigError);
  CHECK_THROWS_AS(make_temporal_code(2, 3, {1, 0, 2, 0, 1, 0}), ConfigError);
  std::mt19937_64 rng(3);
  const auto code = random_temporal_code(50, 8, rng);
  for (std::size_t p = 0; p < 50; ++p) {
    int active = 0;
    for (std::size_t f = 0; f < 8; ++f) active += code[p * 8 + f];
    CHECK(active == 1);
  }
}

TEST_CASE("angular sampling keeps views in the given order") {
  const auto op = make_angular_sample(2, 2, {4, 1}, 2);
  Eigen::VectorXd x(8);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  const Eigen::VectorXd y = op->apply(x);
  REQUIRE(y.size() == 4);
  CHECK(y(0) == 4);
  CHECK(y(1) == 1);
  CHECK(y(2) == 8);
  CHECK(y(3) == 5);
  CHECK_THROWS_AS(make_angular_sample(2, 2, {5}, 2), ConfigError);
  CHECK_THROWS_AS(make_angular_sample(2, 2, {1, 1}, 2), ConfigError);
}

TEST_CASE("random mask keeps round(n / (1 + u)) cells") {
  std::mt19937_64 rng(4);
  for (double u : {1.0, 3.0, 7.0, 15.0}) {
    const auto m = random_mask(256, u, rng);
    std::size_t known = 0;
    for (auto b : m) known += b;
    CHECK(known == static_cast<std::size_t>(std::lround(256.0 / (1.0 + u))));
  }
  const auto tiny = random_mask(4, 1e9, rng);
  CHECK(std::count(tiny.begin(), tiny.end(), 1) == 1);
}
