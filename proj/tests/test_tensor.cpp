#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "crossdict/io.hpp"
#include "crossdict/tensor.hpp"

using namespace crossdict;

TEST_CASE("tensor shape validation") {
  CHECK_THROWS_AS(Tensor(Shape{}), DimensionError);
  CHECK_THROWS_AS(Tensor(Shape{2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor(Shape{1, 1, 1, 1, 1}), DimensionError);
  CHECK_THROWS_AS(Tensor(Shape{2, 2}, std::vector<double>(3)), DimensionError);
  Tensor t({2, 3, 4});
  CHECK(t.size() == 24);
  CHECK(t.rank() == 3);
}

TEST_CASE("row-major offsets") {
  Tensor t({2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  CHECK(t.at({1, 2, 3}) == 23.0);
  CHECK(t.at({0, 1, 0}) == 4.0);
  CHECK_THROWS_AS(t.at({2, 0, 0}), DimensionError);
  CHECK(t.reshaped({6, 4}).at({5, 3}) == 23.0);
}

TEST_CASE("dictionary requires unit-norm atoms") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 3, 0, 4;
  CHECK_THROWS_AS(Dictionary{m}, DegenerateError);
  const Dictionary d = normalize_atoms(m);
  CHECK(d.atom(2)(0) == doctest::Approx(0.6));
  CHECK_THROWS_AS(d.atom(0), DomainError);
  CHECK_THROWS_AS(d.atom(3), DomainError);
  m.col(1).setZero();
  CHECK_THROWS_WITH_AS(normalize_atoms(m), doctest::Contains("2"), DegenerateError);
}

TEST_CASE("sparse code invariants") {
  CHECK_THROWS_AS(SparseCode(4, {{2, 1.0}, {2, 1.0}}), DomainError);
  CHECK_THROWS_AS(SparseCode(4, {{3, 1.0}, {1, 1.0}}), DomainError);
  CHECK_THROWS_AS(SparseCode(4, {{0, 1.0}}), DomainError);
  CHECK_THROWS_AS(SparseCode(4, {{5, 1.0}}), DomainError);
  const SparseCode c(4, {{1, 2.0}, {4, -1.0}});
  CHECK(c.support() == Support{1, 4});
  const Eigen::VectorXd d = c.dense();
  CHECK(d(0) == 2.0);
  CHECK(d(3) == -1.0);
  CHECK(SparseCode::from_dense(d) == c);
}

TEST_CASE("reconstruct equals dense product") {
  std::mt19937_64 rng(3);
  const Dictionary d = normalize_atoms(testing::random_matrix(5, 9, rng));
  const SparseCode c(9, {{2, 0.5}, {7, -1.5}});
  const Tensor x = reconstruct(d, c);
  const Eigen::VectorXd ref = d.atoms() * c.dense();
  CHECK((x.vec() - ref).norm() < 1e-14);
}

TEST_CASE("snr definition") {
  Tensor x({4}, {1, 0, 0, 0});
  Tensor e({4}, {1, 0.1, 0, 0});
  CHECK(snr(x, e) == doctest::Approx(20.0));
  CHECK(snr(x, x) == kSnrCapDb);
  CHECK_THROWS_AS(snr(Tensor({4}), x), DomainError);
  CHECK_THROWS_AS(snr(x, Tensor({5})), DimensionError);
}

TEST_CASE("tensor stream round trip is bit exact") {
  std::mt19937_64 rng(5);
  Tensor t({3, 4, 2});
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g(rng);
  std::stringstream ss;
  write_tensor(ss, t);
  CHECK(read_tensor(ss) == t);

  std::string bytes = ss.str();
  bytes[0] = 'X';
  std::stringstream bad(bytes);
  CHECK_THROWS_AS(read_tensor(bad), FormatError);
  std::stringstream cut(ss.str().substr(0, 30));
  CHECK_THROWS_AS(read_tensor(cut), FormatError);
}

TEST_CASE("netpbm round trip at 8-bit precision") {
  const auto dir = std::filesystem::temp_directory_path();
  Tensor gray({3, 5});
  Tensor rgb({2, 2, 3});
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = static_cast<double>(i) / 14.0;
  for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = static_cast<double>(i % 7) / 6.0;
  const std::string pg = (dir / "crossdict_t.pgm").string();
  const std::string pp = (dir / "crossdict_t.ppm").string();
  save_signal(pg, gray);
  save_signal(pp, rgb);
  const Tensor g2 = load_signal(pg);
  const Tensor c2 = load_signal(pp);
  REQUIRE(g2.shape() == gray.shape());
  REQUIRE(c2.shape() == rgb.shape());
  for (std::size_t i = 0; i < gray.size(); ++i) CHECK(std::abs(g2[i] - gray[i]) <= 0.5 / 255 + 1e-12);
  for (std::size_t i = 0; i < rgb.size(); ++i) CHECK(std::abs(c2[i] - rgb[i]) <= 0.5 / 255 + 1e-12);
  CHECK_THROWS_AS(save_signal(pg, Tensor({2, 2, 2})), DimensionError);
}
