#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

#include "crossdict/learn.hpp"
#include "crossdict/synth.hpp"

using namespace crossdict;
using testing::check_update_monotone;
using testing::random_matrix;

namespace {

Eigen::MatrixXd code_matrix(const std::vector<SparseCode>& codes, std::size_t t) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = codes[i].dense();
  return x;
}

}  // namespace

TEST_CASE("rank-one update matches the leading singular pair") {
  std::mt19937_64 rng(1);
  for (const auto& [n, u] : std::vector<std::pair<int, int>>{{8, 3}, {8, 40}, {64, 20}, {150, 200}, {300, 140}}) {
    const Eigen::MatrixXd e = random_matrix(n, u, rng);
    const Eigen::VectorXd prev = random_matrix(n, 1, rng).col(0).normalized();
    const RankOneUpdate r = leading_rank_one(e, prev);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma = svd.singularValues()(0);
    CHECK(r.atom.norm() == doctest::Approx(1.0));
    CHECK(r.atom.dot(prev) >= 0.0);
    CHECK((r.coefficients - e.transpose() * r.atom).norm() < 1e-10 * sigma);
    CHECK(r.singular_value >= (e.transpose() * prev).norm() - 1e-12);
    if (std::min(n, u) <= 128) {
      CHECK(r.singular_value == doctest::Approx(sigma).epsilon(1e-10));
      CHECK(std::abs(std::abs(r.atom.dot(svd.matrixU().col(0))) - 1.0) < 1e-8);
    } else {
      CHECK(r.singular_value == doctest::Approx(sigma).epsilon(1e-3));
    }
  }
}

TEST_CASE("ksvd lowers the objective at every update stage") {
  const PlantedData data = planted_sparse_data(16, 32, 3, 600, 7);
  TrainConfig cfg;
  cfg.num_atoms = 32;
  cfg.sparsity = 3;
  cfg.iterations = 12;
  const TrainResult r = ksvd(data.samples, cfg);
  check_update_monotone(r.report);
  CHECK(r.report.objective_per_iteration.back() < r.report.objective_before_update.front());
  REQUIRE(r.codes.size() == 600);
  for (const auto& c : r.codes) CHECK(c.size() <= 3);
  const double direct = (data.samples - r.dictionary.atoms() * code_matrix(r.codes, 32)).norm();
  CHECK(direct == doctest::Approx(r.report.objective_per_iteration.back()).epsilon(1e-6));
}

TEST_CASE("ksvd is deterministic and thread-count independent") {
  const PlantedData data = planted_sparse_data(12, 20, 2, 300, 3);
  TrainConfig cfg;
  cfg.num_atoms = 20;
  cfg.sparsity = 2;
  cfg.iterations = 4;
  const TrainResult a = ksvd(data.samples, cfg);
  const TrainResult b = ksvd(data.samples, cfg);
  cfg.threads = 3;
  const TrainResult c = ksvd(data.samples, cfg);
  CHECK(a.dictionary.atoms() == b.dictionary.atoms());
  CHECK(a.dictionary.atoms() == c.dictionary.atoms());
  check_update_monotone(a.report);
  check_update_monotone(c.report);
}

TEST_CASE("constrained ksvd with unrestricted sets reproduces ksvd") {
  const PlantedData data = planted_sparse_data(12, 24, 2, 200, 5);
  TrainConfig cfg;
  cfg.num_atoms = 24;
  cfg.sparsity = 2;
  cfg.iterations = 5;
  Support all(24);
  for (std::size_t j = 0; j < 24; ++j) all[j] = j + 1;
  const TrainResult a = ksvd(data.samples, cfg);
  const TrainResult b = ksvd_constrained(data.samples, std::vector<Support>(200, all), cfg);
  CHECK(a.dictionary.atoms() == b.dictionary.atoms());
  CHECK(a.codes == b.codes);
  check_update_monotone(b.report);
}

TEST_CASE("constrained ksvd keeps every code inside its allowed set") {
  const PlantedData data = planted_sparse_data(12, 24, 2, 200, 6);
  std::vector<Support> allowed(200);
  for (std::size_t i = 0; i < 200; ++i) allowed[i] = i % 2 ? Support{1, 2, 3, 4, 5, 6} : Support{10, 11, 20};
  TrainConfig cfg;
  cfg.num_atoms = 24;
  cfg.sparsity = 2;
  cfg.iterations = 4;
  const TrainResult r = ksvd_constrained(data.samples, allowed, cfg);
  check_update_monotone(r.report);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j : r.codes[i].support()) {
      CHECK(std::binary_search(allowed[i].begin(), allowed[i].end(), j));
    }
  }
  allowed[7].clear();
  CHECK_THROWS_WITH_AS(ksvd_constrained(data.samples, allowed, cfg), doctest::Contains("sample 8"), ConfigError);
}

TEST_CASE("training input validation") {
  TrainConfig cfg;
  cfg.num_atoms = 10;
  cfg.sparsity = 2;
  std::mt19937_64 rng(2);
  CHECK_THROWS_AS(ksvd(random_matrix(8, 9, rng), cfg), ConfigError);
  CHECK_THROWS_AS(ksvd(Eigen::MatrixXd::Zero(8, 20), cfg), DegenerateError);
  cfg.sparsity = 9;
  CHECK_THROWS_AS(ksvd(random_matrix(8, 20, rng), cfg), ConfigError);
}

TEST_CASE("planted dictionary is recovered") {
  const PlantedData data = planted_sparse_data(16, 32, 3, 2000, 11);
  TrainConfig cfg;
  cfg.num_atoms = 32;
  cfg.sparsity = 3;
  cfg.iterations = 30;
  const TrainResult r = ksvd(data.samples, cfg);
  check_update_monotone(r.report);
  const double rel = r.report.objective_per_iteration.back() / data.samples.norm();
  // OMP with the planted dictionary itself bounds what any OMP-coded fit reaches.
  const Dictionary planted(data.dictionary);
  double floor2 = 0.0;
  for (Eigen::Index i = 0; i < data.samples.cols(); ++i) {
    PursuitConfig pc;
    pc.sparsity = 3;
    floor2 += std::pow(omp(planted, data.samples.col(i), pc).residual_norm, 2);
  }
  const double floor = std::sqrt(floor2) / data.samples.norm();
  CHECK(rel <= 2.5 * floor);
  std::size_t found = 0;
  const Eigen::MatrixXd g = (data.dictionary.transpose() * r.dictionary.atoms()).cwiseAbs();
  for (Eigen::Index j = 0; j < g.rows(); ++j) found += g.row(j).maxCoeff() >= 0.99 ? 1 : 0;
  MESSAGE("planted atoms recovered: " << found << " / 32, relative error " << rel << ", OMP floor " << floor);
  CHECK(found >= 24);
}

TEST_CASE("two-scale training nests fine codes under coarse codes") {
  std::mt19937_64 rng(9);
  const Tensor img = [] {
    Tensor t({48, 48});
    for (std::size_t r = 0; r < 48; ++r) {
      for (std::size_t c = 0; c < 48; ++c) t.at({r, c}) = std::sin(0.3 * r) * std::cos(0.21 * c) + 0.01 * (r % 5);
    }
    return t;
  }();
  const Eigen::MatrixXd samples = training_patches({img}, {8, 8}, {2, 2}, true, 0, 1);
  const ScaleSpec scale({8, 8}, {2, 2});
  CrossScaleTrainConfig cfg;
  cfg.t_low = 16;
  cfg.t_high = 64;
  cfg.k_low = 3;
  cfg.k_high = 4;
  cfg.iterations = 5;
  const CrossScaleTraining tr = train_cross_scale(samples, scale, cfg);
  CHECK(tr.model.q() == 4);
  CHECK(tr.model.d_low().atom_dim() == 16);
  CHECK(tr.model.d_high().atom_dim() == 64);
  check_update_monotone(tr.low_report);
  check_update_monotone(tr.high_report);
  REQUIRE(tr.high_codes.size() == tr.high_samples.size());
  for (std::size_t c = 0; c < tr.high_samples.size(); ++c) {
    const Support f = cross_scale_map(tr.low_codes[tr.high_samples[c]].support(), 4, 64);
    for (std::size_t j : tr.high_codes[c].support()) CHECK(std::binary_search(f.begin(), f.end(), j));
  }
  cfg.t_high = 60;
  CHECK_THROWS_AS(train_cross_scale(samples, scale, cfg), ConfigError);
  CHECK_THROWS_AS(train_cross_scale(samples.topRows(32), scale, cfg), DimensionError);
}

TEST_CASE("rank-one data gives the normalized vector after one iteration") {
  Eigen::VectorXd v(4);
  v << 1, -2, 3, 0.5;
  Eigen::MatrixXd y(4, 10);
  for (Eigen::Index i = 0; i < 10; ++i) y.col(i) = v;
  TrainConfig cfg;
  cfg.num_atoms = 1;
  cfg.sparsity = 1;
  cfg.iterations = 1;
  const TrainResult r = ksvd(y, cfg);
  CHECK((r.dictionary.atom(1) - v.normalized()).norm() < 1e-12);
  CHECK(r.report.objective_per_iteration.back() < 1e-12);
}

TEST_CASE("rank-one update on 5 x 8 toys against a full decomposition") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd e = random_matrix(5, 8, rng);
    const RankOneUpdate r = leading_rank_one(e, random_matrix(5, 1, rng).col(0).normalized());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sign = r.atom.dot(svd.matrixU().col(0)) < 0 ? -1.0 : 1.0;
    CHECK((r.atom - sign * svd.matrixU().col(0)).norm() < 1e-8);
    CHECK((r.coefficients - sign * svd.singularValues()(0) * svd.matrixV().col(0)).norm() < 1e-8);
  }
}

TEST_CASE("toy planted two-scale model is learned with its parent structure") {
  // Fine atoms 1-2 share coarse parent a1, atoms 3-4 share a2; the details
  // are block-alternating so W removes them.
  const ScaleSpec scale({8}, {2});
  Eigen::VectorXd a1(4), a2(4);
  a1 << 1, 0.5, -0.5, 0.2;
  a2 << -0.3, 1, 0.4, -0.8;
  auto up = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd f(8);
    scale.upsample(std::span<const double>(c.data(), 4), std::span<double>(f.data(), 8));
    return f;
  };
  Eigen::VectorXd h1(8), h2(8);
  h1 << 0.6, -0.6, 0, 0, 0.3, -0.3, 0, 0;
  h2 << 0, 0, -0.5, 0.5, 0, 0, 0.4, -0.4;
  Eigen::MatrixXd planted(8, 4);
  planted.col(0) = (up(a1) + h1).normalized();
  planted.col(1) = (up(a1) + h2).normalized();
  planted.col(2) = (up(a2) + h1).normalized();
  planted.col(3) = (up(a2) - h2).normalized();

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd y(8, 200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    y.col(i) = (1.0 + std::abs(g(rng))) * planted.col(i % 4);
  }
  CrossScaleTrainConfig cfg;
  cfg.t_low = 2;
  cfg.t_high = 4;
  cfg.k_low = 1;
  cfg.k_high = 1;
  cfg.iterations = 10;
  const CrossScaleTraining tr = train_cross_scale(y, scale, cfg);
  check_update_monotone(tr.low_report);
  check_update_monotone(tr.high_report);
  CHECK(tr.high_report.objective_per_iteration.back() < 1e-6);

  // Each learned fine atom matches one planted atom, and siblings in a block
  // come from the same planted parent.
  const Eigen::MatrixXd corr = (planted.transpose() * tr.model.d_high().atoms()).cwiseAbs();
  std::vector<Eigen::Index> match(4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    corr.col(j).maxCoeff(&match[static_cast<std::size_t>(j)]);
    CHECK(corr(match[static_cast<std::size_t>(j)], j) > 1.0 - 1e-6);
  }
  CHECK(match[0] / 2 == match[1] / 2);
  CHECK(match[2] / 2 == match[3] / 2);
  CHECK(match[0] / 2 != match[2] / 2);
}
