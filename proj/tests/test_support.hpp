#pragma once

#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "crossdict/learn.hpp"
#include "crossdict/pipelines.hpp"

namespace crossdict::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  }
  return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  return random_matrix(n, 1, rng).col(0);
}

// Every dictionary-update stage must not raise the objective measured
// right before it.
inline void check_update_monotone(const TrainReport& r) {
  REQUIRE(r.objective_before_update.size() == r.objective_per_iteration.size());
  for (std::size_t i = 0; i < r.objective_per_iteration.size(); ++i) {
    const double before = r.objective_before_update[i];
    CHECK(r.objective_per_iteration[i] <= before * (1.0 + 1e-9) + 1e-12);
  }
}

inline void check_nesting(const Recovery& r) { CHECK(r.metrics.nesting_violations == 0); }

}  // namespace crossdict::testing
