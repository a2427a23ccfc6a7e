#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "crossdict/crossscale.hpp"
#include "crossdict/pursuit.hpp"

namespace crossdict {

enum class AtomInit { data_columns, random_unit };

struct TrainConfig {
  std::size_t num_atoms = 0;
  std::size_t sparsity = 0;
  std::size_t iterations = 10;
  std::uint64_t seed = 1;
  /// Atoms used by fewer samples than this are replaced between iterations.
  std::size_t dead_atom_threshold = 1;
  /// Atoms whose |inner product| with an earlier atom exceeds this are
  /// replaced too; values >= 1 disable the check.
  double duplicate_atom_threshold = 0.99;
  AtomInit init = AtomInit::data_columns;
  /// Workers for the sparse-coding stage.
  std::size_t threads = 1;
  /// Overrides `init` when set; columns are normalized.
  std::optional<Eigen::MatrixXd> initial_atoms;
};

struct TrainReport {
  /// |Y - DX|_F after each dictionary-update stage.
  std::vector<double> objective_per_iteration;
  /// |Y - DX|_F right after each coding stage, i.e. before the update.
  std::vector<double> objective_before_update;
  std::size_t replaced_atoms = 0;
  std::chrono::nanoseconds wall_clock{0};
};

struct TrainResult {
  Dictionary dictionary;
  std::vector<SparseCode> codes;
  TrainReport report;
};

struct RankOneUpdate {
  Eigen::VectorXd atom;          // unit norm, sign aligned with the previous atom
  Eigen::VectorXd coefficients;  // E^T atom
  double singular_value = 0.0;
};

/// Leading singular pair of a residual matrix E (N x u), as used by the
/// K-SVD atom update. Exact for min(N, u) <= 128; larger problems use power
/// iteration started at previous_atom, which never lowers |E^T d|.
RankOneUpdate leading_rank_one(const Eigen::MatrixXd& residual,
                               const Eigen::VectorXd& previous_atom);

/// K-SVD: alternate OMP coding of every column with sequential rank-1 atom
/// updates. Throws ConfigError for T > sample count and DegenerateError for
/// all-zero data.
TrainResult ksvd(const Eigen::MatrixXd& samples, const TrainConfig& config);

/// K-SVD whose coding stage restricts sample i to allowed[i] (1-based).
TrainResult ksvd_constrained(const Eigen::MatrixXd& samples, const std::vector<Support>& allowed,
                             const TrainConfig& config);

struct CrossScaleTrainConfig {
  std::size_t t_low = 64;
  std::size_t t_high = 64 * kDefaultBranching;
  std::size_t k_low = kDefaultLowSparsity;
  std::size_t k_high = kDefaultLowSparsity;
  std::size_t iterations = 10;
  std::uint64_t seed = 1;
  std::size_t dead_atom_threshold = 1;
  std::size_t threads = 1;
};

struct CrossScaleTraining {
  CrossScaleModel model;
  TrainReport low_report;
  TrainReport high_report;
  std::vector<SparseCode> low_codes;   // one per input sample
  std::vector<SparseCode> high_codes;  // one per entry of high_samples
  /// Input columns used for the fine stage (those with a non-empty coarse code).
  std::vector<std::size_t> high_samples;
};

/// Coarse dictionary by K-SVD on the downsampled samples, then the fine
/// dictionary by constrained K-SVD with each sample restricted to the block
/// map of its coarse support.
CrossScaleTraining train_cross_scale(const Eigen::MatrixXd& samples, const ScaleSpec& scale,
                                     const CrossScaleTrainConfig& config);

}  // namespace crossdict
