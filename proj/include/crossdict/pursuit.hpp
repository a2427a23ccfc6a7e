#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crossdict/tensor.hpp"

namespace crossdict {

/// Sorted set of 1-based atom indices.
using Support = std::vector<std::size_t>;

/// Half-open run [begin, end) of 0-based column offsets.
struct ColumnRange {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const { return end - begin; }
};

/// Column access to an effective dictionary (an M x T linear map).
///
/// Implementations must be safe for concurrent const use.
class ColumnMap {
 public:
  virtual ~ColumnMap() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  /// Writes <column j, residual> for every j in the ranges, consecutively.
  virtual void correlate(const Eigen::VectorXd& residual, std::span<const ColumnRange> ranges,
                         double* out) const = 0;
  /// Materializes column j (0-based).
  virtual void column(std::size_t j, Eigen::Ref<Eigen::VectorXd> out) const = 0;
};

/// A plain matrix used as its own column map. The matrix must outlive this view.
class DenseColumns final : public ColumnMap {
 public:
  explicit DenseColumns(const Eigen::MatrixXd& matrix) : m_(&matrix) {}
  explicit DenseColumns(const Dictionary& dictionary) : m_(&dictionary.atoms()) {}

  std::size_t rows() const override { return static_cast<std::size_t>(m_->rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(m_->cols()); }
  void correlate(const Eigen::VectorXd& residual, std::span<const ColumnRange> ranges,
                 double* out) const override;
  void column(std::size_t j, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  const Eigen::MatrixXd* m_;
};

struct PursuitConfig {
  std::size_t sparsity = 1;
  /// Stop once |r| <= tolerance. Defaults to 1e-6 |y|.
  std::optional<double> residual_tolerance;
  /// Restrict atom selection to this 1-based index set.
  std::optional<Support> allowed_support;
};

struct PursuitResult {
  SparseCode code;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  /// Atom/residual inner products evaluated over the whole run.
  std::size_t atom_scan_count = 0;
  /// Selected columns were linearly dependent; coefficients are minimum-norm.
  bool rank_deficient = false;
};

/// Per-iteration record for tests and diagnostics.
struct PursuitStep {
  std::size_t atom;  // 1-based
  double residual_norm;
  /// max over selected columns a of |<r, a>| after the least-squares step.
  double max_selected_correlation;
  std::size_t scanned;
};

inline constexpr double kDefaultRelativeTolerance = 1e-6;

/// Orthogonal matching pursuit.
///
/// Each iteration picks the allowed, not yet selected column with the largest
/// |<r, a_j>| (lowest index on ties), then refits all selected coefficients by
/// least squares. The fit uses a growing QR factorization of the selected
/// columns; dependent columns fall back to a dense minimum-norm solve.
PursuitResult omp(const ColumnMap& columns, const Eigen::VectorXd& y, const PursuitConfig& config,
                  std::vector<PursuitStep>* trace = nullptr);

PursuitResult omp(const Dictionary& dictionary, const Eigen::VectorXd& y,
                  const PursuitConfig& config, std::vector<PursuitStep>* trace = nullptr);

struct LeastSquaresResult {
  Eigen::VectorXd coefficients;  // in support order
  double residual_norm = 0.0;
  bool rank_deficient = false;
};

/// min |y - A_S c| over the columns in support; minimum-norm when singular.
LeastSquaresResult least_squares_on_support(const ColumnMap& columns, const Eigen::VectorXd& y,
                                            const Support& support);

inline constexpr double kBruteForceBudget = 1e6;

/// Exhaustive solution of min |y - D s| s.t. |s|_0 <= k. Refuses with
/// ConfigError when C(T, k) exceeds 1e6. Among equally good supports the
/// smallest, then lexicographically first, wins.
PursuitResult brute_force_best_k(const ColumnMap& columns, const Eigen::VectorXd& y, std::size_t k);

/// Converts a sorted 1-based support into 0-based runs of consecutive columns.
std::vector<ColumnRange> support_to_ranges(const Support& support, std::size_t num_columns);

}  // namespace crossdict
