#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>

#include "crossdict/pursuit.hpp"
#include "crossdict/scaling.hpp"
#include "crossdict/sensing.hpp"

namespace crossdict {

inline constexpr std::size_t kDefaultBranching = 16;     // Q
inline constexpr std::size_t kDefaultLowSparsity = 8;    // K_low

/// Effective dictionary Phi * U * D (Phi and U optional), evaluated lazily.
///
/// Correlations are computed as D^T (U^T (Phi^T r)), so the scan runs in
/// the dimension of D rather than that of the measurements. All referenced
/// objects must outlive the view.
class ComposedColumns final : public ColumnMap {
 public:
  ComposedColumns(const LinearOperator* phi, const ScaleSpec* upsampler,
                  const Eigen::MatrixXd& atoms);

  std::size_t rows() const override { return rows_; }
  std::size_t cols() const override { return static_cast<std::size_t>(atoms_->cols()); }
  void correlate(const Eigen::VectorXd& residual, std::span<const ColumnRange> ranges,
                 double* out) const override;
  void column(std::size_t j, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  const LinearOperator* phi_;
  const ScaleSpec* up_;
  const Eigen::MatrixXd* atoms_;
  std::size_t rows_;
};

/// Paired coarse and fine dictionaries with the block map f between them.
class CrossScaleModel {
 public:
  /// Validates T_high = Q T_low, atom dimensions against the scale, and
  /// k_low <= k_high <= Q k_low. Throws ConfigError or DimensionError.
  CrossScaleModel(std::shared_ptr<const Dictionary> d_low, std::shared_ptr<const Dictionary> d_high,
                  ScaleSpec scale, std::size_t k_low, std::size_t k_high);

  const Dictionary& d_low() const { return *d_low_; }
  const Dictionary& d_high() const { return *d_high_; }
  std::shared_ptr<const Dictionary> d_low_ptr() const { return d_low_; }
  std::shared_ptr<const Dictionary> d_high_ptr() const { return d_high_; }
  const ScaleSpec& scale() const { return scale_; }
  std::size_t q() const { return q_; }
  std::size_t t_low() const { return d_low_->num_atoms(); }
  std::size_t t_high() const { return d_high_->num_atoms(); }
  std::size_t k_low() const { return k_low_; }
  std::size_t k_high() const { return k_high_; }

  /// Same dictionaries with different sparsity budgets.
  CrossScaleModel with_sparsity(std::size_t k_low, std::size_t k_high) const;

 private:
  std::shared_ptr<const Dictionary> d_low_;
  std::shared_ptr<const Dictionary> d_high_;
  ScaleSpec scale_;
  std::size_t q_;
  std::size_t k_low_;
  std::size_t k_high_;
};

/// f(omega): every coarse index i contributes {(i-1)Q + 1, ..., iQ}.
Support cross_scale_map(const Support& omega_low, std::size_t q, std::size_t t_high);

struct ZeroTreeResult {
  SparseCode code_low;
  SparseCode code_high;
  double residual_norm = 0.0;
  std::chrono::nanoseconds step1_time{0};
  std::chrono::nanoseconds step2_time{0};
  std::size_t step1_scans = 0;
  std::size_t step2_scans = 0;
  /// Step 1 selected nothing although |y| exceeded its tolerance.
  bool unresolved = false;
  bool rank_deficient = false;
};

/// Two-step solve: OMP on Phi U D_low with budget k_low, then OMP on
/// Phi D_high restricted to f(support of step 1) with budget k_high.
/// phi == nullptr means identity.
ZeroTreeResult zero_tree_omp(const CrossScaleModel& model, const LinearOperator* phi,
                             const Eigen::VectorXd& y);

/// Abstract OMP operation count N T K + T K + K^4 + K^3 N.
double omp_cost(double n, double t, double k);

/// T_high / (T_low + K_low Q).
double predicted_speedup(double t_high, double t_low, double k_low, double q);

}  // namespace crossdict
