#include "crossdict/crossscale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossdict {

ComposedColumns::ComposedColumns(const LinearOperator* phi, const ScaleSpec* upsampler,
                                 const Eigen::MatrixXd& atoms)
    : phi_(phi), up_(upsampler), atoms_(&atoms) {
  std::size_t dim = static_cast<std::size_t>(atoms.rows());
  if (up_) {
    if (up_->coarse_size() != dim) {
      throw DimensionError("composed columns: atom length does not match the coarse patch size");
    }
    dim = up_->fine_size();
  }
  if (phi_) {
    if (phi_->input_dim() != dim) {
      throw DimensionError("composed columns: operator input dimension " +
                           std::to_string(phi_->input_dim()) + " does not match signal length " +
                           std::to_string(dim));
    }
    dim = phi_->output_dim();
  }
  rows_ = dim;
}

void ComposedColumns::correlate(const Eigen::VectorXd& residual,
                                std::span<const ColumnRange> ranges, double* out) const {
  Eigen::VectorXd back;
  const Eigen::VectorXd* z = &residual;
  if (phi_) {
    back.resize(static_cast<Eigen::Index>(phi_->input_dim()));
    phi_->adjoint_into(residual, back);
    z = &back;
  }
  Eigen::VectorXd coarse;
  if (up_) {
    coarse.resize(static_cast<Eigen::Index>(up_->coarse_size()));
    up_->upsample_adjoint(std::span<const double>(z->data(), static_cast<std::size_t>(z->size())),
                          std::span<double>(coarse.data(), static_cast<std::size_t>(coarse.size())));
    z = &coarse;
  }
  DenseColumns(*atoms_).correlate(*z, ranges, out);
}

void ComposedColumns::column(std::size_t j, Eigen::Ref<Eigen::VectorXd> out) const {
  Eigen::VectorXd c = atoms_->col(static_cast<Eigen::Index>(j));
  if (up_) {
    Eigen::VectorXd fine(static_cast<Eigen::Index>(up_->fine_size()));
    up_->upsample(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())),
                  std::span<double>(fine.data(), static_cast<std::size_t>(fine.size())));
    c.swap(fine);
  }
  if (phi_) {
    phi_->apply_into(c, out);
  } else {
    out = c;
  }
}

CrossScaleModel::CrossScaleModel(std::shared_ptr<const Dictionary> d_low,
                                 std::shared_ptr<const Dictionary> d_high, ScaleSpec scale,
                                 std::size_t k_low, std::size_t k_high)
    : d_low_(std::move(d_low)),
      d_high_(std::move(d_high)),
      scale_(std::move(scale)),
      q_(0),
      k_low_(k_low),
      k_high_(k_high) {
  if (!d_low_ || !d_high_) throw ConfigError("cross-scale model: missing dictionary");
  const std::size_t t_low = d_low_->num_atoms();
  const std::size_t t_high = d_high_->num_atoms();
  if (t_high % t_low != 0) {
    throw ConfigError("cross-scale model: T_high = " + std::to_string(t_high) +
                      " is not a multiple of T_low = " + std::to_string(t_low));
  }
  q_ = t_high / t_low;
  if (d_low_->atom_dim() != scale_.coarse_size()) {
    throw DimensionError("cross-scale model: coarse atom length " +
                         std::to_string(d_low_->atom_dim()) + " does not match coarse patch size " +
                         std::to_string(scale_.coarse_size()));
  }
  if (d_high_->atom_dim() != scale_.fine_size()) {
    throw DimensionError("cross-scale model: fine atom length " +
                         std::to_string(d_high_->atom_dim()) + " does not match patch size " +
                         std::to_string(scale_.fine_size()));
  }
  if (k_low_ < 1 || k_high_ < k_low_ || k_high_ > q_ * k_low_) {
    throw ConfigError("cross-scale model: need 1 <= k_low <= k_high <= Q k_low (k_low = " +
                      std::to_string(k_low_) + ", k_high = " + std::to_string(k_high_) +
                      ", Q = " + std::to_string(q_) + ")");
  }
}

CrossScaleModel CrossScaleModel::with_sparsity(std::size_t k_low, std::size_t k_high) const {
  return CrossScaleModel(d_low_, d_high_, scale_, k_low, k_high);
}

Support cross_scale_map(const Support& omega_low, std::size_t q, std::size_t t_high) {
  if (q == 0 || t_high % q != 0) {
    throw DomainError("cross-scale map: Q must divide T_high");
  }
  const std::size_t t_low = t_high / q;
  Support out;
  out.reserve(omega_low.size() * q);
  for (std::size_t i : omega_low) {
    if (i < 1 || i > t_low) {
      throw DomainError("cross-scale map: coarse index " + std::to_string(i) + " outside [1, " +
                        std::to_string(t_low) + "]");
    }
    for (std::size_t j = 1; j <= q; ++j) out.push_back((i - 1) * q + j);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ZeroTreeResult zero_tree_omp(const CrossScaleModel& model, const LinearOperator* phi,
                             const Eigen::VectorXd& y) {
  using Clock = std::chrono::steady_clock;
  const std::size_t m = phi ? phi->output_dim() : model.scale().fine_size();
  if (phi && phi->input_dim() != model.scale().fine_size()) {
    throw DimensionError("zero-tree omp: operator input dimension " +
                         std::to_string(phi->input_dim()) + " does not match model patch size " +
                         std::to_string(model.scale().fine_size()));
  }
  if (static_cast<std::size_t>(y.size()) != m) {
    throw DimensionError("zero-tree omp: measurement length " + std::to_string(y.size()) +
                         " does not match operator output " + std::to_string(m));
  }

  ZeroTreeResult out;
  out.code_low = SparseCode(model.t_low());
  out.code_high = SparseCode(model.t_high());
  const double y_norm = y.norm();
  out.residual_norm = y_norm;
  const double tol = kDefaultRelativeTolerance * y_norm;
  if (y_norm == 0.0) return out;

  const auto t0 = Clock::now();
  PursuitConfig low_cfg;
  low_cfg.sparsity = std::min({model.k_low(), m, model.t_low()});
  PursuitResult low;
  if (phi) {
    low = omp(ComposedColumns(phi, &model.scale(), model.d_low().atoms()), y, low_cfg);
  } else {
    // U^T U = b I, so ||y - U D c||^2 = ||y - U W y||^2 + b ||W y - D c||^2 and the
    // search over U D_low reduces to the coarse problem with a shifted tolerance.
    const ScaleSpec& sc = model.scale();
    const double b = static_cast<double>(sc.block_size());
    Eigen::VectorXd y_low(static_cast<Eigen::Index>(sc.coarse_size()));
    sc.downsample(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                  std::span<double>(y_low.data(), static_cast<std::size_t>(y_low.size())));
    const double perp = std::max(0.0, y_norm * y_norm - b * y_low.squaredNorm());
    const double slack = tol * tol - perp;
    low_cfg.sparsity = std::min(low_cfg.sparsity, sc.coarse_size());
    low_cfg.residual_tolerance = slack > 0.0 ? std::sqrt(slack / b) : -1.0;
    low = omp(model.d_low(), y_low, low_cfg);
  }
  const auto t1 = Clock::now();
  out.step1_time = t1 - t0;
  out.step1_scans = low.atom_scan_count;
  out.code_low = low.code;

  if (low.code.empty()) {
    out.unresolved = y_norm > tol;
    return out;
  }

  const Support allowed = cross_scale_map(low.code.support(), model.q(), model.t_high());
  const Eigen::MatrixXd& high_atoms = model.d_high().atoms();
  Eigen::MatrixXd gathered(high_atoms.rows(), static_cast<Eigen::Index>(allowed.size()));
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    gathered.col(static_cast<Eigen::Index>(i)) = high_atoms.col(static_cast<Eigen::Index>(allowed[i] - 1));
  }
  const ComposedColumns fine(phi, nullptr, gathered);
  PursuitConfig high_cfg;
  high_cfg.sparsity = std::min({model.k_high(), allowed.size(), m});
  const PursuitResult high = omp(fine, y, high_cfg);
  std::vector<CodeEntry> entries;
  entries.reserve(high.code.size());
  for (const auto& e : high.code.entries()) entries.push_back({allowed[e.index - 1], e.value});
  out.step2_time = Clock::now() - t1;
  out.step2_scans = high.atom_scan_count;
  out.code_high = SparseCode(model.t_high(), std::move(entries));
  out.residual_norm = high.residual_norm;
  out.rank_deficient = low.rank_deficient || high.rank_deficient;
  return out;
}

double omp_cost(double n, double t, double k) {
  return n * t * k + t * k + k * k * k * k + k * k * k * n;
}

double predicted_speedup(double t_high, double t_low, double k_low, double q) {
  return t_high / (t_low + k_low * q);
}

}  // namespace crossdict
