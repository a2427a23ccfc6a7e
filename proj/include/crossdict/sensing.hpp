#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "crossdict/tensor.hpp"

namespace crossdict {

enum class OperatorKind { identity, mask, channel_mosaic, temporal_code, angular_sample, dense };

const char* to_string(OperatorKind kind);

/// Linear measurement map Phi: R^N -> R^M with its adjoint.
class LinearOperator {
 public:
  LinearOperator(std::size_t input_dim, std::size_t output_dim)
      : input_dim_(input_dim), output_dim_(output_dim) {}
  virtual ~LinearOperator() = default;

  virtual OperatorKind kind() const = 0;
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const;
  /// Unchecked variants writing into preallocated storage.
  virtual void apply_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                          Eigen::Ref<Eigen::VectorXd> out) const = 0;
  virtual void adjoint_into(const Eigen::Ref<const Eigen::VectorXd>& y,
                            Eigen::Ref<Eigen::VectorXd> out) const = 0;

  /// Multiply-adds (or copies) performed by one apply or adjoint call.
  virtual std::size_t application_cost() const = 0;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

OperatorPtr make_identity(std::size_t n);

/// Keeps the listed coordinates (1-based, strictly increasing or at least
/// distinct) in the given order. Throws ConfigError on duplicates, out of
/// range indices, or an empty list.
OperatorPtr make_mask(std::size_t n, const std::vector<std::size_t>& known_indices);

/// Signal layout (pixel, channel) row-major, N = spatial_extent * channels.
/// assignment[p] in [1, channels] picks the channel read at pixel p.
OperatorPtr make_channel_mosaic(std::size_t spatial_extent, std::size_t channels,
                                const std::vector<std::uint32_t>& assignment);

/// Signal layout (pixel, frame) row-major. code has spatial_extent * frames
/// binary entries; out[p] = sum_f code(p, f) x(p, f). Each pixel must be
/// active in at least one frame.
OperatorPtr make_temporal_code(std::size_t spatial_extent, std::size_t frames,
                               const std::vector<std::uint8_t>& code);

/// Signal layout (pixel, view) row-major with view = view_row * view_cols +
/// view_col. kept_views are 1-based linear view indices. Output layout is
/// (pixel, kept view).
OperatorPtr make_angular_sample(std::size_t view_rows, std::size_t view_cols,
                                const std::vector<std::size_t>& kept_views,
                                std::size_t spatial_extent);

OperatorPtr make_dense(Eigen::MatrixXd matrix);

/// Standard RGGB Bayer tile: R=1 at (even, even), B=3 at (odd, odd), G=2 elsewhere.
std::vector<std::uint32_t> bayer_rggb_assignment(std::size_t rows, std::size_t cols);

/// Uniform random channel per pixel, values in [1, channels].
std::vector<std::uint32_t> random_channel_assignment(std::size_t spatial_extent,
                                                     std::size_t channels, std::mt19937_64& rng);

/// One active frame per pixel, chosen uniformly.
std::vector<std::uint8_t> random_temporal_code(std::size_t spatial_extent, std::size_t frames,
                                               std::mt19937_64& rng);

/// Random 0/1 mask over n cells with round(n / (1 + unknown_per_known))
/// known cells, at least one.
std::vector<std::uint8_t> random_mask(std::size_t n, double unknown_per_known,
                                      std::mt19937_64& rng);

/// Materializes Phi as an M x N matrix (tests and small problems only).
Eigen::MatrixXd to_dense(const LinearOperator& op);

}  // namespace crossdict
