#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crossdict/tensor.hpp"

namespace crossdict {

enum class SignalDomain { image, video, hyperspectral, lightfield };

/// Default per-axis decimation factors: image 2x2, video 2x2x2,
/// hyperspectral 2x2x4, light field 2x2x2x2.
Shape default_scale_factors(SignalDomain domain);

/// Geometry of the block-average downsampler W and the replicating upsampler
/// U between a fine patch shape and its coarse counterpart. W U = I.
class ScaleSpec {
 public:
  /// Throws DimensionError when a fine extent is not divisible by its factor.
  ScaleSpec(Shape fine_shape, Shape factors);

  const Shape& fine_shape() const { return fine_; }
  const Shape& factors() const { return factors_; }
  const Shape& coarse_shape() const { return coarse_; }
  std::size_t fine_size() const { return coarse_of_.size(); }
  std::size_t coarse_size() const { return coarse_size_; }
  std::size_t block_size() const { return block_; }

  /// Block means, fine -> coarse.
  void downsample(std::span<const double> fine, std::span<double> coarse) const;
  /// Replication, coarse -> fine.
  void upsample(std::span<const double> coarse, std::span<double> fine) const;
  /// U^T: block sums, fine -> coarse. Equals block_size() * W.
  void upsample_adjoint(std::span<const double> fine, std::span<double> coarse) const;

  friend bool operator==(const ScaleSpec& a, const ScaleSpec& b) {
    return a.fine_ == b.fine_ && a.factors_ == b.factors_;
  }

 private:
  Shape fine_;
  Shape factors_;
  Shape coarse_;
  std::size_t coarse_size_ = 0;
  std::size_t block_ = 1;
  std::vector<std::size_t> coarse_of_;  // fine cell -> coarse cell
};

Tensor downsample(const Tensor& x, const ScaleSpec& spec);
Tensor upsample(const Tensor& x_low, const ScaleSpec& spec);

}  // namespace crossdict
