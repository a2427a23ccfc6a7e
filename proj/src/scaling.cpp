#include "crossdict/scaling.hpp"

#include <algorithm>
#include <string>

namespace crossdict {

Shape default_scale_factors(SignalDomain domain) {
  switch (domain) {
    case SignalDomain::image:
      return {2, 2};
    case SignalDomain::video:
      return {2, 2, 2};
    case SignalDomain::hyperspectral:
      return {2, 2, 4};
    case SignalDomain::lightfield:
      return {2, 2, 2, 2};
  }
  return {};
}

ScaleSpec::ScaleSpec(Shape fine_shape, Shape factors)
    : fine_(std::move(fine_shape)), factors_(std::move(factors)) {
  if (fine_.empty() || fine_.size() > 4) throw DimensionError("scale: rank must be 1 to 4");
  if (factors_.size() != fine_.size()) {
    throw DimensionError("scale: factor count does not match patch rank");
  }
  coarse_.resize(fine_.size());
  for (std::size_t a = 0; a < fine_.size(); ++a) {
    if (factors_[a] == 0 || fine_[a] == 0 || fine_[a] % factors_[a] != 0) {
      throw DimensionError("scale: extent " + std::to_string(fine_[a]) + " on axis " +
                           std::to_string(a) + " is not divisible by factor " +
                           std::to_string(factors_[a]));
    }
    coarse_[a] = fine_[a] / factors_[a];
    block_ *= factors_[a];
  }
  coarse_size_ = shape_product(coarse_);

  const std::size_t rank = fine_.size();
  coarse_of_.resize(shape_product(fine_));
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t cell = 0; cell < coarse_of_.size(); ++cell) {
    std::size_t c = 0;
    for (std::size_t a = 0; a < rank; ++a) c = c * coarse_[a] + idx[a] / factors_[a];
    coarse_of_[cell] = c;
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < fine_[a]) break;
      idx[a] = 0;
    }
  }
}

void ScaleSpec::downsample(std::span<const double> fine, std::span<double> coarse) const {
  upsample_adjoint(fine, coarse);
  const double inv = 1.0 / static_cast<double>(block_);
  for (double& v : coarse) v *= inv;
}

void ScaleSpec::upsample(std::span<const double> coarse, std::span<double> fine) const {
  if (coarse.size() != coarse_size_ || fine.size() != coarse_of_.size()) {
    throw DimensionError("upsample: length mismatch");
  }
  for (std::size_t i = 0; i < coarse_of_.size(); ++i) fine[i] = coarse[coarse_of_[i]];
}

void ScaleSpec::upsample_adjoint(std::span<const double> fine, std::span<double> coarse) const {
  if (coarse.size() != coarse_size_ || fine.size() != coarse_of_.size()) {
    throw DimensionError("downsample: length mismatch");
  }
  std::fill(coarse.begin(), coarse.end(), 0.0);
  for (std::size_t i = 0; i < coarse_of_.size(); ++i) coarse[coarse_of_[i]] += fine[i];
}

Tensor downsample(const Tensor& x, const ScaleSpec& spec) {
  if (x.shape() != spec.fine_shape()) throw DimensionError("downsample: shape mismatch");
  Tensor out(spec.coarse_shape());
  spec.downsample(x.data(), out.data());
  return out;
}

Tensor upsample(const Tensor& x_low, const ScaleSpec& spec) {
  if (x_low.shape() != spec.coarse_shape()) throw DimensionError("upsample: shape mismatch");
  Tensor out(spec.fine_shape());
  spec.upsample(x_low.data(), out.data());
  return out;
}

}  // namespace crossdict
