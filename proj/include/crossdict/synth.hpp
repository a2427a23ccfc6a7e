#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crossdict/tensor.hpp"

namespace crossdict {

/// Piecewise-smooth test image in [0, 1]: gradients, flat and textured
/// shapes. Shape (rows, cols).
Tensor synthetic_image(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Squares drifting over a static background. Shape (rows, cols, frames).
Tensor synthetic_video(std::size_t rows, std::size_t cols, std::size_t frames, std::uint64_t seed);

/// Linear mixture of smooth spectra with piecewise-constant abundances.
/// Shape (rows, cols, channels).
Tensor synthetic_hyperspectral(std::size_t rows, std::size_t cols, std::size_t channels,
                               std::uint64_t seed);

/// Two-layer scene with a foreground at one pixel of disparity per view.
/// Shape (rows, cols, view_rows, view_cols).
Tensor synthetic_lightfield(std::size_t rows, std::size_t cols, std::size_t view_rows,
                            std::size_t view_cols, std::uint64_t seed);

struct PlantedData {
  Eigen::MatrixXd dictionary;  // N x T, unit-norm columns
  Eigen::MatrixXd samples;     // N x count
  std::vector<SparseCode> codes;
};

/// Samples drawn as exact k-sparse combinations of a random unit-norm dictionary.
PlantedData planted_sparse_data(std::size_t n, std::size_t t, std::size_t k, std::size_t count,
                                std::uint64_t seed);

}  // namespace crossdict
