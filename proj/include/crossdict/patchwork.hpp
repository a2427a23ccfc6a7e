#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "crossdict/tensor.hpp"

namespace crossdict {

/// Placement of equally shaped patches inside a signal.
struct PatchGrid {
  Shape signal_shape;
  Shape patch_shape;
  Shape stride;
  /// Corner coordinates of every patch, row-major over the grid.
  std::vector<Shape> origins;
  /// Per-patch means removed at extraction, when requested.
  std::optional<std::vector<double>> dc_values;

  std::size_t patch_size() const { return shape_product(patch_shape); }
  std::size_t count() const { return origins.size(); }
};

/// prod over axes of floor((extent - patch) / stride) + 1.
std::size_t patch_count(const Shape& signal_shape, const Shape& patch_shape, const Shape& stride);

/// Builds the grid without touching signal data.
PatchGrid make_patch_grid(const Shape& signal_shape, const Shape& patch_shape, const Shape& stride);

/// Row-major flat offsets (within the signal) of the cells of a patch at `origin`.
std::vector<std::size_t> patch_offsets(const Shape& signal_shape, const Shape& patch_shape,
                                       const Shape& origin);

struct PatchSet {
  Eigen::MatrixXd columns;  // N x P
  PatchGrid grid;
};

/// Vectorizes every patch as a column (row-major cell order). With
/// remove_dc each column's mean is subtracted and kept in grid.dc_values.
PatchSet extract_patches(const Tensor& signal, const Shape& patch_shape, const Shape& stride,
                         bool remove_dc);

struct Aggregate {
  Tensor signal;
  /// Cells no patch covers; left at zero.
  std::size_t uncovered_cells = 0;
};

/// Overlap-averages patch columns back into a signal, re-adding the stored
/// DC per patch when add_dc is set.
Aggregate aggregate_patches(const Eigen::MatrixXd& columns, const PatchGrid& grid, bool add_dc);

}  // namespace crossdict
