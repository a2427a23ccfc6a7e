#include "crossdict/patchwork.hpp"

#include <string>

namespace crossdict {

namespace {

void check_geometry(const Shape& signal_shape, const Shape& patch_shape, const Shape& stride) {
  if (patch_shape.size() != signal_shape.size() || stride.size() != signal_shape.size()) {
    throw DimensionError("patch shape and stride must have the signal's rank");
  }
  for (std::size_t a = 0; a < signal_shape.size(); ++a) {
    if (patch_shape[a] == 0 || patch_shape[a] > signal_shape[a]) {
      throw DimensionError("patch extent " + std::to_string(patch_shape[a]) + " on axis " +
                           std::to_string(a) + " does not fit signal extent " +
                           std::to_string(signal_shape[a]));
    }
    if (stride[a] == 0) throw DimensionError("patch stride must be at least 1");
  }
}

}  // namespace

std::size_t patch_count(const Shape& signal_shape, const Shape& patch_shape, const Shape& stride) {
  check_geometry(signal_shape, patch_shape, stride);
  std::size_t count = 1;
  for (std::size_t a = 0; a < signal_shape.size(); ++a) {
    count *= (signal_shape[a] - patch_shape[a]) / stride[a] + 1;
  }
  return count;
}

PatchGrid make_patch_grid(const Shape& signal_shape, const Shape& patch_shape, const Shape& stride) {
  const std::size_t count = patch_count(signal_shape, patch_shape, stride);
  const std::size_t rank = signal_shape.size();
  Shape per_axis(rank);
  for (std::size_t a = 0; a < rank; ++a) per_axis[a] = (signal_shape[a] - patch_shape[a]) / stride[a] + 1;

  PatchGrid grid{signal_shape, patch_shape, stride, {}, std::nullopt};
  grid.origins.reserve(count);
  Shape idx(rank, 0);
  for (std::size_t p = 0; p < count; ++p) {
    Shape origin(rank);
    for (std::size_t a = 0; a < rank; ++a) origin[a] = idx[a] * stride[a];
    grid.origins.push_back(std::move(origin));
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < per_axis[a]) break;
      idx[a] = 0;
    }
  }
  return grid;
}

std::vector<std::size_t> patch_offsets(const Shape& signal_shape, const Shape& patch_shape,
                                       const Shape& origin) {
  const std::size_t rank = signal_shape.size();
  const std::size_t n = shape_product(patch_shape);
  std::vector<std::size_t> offsets(n);
  Shape idx(rank, 0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t off = 0;
    for (std::size_t a = 0; a < rank; ++a) off = off * signal_shape[a] + origin[a] + idx[a];
    offsets[c] = off;
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < patch_shape[a]) break;
      idx[a] = 0;
    }
  }
  return offsets;
}

PatchSet extract_patches(const Tensor& signal, const Shape& patch_shape, const Shape& stride,
                         bool remove_dc) {
  PatchSet out{Eigen::MatrixXd(), make_patch_grid(signal.shape(), patch_shape, stride)};
  const std::size_t n = out.grid.patch_size();
  const std::size_t count = out.grid.count();
  out.columns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));

  // Offsets relative to the first patch; each origin adds a flat shift.
  const Shape zero(signal.rank(), 0);
  const std::vector<std::size_t> rel = patch_offsets(signal.shape(), patch_shape, zero);
  std::vector<double> dc;
  if (remove_dc) dc.resize(count);
  const auto data = signal.data();
  for (std::size_t p = 0; p < count; ++p) {
    const std::size_t base = signal.offset(out.grid.origins[p]);
    auto col = out.columns.col(static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < n; ++c) col[static_cast<Eigen::Index>(c)] = data[base + rel[c]];
    if (remove_dc) {
      dc[p] = col.mean();
      col.array() -= dc[p];
    }
  }
  if (remove_dc) out.grid.dc_values = std::move(dc);
  return out;
}

Aggregate aggregate_patches(const Eigen::MatrixXd& columns, const PatchGrid& grid, bool add_dc) {
  const std::size_t n = grid.patch_size();
  if (static_cast<std::size_t>(columns.rows()) != n ||
      static_cast<std::size_t>(columns.cols()) != grid.count()) {
    throw DimensionError("aggregate: patch matrix is " + std::to_string(columns.rows()) + " x " +
                         std::to_string(columns.cols()) + ", grid expects " + std::to_string(n) +
                         " x " + std::to_string(grid.count()));
  }
  if (add_dc && (!grid.dc_values || grid.dc_values->size() != grid.count())) {
    throw DimensionError("aggregate: grid carries no DC values");
  }
  Tensor sum(grid.signal_shape);
  std::vector<double> weight(sum.size(), 0.0);
  const Shape zero(grid.signal_shape.size(), 0);
  const std::vector<std::size_t> rel = patch_offsets(grid.signal_shape, grid.patch_shape, zero);
  for (std::size_t p = 0; p < grid.count(); ++p) {
    const std::size_t base = sum.offset(grid.origins[p]);
    const double dc = add_dc ? (*grid.dc_values)[p] : 0.0;
    const auto col = columns.col(static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < n; ++c) {
      sum[base + rel[c]] += col[static_cast<Eigen::Index>(c)] + dc;
      weight[base + rel[c]] += 1.0;
    }
  }
  Aggregate out{std::move(sum), 0};
  for (std::size_t i = 0; i < weight.size(); ++i) {
    if (weight[i] > 0.0) {
      out.signal[i] /= weight[i];
    } else {
      ++out.uncovered_cells;
    }
  }
  return out;
}

}  // namespace crossdict
