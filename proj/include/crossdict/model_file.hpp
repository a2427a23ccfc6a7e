#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <variant>

#include "crossdict/crossscale.hpp"

namespace crossdict {

/// A plain dictionary with its patch geometry and sparsity budget.
struct SingleScaleModel {
  std::shared_ptr<const Dictionary> dictionary;
  Shape patch_shape;
  std::size_t sparsity = 0;
};

/// Throws DimensionError/ConfigError when the pieces disagree.
void validate(const SingleScaleModel& model);

using Model = std::variant<SingleScaleModel, CrossScaleModel>;

// ".csd" layout, little-endian:
//   "CSDM" | u32 version = 1 | u32 scale count (1 or 2)
//   per scale, coarse first: u32 rank | rank x u32 patch extents | u32 N |
//     u32 T | u32 K | u32 Q (0 on the finest scale) | N*T float64 atoms,
//     column-major
//   u32 CRC-32 of every preceding byte
void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace crossdict
