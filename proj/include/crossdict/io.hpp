#pragma once

#include <iosfwd>
#include <string>

#include "crossdict/tensor.hpp"

namespace crossdict {

// ".ten" layout: "TENS", u32 version = 1, u32 rank, rank x u32 extents,
// then row-major float64 data. All integers and floats little-endian.
void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);
void save_tensor(const std::string& path, const Tensor& t);
Tensor load_tensor(const std::string& path);

/// 8-bit binary PGM (P5) -> (rows, cols); PPM (P6) -> (rows, cols, 3).
/// Samples are mapped linearly to [0, 1].
Tensor load_netpbm(const std::string& path);
/// Inverse of load_netpbm; values are clamped to [0, 1] and rounded.
void save_netpbm(const std::string& path, const Tensor& image);

/// Dispatches on extension: .pgm/.ppm via netpbm, anything else as ".ten".
Tensor load_signal(const std::string& path);
void save_signal(const std::string& path, const Tensor& t);

}  // namespace crossdict
