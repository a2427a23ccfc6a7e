#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "crossdict/errors.hpp"

namespace crossdict {

using Shape = std::vector<std::size_t>;

std::size_t shape_product(const Shape& shape);

/// Dense row-major real array of rank 1 to 4.
///
/// Axis order per domain: images (row, col[, channel]), video (row, col,
/// frame), hyperspectral (row, col, channel), light field (row, col,
/// view-row, view-col).
class Tensor {
 public:
  /// Zero-filled tensor.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  /// Row-major offset of a multi-index; throws DimensionError when out of range.
  std::size_t offset(std::span<const std::size_t> index) const;
  double at(std::initializer_list<std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index);

  Eigen::Map<const Eigen::VectorXd> vec() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }
  Eigen::Map<Eigen::VectorXd> vec() {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  Tensor reshaped(Shape shape) const;

  static Tensor from_vector(const Eigen::VectorXd& v);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// N x T matrix of unit-norm atoms.
class Dictionary {
 public:
  static constexpr double kUnitTolerance = 1e-9;

  /// Throws DegenerateError unless every column has unit norm within 1e-9.
  explicit Dictionary(Eigen::MatrixXd atoms);

  std::size_t atom_dim() const { return static_cast<std::size_t>(atoms_.rows()); }
  std::size_t num_atoms() const { return static_cast<std::size_t>(atoms_.cols()); }
  const Eigen::MatrixXd& atoms() const { return atoms_; }
  /// 1-based atom access.
  Eigen::MatrixXd::ConstColXpr atom(std::size_t index) const;

 private:
  Eigen::MatrixXd atoms_;
};

struct CodeEntry {
  std::size_t index;  // 1-based
  double value;
  friend bool operator==(const CodeEntry&, const CodeEntry&) = default;
};

/// Sparse vector of length dim with 1-based, strictly increasing indices.
class SparseCode {
 public:
  SparseCode() = default;
  explicit SparseCode(std::size_t dim, std::vector<CodeEntry> entries = {});

  std::size_t dim() const { return dim_; }
  const std::vector<CodeEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Sorted 1-based indices.
  std::vector<std::size_t> support() const;
  Eigen::VectorXd dense() const;

  /// Keeps entries with |value| > tolerance.
  static SparseCode from_dense(const Eigen::VectorXd& v, double tolerance = 0.0);

  friend bool operator==(const SparseCode&, const SparseCode&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<CodeEntry> entries_;
};

inline constexpr double kSnrCapDb = 300.0;

/// Recovered SNR in dB, 20 log10(|x| / |x - xhat|), capped at +300 dB.
double snr(const Tensor& reference, const Tensor& estimate);
double snr(std::span<const double> reference, std::span<const double> estimate);

/// Divides each column by its norm. Throws DegenerateError naming the
/// first zero column (1-based).
Dictionary normalize_atoms(const Eigen::MatrixXd& matrix);

/// Sum of value * atom over the code entries, as a rank-1 tensor.
Tensor reconstruct(const Dictionary& dictionary, const SparseCode& code);

/// Same as reconstruct() but into an Eigen vector.
Eigen::VectorXd synthesize(const Eigen::MatrixXd& atoms, const SparseCode& code);

}  // namespace crossdict
