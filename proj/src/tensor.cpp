#include "crossdict/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace crossdict {

std::size_t shape_product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw DimensionError("tensor rank must be between 1 and 4, got " +
                         std::to_string(shape.size()));
  }
  for (std::size_t e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive");
  }
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_product(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape product " +
                         std::to_string(shape_product(shape_)));
  }
}

std::size_t Tensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index rank does not match tensor rank");
  }
  std::size_t off = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (index[a] >= shape_[a]) throw DimensionError("tensor index out of range");
    off = off * shape_[a] + index[a];
  }
  return off;
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(std::span(index.begin(), index.size()))];
}

double& Tensor::at(std::initializer_list<std::size_t> index) {
  return data_[offset(std::span(index.begin(), index.size()))];
}

Tensor Tensor::reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

Tensor Tensor::from_vector(const Eigen::VectorXd& v) {
  return Tensor({static_cast<std::size_t>(v.size())},
                std::vector<double>(v.data(), v.data() + v.size()));
}

Dictionary::Dictionary(Eigen::MatrixXd atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1) {
    throw DimensionError("dictionary needs at least one row and one atom");
  }
  for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
    const double n = atoms_.col(j).norm();
    if (!(std::abs(n - 1.0) <= kUnitTolerance)) {
      throw DegenerateError("atom " + std::to_string(j + 1) +
                            " is not unit norm (norm " + std::to_string(n) + ")");
    }
  }
}

Eigen::MatrixXd::ConstColXpr Dictionary::atom(std::size_t index) const {
  if (index < 1 || index > num_atoms()) {
    throw DomainError("atom index " + std::to_string(index) + " out of range");
  }
  return atoms_.col(static_cast<Eigen::Index>(index - 1));
}

SparseCode::SparseCode(std::size_t dim, std::vector<CodeEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  std::size_t prev = 0;
  for (const auto& e : entries_) {
    if (e.index < 1 || e.index > dim_) {
      throw DomainError("code index " + std::to_string(e.index) +
                        " outside [1, " + std::to_string(dim_) + "]");
    }
    if (e.index <= prev) throw DomainError("code indices must be strictly increasing");
    prev = e.index;
  }
}

std::vector<std::size_t> SparseCode::support() const {
  std::vector<std::size_t> s;
  s.reserve(entries_.size());
  for (const auto& e : entries_) s.push_back(e.index);
  return s;
}

Eigen::VectorXd SparseCode::dense() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& e : entries_) v[static_cast<Eigen::Index>(e.index - 1)] = e.value;
  return v;
}

SparseCode SparseCode::from_dense(const Eigen::VectorXd& v, double tolerance) {
  std::vector<CodeEntry> entries;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > tolerance) entries.push_back({static_cast<std::size_t>(i + 1), v[i]});
  }
  return SparseCode(static_cast<std::size_t>(v.size()), std::move(entries));
}

double snr(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) {
    throw DimensionError("snr: reference and estimate lengths differ");
  }
  double ref2 = 0.0;
  double err2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref2 += reference[i] * reference[i];
    const double d = reference[i] - estimate[i];
    err2 += d * d;
  }
  if (ref2 == 0.0) throw DomainError("snr: reference is identically zero");
  if (err2 == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(ref2 / err2));
}

double snr(const Tensor& reference, const Tensor& estimate) {
  if (reference.shape() != estimate.shape()) {
    throw DimensionError("snr: reference and estimate shapes differ");
  }
  return snr(reference.data(), estimate.data());
}

Dictionary normalize_atoms(const Eigen::MatrixXd& matrix) {
  Eigen::MatrixXd atoms = matrix;
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    const double n = atoms.col(j).norm();
    if (n == 0.0 || !std::isfinite(n)) {
      throw DegenerateError("cannot normalize atom " + std::to_string(j + 1) +
                            ": zero or non-finite column");
    }
    atoms.col(j) /= n;
  }
  return Dictionary(std::move(atoms));
}

Eigen::VectorXd synthesize(const Eigen::MatrixXd& atoms, const SparseCode& code) {
  if (code.dim() != static_cast<std::size_t>(atoms.cols())) {
    throw DimensionError("code dimension " + std::to_string(code.dim()) +
                         " does not match atom count " + std::to_string(atoms.cols()));
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(atoms.rows());
  for (const auto& e : code.entries()) {
    x.noalias() += e.value * atoms.col(static_cast<Eigen::Index>(e.index - 1));
  }
  return x;
}

Tensor reconstruct(const Dictionary& dictionary, const SparseCode& code) {
  return Tensor::from_vector(synthesize(dictionary.atoms(), code));
}

}  // namespace crossdict
