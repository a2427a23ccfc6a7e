#include "crossdict/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossdict {

void DenseColumns::correlate(const Eigen::VectorXd& residual, std::span<const ColumnRange> ranges,
                             double* out) const {
  for (const auto& range : ranges) {
    const auto len = static_cast<Eigen::Index>(range.size());
    Eigen::Map<Eigen::VectorXd> dst(out, len);
    dst.noalias() = m_->middleCols(static_cast<Eigen::Index>(range.begin), len).transpose() * residual;
    out += len;
  }
}

void DenseColumns::column(std::size_t j, Eigen::Ref<Eigen::VectorXd> out) const {
  out = m_->col(static_cast<Eigen::Index>(j));
}

std::vector<ColumnRange> support_to_ranges(const Support& support, std::size_t num_columns) {
  std::vector<ColumnRange> ranges;
  std::size_t prev = 0;
  for (std::size_t idx : support) {
    if (idx < 1 || idx > num_columns) {
      throw ConfigError("support index " + std::to_string(idx) + " outside [1, " +
                        std::to_string(num_columns) + "]");
    }
    if (idx <= prev) throw ConfigError("support indices must be strictly increasing");
    prev = idx;
    const std::size_t j = idx - 1;
    if (!ranges.empty() && ranges.back().end == j) {
      ranges.back().end = j + 1;
    } else {
      ranges.push_back({j, j + 1});
    }
  }
  return ranges;
}

namespace {

SparseCode make_code(std::size_t dim, const std::vector<std::size_t>& selected,
                     const Eigen::VectorXd& coefficients) {
  std::vector<CodeEntry> entries;
  entries.reserve(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    entries.push_back({selected[i] + 1, coefficients[static_cast<Eigen::Index>(i)]});
  }
  std::sort(entries.begin(), entries.end(),
            [](const CodeEntry& a, const CodeEntry& b) { return a.index < b.index; });
  return SparseCode(dim, std::move(entries));
}

}  // namespace

PursuitResult omp(const ColumnMap& columns, const Eigen::VectorXd& y, const PursuitConfig& config,
                  std::vector<PursuitStep>* trace) {
  const std::size_t n = columns.rows();
  const std::size_t t = columns.cols();
  if (static_cast<std::size_t>(y.size()) != n) {
    throw DimensionError("omp: signal length " + std::to_string(y.size()) +
                         " does not match column length " + std::to_string(n));
  }
  const std::size_t k_max = config.sparsity;
  if (k_max < 1 || k_max > std::min(n, t)) {
    throw ConfigError("omp: sparsity " + std::to_string(k_max) + " outside [1, min(N, T) = " +
                      std::to_string(std::min(n, t)) + "]");
  }
  std::vector<ColumnRange> ranges;
  if (config.allowed_support) {
    ranges = support_to_ranges(*config.allowed_support, t);
    if (!config.allowed_support->empty() && k_max > config.allowed_support->size()) {
      throw ConfigError("omp: sparsity exceeds the size of the allowed support");
    }
  } else {
    ranges.push_back({0, t});
  }

  const double y_norm = y.norm();
  const double tol = config.residual_tolerance.value_or(kDefaultRelativeTolerance * y_norm);

  PursuitResult result;
  result.code = SparseCode(t);
  result.residual_norm = y_norm;
  if (ranges.empty() || y_norm <= tol) return result;

  const auto n_i = static_cast<Eigen::Index>(n);
  const auto k_i = static_cast<Eigen::Index>(k_max);
  Eigen::MatrixXd selected_cols(n_i, k_i);
  Eigen::MatrixXd basis(n_i, k_i);
  Eigen::MatrixXd r_factor = Eigen::MatrixXd::Zero(k_i, k_i);
  Eigen::VectorXd projections(k_i);
  Eigen::VectorXd v(n_i);
  Eigen::VectorXd h(k_i);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd corr(static_cast<Eigen::Index>(t));
  std::vector<std::size_t> selected;
  selected.reserve(k_max);
  Eigen::Index rank = 0;
  double r_norm = y_norm;

  std::size_t candidates = 0;
  for (const auto& range : ranges) candidates += range.size();
  std::vector<std::size_t> taken_pos;
  taken_pos.reserve(k_max);

  for (std::size_t it = 0; it < k_max; ++it) {
    if (r_norm <= tol) break;
    const std::size_t count = candidates - taken_pos.size();
    if (count == 0) break;

    // Selected atoms are correlated along with the rest and masked out here.
    columns.correlate(residual, ranges, corr.data());
    for (std::size_t p : taken_pos) corr[static_cast<Eigen::Index>(p)] = std::nan("");
    result.atom_scan_count += count;

    std::size_t best_col = 0;
    std::size_t best_pos = 0;
    double best = -1.0;
    std::size_t pos = 0;
    for (const auto& range : ranges) {
      for (std::size_t j = range.begin; j < range.end; ++j, ++pos) {
        const double a = std::abs(corr[static_cast<Eigen::Index>(pos)]);
        if (a > best) {
          best = a;
          best_col = j;
          best_pos = pos;
        }
      }
    }
    taken_pos.push_back(best_pos);

    const auto k = static_cast<Eigen::Index>(selected.size());
    columns.column(best_col, selected_cols.col(k));
    selected.push_back(best_col);

    // Classical Gram-Schmidt with one reorthogonalization pass.
    v = selected_cols.col(k);
    for (int pass = 0; pass < 2 && rank > 0; ++pass) {
      for (Eigen::Index q = 0; q < rank; ++q) h[q] = basis.col(q).dot(v);
      for (Eigen::Index q = 0; q < rank; ++q) v -= h[q] * basis.col(q);
      r_factor.col(k).head(rank) += h.head(rank);
    }
    const double a_norm = selected_cols.col(k).norm();
    const double v_norm = v.norm();
    if (!(v_norm > 1e-10 * a_norm)) {
      result.rank_deficient = true;
    } else {
      basis.col(rank) = v / v_norm;
      r_factor(rank, k) = v_norm;
      const double c = basis.col(rank).dot(residual);
      residual.noalias() -= c * basis.col(rank);
      projections[rank] = c;
      ++rank;
    }
    r_norm = residual.norm();
    ++result.iterations;

    if (trace) {
      const double ortho =
          (selected_cols.leftCols(k + 1).transpose() * residual).cwiseAbs().maxCoeff();
      trace->push_back({best_col + 1, r_norm, ortho, count});
    }
  }

  const auto k = static_cast<Eigen::Index>(selected.size());
  Eigen::VectorXd coeffs;
  if (!result.rank_deficient) {
    coeffs = r_factor.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(projections.head(k));
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(selected_cols.leftCols(k));
    coeffs = cod.solve(y);
    residual = y - selected_cols.leftCols(k) * coeffs;
    r_norm = residual.norm();
  }
  result.residual_norm = r_norm;
  result.code = make_code(t, selected, coeffs);
  return result;
}

PursuitResult omp(const Dictionary& dictionary, const Eigen::VectorXd& y,
                  const PursuitConfig& config, std::vector<PursuitStep>* trace) {
  return omp(DenseColumns(dictionary), y, config, trace);
}

LeastSquaresResult least_squares_on_support(const ColumnMap& columns, const Eigen::VectorXd& y,
                                            const Support& support) {
  const std::size_t n = columns.rows();
  if (static_cast<std::size_t>(y.size()) != n) {
    throw DimensionError("least squares: signal length does not match column length");
  }
  if (support.empty()) throw ConfigError("least squares: support must be non-empty");
  support_to_ranges(support, columns.cols());  // validates

  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    columns.column(support[i] - 1, a.col(static_cast<Eigen::Index>(i)));
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  LeastSquaresResult out;
  out.coefficients = cod.solve(y);
  out.residual_norm = (y - a * out.coefficients).norm();
  out.rank_deficient = cod.rank() < a.cols();
  return out;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

}  // namespace

PursuitResult brute_force_best_k(const ColumnMap& columns, const Eigen::VectorXd& y, std::size_t k) {
  const std::size_t n = columns.rows();
  const std::size_t t = columns.cols();
  if (static_cast<std::size_t>(y.size()) != n) {
    throw DimensionError("brute force: signal length does not match column length");
  }
  if (k < 1 || k > t) throw ConfigError("brute force: k must lie in [1, T]");
  if (binomial(t, k) > kBruteForceBudget) {
    throw ConfigError("brute force: C(" + std::to_string(t) + ", " + std::to_string(k) +
                      ") exceeds the enumeration budget");
  }

  Eigen::MatrixXd all(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t j = 0; j < t; ++j) columns.column(j, all.col(static_cast<Eigen::Index>(j)));

  const double y_norm = y.norm();
  const double margin = 1e-12 * std::max(1.0, y_norm);
  double best_res = y_norm;
  std::vector<std::size_t> best_support;
  Eigen::VectorXd best_coeffs;
  bool best_deficient = false;
  std::size_t evaluated = 0;

  std::vector<std::size_t> comb;
  for (std::size_t size = 1; size <= k; ++size) {
    comb.resize(size);
    for (std::size_t i = 0; i < size; ++i) comb[i] = i;
    while (true) {
      Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(size));
      for (std::size_t i = 0; i < size; ++i) {
        a.col(static_cast<Eigen::Index>(i)) = all.col(static_cast<Eigen::Index>(comb[i]));
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
      Eigen::VectorXd c = cod.solve(y);
      const double res = (y - a * c).norm();
      ++evaluated;
      if (res < best_res - margin) {
        best_res = res;
        best_support = comb;
        best_coeffs = c;
        best_deficient = cod.rank() < a.cols();
      }
      // Next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && comb[i - 1] == t - size + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
  }

  PursuitResult result;
  result.residual_norm = best_res;
  result.iterations = best_support.size();
  result.atom_scan_count = evaluated;
  result.rank_deficient = best_deficient;
  result.code = best_support.empty() ? SparseCode(t) : make_code(t, best_support, best_coeffs);
  return result;
}

}  // namespace crossdict
