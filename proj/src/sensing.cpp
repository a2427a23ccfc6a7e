#include "crossdict/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace crossdict {

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::identity:
      return "identity";
    case OperatorKind::mask:
      return "mask";
    case OperatorKind::channel_mosaic:
      return "channel-mosaic";
    case OperatorKind::temporal_code:
      return "temporal-code";
    case OperatorKind::angular_sample:
      return "angular-sample";
    case OperatorKind::dense:
      return "dense";
  }
  return "unknown";
}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim_) {
    throw DimensionError(std::string(to_string(kind())) + " apply: expected length " +
                         std::to_string(input_dim_) + ", got " + std::to_string(x.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(output_dim_));
  apply_into(x, out);
  return out;
}

Eigen::VectorXd LinearOperator::adjoint(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != output_dim_) {
    throw DimensionError(std::string(to_string(kind())) + " adjoint: expected length " +
                         std::to_string(output_dim_) + ", got " + std::to_string(y.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(input_dim_));
  adjoint_into(y, out);
  return out;
}

namespace {

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(std::size_t n) : LinearOperator(n, n) {}
  OperatorKind kind() const override { return OperatorKind::identity; }
  void apply_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                  Eigen::Ref<Eigen::VectorXd> out) const override {
    out = x;
  }
  void adjoint_into(const Eigen::Ref<const Eigen::VectorXd>& y,
                    Eigen::Ref<Eigen::VectorXd> out) const override {
    out = y;
  }
  std::size_t application_cost() const override { return input_dim(); }
};

// Gathers selected input coordinates; adjoint scatters them back.
class SelectionOperator : public LinearOperator {
 public:
  SelectionOperator(std::size_t n, std::vector<std::size_t> picks)
      : LinearOperator(n, picks.size()), picks_(std::move(picks)) {}
  void apply_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                  Eigen::Ref<Eigen::VectorXd> out) const override {
    for (std::size_t m = 0; m < picks_.size(); ++m) {
      out[static_cast<Eigen::Index>(m)] = x[static_cast<Eigen::Index>(picks_[m])];
    }
  }
  void adjoint_into(const Eigen::Ref<const Eigen::VectorXd>& y,
                    Eigen::Ref<Eigen::VectorXd> out) const override {
    out.setZero();
    for (std::size_t m = 0; m < picks_.size(); ++m) {
      out[static_cast<Eigen::Index>(picks_[m])] += y[static_cast<Eigen::Index>(m)];
    }
  }
  std::size_t application_cost() const override { return picks_.size(); }

 private:
  std::vector<std::size_t> picks_;  // 0-based input coordinate per output
};

class MaskOperator final : public SelectionOperator {
 public:
  using SelectionOperator::SelectionOperator;
  OperatorKind kind() const override { return OperatorKind::mask; }
};

class MosaicOperator final : public SelectionOperator {
 public:
  using SelectionOperator::SelectionOperator;
  OperatorKind kind() const override { return OperatorKind::channel_mosaic; }
};

class AngularOperator final : public SelectionOperator {
 public:
  using SelectionOperator::SelectionOperator;
  OperatorKind kind() const override { return OperatorKind::angular_sample; }
};

class TemporalCodeOperator final : public LinearOperator {
 public:
  TemporalCodeOperator(std::size_t pixels, std::size_t frames, std::vector<std::uint8_t> code)
      : LinearOperator(pixels * frames, pixels), frames_(frames), code_(std::move(code)) {}
  OperatorKind kind() const override { return OperatorKind::temporal_code; }
  void apply_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                  Eigen::Ref<Eigen::VectorXd> out) const override {
    const std::size_t pixels = output_dim();
    for (std::size_t p = 0; p < pixels; ++p) {
      double s = 0.0;
      for (std::size_t f = 0; f < frames_; ++f) {
        if (code_[p * frames_ + f]) s += x[static_cast<Eigen::Index>(p * frames_ + f)];
      }
      out[static_cast<Eigen::Index>(p)] = s;
    }
  }
  void adjoint_into(const Eigen::Ref<const Eigen::VectorXd>& y,
                    Eigen::Ref<Eigen::VectorXd> out) const override {
    const std::size_t pixels = output_dim();
    for (std::size_t p = 0; p < pixels; ++p) {
      for (std::size_t f = 0; f < frames_; ++f) {
        out[static_cast<Eigen::Index>(p * frames_ + f)] =
            code_[p * frames_ + f] ? y[static_cast<Eigen::Index>(p)] : 0.0;
      }
    }
  }
  std::size_t application_cost() const override { return input_dim(); }

 private:
  std::size_t frames_;
  std::vector<std::uint8_t> code_;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd m)
      : LinearOperator(static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.rows())),
        m_(std::move(m)) {}
  OperatorKind kind() const override { return OperatorKind::dense; }
  void apply_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                  Eigen::Ref<Eigen::VectorXd> out) const override {
    out.noalias() = m_ * x;
  }
  void adjoint_into(const Eigen::Ref<const Eigen::VectorXd>& y,
                    Eigen::Ref<Eigen::VectorXd> out) const override {
    out.noalias() = m_.transpose() * y;
  }
  std::size_t application_cost() const override { return input_dim() * output_dim(); }

 private:
  Eigen::MatrixXd m_;
};

}  // namespace

OperatorPtr make_identity(std::size_t n) {
  if (n == 0) throw ConfigError("identity operator needs a positive dimension");
  return std::make_shared<IdentityOperator>(n);
}

OperatorPtr make_mask(std::size_t n, const std::vector<std::size_t>& known_indices) {
  if (known_indices.empty()) throw ConfigError("mask: at least one known index is required");
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> picks;
  picks.reserve(known_indices.size());
  for (std::size_t idx : known_indices) {
    if (idx < 1 || idx > n) {
      throw ConfigError("mask: index " + std::to_string(idx) + " outside [1, " +
                        std::to_string(n) + "]");
    }
    if (seen[idx - 1]) throw ConfigError("mask: duplicate index " + std::to_string(idx));
    seen[idx - 1] = true;
    picks.push_back(idx - 1);
  }
  return std::make_shared<MaskOperator>(n, std::move(picks));
}

OperatorPtr make_channel_mosaic(std::size_t spatial_extent, std::size_t channels,
                                const std::vector<std::uint32_t>& assignment) {
  if (spatial_extent == 0 || channels == 0) throw ConfigError("mosaic: empty geometry");
  if (assignment.size() != spatial_extent) {
    throw DimensionError("mosaic: assignment length " + std::to_string(assignment.size()) +
                      " does not match spatial extent " + std::to_string(spatial_extent));
  }
  std::vector<std::size_t> picks(spatial_extent);
  for (std::size_t p = 0; p < spatial_extent; ++p) {
    const std::uint32_t c = assignment[p];
    if (c < 1 || c > channels) {
      throw ConfigError("mosaic: pixel " + std::to_string(p + 1) + " assigned channel " +
                        std::to_string(c) + " outside [1, " + std::to_string(channels) + "]");
    }
    picks[p] = p * channels + (c - 1);
  }
  return std::make_shared<MosaicOperator>(spatial_extent * channels, std::move(picks));
}

OperatorPtr make_temporal_code(std::size_t spatial_extent, std::size_t frames,
                               const std::vector<std::uint8_t>& code) {
  if (spatial_extent == 0 || frames == 0) throw ConfigError("temporal code: empty geometry");
  if (code.size() != spatial_extent * frames) {
    throw DimensionError("temporal code: expected " + std::to_string(spatial_extent * frames) +
                      " entries, got " + std::to_string(code.size()));
  }
  for (std::size_t p = 0; p < spatial_extent; ++p) {
    bool active = false;
    for (std::size_t f = 0; f < frames; ++f) {
      const std::uint8_t c = code[p * frames + f];
      if (c > 1) throw ConfigError("temporal code: entries must be 0 or 1");
      active = active || c == 1;
    }
    if (!active) {
      throw ConfigError("temporal code: pixel " + std::to_string(p + 1) + " is never exposed");
    }
  }
  return std::make_shared<TemporalCodeOperator>(spatial_extent, frames, code);
}

OperatorPtr make_angular_sample(std::size_t view_rows, std::size_t view_cols,
                                const std::vector<std::size_t>& kept_views,
                                std::size_t spatial_extent) {
  const std::size_t views = view_rows * view_cols;
  if (views == 0 || spatial_extent == 0) throw ConfigError("angular sample: empty geometry");
  if (kept_views.empty()) throw ConfigError("angular sample: at least one view must be kept");
  std::vector<bool> seen(views, false);
  for (std::size_t v : kept_views) {
    if (v < 1 || v > views) {
      throw ConfigError("angular sample: view " + std::to_string(v) + " outside [1, " +
                        std::to_string(views) + "]");
    }
    if (seen[v - 1]) throw ConfigError("angular sample: duplicate view " + std::to_string(v));
    seen[v - 1] = true;
  }
  std::vector<std::size_t> picks;
  picks.reserve(spatial_extent * kept_views.size());
  for (std::size_t p = 0; p < spatial_extent; ++p) {
    for (std::size_t v : kept_views) picks.push_back(p * views + (v - 1));
  }
  return std::make_shared<AngularOperator>(spatial_extent * views, std::move(picks));
}

OperatorPtr make_dense(Eigen::MatrixXd matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) throw ConfigError("dense operator is empty");
  return std::make_shared<DenseOperator>(std::move(matrix));
}

std::vector<std::uint32_t> bayer_rggb_assignment(std::size_t rows, std::size_t cols) {
  std::vector<std::uint32_t> a(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const bool odd_r = r % 2 == 1;
      const bool odd_c = c % 2 == 1;
      a[r * cols + c] = (!odd_r && !odd_c) ? 1u : (odd_r && odd_c) ? 3u : 2u;
    }
  }
  return a;
}

std::vector<std::uint32_t> random_channel_assignment(std::size_t spatial_extent,
                                                     std::size_t channels, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(1, static_cast<std::uint32_t>(channels));
  std::vector<std::uint32_t> a(spatial_extent);
  for (auto& v : a) v = pick(rng);
  return a;
}

std::vector<std::uint8_t> random_temporal_code(std::size_t spatial_extent, std::size_t frames,
                                               std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, frames - 1);
  std::vector<std::uint8_t> code(spatial_extent * frames, 0);
  for (std::size_t p = 0; p < spatial_extent; ++p) code[p * frames + pick(rng)] = 1;
  return code;
}

std::vector<std::uint8_t> random_mask(std::size_t n, double unknown_per_known,
                                      std::mt19937_64& rng) {
  if (n == 0 || unknown_per_known < 0.0) throw ConfigError("random mask: invalid parameters");
  const auto known = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(n) / (1.0 + unknown_per_known))),
      1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t i = 0; i < known; ++i) mask[order[i]] = 1;
  return mask;
}

Eigen::MatrixXd to_dense(const LinearOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.input_dim());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(op.output_dim()), n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply_into(e, m.col(j));
    e[j] = 0.0;
  }
  return m;
}

}  // namespace crossdict
