#include "crossdict/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace crossdict {

namespace {

struct Blob {
  bool disk;
  double r0, c0, r1, c1;  // bounding box (disk: centre r0,c0 radius r1)
  double level;
  double texture_amp, freq, angle;

  bool contains(double r, double c) const {
    if (disk) return (r - r0) * (r - r0) + (c - c0) * (c - c0) <= r1 * r1;
    return r >= r0 && r < r1 && c >= c0 && c < c1;
  }
  double value(double r, double c) const {
    const double phase = freq * (r * std::cos(angle) + c * std::sin(angle));
    return level + texture_amp * std::sin(phase);
  }
};

std::vector<Blob> random_blobs(std::size_t count, double rows, double cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Blob> blobs;
  for (std::size_t i = 0; i < count; ++i) {
    Blob b{};
    b.disk = u01(rng) < 0.5;
    const double size = (0.08 + 0.25 * u01(rng)) * std::min(rows, cols);
    b.r0 = u01(rng) * rows;
    b.c0 = u01(rng) * cols;
    if (b.disk) {
      b.r1 = size / 2;
    } else {
      b.r1 = b.r0 + size * (0.5 + u01(rng));
      b.c1 = b.c0 + size * (0.5 + u01(rng));
    }
    b.level = 0.1 + 0.8 * u01(rng);
    b.texture_amp = u01(rng) < 0.4 ? 0.05 + 0.1 * u01(rng) : 0.0;
    b.freq = 0.4 + 1.2 * u01(rng);
    b.angle = std::numbers::pi * u01(rng);
    blobs.push_back(b);
  }
  return blobs;
}

double paint(const std::vector<Blob>& blobs, double base, double r, double c) {
  double v = base;
  for (const auto& b : blobs) {
    if (b.contains(r, c)) v = b.value(r, c);
  }
  return v;
}

}  // namespace

Tensor synthetic_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double g0 = 0.3 + 0.3 * u01(rng);
  const double gr = 0.3 * (u01(rng) - 0.5);
  const double gc = 0.3 * (u01(rng) - 0.5);
  const auto blobs = random_blobs(12 + rows * cols / 2048, static_cast<double>(rows),
                                  static_cast<double>(cols), rng);
  Tensor img({rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double rr = static_cast<double>(r);
      const double cc = static_cast<double>(c);
      const double base = g0 + gr * rr / static_cast<double>(rows) + gc * cc / static_cast<double>(cols);
      img[r * cols + c] = std::clamp(paint(blobs, base, rr, cc), 0.0, 1.0);
    }
  }
  return img;
}

Tensor synthetic_video(std::size_t rows, std::size_t cols, std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Tensor background = synthetic_image(rows, cols, seed ^ 0x9e3779b97f4a7c15ULL);
  struct Mover {
    double r, c, size, vr, vc, level;
  };
  std::vector<Mover> movers(3);
  for (auto& m : movers) {
    m.size = 4.0 + 0.25 * u01(rng) * static_cast<double>(std::min(rows, cols));
    m.r = u01(rng) * static_cast<double>(rows);
    m.c = u01(rng) * static_cast<double>(cols);
    m.vr = std::round(4.0 * u01(rng) - 2.0);
    m.vc = std::round(4.0 * u01(rng) - 2.0);
    if (m.vr == 0.0 && m.vc == 0.0) m.vc = 1.0;
    m.level = u01(rng);
  }
  Tensor video({rows, cols, frames});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t f = 0; f < frames; ++f) {
        double v = background[r * cols + c];
        for (const auto& m : movers) {
          const double fr = m.r + m.vr * static_cast<double>(f);
          const double fc = m.c + m.vc * static_cast<double>(f);
          const double rr = static_cast<double>(r);
          const double cc = static_cast<double>(c);
          if (rr >= fr && rr < fr + m.size && cc >= fc && cc < fc + m.size) v = m.level;
        }
        video[(r * cols + c) * frames + f] = v;
      }
    }
  }
  return video;
}

Tensor synthetic_hyperspectral(std::size_t rows, std::size_t cols, std::size_t channels,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr std::size_t kMaterials = 4;
  std::vector<std::vector<double>> spectra(kMaterials, std::vector<double>(channels));
  for (auto& s : spectra) {
    const double centre = u01(rng) * static_cast<double>(channels);
    const double width = (0.15 + 0.35 * u01(rng)) * static_cast<double>(channels);
    const double floor = 0.1 + 0.2 * u01(rng);
    const double slope = 0.3 * (u01(rng) - 0.5);
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const double x = (static_cast<double>(ch) - centre) / width;
      const double t = static_cast<double>(ch) / static_cast<double>(std::max<std::size_t>(1, channels - 1));
      s[ch] = std::clamp(floor + slope * t + 0.6 * std::exp(-0.5 * x * x), 0.0, 1.0);
    }
  }
  // One abundance map per material, each a piecewise-smooth image.
  std::vector<Tensor> maps;
  for (std::size_t m = 0; m < kMaterials; ++m) maps.push_back(synthetic_image(rows, cols, seed * 31 + m + 1));
  Tensor cube({rows, cols, channels});
  for (std::size_t p = 0; p < rows * cols; ++p) {
    double total = 0.0;
    for (std::size_t m = 0; m < kMaterials; ++m) total += maps[m][p];
    for (std::size_t ch = 0; ch < channels; ++ch) {
      double v = 0.0;
      for (std::size_t m = 0; m < kMaterials; ++m) v += maps[m][p] * spectra[m][ch];
      cube[p * channels + ch] = v / total;
    }
  }
  return cube;
}

Tensor synthetic_lightfield(std::size_t rows, std::size_t cols, std::size_t view_rows,
                            std::size_t view_cols, std::uint64_t seed) {
  const std::size_t margin = std::max(view_rows, view_cols);
  const Tensor background = synthetic_image(rows, cols, seed);
  const Tensor foreground = synthetic_image(rows + 2 * margin, cols + 2 * margin, seed + 7919);
  std::mt19937_64 rng(seed + 17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double fr = (0.2 + 0.3 * u01(rng)) * static_cast<double>(rows);
  const double fc = (0.2 + 0.3 * u01(rng)) * static_cast<double>(cols);
  const double radius = (0.15 + 0.15 * u01(rng)) * static_cast<double>(std::min(rows, cols));
  const std::size_t fcols = cols + 2 * margin;

  Tensor lf({rows, cols, view_rows, view_cols});
  const auto half_r = static_cast<long>(view_rows / 2);
  const auto half_c = static_cast<long>(view_cols / 2);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t u = 0; u < view_rows; ++u) {
        for (std::size_t v = 0; v < view_cols; ++v) {
          const long du = static_cast<long>(u) - half_r;
          const long dv = static_cast<long>(v) - half_c;
          const double sr = static_cast<double>(r) + static_cast<double>(du);
          const double sc = static_cast<double>(c) + static_cast<double>(dv);
          double val = background[r * cols + c];
          if ((sr - fr) * (sr - fr) + (sc - fc) * (sc - fc) <= radius * radius) {
            const auto pr = static_cast<std::size_t>(static_cast<long>(r + margin) + du);
            const auto pc = static_cast<std::size_t>(static_cast<long>(c + margin) + dv);
            val = foreground[pr * fcols + pc];
          }
          lf[((r * cols + c) * view_rows + u) * view_cols + v] = val;
        }
      }
    }
  }
  return lf;
}

PlantedData planted_sparse_data(std::size_t n, std::size_t t, std::size_t k, std::size_t count,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  PlantedData out;
  out.dictionary.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (Eigen::Index j = 0; j < out.dictionary.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.dictionary.rows(); ++i) out.dictionary(i, j) = gauss(rng);
    out.dictionary.col(j).normalize();
  }
  out.samples = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  std::vector<std::size_t> atoms(t);
  std::iota(atoms.begin(), atoms.end(), 0);
  for (std::size_t s = 0; s < count; ++s) {
    std::shuffle(atoms.begin(), atoms.end(), rng);
    std::vector<CodeEntry> entries;
    for (std::size_t i = 0; i < k; ++i) entries.push_back({atoms[i] + 1, gauss(rng)});
    std::sort(entries.begin(), entries.end(),
              [](const CodeEntry& a, const CodeEntry& b) { return a.index < b.index; });
    SparseCode code(t, std::move(entries));
    out.samples.col(static_cast<Eigen::Index>(s)) = synthesize(out.dictionary, code);
    out.codes.push_back(std::move(code));
  }
  return out;
}

}  // namespace crossdict
