#include "crossdict/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include "crossdict/crossscale.hpp"
#include "crossdict/learn.hpp"
#include "crossdict/patchwork.hpp"
#include "parallel.hpp"

namespace crossdict {

const char* to_string(Method method) {
  switch (method) {
    case Method::omp_single: return "omp-single";
    case Method::zerotree: return "zerotree";
  }
  return "?";
}

const char* to_string(Application application) {
  switch (application) {
    case Application::denoise: return "denoise";
    case Application::inpaint: return "inpaint";
    case Application::demosaic: return "demosaic";
    case Application::video_cs: return "video-cs";
    case Application::lightfield_cs: return "lf-cs";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "omp" || text == "omp-single") return Method::omp_single;
  if (text == "zerotree") return Method::zerotree;
  return std::nullopt;
}

std::optional<Application> parse_application(std::string_view text) {
  for (Application a : {Application::denoise, Application::inpaint, Application::demosaic,
                        Application::video_cs, Application::lightfield_cs}) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

namespace {

std::string shape_text(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(s[i]);
  }
  return out;
}

void require_rank(const Shape& signal, std::size_t rank, const char* what) {
  if (signal.size() != rank) {
    throw DimensionError(std::string(what) + " needs a rank-" + std::to_string(rank) +
                         " signal, got " + shape_text(signal));
  }
}

}  // namespace

Shape measurement_shape(const Sensing& sensing, const Shape& signal_shape) {
  const std::size_t n = shape_product(signal_shape);
  return std::visit(
      [&](const auto& s) -> Shape {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IdentitySensing>) {
          return signal_shape;
        } else if constexpr (std::is_same_v<S, MaskSensing>) {
          if (s.mask.shape() != signal_shape) {
            throw DimensionError("mask shape " + shape_text(s.mask.shape()) +
                                 " does not match signal " + shape_text(signal_shape));
          }
          for (double v : s.mask.data()) {
            if (v != 0.0 && v != 1.0) throw ConfigError("mask entries must be 0 or 1");
          }
          return signal_shape;
        } else if constexpr (std::is_same_v<S, MosaicSensing>) {
          require_rank(signal_shape, 3, "channel mosaic");
          const std::size_t pixels = signal_shape[0] * signal_shape[1];
          if (s.assignment.size() != pixels) {
            throw DimensionError("channel assignment has " + std::to_string(s.assignment.size()) +
                                 " entries, signal has " + std::to_string(pixels) + " pixels");
          }
          for (auto a : s.assignment) {
            if (a < 1 || a > signal_shape[2]) {
              throw ConfigError("channel assignment value " + std::to_string(a) + " outside [1, " +
                                std::to_string(signal_shape[2]) + "]");
            }
          }
          return {signal_shape[0], signal_shape[1]};
        } else if constexpr (std::is_same_v<S, TemporalSensing>) {
          require_rank(signal_shape, 3, "temporal code");
          if (s.code.size() != n) {
            throw DimensionError("temporal code has " + std::to_string(s.code.size()) +
                                 " entries, signal has " + std::to_string(n));
          }
          const std::size_t frames = signal_shape[2];
          for (std::size_t p = 0; p < n / frames; ++p) {
            bool active = false;
            for (std::size_t f = 0; f < frames; ++f) {
              const auto c = s.code[p * frames + f];
              if (c > 1) throw ConfigError("temporal code entries must be 0 or 1");
              active = active || c == 1;
            }
            if (!active) {
              throw ConfigError("temporal code leaves pixel " + std::to_string(p + 1) +
                                " inactive in every frame");
            }
          }
          return {signal_shape[0], signal_shape[1]};
        } else {
          require_rank(signal_shape, 4, "angular sampling");
          const std::size_t views = signal_shape[2] * signal_shape[3];
          if (s.kept_views.empty()) throw ConfigError("angular sampling keeps no views");
          std::vector<bool> seen(views, false);
          for (std::size_t v : s.kept_views) {
            if (v < 1 || v > views) {
              throw ConfigError("kept view " + std::to_string(v) + " outside [1, " +
                                std::to_string(views) + "]");
            }
            if (seen[v - 1]) throw ConfigError("kept view " + std::to_string(v) + " listed twice");
            seen[v - 1] = true;
          }
          return {signal_shape[0], signal_shape[1], s.kept_views.size()};
        }
      },
      sensing);
}

Measurement measure(const Tensor& signal, Sensing sensing, std::optional<double> snr_db,
                    std::uint64_t seed) {
  const Shape& shape = signal.shape();
  Tensor y(measurement_shape(sensing, shape));
  std::vector<bool> valid(y.size(), true);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IdentitySensing>) {
          y = signal;
        } else if constexpr (std::is_same_v<S, MaskSensing>) {
          for (std::size_t i = 0; i < signal.size(); ++i) {
            valid[i] = s.mask[i] != 0.0;
            y[i] = valid[i] ? signal[i] : 0.0;
          }
        } else if constexpr (std::is_same_v<S, MosaicSensing>) {
          const std::size_t c = shape[2];
          for (std::size_t p = 0; p < s.assignment.size(); ++p) {
            y[p] = signal[p * c + s.assignment[p] - 1];
          }
        } else if constexpr (std::is_same_v<S, TemporalSensing>) {
          const std::size_t f = shape[2];
          for (std::size_t p = 0; p < y.size(); ++p) {
            double acc = 0.0;
            for (std::size_t t = 0; t < f; ++t) {
              if (s.code[p * f + t]) acc += signal[p * f + t];
            }
            y[p] = acc;
          }
        } else {
          const std::size_t views = shape[2] * shape[3];
          const std::size_t kept = s.kept_views.size();
          for (std::size_t p = 0; p < shape[0] * shape[1]; ++p) {
            for (std::size_t k = 0; k < kept; ++k) {
              y[p * kept + k] = signal[p * views + s.kept_views[k] - 1];
            }
          }
        }
      },
      sensing);

  if (snr_db) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<double> noise(y.size(), 0.0);
    double signal_energy = 0.0;
    double noise_energy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!valid[i]) continue;
      noise[i] = gauss(rng);
      signal_energy += y[i] * y[i];
      noise_energy += noise[i] * noise[i];
    }
    if (signal_energy == 0.0) throw DomainError("cannot set an SNR for an all-zero measurement");
    if (noise_energy > 0.0) {
      const double scale =
          std::sqrt(signal_energy / noise_energy) * std::pow(10.0, -*snr_db / 20.0);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * noise[i];
    }
  }
  return {std::move(y), shape, std::move(sensing), snr_db, seed};
}

Shape model_patch_shape(const Model& model) {
  if (const auto* s = std::get_if<SingleScaleModel>(&model)) return s->patch_shape;
  return std::get<CrossScaleModel>(model).scale().fine_shape();
}

namespace {

struct PatchProblem {
  OperatorPtr phi;  // null: identity
  Eigen::VectorXd y;
  Eigen::VectorXd dc_response;  // Phi 1
  bool flagged = false;
};

void check_geometry(const Measurement& m, const Shape& patch) {
  const Shape& sig = m.signal_shape;
  if (m.values.shape() != measurement_shape(m.sensing, sig)) {
    throw DimensionError("measurement shape " + shape_text(m.values.shape()) +
                         " does not match the sensing of a " + shape_text(sig) + " signal");
  }
  if (patch.size() != sig.size()) {
    throw DimensionError("model patch " + shape_text(patch) + " and signal " + shape_text(sig) +
                         " differ in rank");
  }
  for (std::size_t a = 0; a < sig.size(); ++a) {
    if (patch[a] > sig[a]) {
      throw DimensionError("model patch " + shape_text(patch) + " exceeds signal " + shape_text(sig));
    }
  }
  const bool full_trailing = std::holds_alternative<MosaicSensing>(m.sensing) ||
                             std::holds_alternative<TemporalSensing>(m.sensing) ||
                             std::holds_alternative<AngularSensing>(m.sensing);
  if (full_trailing) {
    for (std::size_t a = 2; a < sig.size(); ++a) {
      if (patch[a] != sig[a]) {
        throw DimensionError("model patch " + shape_text(patch) + " must span every channel, frame " +
                             "or view of the " + shape_text(sig) + " signal");
      }
    }
  }
}

std::vector<PatchProblem> slice_problems(const Measurement& m, const PatchGrid& grid) {
  const Shape& sig = m.signal_shape;
  const Shape& patch = grid.patch_shape;
  const std::size_t n = grid.patch_size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  std::vector<PatchProblem> out(grid.count());

  OperatorPtr shared_angular;
  if (const auto* a = std::get_if<AngularSensing>(&m.sensing)) {
    shared_angular = make_angular_sample(sig[2], sig[3], a->kept_views, patch[0] * patch[1]);
  }

  for (std::size_t p = 0; p < grid.count(); ++p) {
    PatchProblem& prob = out[p];
    const Shape& origin = grid.origins[p];
    // Pixel offsets (row, col) of the patch within the spatial plane.
    std::vector<std::size_t> pixels;
    if (sig.size() >= 3) {
      pixels.reserve(patch[0] * patch[1]);
      for (std::size_t r = 0; r < patch[0]; ++r) {
        for (std::size_t c = 0; c < patch[1]; ++c) {
          pixels.push_back((origin[0] + r) * sig[1] + origin[1] + c);
        }
      }
    }
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, IdentitySensing>) {
            const auto offs = patch_offsets(sig, patch, origin);
            prob.y.resize(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) prob.y[static_cast<Eigen::Index>(i)] = m.values[offs[i]];
          } else if constexpr (std::is_same_v<S, MaskSensing>) {
            const auto offs = patch_offsets(sig, patch, origin);
            std::vector<std::size_t> known;
            for (std::size_t i = 0; i < n; ++i) {
              if (s.mask[offs[i]] != 0.0) known.push_back(i + 1);
            }
            prob.y.resize(static_cast<Eigen::Index>(known.size()));
            for (std::size_t i = 0; i < known.size(); ++i) {
              prob.y[static_cast<Eigen::Index>(i)] = m.values[offs[known[i] - 1]];
            }
            if (known.empty()) {
              prob.flagged = true;
            } else if (known.size() < n) {
              prob.phi = make_mask(n, known);
            }
          } else if constexpr (std::is_same_v<S, MosaicSensing>) {
            std::vector<std::uint32_t> assign(pixels.size());
            prob.y.resize(static_cast<Eigen::Index>(pixels.size()));
            for (std::size_t i = 0; i < pixels.size(); ++i) {
              assign[i] = s.assignment[pixels[i]];
              prob.y[static_cast<Eigen::Index>(i)] = m.values[pixels[i]];
            }
            prob.phi = make_channel_mosaic(pixels.size(), sig[2], assign);
          } else if constexpr (std::is_same_v<S, TemporalSensing>) {
            const std::size_t f = sig[2];
            std::vector<std::uint8_t> code(pixels.size() * f);
            prob.y.resize(static_cast<Eigen::Index>(pixels.size()));
            for (std::size_t i = 0; i < pixels.size(); ++i) {
              for (std::size_t t = 0; t < f; ++t) code[i * f + t] = s.code[pixels[i] * f + t];
              prob.y[static_cast<Eigen::Index>(i)] = m.values[pixels[i]];
            }
            prob.phi = make_temporal_code(pixels.size(), f, code);
          } else {
            const std::size_t kept = s.kept_views.size();
            prob.y.resize(static_cast<Eigen::Index>(pixels.size() * kept));
            for (std::size_t i = 0; i < pixels.size(); ++i) {
              for (std::size_t k = 0; k < kept; ++k) {
                prob.y[static_cast<Eigen::Index>(i * kept + k)] = m.values[pixels[i] * kept + k];
              }
            }
            prob.phi = shared_angular;
          }
        },
        m.sensing);
    prob.dc_response = prob.phi ? prob.phi->apply(ones) : ones;
  }
  return out;
}

bool nested(const ZeroTreeResult& z, std::size_t q, std::size_t t_high) {
  const Support allowed = cross_scale_map(z.code_low.support(), q, t_high);
  for (std::size_t idx : z.code_high.support()) {
    if (!std::binary_search(allowed.begin(), allowed.end(), idx)) return false;
  }
  return true;
}

}  // namespace

Recovery recover(const Measurement& measurement, const PipelineConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto setup_start = Clock::now();

  const auto* single = std::get_if<SingleScaleModel>(&config.model);
  const auto* cross = std::get_if<CrossScaleModel>(&config.model);
  if (config.method == Method::zerotree && !cross) {
    throw ConfigError("method zerotree needs a two-scale model");
  }
  if (single) validate(*single);

  std::optional<CrossScaleModel> zt;
  const Dictionary* dict = nullptr;
  std::size_t k = 0;
  if (config.method == Method::zerotree) {
    zt = config.sparsity ? cross->with_sparsity(std::min(cross->k_low(), *config.sparsity), *config.sparsity)
                         : *cross;
  } else {
    dict = single ? single->dictionary.get() : &cross->d_high();
    k = config.sparsity.value_or(single ? single->sparsity : cross->k_high());
    if (k < 1) throw ConfigError("sparsity must be at least 1");
  }

  const Shape patch = model_patch_shape(config.model);
  check_geometry(measurement, patch);
  Shape stride = config.stride.empty() ? patch : config.stride;
  if (stride.size() != patch.size()) {
    throw DimensionError("stride " + shape_text(stride) + " and patch " + shape_text(patch) +
                         " differ in rank");
  }
  const PatchGrid grid = make_patch_grid(measurement.signal_shape, patch, stride);
  const std::vector<PatchProblem> problems = slice_problems(measurement, grid);
  const std::size_t n = grid.patch_size();
  const std::size_t count = grid.count();

  Recovery out;
  RecoveryMetrics& mx = out.metrics;
  mx.patches = count;
  mx.noise_snr_db = measurement.noise_snr_db;
  mx.noise_seed = measurement.noise_seed;
  mx.patch_time.assign(count, std::chrono::nanoseconds{0});
  mx.patch_residual.assign(count, 0.0);

  struct PatchStats {
    std::chrono::nanoseconds step1{0}, step2{0};
    std::size_t scans = 0, scans1 = 0, scans2 = 0;
    bool violation = false, unresolved = false, rank_deficient = false;
  };
  std::vector<PatchStats> stats(count);
  Eigen::MatrixXd columns(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  mx.setup_time = Clock::now() - setup_start;

  detail::parallel_for(count, config.threads, [&](std::size_t p) {
    const PatchProblem& prob = problems[p];
    auto col = columns.col(static_cast<Eigen::Index>(p));
    if (prob.flagged) {
      col = prob.phi ? prob.phi->adjoint(prob.y) : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      return;
    }
    double dc = 0.0;
    Eigen::VectorXd y = prob.y;
    if (config.remove_dc) {
      const double energy = prob.dc_response.squaredNorm();
      if (energy > 0.0) dc = prob.dc_response.dot(y) / energy;
      y -= dc * prob.dc_response;
    }
    PatchStats& st = stats[p];
    const auto t0 = Clock::now();
    if (zt) {
      ZeroTreeResult z = zero_tree_omp(*zt, prob.phi.get(), y);
      mx.patch_time[p] = Clock::now() - t0;
      st.step1 = z.step1_time;
      st.step2 = z.step2_time;
      st.scans1 = z.step1_scans;
      st.scans2 = z.step2_scans;
      st.scans = z.step1_scans + z.step2_scans;
      st.unresolved = z.unresolved;
      st.rank_deficient = z.rank_deficient;
      st.violation = !nested(z, zt->q(), zt->t_high());
      mx.patch_residual[p] = z.residual_norm;
      col = synthesize(zt->d_high().atoms(), z.code_high);
    } else {
      PursuitConfig cfg;
      cfg.sparsity = std::min({k, static_cast<std::size_t>(y.size()), dict->num_atoms()});
      PursuitResult r;
      if (prob.phi) {
        r = omp(ComposedColumns(prob.phi.get(), nullptr, dict->atoms()), y, cfg);
      } else {
        r = omp(DenseColumns(*dict), y, cfg);
      }
      mx.patch_time[p] = Clock::now() - t0;
      st.scans = r.atom_scan_count;
      st.rank_deficient = r.rank_deficient;
      mx.patch_residual[p] = r.residual_norm;
      col = synthesize(dict->atoms(), r.code);
    }
    col.array() += dc;
  });

  const auto agg_start = Clock::now();
  for (std::size_t p = 0; p < count; ++p) {
    const PatchStats& st = stats[p];
    mx.flagged_patches += problems[p].flagged ? 1 : 0;
    mx.nesting_violations += st.violation ? 1 : 0;
    mx.unresolved_patches += st.unresolved ? 1 : 0;
    mx.rank_deficient_patches += st.rank_deficient ? 1 : 0;
    mx.atom_scans += st.scans;
    mx.step1_scans += st.scans1;
    mx.step2_scans += st.scans2;
    mx.coding_time += mx.patch_time[p];
    mx.step1_time += st.step1;
    mx.step2_time += st.step2;
    mx.mean_residual += mx.patch_residual[p];
    mx.max_residual = std::max(mx.max_residual, mx.patch_residual[p]);
  }
  if (count) mx.mean_residual /= static_cast<double>(count);
  Aggregate agg = aggregate_patches(columns, grid, false);
  out.estimate = std::move(agg.signal);
  mx.uncovered_cells = agg.uncovered_cells;
  mx.aggregation_time = Clock::now() - agg_start;
  return out;
}

Eigen::MatrixXd training_patches(const std::vector<Tensor>& signals, const Shape& patch_shape,
                                 const Shape& stride, bool remove_dc, std::size_t max_columns,
                                 std::uint64_t seed) {
  if (signals.empty()) throw ConfigError("no training signals");
  const Shape step = stride.empty() ? Shape(patch_shape.size(), 1) : stride;
  std::vector<Eigen::MatrixXd> parts;
  Eigen::Index total = 0;
  for (const Tensor& s : signals) {
    PatchSet set = extract_patches(s, patch_shape, step, remove_dc);
    total += set.columns.cols();
    parts.push_back(std::move(set.columns));
  }
  Eigen::MatrixXd all(static_cast<Eigen::Index>(shape_product(patch_shape)), total);
  Eigen::Index at = 0;
  for (const auto& m : parts) {
    all.middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  if (max_columns == 0 || static_cast<std::size_t>(total) <= max_columns) return all;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(max_columns);
  std::sort(order.begin(), order.end());
  Eigen::MatrixXd picked(all.rows(), static_cast<Eigen::Index>(max_columns));
  for (std::size_t j = 0; j < max_columns; ++j) picked.col(static_cast<Eigen::Index>(j)) = all.col(order[j]);
  return picked;
}

namespace {

Shape default_factors(Application app, const Shape& patch) {
  switch (patch.size()) {
    case 2: return default_scale_factors(SignalDomain::image);
    case 3:
      if (app == Application::demosaic) {
        return patch[2] % 4 == 0 ? default_scale_factors(SignalDomain::hyperspectral) : Shape{2, 2, 1};
      }
      return default_scale_factors(SignalDomain::video);
    case 4: return default_scale_factors(SignalDomain::lightfield);
    default: throw DimensionError("patch rank must be 2 to 4");
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Timed {
  double time_ms;
  double snr_db;
};

std::vector<Timed> time_recovery(const Tensor& truth, const Measurement& m,
                                 std::vector<PipelineConfig> cfgs, std::size_t reps) {
  std::vector<std::vector<double>> times(cfgs.size());
  std::vector<Timed> out(cfgs.size());
  for (auto& cfg : cfgs) cfg.threads = 1;
  for (std::size_t r = 0; r < std::max<std::size_t>(reps, 1); ++r) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      Recovery rec = recover(m, cfgs[i]);
      if (rec.metrics.nesting_violations != 0) {
        throw std::logic_error("benchmark: zero-tree support nesting violated");
      }
      times[i].push_back(std::chrono::duration<double, std::milli>(rec.metrics.coding_time).count());
      out[i].snr_db = snr(truth, rec.estimate);
    }
  }
  for (std::size_t i = 0; i < cfgs.size(); ++i) out[i].time_ms = median(std::move(times[i]));
  return out;
}

std::string config_text(const SweepConfig& c) {
  std::string s = "(t_high=" + std::to_string(c.t_high) + ", k_high=" + std::to_string(c.k_high);
  if (c.t_low) s += ", t_low=" + std::to_string(*c.t_low) + ", k_low=" + std::to_string(c.k_low);
  return s + ")";
}

}  // namespace

std::vector<BenchmarkRow> benchmark_sweep(const BenchmarkDataset& dataset,
                                          const std::vector<SweepConfig>& sweep,
                                          const BenchmarkOptions& options,
                                          std::vector<TrainReport>* training_reports) {
  if (sweep.empty()) throw ConfigError("benchmark: empty sweep");
  if (dataset.training.empty()) throw ConfigError("benchmark: no training data");
  const Shape& patch = options.patch_shape;
  const std::size_t n = shape_product(patch);
  const Shape factors = options.scale_factors.empty() ? default_factors(options.application, patch)
                                                      : options.scale_factors;
  const Eigen::MatrixXd train =
      training_patches(dataset.training, patch, options.train_stride, options.remove_dc,
                       options.max_training_patches, options.seed);
  const Measurement m = measure(dataset.test, dataset.sensing, options.noise_snr_db, options.seed);

  std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Dictionary>> single_cache;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, CrossScaleModel> cross_cache;

  std::vector<BenchmarkRow> rows;
  for (const SweepConfig& c : sweep) {
    try {
      auto key = std::make_pair(c.t_high, c.k_high);
      if (!single_cache.count(key)) {
        TrainConfig tc;
        tc.num_atoms = c.t_high;
        tc.sparsity = c.k_high;
        tc.iterations = options.train_iterations;
        tc.seed = options.seed;
        tc.threads = options.threads;
        TrainResult tr = ksvd(train, tc);
        if (training_reports) training_reports->push_back(tr.report);
        single_cache.emplace(key, std::make_shared<const Dictionary>(std::move(tr.dictionary)));
      }
      PipelineConfig pc;
      pc.method = Method::omp_single;
      pc.model = SingleScaleModel{single_cache.at(key), patch, c.k_high};
      pc.stride = options.stride;
      pc.remove_dc = options.remove_dc;
      BenchmarkRow row;
      row.application = options.application;
      row.method = Method::omp_single;
      row.n = n;
      row.t_high = c.t_high;
      row.t_low = c.t_high;
      row.k = c.k_high;
      row.speedup_measured = 1.0;
      row.speedup_predicted = predicted_speedup(static_cast<double>(c.t_high),
                                                static_cast<double>(c.t_high), 0.0, 1.0);
      if (!c.t_low) {
        const Timed base = time_recovery(dataset.test, m, {pc}, options.repetitions)[0];
        row.time_ms = base.time_ms;
        row.snr_db = base.snr_db;
        rows.push_back(row);
        continue;
      }

      auto ckey = std::make_tuple(*c.t_low, c.t_high, c.k_low, c.k_high);
      auto it = cross_cache.find(ckey);
      if (it == cross_cache.end()) {
        CrossScaleTrainConfig cc;
        cc.t_low = *c.t_low;
        cc.t_high = c.t_high;
        cc.k_low = c.k_low;
        cc.k_high = c.k_high;
        cc.iterations = options.train_iterations;
        cc.seed = options.seed;
        cc.threads = options.threads;
        CrossScaleTraining tr = train_cross_scale(train, ScaleSpec(patch, factors), cc);
        if (training_reports) {
          training_reports->push_back(tr.low_report);
          training_reports->push_back(tr.high_report);
        }
        it = cross_cache.emplace(ckey, std::move(tr.model)).first;
      }
      PipelineConfig zc = pc;
      zc.method = Method::zerotree;
      zc.model = it->second;
      const auto timed = time_recovery(dataset.test, m, {pc, zc}, options.repetitions);
      const Timed& base = timed[0];
      const Timed& zt = timed[1];
      row.time_ms = base.time_ms;
      row.snr_db = base.snr_db;

      const double measured = base.time_ms / zt.time_ms;
      const double predicted =
          predicted_speedup(static_cast<double>(c.t_high), static_cast<double>(*c.t_low),
                            static_cast<double>(c.k_low), static_cast<double>(it->second.q()));
      row.t_low = *c.t_low;
      row.speedup_measured = measured;
      row.speedup_predicted = predicted;
      rows.push_back(row);
      row.method = Method::zerotree;
      row.time_ms = zt.time_ms;
      row.snr_db = zt.snr_db;
      rows.push_back(row);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("benchmark config " + config_text(c) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("benchmark config " + config_text(c) + ": " + e.what());
    }
  }
  return rows;
}

void write_csv_header(std::ostream& out) { out << kBenchmarkCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const BenchmarkRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6g,%.4f,%.6g,%.6g", r.time_ms, r.snr_db, r.speedup_measured,
                r.speedup_predicted);
  out << to_string(r.application) << ',' << to_string(r.method) << ',' << r.n << ',' << r.t_high
      << ',' << r.t_low << ',' << r.k << ',' << buf << '\n';
}

}  // namespace crossdict
