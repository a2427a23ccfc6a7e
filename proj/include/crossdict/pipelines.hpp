#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crossdict/learn.hpp"
#include "crossdict/model_file.hpp"
#include "crossdict/sensing.hpp"

namespace crossdict {

enum class Method { omp_single, zerotree };
enum class Application { denoise, inpaint, demosaic, video_cs, lightfield_cs };

const char* to_string(Method method);
const char* to_string(Application application);
/// Accepts "omp", "omp-single" and "zerotree".
std::optional<Method> parse_method(std::string_view text);
/// Accepts the CLI spellings: denoise, inpaint, demosaic, video-cs, lf-cs.
std::optional<Application> parse_application(std::string_view text);

// Whole-signal sensing architectures. Each one knows how to slice itself into
// a per-patch LinearOperator.

/// y = x.
struct IdentitySensing {};

/// Signal-shaped 0/1 tensor; y keeps the signal shape with unknown cells at 0.
struct MaskSensing {
  Tensor mask;
};

/// Signal (rows, cols, C); assignment[r * cols + c] in [1, C]. y is (rows, cols).
struct MosaicSensing {
  std::vector<std::uint32_t> assignment;
};

/// Signal (rows, cols, F); binary code laid out like the signal. y is (rows, cols).
struct TemporalSensing {
  std::vector<std::uint8_t> code;
};

/// Signal (rows, cols, view_rows, view_cols); kept views are 1-based linear
/// view indices. y is (rows, cols, |kept|).
struct AngularSensing {
  std::vector<std::size_t> kept_views;
};

using Sensing = std::variant<IdentitySensing, MaskSensing, MosaicSensing, TemporalSensing, AngularSensing>;

/// Measurement tensor shape for a signal shape; validates the sensing
/// description against it (DimensionError / ConfigError).
Shape measurement_shape(const Sensing& sensing, const Shape& signal_shape);

struct Measurement {
  Tensor values{Shape{1}};
  Shape signal_shape;
  Sensing sensing;
  std::optional<double> noise_snr_db;
  std::uint64_t noise_seed = 0;
};

/// Applies the sensing to a full signal and, when snr_db is given, adds
/// white Gaussian noise scaled so the measured entries sit exactly at that SNR.
Measurement measure(const Tensor& signal, Sensing sensing, std::optional<double> snr_db = std::nullopt,
                    std::uint64_t seed = 1);

Shape model_patch_shape(const Model& model);

struct PipelineConfig {
  Method method = Method::zerotree;
  Model model;
  /// Empty means the patch extents (no overlap).
  Shape stride;
  bool remove_dc = true;
  /// Replaces K (single scale) or K_high (zero tree).
  std::optional<std::size_t> sparsity;
  std::size_t threads = 1;
};

struct RecoveryMetrics {
  std::size_t patches = 0;
  /// Patches with no measurements; filled with the adjoint back-projection.
  std::size_t flagged_patches = 0;
  std::size_t nesting_violations = 0;
  std::size_t unresolved_patches = 0;
  std::size_t rank_deficient_patches = 0;
  std::size_t uncovered_cells = 0;
  std::size_t atom_scans = 0;
  std::size_t step1_scans = 0;
  std::size_t step2_scans = 0;
  std::chrono::nanoseconds setup_time{0};
  /// Sum of per-patch solve times; excludes slicing, I/O and aggregation.
  std::chrono::nanoseconds coding_time{0};
  std::chrono::nanoseconds step1_time{0};
  std::chrono::nanoseconds step2_time{0};
  std::chrono::nanoseconds aggregation_time{0};
  std::vector<std::chrono::nanoseconds> patch_time;
  std::vector<double> patch_residual;
  double mean_residual = 0.0;
  double max_residual = 0.0;
  std::optional<double> noise_snr_db;
  std::uint64_t noise_seed = 0;
};

struct Recovery {
  Tensor estimate{Shape{1}};
  RecoveryMetrics metrics;
};

/// Patch-wise recovery. Throws ConfigError when method and model disagree and
/// DimensionError when the model patch does not fit the sensing geometry.
Recovery recover(const Measurement& measurement, const PipelineConfig& config);

struct SweepConfig {
  /// Absent: single-scale only.
  std::optional<std::size_t> t_low;
  std::size_t t_high = 256;
  std::size_t k_low = 8;
  std::size_t k_high = 8;
};

struct BenchmarkDataset {
  std::vector<Tensor> training;
  Tensor test{Shape{1}};
  Sensing sensing;
};

struct BenchmarkOptions {
  Application application = Application::denoise;
  Shape patch_shape;
  /// Recovery stride; empty means patch extents.
  Shape stride;
  /// Training patch stride; empty means 1 on every axis.
  Shape train_stride;
  /// Empty means the default factors for the patch rank.
  Shape scale_factors;
  std::optional<double> noise_snr_db;
  std::uint64_t seed = 1;
  std::size_t train_iterations = 10;
  std::size_t max_training_patches = 20000;
  std::size_t repetitions = 5;
  bool remove_dc = true;
  /// Training workers; coding is always timed single-threaded.
  std::size_t threads = 1;
};

struct BenchmarkRow {
  Application application = Application::denoise;
  Method method = Method::omp_single;
  std::size_t n = 0;
  std::size_t t_high = 0;
  std::size_t t_low = 0;
  std::size_t k = 0;
  double time_ms = 0.0;
  double snr_db = 0.0;
  double speedup_measured = 1.0;
  double speedup_predicted = 1.0;
};

/// Trains one model per configuration (dictionaries are shared between
/// configurations that need the same one), times median coding over the
/// repetitions and emits one row per (configuration, method). Reports of
/// every training run are appended to training_reports when given.
std::vector<BenchmarkRow> benchmark_sweep(const BenchmarkDataset& dataset,
                                          const std::vector<SweepConfig>& sweep,
                                          const BenchmarkOptions& options,
                                          std::vector<TrainReport>* training_reports = nullptr);

inline constexpr std::string_view kBenchmarkCsvHeader =
    "application,method,N,T_high,T_low,K,time_ms,snr_db,speedup_measured,speedup_predicted";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchmarkRow& row);

/// Training patch matrix from a set of signals, optionally DC-removed and
/// randomly subsampled to at most max_columns columns.
Eigen::MatrixXd training_patches(const std::vector<Tensor>& signals, const Shape& patch_shape,
                                 const Shape& stride, bool remove_dc, std::size_t max_columns,
                                 std::uint64_t seed);

}  // namespace crossdict
