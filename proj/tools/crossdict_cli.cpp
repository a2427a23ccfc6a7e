// crossdict command-line front end: train, recover, benchmark, synth.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crossdict/io.hpp"
#include "crossdict/learn.hpp"
#include "crossdict/model_file.hpp"
#include "crossdict/pipelines.hpp"
#include "crossdict/synth.hpp"

namespace cd = crossdict;

namespace {

/// Bad flag values or combinations; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cd::Shape parse_shape(const std::string& text, const char* flag) {
  cd::Shape out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || v == 0) {
      throw UsageError(std::string(flag) + ": expected extents like 8x8, got '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty() || out.size() > 4) throw UsageError(std::string(flag) + ": rank must be 1 to 4");
  return out;
}

cd::SignalDomain parse_domain(const std::string& s) {
  if (s == "image") return cd::SignalDomain::image;
  if (s == "video") return cd::SignalDomain::video;
  if (s == "hyperspectral") return cd::SignalDomain::hyperspectral;
  if (s == "lightfield") return cd::SignalDomain::lightfield;
  throw UsageError("--domain: unknown domain '" + s + "'");
}

cd::Shape domain_factors(const std::string& domain, const cd::Shape& patch) {
  if (!domain.empty()) return cd::default_scale_factors(parse_domain(domain));
  switch (patch.size()) {
    case 2: return cd::default_scale_factors(cd::SignalDomain::image);
    case 3: return cd::default_scale_factors(cd::SignalDomain::video);
    case 4: return cd::default_scale_factors(cd::SignalDomain::lightfield);
    default: throw UsageError("--patch: rank must be 2 to 4");
  }
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::vector<std::string> data;
  std::string patch;
  std::optional<std::size_t> t_low;
  std::size_t t_high = 256;
  std::size_t k_low = cd::kDefaultLowSparsity;
  std::optional<std::size_t> k_high;
  std::string factors;
  std::string domain;
  std::string stride;
  std::size_t iters = 10;
  std::uint64_t seed = 1;
  std::size_t max_patches = 20000;
  bool keep_dc = false;
  std::string out;
};

int run_train(const TrainArgs& a, std::size_t threads) {
  const cd::Shape patch = parse_shape(a.patch, "--patch");
  const std::size_t k_high = a.k_high.value_or(a.k_low);
  if (a.t_low && (*a.t_low == 0 || a.t_high % *a.t_low != 0)) {
    throw UsageError("--t-high " + std::to_string(a.t_high) + " is not an integer multiple of --t-low " +
                     std::to_string(*a.t_low));
  }
  cd::Shape factors = a.factors.empty() ? domain_factors(a.domain, patch)
                                        : parse_shape(a.factors, "--scale-factors");
  if (factors.size() != patch.size()) throw UsageError("--scale-factors rank differs from --patch");
  cd::Shape stride = a.stride.empty() ? cd::Shape{} : parse_shape(a.stride, "--stride");

  std::vector<cd::Tensor> signals;
  for (const auto& path : a.data) signals.push_back(cd::load_signal(path));
  const Eigen::MatrixXd samples =
      cd::training_patches(signals, patch, stride, !a.keep_dc, a.max_patches, a.seed);

  if (!a.t_low) {
    cd::TrainConfig tc;
    tc.num_atoms = a.t_high;
    tc.sparsity = k_high;
    tc.iterations = a.iters;
    tc.seed = a.seed;
    tc.threads = threads;
    cd::TrainResult r = cd::ksvd(samples, tc);
    cd::save_model(a.out, cd::SingleScaleModel{std::make_shared<const cd::Dictionary>(r.dictionary),
                                               patch, k_high});
    std::cerr << "trained T=" << a.t_high << " K=" << k_high << " objective "
              << r.report.objective_per_iteration.back() << "\n";
    return 0;
  }
  cd::CrossScaleTrainConfig cc;
  cc.t_low = *a.t_low;
  cc.t_high = a.t_high;
  cc.k_low = a.k_low;
  cc.k_high = k_high;
  cc.iterations = a.iters;
  cc.seed = a.seed;
  cc.threads = threads;
  cd::CrossScaleTraining r = cd::train_cross_scale(samples, cd::ScaleSpec(patch, factors), cc);
  cd::save_model(a.out, r.model);
  std::cerr << "trained T_low=" << cc.t_low << " T_high=" << cc.t_high << " Q=" << r.model.q()
            << " objective " << r.high_report.objective_per_iteration.back() << "\n";
  return 0;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
  std::string application;
  std::string model;
  std::string input;
  std::string method = "zerotree";
  std::string mask;
  double undersampling = 2.0;
  std::string code;
  std::string assignment;
  std::string views;
  std::optional<double> noise_snr;
  std::uint64_t seed = 1;
  std::string stride;
  std::optional<std::size_t> sparsity;
  bool keep_dc = false;
  std::string truth;
  std::string out;
  std::string metrics;
};

std::vector<std::size_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stoul(part));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": expected a comma-separated index list");
    }
  }
  return out;
}

cd::Sensing build_sensing(cd::Application app, const RecoverArgs& a, const cd::Shape& shape) {
  std::mt19937_64 rng(a.seed);
  const std::size_t n = cd::shape_product(shape);
  switch (app) {
    case cd::Application::denoise:
      return cd::IdentitySensing{};
    case cd::Application::inpaint: {
      if (!a.mask.empty()) {
        cd::Tensor m = cd::load_signal(a.mask);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = m[i] != 0.0 ? 1.0 : 0.0;
        return cd::MaskSensing{m};
      }
      if (a.undersampling < 1.0) throw UsageError("--undersampling must be at least 1");
      const auto bits = cd::random_mask(n, a.undersampling - 1.0, rng);
      cd::Tensor m(shape);
      for (std::size_t i = 0; i < n; ++i) m[i] = bits[i];
      return cd::MaskSensing{m};
    }
    case cd::Application::demosaic: {
      if (shape.size() != 3) throw UsageError("demosaic needs a (rows, cols, channels) input");
      const std::size_t pixels = shape[0] * shape[1];
      std::vector<std::uint32_t> assign;
      if (a.assignment.empty() || a.assignment == "bayer") {
        if (a.assignment.empty() && shape[2] != 3) {
          assign = cd::random_channel_assignment(pixels, shape[2], rng);
        } else {
          assign = cd::bayer_rggb_assignment(shape[0], shape[1]);
        }
      } else if (a.assignment == "random") {
        assign = cd::random_channel_assignment(pixels, shape[2], rng);
      } else {
        const cd::Tensor t = cd::load_signal(a.assignment);
        for (double v : t.data()) assign.push_back(static_cast<std::uint32_t>(std::lround(v)));
      }
      return cd::MosaicSensing{assign};
    }
    case cd::Application::video_cs: {
      if (shape.size() != 3) throw UsageError("video-cs needs a (rows, cols, frames) input");
      std::vector<std::uint8_t> code;
      if (a.code.empty()) {
        code = cd::random_temporal_code(shape[0] * shape[1], shape[2], rng);
      } else {
        const cd::Tensor t = cd::load_signal(a.code);
        for (double v : t.data()) code.push_back(v != 0.0 ? 1 : 0);
      }
      return cd::TemporalSensing{code};
    }
    case cd::Application::lightfield_cs: {
      if (shape.size() != 4) throw UsageError("lf-cs needs a (rows, cols, view rows, view cols) input");
      std::vector<std::size_t> kept;
      if (a.views.empty()) {
        for (std::size_t u = 0; u < shape[2]; ++u) {
          for (std::size_t v = 0; v < shape[3]; ++v) {
            if ((u + v) % 2 == 0) kept.push_back(u * shape[3] + v + 1);
          }
        }
      } else {
        kept = parse_list(a.views, "--views");
      }
      return cd::AngularSensing{kept};
    }
  }
  throw UsageError("unknown application");
}

void append_metrics(const std::string& path, const cd::BenchmarkRow& row) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (fresh) cd::write_csv_header(out);
  cd::write_csv_row(out, row);
}

int run_recover(const RecoverArgs& a, std::size_t threads) {
  const auto app = cd::parse_application(a.application);
  if (!app) throw UsageError("unknown application '" + a.application + "'");
  const auto method = cd::parse_method(a.method);
  if (!method) throw UsageError("--method must be omp or zerotree");

  cd::Model model = cd::load_model(a.model);
  if (*method == cd::Method::zerotree && !std::holds_alternative<cd::CrossScaleModel>(model)) {
    throw UsageError("--method zerotree needs a two-scale model");
  }
  const cd::Tensor signal = cd::load_signal(a.input);
  cd::Measurement m = cd::measure(signal, build_sensing(*app, a, signal.shape()), a.noise_snr, a.seed);

  cd::PipelineConfig pc;
  pc.method = *method;
  pc.model = model;
  if (!a.stride.empty()) pc.stride = parse_shape(a.stride, "--stride");
  pc.remove_dc = !a.keep_dc;
  pc.sparsity = a.sparsity;
  pc.threads = threads;
  const cd::Recovery rec = cd::recover(m, pc);
  cd::save_signal(a.out, rec.estimate);

  const cd::Tensor truth = a.truth.empty() ? signal : cd::load_signal(a.truth);
  const double snr_db = cd::snr(truth, rec.estimate);
  std::cerr << cd::to_string(*app) << " " << cd::to_string(*method) << ": " << rec.metrics.patches
            << " patches, coding " << std::chrono::duration<double, std::milli>(rec.metrics.coding_time).count()
            << " ms, SNR " << snr_db << " dB";
  if (rec.metrics.flagged_patches) std::cerr << ", " << rec.metrics.flagged_patches << " flagged";
  std::cerr << "\n";

  if (!a.metrics.empty()) {
    cd::BenchmarkRow row;
    row.application = *app;
    row.method = *method;
    row.n = cd::shape_product(cd::model_patch_shape(model));
    if (const auto* cs = std::get_if<cd::CrossScaleModel>(&model)) {
      row.t_high = cs->t_high();
      row.t_low = cs->t_low();
      row.k = a.sparsity.value_or(cs->k_high());
      if (*method == cd::Method::zerotree) {
        row.speedup_predicted = cd::predicted_speedup(static_cast<double>(cs->t_high()),
                                                      static_cast<double>(cs->t_low()),
                                                      static_cast<double>(cs->k_low()),
                                                      static_cast<double>(cs->q()));
      }
    } else {
      const auto& s = std::get<cd::SingleScaleModel>(model);
      row.t_high = row.t_low = s.dictionary->num_atoms();
      row.k = a.sparsity.value_or(s.sparsity);
    }
    row.time_ms = std::chrono::duration<double, std::milli>(rec.metrics.coding_time).count();
    row.snr_db = snr_db;
    append_metrics(a.metrics, row);
  }
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchArgs {
  std::vector<std::string> data;
  std::string test;
  std::string sweep;
  std::string application = "denoise";
  std::string patch = "8x8";
  std::string stride;
  std::string train_stride;
  std::string factors;
  std::optional<double> noise_snr;
  std::uint64_t seed = 1;
  std::size_t iters = 10;
  std::size_t reps = 5;
  std::size_t max_patches = 20000;
  double undersampling = 2.0;
  bool keep_dc = false;
  std::string out;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(),
                                                 text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size())),
                                                 '\n'));
}

std::vector<cd::SweepConfig> read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--sweep: cannot open " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path + ":" + std::to_string(line_of(text, e.byte)) + ": malformed JSON: " + e.what());
  }
  const nlohmann::json& list = doc.is_object() && doc.contains("configs") ? doc["configs"] : doc;
  if (!list.is_array() || list.empty()) {
    throw UsageError(path + ": expected a non-empty array of configs (or {\"configs\": [...]})");
  }
  std::vector<cd::SweepConfig> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const std::string where = path + ": config " + std::to_string(i + 1);
    if (!e.is_object()) throw UsageError(where + " is not an object");
    auto get = [&](const char* key) -> std::optional<std::size_t> {
      if (!e.contains(key)) return std::nullopt;
      if (!e[key].is_number_unsigned() || e[key].get<std::size_t>() == 0) {
        throw UsageError(where + ": '" + key + "' must be a positive integer");
      }
      return e[key].get<std::size_t>();
    };
    for (const auto& [key, value] : e.items()) {
      if (key != "t" && key != "k" && key != "t_low" && key != "t_high" && key != "k_low" && key != "k_high") {
        throw UsageError(where + ": unknown key '" + key + "'");
      }
    }
    cd::SweepConfig c;
    const auto t = get("t");
    const auto t_high = get("t_high");
    if (!t && !t_high) throw UsageError(where + ": needs 't' or 't_high'");
    c.t_high = t_high ? *t_high : *t;
    c.t_low = get("t_low");
    const auto k = get("k");
    c.k_low = get("k_low").value_or(k.value_or(cd::kDefaultLowSparsity));
    c.k_high = get("k_high").value_or(k.value_or(c.k_low));
    if (c.t_low && c.t_high % *c.t_low != 0) {
      throw UsageError(where + ": t_high is not an integer multiple of t_low");
    }
    out.push_back(c);
  }
  return out;
}

int run_benchmark(const BenchArgs& a, std::size_t threads) {
  const auto app = cd::parse_application(a.application);
  if (!app) throw UsageError("unknown application '" + a.application + "'");
  const std::vector<cd::SweepConfig> sweep = read_sweep(a.sweep);

  cd::BenchmarkDataset ds;
  for (const auto& path : a.data) ds.training.push_back(cd::load_signal(path));
  ds.test = a.test.empty() ? ds.training.front() : cd::load_signal(a.test);
  RecoverArgs sensing_args;
  sensing_args.seed = a.seed;
  sensing_args.undersampling = a.undersampling;
  ds.sensing = build_sensing(*app, sensing_args, ds.test.shape());

  cd::BenchmarkOptions opt;
  opt.application = *app;
  opt.patch_shape = parse_shape(a.patch, "--patch");
  if (!a.stride.empty()) opt.stride = parse_shape(a.stride, "--stride");
  if (!a.train_stride.empty()) opt.train_stride = parse_shape(a.train_stride, "--train-stride");
  if (!a.factors.empty()) opt.scale_factors = parse_shape(a.factors, "--scale-factors");
  opt.noise_snr_db = a.noise_snr;
  opt.seed = a.seed;
  opt.train_iterations = a.iters;
  opt.repetitions = a.reps;
  opt.max_training_patches = a.max_patches;
  opt.remove_dc = !a.keep_dc;
  opt.threads = threads;

  const auto rows = cd::benchmark_sweep(ds, sweep, opt);
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot open " + a.out);
  cd::write_csv_header(out);
  for (const auto& r : rows) cd::write_csv_row(out, r);
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string kind;
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t frames = 8;
  std::size_t channels = 8;
  std::size_t view_rows = 3;
  std::size_t view_cols = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  cd::Tensor t(cd::Shape{1});
  if (a.kind == "image") {
    t = cd::synthetic_image(a.rows, a.cols, a.seed);
  } else if (a.kind == "video") {
    t = cd::synthetic_video(a.rows, a.cols, a.frames, a.seed);
  } else if (a.kind == "hyperspectral") {
    t = cd::synthetic_hyperspectral(a.rows, a.cols, a.channels, a.seed);
  } else if (a.kind == "lightfield") {
    t = cd::synthetic_lightfield(a.rows, a.cols, a.view_rows, a.view_cols, a.seed);
  } else {
    throw UsageError("synth: unknown kind '" + a.kind + "'");
  }
  cd::save_signal(a.out, t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-scale sparse coding: dictionary training, patch recovery and benchmarks"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  app.add_option("--threads", threads, "Worker threads (1 = sequential)")->check(CLI::PositiveNumber);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a single- or two-scale dictionary model");
  train->add_option("--data", ta.data, "Training signals (.pgm, .ppm, .ten)")->required();
  train->add_option("--patch", ta.patch, "Patch extents, e.g. 8x8")->required();
  train->add_option("--t-low", ta.t_low, "Coarse dictionary size (omit for a single-scale model)");
  train->add_option("--t-high", ta.t_high, "Fine dictionary size")->check(CLI::PositiveNumber);
  train->add_option("--k-low", ta.k_low, "Coarse sparsity")->check(CLI::PositiveNumber);
  train->add_option("--k-high", ta.k_high, "Fine sparsity (default: --k-low)");
  train->add_option("--scale-factors", ta.factors, "Per-axis decimation, e.g. 2x2");
  train->add_option("--domain", ta.domain, "image, video, hyperspectral or lightfield (default factors)");
  train->add_option("--stride", ta.stride, "Training patch stride (default 1 per axis)");
  train->add_option("--iters", ta.iters, "K-SVD iterations");
  train->add_option("--seed", ta.seed, "Random seed");
  train->add_option("--max-patches", ta.max_patches, "Subsample training patches to this many");
  train->add_flag("--keep-dc", ta.keep_dc, "Do not remove patch means before training");
  train->add_option("--out", ta.out, "Output model (.csd)")->required();

  RecoverArgs ra;
  auto* recover = app.add_subcommand("recover", "Recover a signal patch by patch");
  recover->add_option("application", ra.application, "denoise, inpaint, demosaic, video-cs or lf-cs")
      ->required();
  recover->add_option("--model", ra.model, "Model file (.csd)")->required();
  recover->add_option("--input", ra.input, "Signal to measure (.pgm, .ppm, .ten)")->required();
  recover->add_option("--method", ra.method, "omp or zerotree");
  recover->add_option("--mask", ra.mask, "Inpainting mask, nonzero = known");
  recover->add_option("--undersampling", ra.undersampling, "N/M for a random inpainting mask");
  recover->add_option("--code", ra.code, "Temporal code (rows, cols, frames) for video-cs");
  recover->add_option("--assignment", ra.assignment, "bayer, random, or a (rows, cols) channel file");
  recover->add_option("--views", ra.views, "Kept views for lf-cs, 1-based, comma separated");
  recover->add_option("--noise-snr", ra.noise_snr, "Add Gaussian noise at this SNR (dB)");
  recover->add_option("--seed", ra.seed, "Seed for noise and random patterns");
  recover->add_option("--stride", ra.stride, "Patch stride (default: patch extents)");
  recover->add_option("--sparsity", ra.sparsity, "Override K (K_high for zerotree)");
  recover->add_flag("--keep-dc", ra.keep_dc, "Do not estimate and remove patch means");
  recover->add_option("--truth", ra.truth, "Ground truth for the SNR (default: --input)");
  recover->add_option("--out", ra.out, "Estimate (.pgm, .ppm, .ten)")->required();
  recover->add_option("--metrics", ra.metrics, "Append a CSV metrics row here");

  BenchArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Time single-scale OMP against zero-tree OMP");
  bench->add_option("--data", ba.data, "Training signals")->required();
  bench->add_option("--test", ba.test, "Test signal (default: first --data)");
  bench->add_option("--sweep", ba.sweep, "JSON list of {t | t_high, t_low, k | k_low, k_high}")->required();
  bench->add_option("--application", ba.application, "denoise, inpaint, demosaic, video-cs or lf-cs");
  bench->add_option("--patch", ba.patch, "Patch extents");
  bench->add_option("--stride", ba.stride, "Recovery stride");
  bench->add_option("--train-stride", ba.train_stride, "Training patch stride");
  bench->add_option("--scale-factors", ba.factors, "Per-axis decimation");
  bench->add_option("--noise-snr", ba.noise_snr, "Measurement SNR (dB)");
  bench->add_option("--seed", ba.seed, "Random seed");
  bench->add_option("--iters", ba.iters, "K-SVD iterations");
  bench->add_option("--reps", ba.reps, "Timing repetitions (median reported)");
  bench->add_option("--max-patches", ba.max_patches, "Training patch cap");
  bench->add_option("--undersampling", ba.undersampling, "N/M for inpainting");
  bench->add_flag("--keep-dc", ba.keep_dc, "Do not remove patch means");
  bench->add_option("--out", ba.out, "CSV output")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write a synthetic test signal");
  synth->add_option("kind", sa.kind, "image, video, hyperspectral or lightfield")->required();
  synth->add_option("--rows", sa.rows)->check(CLI::PositiveNumber);
  synth->add_option("--cols", sa.cols)->check(CLI::PositiveNumber);
  synth->add_option("--frames", sa.frames)->check(CLI::PositiveNumber);
  synth->add_option("--channels", sa.channels)->check(CLI::PositiveNumber);
  synth->add_option("--view-rows", sa.view_rows)->check(CLI::PositiveNumber);
  synth->add_option("--view-cols", sa.view_cols)->check(CLI::PositiveNumber);
  synth->add_option("--seed", sa.seed);
  synth->add_option("--out", sa.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train) return run_train(ta, threads);
    if (*recover) return run_recover(ra, threads);
    if (*bench) return run_benchmark(ba, threads);
    return run_synth(sa);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const cd::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
