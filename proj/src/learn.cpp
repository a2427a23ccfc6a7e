#include "crossdict/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "parallel.hpp"

namespace crossdict {

namespace {

constexpr Eigen::Index kExactRankOneLimit = 128;

struct WorkingCode {
  std::vector<std::size_t> atoms;  // 0-based
  std::vector<double> values;
};

Eigen::MatrixXd initial_dictionary(const Eigen::MatrixXd& samples, const TrainConfig& config,
                                   std::mt19937_64& rng) {
  const Eigen::Index n = samples.rows();
  const auto t = static_cast<Eigen::Index>(config.num_atoms);
  if (config.initial_atoms) {
    if (config.initial_atoms->rows() != n || config.initial_atoms->cols() != t) {
      throw DimensionError("ksvd: initial atoms must be N x T");
    }
    return normalize_atoms(*config.initial_atoms).atoms();
  }
  Eigen::MatrixXd d(n, t);
  std::normal_distribution<double> gauss;
  Eigen::Index filled = 0;
  if (config.init == AtomInit::data_columns) {
    const double max_norm = samples.colwise().norm().maxCoeff();
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index i = 0; i < samples.cols(); ++i) {
      if (samples.col(i).norm() > 1e-9 * max_norm) candidates.push_back(i);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (; filled < t && filled < static_cast<Eigen::Index>(candidates.size()); ++filled) {
      d.col(filled) = samples.col(candidates[static_cast<std::size_t>(filled)]);
    }
  }
  for (; filled < t; ++filled) {
    for (Eigen::Index r = 0; r < n; ++r) d(r, filled) = gauss(rng);
  }
  return normalize_atoms(d).atoms();
}

SparseCode to_sparse_code(const WorkingCode& w, std::size_t dim) {
  std::vector<CodeEntry> entries;
  entries.reserve(w.atoms.size());
  for (std::size_t s = 0; s < w.atoms.size(); ++s) entries.push_back({w.atoms[s] + 1, w.values[s]});
  std::sort(entries.begin(), entries.end(),
            [](const CodeEntry& a, const CodeEntry& b) { return a.index < b.index; });
  return SparseCode(dim, std::move(entries));
}

TrainResult train(const Eigen::MatrixXd& samples, const std::vector<Support>* allowed,
                  const TrainConfig& config) {
  const auto wall_start = std::chrono::steady_clock::now();
  const Eigen::Index n = samples.rows();
  const Eigen::Index p = samples.cols();
  const std::size_t t = config.num_atoms;
  if (n < 1 || p < 1) throw DimensionError("ksvd: empty training matrix");
  if (t < 1 || t > static_cast<std::size_t>(p)) {
    throw ConfigError("ksvd: num_atoms = " + std::to_string(t) +
                      " must lie in [1, sample count = " + std::to_string(p) + "]");
  }
  if (config.sparsity < 1 || config.sparsity > std::min<std::size_t>(static_cast<std::size_t>(n), t)) {
    throw ConfigError("ksvd: sparsity must lie in [1, min(N, T)]");
  }
  if (samples.squaredNorm() == 0.0) throw DegenerateError("ksvd: training samples are all zero");
  if (allowed) {
    if (allowed->size() != static_cast<std::size_t>(p)) {
      throw ConfigError("ksvd: one allowed set per sample is required");
    }
    for (std::size_t i = 0; i < allowed->size(); ++i) {
      if ((*allowed)[i].empty()) {
        throw ConfigError("ksvd: sample " + std::to_string(i + 1) + " has an empty allowed set");
      }
      support_to_ranges((*allowed)[i], t);
    }
  }

  std::mt19937_64 rng(config.seed);
  Eigen::MatrixXd d = initial_dictionary(samples, config, rng);
  std::vector<WorkingCode> codes(static_cast<std::size_t>(p));
  Eigen::MatrixXd residual(n, p);
  TrainReport report;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> users(t);

  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    // Sparse coding against a snapshot of the dictionary.
    const DenseColumns columns(d);
    detail::parallel_for(static_cast<std::size_t>(p), config.threads, [&](std::size_t i) {
      const auto col = static_cast<Eigen::Index>(i);
      PursuitConfig pc;
      pc.sparsity = config.sparsity;
      if (allowed) {
        pc.allowed_support = (*allowed)[i];
        pc.sparsity = std::min(pc.sparsity, (*allowed)[i].size());
      }
      const Eigen::VectorXd y = samples.col(col);
      const PursuitResult r = omp(columns, y, pc);
      WorkingCode& w = codes[i];
      w.atoms.clear();
      w.values.clear();
      Eigen::VectorXd res = y;
      for (const auto& e : r.code.entries()) {
        w.atoms.push_back(e.index - 1);
        w.values.push_back(e.value);
        res.noalias() -= e.value * d.col(static_cast<Eigen::Index>(e.index - 1));
      }
      residual.col(col) = res;
    });
    report.objective_before_update.push_back(residual.norm());

    for (auto& u : users) u.clear();
    for (std::size_t i = 0; i < codes.size(); ++i) {
      for (std::size_t s = 0; s < codes[i].atoms.size(); ++s) users[codes[i].atoms[s]].emplace_back(i, s);
    }

    // Sequential rank-1 updates, residual kept current after each atom.
    for (std::size_t j = 0; j < t; ++j) {
      const auto& uj = users[j];
      if (uj.empty()) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      Eigen::MatrixXd e(n, static_cast<Eigen::Index>(uj.size()));
      for (std::size_t c = 0; c < uj.size(); ++c) {
        const auto [i, s] = uj[c];
        e.col(static_cast<Eigen::Index>(c)) =
            residual.col(static_cast<Eigen::Index>(i)) + codes[i].values[s] * d.col(jj);
      }
      const Eigen::VectorXd prev = d.col(jj);
      const RankOneUpdate upd = leading_rank_one(e, prev);
      d.col(jj) = upd.atom;
      for (std::size_t c = 0; c < uj.size(); ++c) {
        const auto [i, s] = uj[c];
        const double v = upd.coefficients[static_cast<Eigen::Index>(c)];
        codes[i].values[s] = v;
        residual.col(static_cast<Eigen::Index>(i)) = e.col(static_cast<Eigen::Index>(c)) - v * upd.atom;
      }
    }
    report.objective_per_iteration.push_back(residual.norm());

    if (iter + 1 < config.iterations) {
      std::vector<std::size_t> dead;
      const Eigen::MatrixXd gram = d.transpose() * d;
      std::vector<bool> replaced(t, false);
      for (std::size_t j = 0; j < t; ++j) {
        bool duplicate = false;
        for (std::size_t i = 0; i < j && !duplicate; ++i) {
          duplicate = !replaced[i] && std::abs(gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) >
                                          config.duplicate_atom_threshold;
        }
        if (users[j].size() < config.dead_atom_threshold || duplicate) {
          dead.push_back(j);
          replaced[j] = true;
        }
      }
      if (!dead.empty()) {
        const Eigen::VectorXd err = residual.colwise().squaredNorm().transpose();
        const double negligible = 1e-20 * samples.colwise().squaredNorm().maxCoeff();
        std::vector<std::size_t> order(static_cast<std::size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return err[static_cast<Eigen::Index>(a)] > err[static_cast<Eigen::Index>(b)];
        });
        std::size_t next = 0;
        for (std::size_t j : dead) {
          while (next < order.size() && samples.col(static_cast<Eigen::Index>(order[next])).norm() == 0.0) {
            ++next;
          }
          if (next >= order.size() || err[static_cast<Eigen::Index>(order[next])] <= negligible) break;
          const auto src = samples.col(static_cast<Eigen::Index>(order[next++]));
          d.col(static_cast<Eigen::Index>(j)) = src / src.norm();
          ++report.replaced_atoms;
        }
      }
    }
  }

  TrainResult result{Dictionary(normalize_atoms(d)), {}, std::move(report)};
  result.codes.reserve(codes.size());
  for (const auto& w : codes) result.codes.push_back(to_sparse_code(w, t));
  result.report.wall_clock = std::chrono::steady_clock::now() - wall_start;
  return result;
}

}  // namespace

RankOneUpdate leading_rank_one(const Eigen::MatrixXd& residual, const Eigen::VectorXd& previous_atom) {
  const Eigen::Index n = residual.rows();
  const Eigen::Index u = residual.cols();
  if (previous_atom.size() != n) throw DimensionError("rank-one update: atom length mismatch");
  RankOneUpdate out;
  if (u == 0 || residual.squaredNorm() == 0.0) {
    out.atom = previous_atom;
    out.coefficients = Eigen::VectorXd::Zero(u);
    return out;
  }
  Eigen::VectorXd d;
  if (std::min(n, u) <= kExactRankOneLimit) {
    if (u >= n) {
      const Eigen::MatrixXd g = residual * residual.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      d = es.eigenvectors().col(n - 1);
    } else {
      const Eigen::MatrixXd g = residual.transpose() * residual;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      d = residual * es.eigenvectors().col(u - 1);
    }
  } else {
    d = previous_atom;
    double prev_sigma = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd x = residual.transpose() * d;
      const double sigma = x.norm();
      if (sigma == 0.0) break;
      d = residual * x;
      d /= d.norm();
      if (std::abs(sigma - prev_sigma) <= 1e-13 * sigma) break;
      prev_sigma = sigma;
    }
  }
  d.normalize();
  if (d.dot(previous_atom) < 0.0) d = -d;
  out.coefficients = residual.transpose() * d;
  out.singular_value = out.coefficients.norm();
  out.atom = std::move(d);
  return out;
}

TrainResult ksvd(const Eigen::MatrixXd& samples, const TrainConfig& config) {
  return train(samples, nullptr, config);
}

TrainResult ksvd_constrained(const Eigen::MatrixXd& samples, const std::vector<Support>& allowed,
                             const TrainConfig& config) {
  return train(samples, &allowed, config);
}

CrossScaleTraining train_cross_scale(const Eigen::MatrixXd& samples, const ScaleSpec& scale,
                                     const CrossScaleTrainConfig& config) {
  if (static_cast<std::size_t>(samples.rows()) != scale.fine_size()) {
    throw DimensionError("train_cross_scale: sample length " + std::to_string(samples.rows()) +
                         " does not match patch size " + std::to_string(scale.fine_size()));
  }
  if (config.t_low == 0 || config.t_high % config.t_low != 0) {
    throw ConfigError("train_cross_scale: t_high must be an integer multiple of t_low");
  }
  const std::size_t q = config.t_high / config.t_low;
  const Eigen::Index p = samples.cols();

  Eigen::MatrixXd low_samples(static_cast<Eigen::Index>(scale.coarse_size()), p);
  for (Eigen::Index i = 0; i < p; ++i) {
    scale.downsample(std::span<const double>(samples.col(i).data(), scale.fine_size()),
                     std::span<double>(low_samples.col(i).data(), scale.coarse_size()));
  }

  TrainConfig low_cfg;
  low_cfg.num_atoms = config.t_low;
  low_cfg.sparsity = config.k_low;
  low_cfg.iterations = config.iterations;
  low_cfg.seed = config.seed;
  low_cfg.dead_atom_threshold = config.dead_atom_threshold;
  low_cfg.threads = config.threads;
  TrainResult low = ksvd(low_samples, low_cfg);

  std::vector<std::size_t> kept;
  std::vector<Support> allowed;
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto& code = low.codes[static_cast<std::size_t>(i)];
    if (code.empty()) continue;
    kept.push_back(static_cast<std::size_t>(i));
    allowed.push_back(cross_scale_map(code.support(), q, config.t_high));
  }
  if (kept.size() < config.t_high) {
    throw ConfigError("train_cross_scale: only " + std::to_string(kept.size()) +
                      " samples have a coarse code, fewer than t_high = " +
                      std::to_string(config.t_high));
  }
  Eigen::MatrixXd high_samples(samples.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    high_samples.col(static_cast<Eigen::Index>(c)) = samples.col(static_cast<Eigen::Index>(kept[c]));
  }

  // Seed each fine block with samples whose coarse code uses the block's parent.
  std::mt19937_64 rng(config.seed + 1);
  std::vector<std::vector<std::size_t>> by_parent(config.t_low);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    if (high_samples.col(static_cast<Eigen::Index>(c)).squaredNorm() == 0.0) continue;
    for (std::size_t parent : low.codes[kept[c]].support()) by_parent[parent - 1].push_back(c);
  }
  std::vector<std::size_t> everyone;
  for (std::size_t c = 0; c < kept.size(); ++c) {
    if (high_samples.col(static_cast<Eigen::Index>(c)).squaredNorm() > 0.0) everyone.push_back(c);
  }
  Eigen::MatrixXd init(samples.rows(), static_cast<Eigen::Index>(config.t_high));
  std::normal_distribution<double> gauss;
  for (std::size_t parent = 0; parent < config.t_low; ++parent) {
    auto& pool = by_parent[parent];
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t child = 0; child < q; ++child) {
      const auto col = static_cast<Eigen::Index>(parent * q + child);
      if (child < pool.size()) {
        init.col(col) = high_samples.col(static_cast<Eigen::Index>(pool[child]));
      } else if (!everyone.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, everyone.size() - 1);
        init.col(col) = high_samples.col(static_cast<Eigen::Index>(everyone[pick(rng)]));
      } else {
        for (Eigen::Index r = 0; r < init.rows(); ++r) init(r, col) = gauss(rng);
      }
    }
  }

  TrainConfig high_cfg = low_cfg;
  high_cfg.num_atoms = config.t_high;
  high_cfg.sparsity = config.k_high;
  high_cfg.initial_atoms = std::move(init);
  TrainResult high = ksvd_constrained(high_samples, allowed, high_cfg);

  auto d_low = std::make_shared<const Dictionary>(std::move(low.dictionary));
  auto d_high = std::make_shared<const Dictionary>(std::move(high.dictionary));
  return CrossScaleTraining{CrossScaleModel(d_low, d_high, scale, config.k_low, config.k_high),
                            std::move(low.report),
                            std::move(high.report),
                            std::move(low.codes),
                            std::move(high.codes),
                            std::move(kept)};
}

}  // namespace crossdict
