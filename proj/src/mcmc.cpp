#include "survmc/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace survmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Block {
  std::size_t first = 0;
  std::size_t size = 1;
  bool latent = false;
  double target_rate() const { return size == 1 ? 0.44 : 0.234; }
};

std::vector<Block> make_blocks(const Target& target) {
  std::vector<Block> blocks;
  std::size_t j = 0;
  while (j < target.dim()) {
    Block blk{j, 1, target.defs[j].latent};
    while (j + blk.size < target.dim() &&
           target.defs[j + blk.size].block == target.defs[j].block)
      ++blk.size;
    blocks.push_back(blk);
    j += blk.size;
  }
  return blocks;
}

class ChainRunner {
 public:
  ChainRunner(const Target& target, const ChainConfig& config, std::size_t chain)
      : target_(target),
        config_(config),
        rng_(splitmix64(config.seed * 0x1000193ULL + chain)),
        blocks_(make_blocks(target)) {}

  void run(std::vector<std::vector<double>>& kept, ChainStats& stats) {
    initialize();
    const std::size_t n_coords = target_.dim();
    scales_.assign(blocks_.size(), 0.5);
    std::vector<std::size_t> proposed(blocks_.size(), 0), accepted(blocks_.size(), 0);
    std::vector<std::size_t> total_prop(blocks_.size(), 0), total_acc(blocks_.size(), 0);
    std::size_t adapt_round = 0;

    std::vector<double> z_new(n_coords);
    const std::size_t total_iters = config_.burn_in + config_.n_iter;
    kept.reserve(config_.n_iter / config_.thin);
    for (std::size_t iter = 0; iter < total_iters; ++iter) {
      const bool warm = iter < config_.burn_in;
      for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const Block& blk = blocks_[bi];
        const bool ok = update_block(blk, scales_[bi]);
        ++proposed[bi];
        if (ok) ++accepted[bi];
        if (!warm) {
          ++total_prop[bi];
          if (ok) ++total_acc[bi];
        }
      }
      if (warm && (iter + 1) % config_.adapt_window == 0) {
        ++adapt_round;
        const double step =
            std::min(0.25, 1.0 / std::sqrt(static_cast<double>(adapt_round)));
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
          const double rate = static_cast<double>(accepted[bi]) /
                              static_cast<double>(std::max<std::size_t>(1, proposed[bi]));
          scales_[bi] *= std::exp(rate > blocks_[bi].target_rate() ? step : -step);
          proposed[bi] = accepted[bi] = 0;
        }
      }
      if (!warm && (iter + 1 - config_.burn_in) % config_.thin == 0) kept.push_back(x_);
    }
    stats.acceptance_rate.resize(blocks_.size());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi)
      stats.acceptance_rate[bi] = static_cast<double>(total_acc[bi]) /
                                  static_cast<double>(std::max<std::size_t>(1, total_prop[bi]));
  }

 private:
  void initialize() {
    for (int attempt = 0; attempt < 100; ++attempt) {
      std::vector<double> x0 = target_.init(splitmix64(rng_()));
      std::vector<double> z0;
      try {
        z0 = target_.unconstrain(x0);
      } catch (const std::invalid_argument&) {
        continue;
      }
      const double lp = target_.log_posterior(x0) + target_.log_jacobian(z0);
      if (std::isfinite(lp)) {
        x_ = std::move(x0);
        z_ = std::move(z0);
        cur_loglik_ = target_.loglik(x_);
        return;
      }
    }
    throw std::runtime_error("mcmc: no finite log-posterior initialization found");
  }

  // Log prior + transform Jacobian for the coordinates of one block, plus the
  // covariance block whenever it overlaps (its prior couples three coords).
  double local_prior_jacobian(const Block& blk) const {
    double v = 0.0;
    const int sb = target_.sigma_block;
    bool sigma_done = false;
    for (std::size_t j = blk.first; j < blk.first + blk.size; ++j) {
      if (sb >= 0 && j >= static_cast<std::size_t>(sb) &&
          j < static_cast<std::size_t>(sb) + 3) {
        if (!sigma_done) {
          const Prior& pr = target_.defs[sb].prior;
          v += inv_wishart2_logpdf(x_[sb], x_[sb + 1], x_[sb + 2], pr.a, pr.b);
          v += std::log(4.0) + 3.0 * z_[sb] + 2.0 * z_[sb + 2];
          sigma_done = true;
        }
        continue;
      }
      const ParamDef& def = target_.defs[j];
      if (!def.latent) v += prior_logpdf(def.prior, x_[j]);
      v += transform_log_jacobian(def, z_[j]);
    }
    return v;
  }

  void refresh_naturals(const Block& blk) {
    const int sb = target_.sigma_block;
    for (std::size_t j = blk.first; j < blk.first + blk.size; ++j) {
      if (sb >= 0 && j >= static_cast<std::size_t>(sb) &&
          j < static_cast<std::size_t>(sb) + 3) {
        const double l11 = std::exp(z_[sb]);
        const double l21 = z_[sb + 1];
        const double l22 = std::exp(z_[sb + 2]);
        x_[sb] = l11 * l11;
        x_[sb + 1] = l11 * l21;
        x_[sb + 2] = l21 * l21 + l22 * l22;
      } else {
        x_[j] = to_natural(target_.defs[j], z_[j]);
      }
    }
  }

  bool update_block(const Block& blk, double scale) {
    const bool use_local = blk.latent && target_.loglik_block;
    const int block_id = target_.defs[blk.first].block;

    std::vector<double> z_old(blk.size);
    for (std::size_t k = 0; k < blk.size; ++k) z_old[k] = z_[blk.first + k];
    // The covariance block maps three z-coords to three naturals jointly, so
    // snapshot naturals that refresh_naturals may touch.
    std::vector<double> x_old(std::max<std::size_t>(blk.size, 3));
    const int sb = target_.sigma_block;
    const bool touches_sigma =
        sb >= 0 && blk.first <= static_cast<std::size_t>(sb) + 2 &&
        blk.first + blk.size > static_cast<std::size_t>(sb);
    if (touches_sigma)
      for (int k = 0; k < 3; ++k) x_old[k] = x_[sb + k];
    else
      for (std::size_t k = 0; k < blk.size; ++k) x_old[k] = x_[blk.first + k];

    const double old_local = use_local ? target_.loglik_block(x_, block_id) : 0.0;
    const double old_pj = local_prior_jacobian(blk);

    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < blk.size; ++k)
      z_[blk.first + k] += scale * normal(rng_);
    refresh_naturals(blk);

    const double new_pj = local_prior_jacobian(blk);
    double delta;
    double new_loglik = cur_loglik_;
    if (new_pj == kNegInf) {
      delta = kNegInf;
    } else if (use_local) {
      const double new_local = target_.loglik_block(x_, block_id);
      delta = (new_local - old_local) + (new_pj - old_pj);
      new_loglik = cur_loglik_ + (new_local - old_local);
    } else {
      new_loglik = target_.loglik(x_);
      delta = (new_loglik - cur_loglik_) + (new_pj - old_pj);
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (std::isfinite(delta) ? std::log(unif(rng_)) < delta : false) {
      cur_loglik_ = new_loglik;
      return true;
    }
    // revert
    for (std::size_t k = 0; k < blk.size; ++k) z_[blk.first + k] = z_old[k];
    if (touches_sigma)
      for (int k = 0; k < 3; ++k) x_[sb + k] = x_old[k];
    else
      for (std::size_t k = 0; k < blk.size; ++k) x_[blk.first + k] = x_old[k];
    return false;
  }

  const Target& target_;
  const ChainConfig& config_;
  std::mt19937_64 rng_;
  std::vector<Block> blocks_;
  std::vector<double> scales_;
  std::vector<double> x_, z_;
  double cur_loglik_ = 0.0;
};

}  // namespace

void ChainConfig::validate() const {
  if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (n_iter < thin) throw std::invalid_argument("n_iter must be >= thin");
  if (adapt_window < 1) throw std::invalid_argument("adapt_window must be >= 1");
}

std::vector<std::vector<double>> PosteriorSamples::parameter_chains(
    std::size_t j) const {
  std::vector<std::vector<double>> out(draws.size());
  for (std::size_t c = 0; c < draws.size(); ++c) {
    out[c].reserve(draws[c].size());
    for (const auto& row : draws[c]) out[c].push_back(row[j]);
  }
  return out;
}

std::size_t PosteriorSamples::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < param_names.size(); ++j)
    if (param_names[j] == name) return j;
  throw std::invalid_argument("unknown parameter name: " + name);
}

PosteriorSamples run_chains(const Target& target, const ChainConfig& config,
                            std::vector<ChainStats>* stats) {
  config.validate();
  PosteriorSamples samples;
  samples.config = config;
  samples.param_names.reserve(target.dim());
  for (const auto& def : target.defs) samples.param_names.push_back(def.name);
  samples.draws.resize(config.n_chains);
  std::vector<ChainStats> chain_stats(config.n_chains);

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(config.n_chains);
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    workers.emplace_back([&, c]() {
      try {
        ChainRunner runner(target, config, c);
        runner.run(samples.draws[c], chain_stats[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (stats) *stats = std::move(chain_stats);
  return samples;
}

}  // namespace survmc
