#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survmc/model.hpp"

namespace survmc {

struct ChainConfig {
  std::size_t n_chains = 3;
  std::size_t burn_in = 1000;
  std::size_t n_iter = 50000;
  std::size_t thin = 10;
  std::uint64_t seed = 1;
  std::size_t adapt_window = 50;

  void validate() const;
};

struct PosteriorSamples {
  std::vector<std::string> param_names;
  // chain -> kept iteration -> parameter (natural scale)
  std::vector<std::vector<std::vector<double>>> draws;
  ChainConfig config;

  std::size_t n_chains() const { return draws.size(); }
  std::size_t n_kept() const { return draws.empty() ? 0 : draws.front().size(); }
  std::size_t n_params() const { return param_names.size(); }

  // Draws of one parameter split per chain.
  std::vector<std::vector<double>> parameter_chains(std::size_t j) const;
  std::size_t index_of(const std::string& name) const;
};

struct ChainStats {
  std::vector<double> acceptance_rate;  // per block, post-adaptation
};

// Adaptive random-walk Metropolis-within-Gibbs on the unconstrained scale.
// Scalar blocks target 0.44 acceptance, multivariate blocks 0.234;
// adaptation happens during burn-in only. Deterministic given the seed.
PosteriorSamples run_chains(const Target& target, const ChainConfig& config,
                            std::vector<ChainStats>* stats = nullptr);

}  // namespace survmc
