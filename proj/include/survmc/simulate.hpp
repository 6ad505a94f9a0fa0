#pragma once

#include <cstddef>
#include <cstdint>

#include "survmc/likelihoods.hpp"
#include "survmc/model.hpp"

namespace survmc {

// Synthetic-data scenario at a fixed truth. Only the block matching `family`
// is read; latent fields inside the truth structs (frailty w/b, joint b) are
// ignored and drawn fresh. Covariates are iid standard normal; families whose
// design carries an intercept get a leading column of ones.
struct SimScenario {
  Family family = Family::Aft;
  std::size_t n = 100;
  std::uint64_t seed = 1;

  double censor_time = 0.0;   // administrative horizon; 0 disables
  double censor_rate = 0.0;   // target right-censored fraction; 0 disables

  AftParams aft;
  PhParams ph;
  TimePartition partition;    // piecewise-constant baseline support
  CureParams cure;
  CompetingRisksParams competing;
  IllnessDeathParams illness;
  FrailtyParams frailty;
  std::size_t n_groups = 10;  // frailty grouping, subjects assigned round-robin
  JointParams joint;
  double visit_spacing = 1.0; // joint longitudinal schedule
  std::size_t max_visits = 6;
};

SurvivalDataset simulate(const SimScenario& scenario);

}  // namespace survmc
