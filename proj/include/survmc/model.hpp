#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survmc/core.hpp"
#include "survmc/likelihoods.hpp"
#include "survmc/priors.hpp"
#include "survmc/quadrature.hpp"

namespace survmc {

enum class Family {
  Aft,
  PhPiecewise,
  Cure,
  CompetingRisks,
  IllnessDeath,
  Frailty,
  Joint
};

Family family_from_string(const std::string& name);
std::string family_to_string(Family family);

struct ModelSpec {
  Family family = Family::Aft;
  TimePartition partition;                       // PH baseline
  std::size_t n_risks = 3;                       // competing risks
  std::size_t gl_order = 15;                     // joint survival quadrature
  FrailtyVariant frailty_variant = FrailtyVariant::MultiplicativeGamma;
  std::map<std::string, Prior> prior_overrides;  // keyed by parameter name
};

enum class TransformKind { Identity, Log, Logit };

struct ParamDef {
  std::string name;
  TransformKind transform = TransformKind::Identity;
  double lower = 0.0, upper = 1.0;  // Logit bounds
  Prior prior;                      // natural-scale marginal; None for latents
  bool latent = false;
  int block = -1;  // coordinates sharing a block are proposed jointly
};

double to_unconstrained(const ParamDef& def, double x);
double to_natural(const ParamDef& def, double z);
double transform_log_jacobian(const ParamDef& def, double z);

// Log-posterior target over the flat natural parameter vector. The
// covariance block (when present) occupies three consecutive coordinates
// (s11, s12, s22) sampled through a log-Cholesky map.
struct Target {
  std::vector<ParamDef> defs;
  int sigma_block = -1;

  std::function<double(std::span<const double>)> loglik;
  // Terms of loglik that depend on the given latent block; empty when no
  // latent structure exists.
  std::function<double(std::span<const double>, int)> loglik_block;
  // Draws a natural-scale starting point in the style of prior-scale inits.
  std::function<std::vector<double>(std::uint64_t)> init;

  std::size_t dim() const { return defs.size(); }
  double log_prior(std::span<const double> natural) const;
  double log_posterior(std::span<const double> natural) const;

  std::vector<double> unconstrain(std::span<const double> natural) const;
  std::vector<double> constrain(std::span<const double> z) const;
  double log_jacobian(std::span<const double> z) const;
};

Target build_target(const ModelSpec& spec, const SurvivalDataset& data);

// Flat-vector views of the family parameter structs (layout matches the
// ParamDefs emitted by build_target).
AftParams unpack_aft(std::span<const double> x, std::size_t p);
PhParams unpack_ph(std::span<const double> x, std::size_t p, std::size_t K);
CureParams unpack_cure(std::span<const double> x, std::size_t p);
CompetingRisksParams unpack_competing(std::span<const double> x, std::size_t p,
                                      std::size_t K);
IllnessDeathParams unpack_illness_death(std::span<const double> x, std::size_t p);
FrailtyParams unpack_frailty(std::span<const double> x, std::size_t p,
                             std::size_t n_groups, FrailtyVariant variant);
JointParams unpack_joint(std::span<const double> x, std::size_t p_surv,
                         std::size_t n_subjects);

}  // namespace survmc
