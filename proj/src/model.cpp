#include "survmc/model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace survmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> take(std::span<const double> x, std::size_t first,
                         std::size_t count) {
  return std::vector<double>(x.begin() + first, x.begin() + first + count);
}
}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "aft") return Family::Aft;
  if (name == "ph") return Family::PhPiecewise;
  if (name == "cure") return Family::Cure;
  if (name == "competing_risks") return Family::CompetingRisks;
  if (name == "illness_death") return Family::IllnessDeath;
  if (name == "frailty") return Family::Frailty;
  if (name == "joint") return Family::Joint;
  throw std::invalid_argument("unknown model family: " + name);
}

std::string family_to_string(Family family) {
  switch (family) {
    case Family::Aft: return "aft";
    case Family::PhPiecewise: return "ph";
    case Family::Cure: return "cure";
    case Family::CompetingRisks: return "competing_risks";
    case Family::IllnessDeath: return "illness_death";
    case Family::Frailty: return "frailty";
    case Family::Joint: return "joint";
  }
  throw std::logic_error("unreachable family");
}

double to_unconstrained(const ParamDef& def, double x) {
  switch (def.transform) {
    case TransformKind::Identity: return x;
    case TransformKind::Log:
      if (!(x > 0.0)) throw std::invalid_argument(def.name + ": boundary value");
      return std::log(x);
    case TransformKind::Logit:
      if (!(x > def.lower) || !(x < def.upper))
        throw std::invalid_argument(def.name + ": boundary value");
      return logit((x - def.lower) / (def.upper - def.lower));
  }
  throw std::logic_error("unreachable transform");
}

double to_natural(const ParamDef& def, double z) {
  switch (def.transform) {
    case TransformKind::Identity: return z;
    case TransformKind::Log: return std::exp(z);
    case TransformKind::Logit:
      return def.lower + (def.upper - def.lower) * sigmoid(z);
  }
  throw std::logic_error("unreachable transform");
}

double transform_log_jacobian(const ParamDef& def, double z) {
  switch (def.transform) {
    case TransformKind::Identity: return 0.0;
    case TransformKind::Log: return z;
    case TransformKind::Logit: {
      const double s = sigmoid(z);
      return std::log(def.upper - def.lower) + std::log(s) + std::log1p(-s);
    }
  }
  throw std::logic_error("unreachable transform");
}

double Target::log_prior(std::span<const double> natural) const {
  double lp = 0.0;
  for (std::size_t j = 0; j < defs.size(); ++j) {
    if (sigma_block >= 0 && j == static_cast<std::size_t>(sigma_block)) {
      const Prior& pr = defs[j].prior;
      lp += inv_wishart2_logpdf(natural[j], natural[j + 1], natural[j + 2], pr.a,
                                pr.b);
      j += 2;
      continue;
    }
    if (!defs[j].latent) lp += prior_logpdf(defs[j].prior, natural[j]);
    if (lp == kNegInf) return kNegInf;
  }
  return lp;
}

double Target::log_posterior(std::span<const double> natural) const {
  const double lp = log_prior(natural);
  if (lp == kNegInf) return kNegInf;
  return lp + loglik(natural);
}

std::vector<double> Target::unconstrain(std::span<const double> natural) const {
  std::vector<double> z(natural.begin(), natural.end());
  for (std::size_t j = 0; j < defs.size(); ++j) {
    if (sigma_block >= 0 && j == static_cast<std::size_t>(sigma_block)) {
      const double s11 = natural[j], s12 = natural[j + 1], s22 = natural[j + 2];
      const double l11 = std::sqrt(s11);
      const double l21 = s12 / l11;
      const double l22sq = s22 - l21 * l21;
      if (!(s11 > 0.0) || !(l22sq > 0.0))
        throw std::invalid_argument("covariance block not positive-definite");
      z[j] = std::log(l11);
      z[j + 1] = l21;
      z[j + 2] = 0.5 * std::log(l22sq);
      j += 2;
      continue;
    }
    z[j] = to_unconstrained(defs[j], natural[j]);
  }
  return z;
}

std::vector<double> Target::constrain(std::span<const double> z) const {
  std::vector<double> x(z.begin(), z.end());
  for (std::size_t j = 0; j < defs.size(); ++j) {
    if (sigma_block >= 0 && j == static_cast<std::size_t>(sigma_block)) {
      const double l11 = std::exp(z[j]);
      const double l21 = z[j + 1];
      const double l22 = std::exp(z[j + 2]);
      x[j] = l11 * l11;
      x[j + 1] = l11 * l21;
      x[j + 2] = l21 * l21 + l22 * l22;
      j += 2;
      continue;
    }
    x[j] = to_natural(defs[j], z[j]);
  }
  return x;
}

double Target::log_jacobian(std::span<const double> z) const {
  double lj = 0.0;
  for (std::size_t j = 0; j < defs.size(); ++j) {
    if (sigma_block >= 0 && j == static_cast<std::size_t>(sigma_block)) {
      // dSigma/dL is 4*l11^2*l22 for the 2x2 case; the log map on the
      // diagonal adds l11*l22.
      lj += std::log(4.0) + 3.0 * z[j] + 2.0 * z[j + 2];
      j += 2;
      continue;
    }
    lj += transform_log_jacobian(defs[j], z[j]);
  }
  return lj;
}

AftParams unpack_aft(std::span<const double> x, std::size_t p) {
  AftParams params;
  params.beta = take(x, 0, p);
  params.alpha = x[p];
  return params;
}

PhParams unpack_ph(std::span<const double> x, std::size_t p, std::size_t K) {
  PhParams params;
  params.beta = take(x, 0, p);
  params.lambdas = take(x, p, K);
  return params;
}

CureParams unpack_cure(std::span<const double> x, std::size_t p) {
  CureParams params;
  params.betaC = take(x, 0, p + 1);
  params.betaU = take(x, p + 1, p);
  params.lambda = x[2 * p + 1];
  params.alpha = x[2 * p + 2];
  return params;
}

CompetingRisksParams unpack_competing(std::span<const double> x, std::size_t p,
                                      std::size_t K) {
  CompetingRisksParams params;
  params.beta.resize(K);
  for (std::size_t k = 0; k < K; ++k) params.beta[k] = take(x, k * p, p);
  params.lambdas = take(x, K * p, K);
  params.alphas = take(x, K * p + K, K);
  return params;
}

IllnessDeathParams unpack_illness_death(std::span<const double> x, std::size_t p) {
  IllnessDeathParams params;
  for (std::size_t k = 0; k < 3; ++k) params.beta[k] = take(x, k * p, p);
  for (std::size_t k = 0; k < 3; ++k) {
    params.lambdas[k] = x[3 * p + k];
    params.alphas[k] = x[3 * p + 3 + k];
  }
  return params;
}

FrailtyParams unpack_frailty(std::span<const double> x, std::size_t p,
                             std::size_t n_groups, FrailtyVariant variant) {
  FrailtyParams params;
  params.variant = variant;
  params.beta = take(x, 0, p);
  params.alpha = x[p];
  if (variant == FrailtyVariant::MultiplicativeGamma) {
    params.psi = x[p + 1];
    params.w = take(x, p + 2, n_groups);
  } else {
    params.precision = x[p + 1];
    params.b = take(x, p + 2, n_groups);
  }
  return params;
}

JointParams unpack_joint(std::span<const double> x, std::size_t p_surv,
                         std::size_t n_subjects) {
  JointParams params;
  const std::size_t pl = p_surv + 1;  // intercept, slope, extra covariates
  params.betaL = take(x, 0, pl);
  params.betaS = take(x, pl, p_surv);
  std::size_t j = pl + p_surv;
  params.gamma = x[j++];
  params.alpha = x[j++];
  params.sigma = x[j++];
  params.s11 = x[j++];
  params.s12 = x[j++];
  params.s22 = x[j++];
  params.b.resize(n_subjects);
  for (std::size_t i = 0; i < n_subjects; ++i) {
    params.b[i] = {x[j], x[j + 1]};
    j += 2;
  }
  return params;
}

namespace {

struct DefBuilder {
  std::vector<ParamDef> defs;
  const std::map<std::string, Prior>* overrides = nullptr;
  int next_block = 0;

  Prior resolve(const std::string& name, Prior fallback) const {
    auto it = overrides->find(name);
    return it == overrides->end() ? fallback : it->second;
  }
  void global(const std::string& name, TransformKind tr, Prior prior,
              double lo = 0.0, double hi = 1.0) {
    defs.push_back({name, tr, lo, hi, resolve(name, prior), false, next_block++});
  }
  void latent(const std::string& name, TransformKind tr, int block) {
    defs.push_back({name, tr, 0.0, 1.0, Prior{}, true, block});
  }
};

std::string idx1(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i + 1) + "]";
}
std::string idx2(const std::string& base, std::size_t i, std::size_t k) {
  return base + "[" + std::to_string(i + 1) + "," + std::to_string(k + 1) + "]";
}

Prior beta_prior() { return Prior::normal(0.0, 0.001); }
Prior lambda_prior() { return Prior::gamma(0.01, 0.01); }
Prior alpha_prior() { return Prior::uniform(0.0, 10.0); }

}  // namespace

Target build_target(const ModelSpec& spec, const SurvivalDataset& data) {
  data.validate();
  const std::size_t p = data.design.n_cols;
  DefBuilder b;
  b.overrides = &spec.prior_overrides;
  Target target;

  switch (spec.family) {
    case Family::Aft: {
      for (std::size_t j = 0; j < p; ++j)
        b.global(idx1("beta", j), TransformKind::Identity, beta_prior());
      b.global("alpha", TransformKind::Logit, alpha_prior(), 0.0, 10.0);
      target.loglik = [&data, p](std::span<const double> x) {
        return aft_loglik(unpack_aft(x, p), data);
      };
      target.init = [p](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.2, 1.2);
        std::vector<double> x(p + 1);
        for (std::size_t j = 0; j < p; ++j) x[j] = normal(rng);
        x[p] = unif(rng);
        return x;
      };
      break;
    }
    case Family::PhPiecewise: {
      TimePartition partition = spec.partition;
      partition.validate();
      const std::size_t K = partition.n_intervals();
      for (std::size_t j = 0; j < p; ++j)
        b.global(idx1("beta", j), TransformKind::Identity, beta_prior());
      for (std::size_t k = 0; k < K; ++k)
        b.global(idx1("lambda", k), TransformKind::Log, lambda_prior());
      target.loglik = [&data, p, K, partition](std::span<const double> x) {
        return ph_piecewise_loglik(unpack_ph(x, p, K), data, partition);
      };
      target.init = [p, K](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.1, 1.0);
        std::vector<double> x(p + K);
        for (std::size_t j = 0; j < p; ++j) x[j] = normal(rng);
        for (std::size_t k = 0; k < K; ++k) x[p + k] = unif(rng);
        return x;
      };
      break;
    }
    case Family::Cure: {
      for (std::size_t j = 0; j < p + 1; ++j)
        b.global(idx1("betaC", j), TransformKind::Identity, beta_prior());
      for (std::size_t j = 0; j < p; ++j)
        b.global(idx1("betaU", j), TransformKind::Identity, beta_prior());
      b.global("lambda", TransformKind::Log, lambda_prior());
      b.global("alpha", TransformKind::Logit, alpha_prior(), 0.0, 10.0);
      target.loglik = [&data, p](std::span<const double> x) {
        return cure_loglik(unpack_cure(x, p), data);
      };
      target.init = [p](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.1, 1.0);
        std::vector<double> x(2 * p + 3);
        for (std::size_t j = 0; j < 2 * p + 1; ++j) x[j] = normal(rng);
        x[2 * p + 1] = unif(rng);
        x[2 * p + 2] = unif(rng) + 0.2;
        return x;
      };
      break;
    }
    case Family::CompetingRisks: {
      const std::size_t K = spec.n_risks;
      if (K < 1) throw std::invalid_argument("competing risks: n_risks must be >= 1");
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < p; ++j)
          b.global(idx2("beta", j, k), TransformKind::Identity, beta_prior());
      for (std::size_t k = 0; k < K; ++k)
        b.global(idx1("lambda", k), TransformKind::Log, lambda_prior());
      for (std::size_t k = 0; k < K; ++k)
        b.global(idx1("alpha", k), TransformKind::Logit, alpha_prior(), 0.0, 10.0);
      target.loglik = [&data, p, K](std::span<const double> x) {
        return competing_risks_loglik(unpack_competing(x, p, K), data);
      };
      target.init = [p, K](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.1, 1.0);
        std::vector<double> x(K * p + 2 * K);
        for (std::size_t j = 0; j < K * p; ++j) x[j] = normal(rng);
        for (std::size_t k = 0; k < K; ++k) {
          x[K * p + k] = unif(rng);
          x[K * p + K + k] = unif(rng) + 0.2;
        }
        return x;
      };
      break;
    }
    case Family::IllnessDeath: {
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t j = 0; j < p; ++j)
          b.global(idx2("beta", j, k), TransformKind::Identity, beta_prior());
      for (std::size_t k = 0; k < 3; ++k)
        b.global(idx1("lambda", k), TransformKind::Log, lambda_prior());
      for (std::size_t k = 0; k < 3; ++k)
        b.global(idx1("alpha", k), TransformKind::Logit, alpha_prior(), 0.0, 10.0);
      target.loglik = [&data, p](std::span<const double> x) {
        return illness_death_loglik(unpack_illness_death(x, p), data);
      };
      target.init = [p](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.1, 1.0);
        std::vector<double> x(3 * p + 6);
        for (std::size_t j = 0; j < 3 * p; ++j) x[j] = normal(rng);
        for (std::size_t k = 0; k < 3; ++k) {
          x[3 * p + k] = unif(rng);
          x[3 * p + 3 + k] = unif(rng) + 0.2;
        }
        return x;
      };
      break;
    }
    case Family::Frailty: {
      const std::size_t G = data.n_groups();
      if (G == 0) throw std::invalid_argument("frailty: group labels required");
      const FrailtyVariant variant = spec.frailty_variant;
      const bool mult = variant == FrailtyVariant::MultiplicativeGamma;
      for (std::size_t j = 0; j < p; ++j)
        b.global(idx1("beta", j), TransformKind::Identity, beta_prior());
      b.global("alpha", TransformKind::Logit, alpha_prior(), 0.0, 10.0);
      if (mult)
        b.global("psi", TransformKind::Log, Prior::gamma(0.01, 0.01));
      else
        b.global("tau", TransformKind::Log, Prior::gamma(0.01, 0.01));
      for (std::size_t g = 0; g < G; ++g)
        b.latent(idx1(mult ? "w" : "b", g),
                 mult ? TransformKind::Log : TransformKind::Identity,
                 b.next_block++);
      auto members = std::make_shared<std::vector<std::vector<std::size_t>>>(G);
      for (std::size_t i = 0; i < data.n(); ++i)
        (*members)[static_cast<std::size_t>(data.group[i])].push_back(i);
      target.loglik = [&data, p, G, variant](std::span<const double> x) {
        return frailty_loglik(unpack_frailty(x, p, G, variant), data);
      };
      const int first_latent_block = static_cast<int>(p) + 2;
      target.loglik_block = [&data, p, G, variant, members, first_latent_block](
                                std::span<const double> x, int block) {
        const std::size_t g = static_cast<std::size_t>(block - first_latent_block);
        return frailty_loglik_group(unpack_frailty(x, p, G, variant), data, *members,
                                    g);
      };
      target.init = [p, G, mult](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.3, 1.3);
        std::vector<double> x(p + 2 + G);
        for (std::size_t j = 0; j < p; ++j) x[j] = normal(rng);
        x[p] = unif(rng);
        x[p + 1] = unif(rng);
        for (std::size_t g = 0; g < G; ++g)
          x[p + 2 + g] = mult ? std::exp(0.2 * normal(rng)) : 0.2 * normal(rng);
        return x;
      };
      break;
    }
    case Family::Joint: {
      if (data.longitudinal.size() != data.n())
        throw std::invalid_argument("joint: longitudinal records required");
      const std::size_t n = data.n();
      const std::size_t pl = p + 1;
      GLRule rule = gauss_legendre(spec.gl_order);
      b.global("betaL[1]", TransformKind::Identity, beta_prior());
      b.global("betaL[2]", TransformKind::Identity, beta_prior());
      for (std::size_t j = 2; j < pl; ++j)
        b.global(idx1("betaL", j), TransformKind::Identity, beta_prior());
      for (std::size_t j = 0; j < p; ++j)
        b.global(idx1("betaS", j), TransformKind::Identity, beta_prior());
      b.global("gamma", TransformKind::Identity, beta_prior());
      b.global("alpha", TransformKind::Logit, alpha_prior(), 0.0, 10.0);
      b.global("sigma", TransformKind::Logit, Prior::uniform(0.0, 100.0), 0.0,
               100.0);
      target.sigma_block = static_cast<int>(b.defs.size());
      const Prior iw = b.resolve("Sigma", Prior::inv_wishart2(1.0, 2.0));
      b.defs.push_back({"Sigma[1,1]", TransformKind::Identity, 0.0, 1.0, iw, false,
                        b.next_block++});
      b.defs.push_back({"Sigma[1,2]", TransformKind::Identity, 0.0, 1.0, Prior{},
                        false, b.next_block++});
      b.defs.push_back({"Sigma[2,2]", TransformKind::Identity, 0.0, 1.0, Prior{},
                        false, b.next_block++});
      const int first_latent_block = b.next_block;
      for (std::size_t i = 0; i < n; ++i) {
        const int block = b.next_block++;
        b.latent(idx2("b", i, 0), TransformKind::Identity, block);
        b.latent(idx2("b", i, 1), TransformKind::Identity, block);
      }
      target.loglik = [&data, p, n, rule](std::span<const double> x) {
        return joint_loglik(unpack_joint(x, p, n), data, rule);
      };
      target.loglik_block = [&data, p, n, rule, first_latent_block](
                                std::span<const double> x, int block) {
        const std::size_t i = static_cast<std::size_t>(block - first_latent_block);
        return joint_loglik_subject(unpack_joint(x, p, n), data, rule, i);
      };
      const std::size_t n_glob = pl + p + 6;
      target.init = [p, pl, n, n_glob, &data](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.3, 1.3);
        std::vector<double> x(n_glob + 2 * n, 0.0);
        // Center the longitudinal intercept on the sample mean so that the
        // first finite-posterior attempt is not hopelessly far out.
        double ybar = 0.0;
        std::size_t ny = 0;
        for (const auto& rec : data.longitudinal)
          for (const auto& pt : rec) {
            ybar += pt.value;
            ++ny;
          }
        if (ny > 0) ybar /= static_cast<double>(ny);
        for (std::size_t j = 0; j < pl + p + 1; ++j) x[j] = 0.3 * normal(rng);
        x[0] += ybar;
        x[pl + p + 1] = unif(rng);        // alpha
        x[pl + p + 2] = unif(rng);        // sigma
        x[pl + p + 3] = unif(rng);        // s11
        x[pl + p + 4] = 0.0;              // s12
        x[pl + p + 5] = unif(rng);        // s22
        for (std::size_t i = 0; i < 2 * n; ++i) x[n_glob + i] = 0.1 * normal(rng);
        return x;
      };
      break;
    }
  }

  target.defs = std::move(b.defs);
  return target;
}

}  // namespace survmc
