#include "survmc/core.hpp"

#include <algorithm>
#include <limits>

namespace survmc {

CensoredObservation CensoredObservation::exact(int id, double time, int label) {
  if (!(time > 0.0))
    throw std::invalid_argument("exact observation time must be positive");
  CensoredObservation o;
  o.subject_id = id;
  o.kind = CensorKind::Exact;
  o.t = time;
  o.event_label = label;
  return o;
}

CensoredObservation CensoredObservation::right(int id, double c, int label) {
  if (c < 0.0) throw std::invalid_argument("censoring time must be nonnegative");
  CensoredObservation o;
  o.subject_id = id;
  o.kind = CensorKind::Right;
  o.c_lower = c;
  o.event_label = label;
  return o;
}

CensoredObservation CensoredObservation::left(int id, double c) {
  if (c < 0.0) throw std::invalid_argument("censoring time must be nonnegative");
  CensoredObservation o;
  o.subject_id = id;
  o.kind = CensorKind::Left;
  o.c_upper = c;
  return o;
}

CensoredObservation CensoredObservation::interval(int id, double lo, double hi) {
  if (lo < 0.0 || !(lo < hi))
    throw std::invalid_argument("interval censoring requires 0 <= lower < upper");
  CensoredObservation o;
  o.subject_id = id;
  o.kind = CensorKind::Interval;
  o.c_lower = lo;
  o.c_upper = hi;
  return o;
}

double DesignMatrix::row_dot(std::size_t i, std::span<const double> beta) const {
  if (beta.size() != n_cols)
    throw std::invalid_argument("coefficient length does not match design columns");
  double s = 0.0;
  const double* row = values.data() + i * n_cols;
  for (std::size_t j = 0; j < n_cols; ++j) s += row[j] * beta[j];
  return s;
}

void DesignMatrix::validate() const {
  if (values.size() != n_rows * n_cols)
    throw std::invalid_argument("design matrix value count mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("design matrix entry not finite");
}

void TimePartition::validate() const {
  if (knots.size() < 2) throw std::invalid_argument("partition needs at least one interval");
  if (knots.front() != 0.0) throw std::invalid_argument("first knot must be zero");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1]))
      throw std::invalid_argument("partition knots must be strictly increasing");
}

TimePartition TimePartition::equally_spaced(std::size_t K, double t_max) {
  if (K < 1 || !(t_max > 0.0)) throw std::invalid_argument("bad partition request");
  TimePartition p;
  p.knots.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k)
    p.knots[k] = t_max * static_cast<double>(k) / static_cast<double>(K);
  return p;
}

std::size_t SurvivalDataset::n_groups() const {
  if (group.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(group.begin(), group.end())) + 1;
}

void SurvivalDataset::validate() const {
  design.validate();
  if (design.n_rows != observations.size())
    throw std::invalid_argument("observation count does not match design rows");
  if (!group.empty() && group.size() != observations.size())
    throw std::invalid_argument("group labels do not match observation count");
}

double survival_from_cumhaz(double H) {
  if (H < 0.0) throw std::invalid_argument("cumulative hazard must be nonnegative");
  return std::exp(-H);
}

double log_density_from_hazard(double log_h, double H) {
  if (H < 0.0) throw std::invalid_argument("cumulative hazard must be nonnegative");
  return log_h - H;
}

double censoring_loglik_contribution(const CensoredObservation& obs, double log_f,
                                     const std::function<double(double)>& log_S_at) {
  switch (obs.kind) {
    case CensorKind::Exact:
      return log_f;
    case CensorKind::Right:
      return log_S_at(obs.c_lower);
    case CensorKind::Left: {
      double S = std::exp(log_S_at(obs.c_upper));
      return std::log1p(-S);
    }
    case CensorKind::Interval: {
      double Sl = std::exp(log_S_at(obs.c_lower));
      double Su = std::exp(log_S_at(obs.c_upper));
      if (Sl - Su <= 0.0)
        throw std::runtime_error("degenerate censoring interval: S(lower) <= S(upper)");
      return std::log(Sl - Su);
    }
  }
  throw std::logic_error("unreachable censoring kind");
}

std::size_t interval_index(double t, const TimePartition& partition) {
  const auto& a = partition.knots;
  if (!(t > 0.0) || t > a.back())
    throw std::invalid_argument("time outside partition range");
  // half-open (a_{k-1}, a_k]: first knot >= t
  auto it = std::lower_bound(a.begin() + 1, a.end(), t);
  return static_cast<std::size_t>(it - a.begin());
}

double piecewise_cumhaz(double t, const TimePartition& partition,
                        std::span<const double> lambdas) {
  if (lambdas.size() != partition.n_intervals())
    throw std::invalid_argument("lambda count does not match partition intervals");
  std::size_t k = interval_index(t, partition);
  double H = 0.0;
  for (std::size_t j = 1; j < k; ++j)
    H += lambdas[j - 1] * (partition.knots[j] - partition.knots[j - 1]);
  H += lambdas[k - 1] * (t - partition.knots[k - 1]);
  return H;
}

}  // namespace survmc
