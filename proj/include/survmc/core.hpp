#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace survmc {

enum class CensorKind { Exact, Right, Left, Interval };

// One subject's time record. For Exact, `t` holds the event time; for
// Right/Left/Interval the relevant bound(s) live in c_lower/c_upper.
struct CensoredObservation {
  int subject_id = 0;
  CensorKind kind = CensorKind::Exact;
  double t = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
  int event_label = -1;  // cause index / transition code; -1 if unused

  static CensoredObservation exact(int id, double time, int label = -1);
  static CensoredObservation right(int id, double c, int label = -1);
  static CensoredObservation left(int id, double c);
  static CensoredObservation interval(int id, double lo, double hi);
};

struct DesignMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> column_names;

  double operator()(std::size_t i, std::size_t j) const {
    return values[i * n_cols + j];
  }
  double row_dot(std::size_t i, std::span<const double> beta) const;
  void validate() const;
};

// Knots a_0 < a_1 < ... < a_K with a_0 = 0; K = knots.size()-1 intervals.
struct TimePartition {
  std::vector<double> knots;

  std::size_t n_intervals() const { return knots.empty() ? 0 : knots.size() - 1; }
  void validate() const;
  static TimePartition equally_spaced(std::size_t K, double t_max);
};

struct LongitudinalPoint {
  double time = 0.0;
  double value = 0.0;
};

// Per-subject rows for the three-state illness-death layout:
// t1 = state-2 entry or censoring, t2 = total time, t3 = sojourn after
// the intermediate transition (clock reset), event = indicator row for
// transitions 1->2, 1->3, 2->3.
struct MultiStateRecord {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  std::array<int, 3> event{0, 0, 0};
};

struct SurvivalDataset {
  std::vector<CensoredObservation> observations;
  DesignMatrix design;

  std::vector<int> group;                                   // frailty models
  std::vector<MultiStateRecord> multistate;                 // illness-death
  std::vector<std::vector<LongitudinalPoint>> longitudinal; // joint models

  std::size_t n() const { return observations.size(); }
  std::size_t n_groups() const;
  void validate() const;
};

// S(t) = exp(-H(t))
double survival_from_cumhaz(double H);

// log f = log h - H
double log_density_from_hazard(double log_h, double H);

// Likelihood contribution of one observation given the family's log-density
// at the event time and log-survival evaluable at the censoring bounds.
double censoring_loglik_contribution(const CensoredObservation& obs, double log_f,
                                     const std::function<double(double)>& log_S_at);

// Index k in 1..K with t in (a_{k-1}, a_k].
std::size_t interval_index(double t, const TimePartition& partition);

// Cumulative hazard of the piecewise-constant hazard sum_k lambda_k I_(a_{k-1},a_k].
double piecewise_cumhaz(double t, const TimePartition& partition,
                        std::span<const double> lambdas);

}  // namespace survmc
