#pragma once

#include <cstddef>
#include <optional>

#include "m2m/fsa.hpp"
#include "m2m/traffic.hpp"

namespace m2m {

/// Reservation-pool design parameters. `delta_c` is an absolute count of
/// collided preallocated RSs.
struct ProtocolParams {
  std::size_t n = 0;
  std::size_t omega = 1;
  std::size_t delta_c = 1;
  std::size_t l1 = 1;
  std::size_t l2 = 1;
  double t_r_s = 2.5;
  double rs_duration_s = 200e-6;

  std::size_t pool_size() const { return (n + omega - 1) / omega; }
  void validate() const;
};

/// ceil(pct / 100 * pool_size).
std::size_t delta_c_from_percent(double pct, std::size_t pool_size);

/// round(fraction * omega), at least 1.
std::size_t frame_length_from_fraction(double fraction, std::size_t omega);

struct ActivityProbs {
  double p_a0 = 0.0;  ///< per-pool activity under regular reporting
  double p_a1 = 0.0;  ///< per-pool activity under an alarm (population mean)
};

/// 1 - exp(-(lambda_p + lambda_d) t_r).
double activity_prob_regular(double lambda_p, double lambda_d, double t_r);

/// Exact probability that a station starting in the regular state emits at
/// least one arrival while stepping through `thetas` with `lambda0` regular
/// arrivals per step.
double activity_prob_station(std::span<const double> thetas, double lambda0);

/// Population-mean activity over the gating window [k T_R, (k+1) T_R) that
/// contains the alarm instant, stepped at `dt_s` (defaults to T_R).
double activity_prob_alarm(const AlarmScenario& scenario, const CellGeometry& geometry,
                           const RegularTrafficParams& traffic, double t_r_s,
                           std::optional<double> dt_s = std::nullopt);

/// Probability that at least two of `omega` stations sharing an RS are active.
double collision_prob(double p_a, std::size_t omega);

/// Binomial(pool_size, p_c) mass over k in [lo, hi].
double binomial_mass(std::size_t pool_size, double p_c, std::size_t lo, std::size_t hi);

struct CollisionCounts {
  // Conditional means of Binomial(pool, P_C) below (i = 0) or at/above
  // (i = 1) the threshold; empty when the conditioning event has zero mass.
  std::optional<double> e_k_00, e_k_10, e_k_01, e_k_11;
};

CollisionCounts expected_collision_counts(std::size_t n, std::size_t omega, std::size_t delta_c,
                                          double p_c_h0, double p_c_h1);

struct DetectionProbs {
  double p00 = 0.0;  ///< P(H0 | H0)
  double p10 = 0.0;  ///< P(H1 | H0), false alarm
  double p01 = 0.0;  ///< P(H0 | H1), miss
  double p11 = 0.0;  ///< P(H1 | H1), detection
};

DetectionProbs detection_probs(std::size_t n, std::size_t omega, std::size_t delta_c,
                               double p_c_h0, double p_c_h1);

struct AnalysisReport {
  double p_c_h0 = 0.0;
  double p_c_h1 = 0.0;
  DetectionProbs detection;
  CollisionCounts counts;
  ResolutionProbs resolution;
  double e_s = 0.0;
  std::optional<double> e_c_00, e_c_10, e_c_01, e_c_11;
  double e_c = 0.0;
  double p_h1 = 0.0;
  std::size_t pool_size = 0;
};

/// Expected RSs per pool of the adaptive scheme, weighted over the four
/// hypothesis/decision pairs.
AnalysisReport expected_costs(const ProtocolParams& params, const ActivityProbs& activity, double p_h1);

/// Same, reusing already computed resolution probabilities for the regular regime.
AnalysisReport expected_costs(const ProtocolParams& params, const ActivityProbs& activity, double p_h1,
                              const ResolutionProbs& resolution);

/// Expected RSs per pool when every collided RS always expands into omega RSs.
double expected_cost_naive(const ProtocolParams& params, const ActivityProbs& activity, double p_h1);

}  // namespace m2m
