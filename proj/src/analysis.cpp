#include <gsl/gsl_randist.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "m2m/analysis.hpp"
#include "m2m/error.hpp"

namespace m2m {

void ProtocolParams::validate() const {
  require(n >= 1, "protocol: need at least one station");
  require(omega >= 1 && omega <= n, "protocol: omega must lie in [1, n]");
  require(delta_c >= 1 && delta_c <= pool_size(), "protocol: delta_c must lie in [1, ceil(n / omega)]");
  require(l1 >= 1 && l2 >= 1, "protocol: frame lengths must be >= 1");
  if (omega > 1) require(l2 <= l1 && l1 < omega, "protocol: frame lengths must satisfy l2 <= l1 < omega");
  require(t_r_s > 0.0 && rs_duration_s > 0.0, "protocol: t_r and rs duration must be > 0");
}

std::size_t delta_c_from_percent(double pct, std::size_t pool_size) {
  require(pct > 0.0 && pct <= 100.0, "delta_c percentage must lie in (0, 100]");
  const double slots = pct / 100.0 * static_cast<double>(pool_size);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(slots - 1e-9)));
}

std::size_t frame_length_from_fraction(double fraction, std::size_t omega) {
  require(fraction > 0.0 && fraction <= 1.0, "frame fraction must lie in (0, 1]");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(omega))));
}

double activity_prob_regular(double lambda_p, double lambda_d, double t_r) {
  require(lambda_p >= 0.0 && lambda_d >= 0.0, "activity_prob_regular: rates must be >= 0");
  require(t_r > 0.0, "activity_prob_regular: t_r must be > 0");
  return -std::expm1(-(lambda_p + lambda_d) * t_r);
}

double activity_prob_station(std::span<const double> thetas, double lambda0) {
  // Joint probability of (state, no arrival yet).
  double quiet_regular = 1.0;
  double quiet_alarm = 0.0;
  const double stay_quiet_regular = std::exp(-lambda0);
  const double stay_quiet_alarm = std::exp(-kAlarmArrivalsPerStep);
  for (double theta : thetas) {
    const auto p = transition_matrix(theta);
    const double to_regular = quiet_regular * p[0][0] + quiet_alarm * p[1][0];
    const double to_alarm = quiet_regular * p[0][1] + quiet_alarm * p[1][1];
    quiet_regular = to_regular * stay_quiet_regular;
    quiet_alarm = to_alarm * stay_quiet_alarm;
  }
  return 1.0 - (quiet_regular + quiet_alarm);
}

double activity_prob_alarm(const AlarmScenario& scenario, const CellGeometry& geometry,
                           const RegularTrafficParams& traffic, double t_r_s, std::optional<double> dt_s) {
  scenario.validate();
  require(t_r_s > 0.0, "activity_prob_alarm: t_r must be > 0");
  require(geometry.size() > 0, "activity_prob_alarm: empty geometry");
  const double dt = dt_s.value_or(t_r_s);
  require(dt > 0.0 && dt <= t_r_s, "activity_prob_alarm: dt must lie in (0, t_r]");
  const auto steps = static_cast<std::size_t>(std::llround(t_r_s / dt));
  const double window = std::floor(scenario.t_a_s / t_r_s) * t_r_s;
  const double lambda0 = traffic.total_rate() * dt;

  std::vector<double> thetas(steps);
  double sum = 0.0;
  for (const auto& position : geometry.positions) {
    for (std::size_t i = 0; i < steps; ++i)
      thetas[i] = background_sample(scenario, position, window + static_cast<double>(i) * dt, dt);
    sum += activity_prob_station(thetas, lambda0);
  }
  return sum / static_cast<double>(geometry.size());
}

double collision_prob(double p_a, std::size_t omega) {
  require(p_a >= 0.0 && p_a <= 1.0, "collision_prob: p_a must lie in [0, 1]");
  require(omega >= 1, "collision_prob: omega must be >= 1");
  if (omega < 2 || p_a == 0.0) return 0.0;
  if (p_a == 1.0) return 1.0;
  // 1 - (1-p)^(w-1) (1 + (w-1) p), evaluated without cancellation for small p.
  const double w1 = static_cast<double>(omega - 1);
  const double log_quiet = w1 * std::log1p(-p_a) + std::log1p(w1 * p_a);
  return -std::expm1(log_quiet);
}

double binomial_mass(std::size_t pool_size, double p_c, std::size_t lo, std::size_t hi) {
  hi = std::min(hi, pool_size);
  double sum = 0.0;
  for (std::size_t k = lo; k <= hi; ++k)
    sum += gsl_ran_binomial_pdf(static_cast<unsigned>(k), p_c, static_cast<unsigned>(pool_size));
  return sum;
}

namespace {

std::optional<double> conditional_mean(std::size_t pool_size, double p_c, std::size_t lo, std::size_t hi) {
  hi = std::min(hi, pool_size);
  if (lo > hi) return std::nullopt;
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const double b = gsl_ran_binomial_pdf(static_cast<unsigned>(k), p_c, static_cast<unsigned>(pool_size));
    mass += b;
    first += static_cast<double>(k) * b;
  }
  if (mass <= 0.0) return std::nullopt;
  return first / mass;
}

}  // namespace

CollisionCounts expected_collision_counts(std::size_t n, std::size_t omega, std::size_t delta_c,
                                          double p_c_h0, double p_c_h1) {
  require(omega >= 1 && n >= 1, "expected_collision_counts: invalid n or omega");
  const std::size_t pool = (n + omega - 1) / omega;
  CollisionCounts c;
  if (delta_c > 0) {
    c.e_k_00 = conditional_mean(pool, p_c_h0, 0, delta_c - 1);
    c.e_k_01 = conditional_mean(pool, p_c_h1, 0, delta_c - 1);
  }
  c.e_k_10 = conditional_mean(pool, p_c_h0, delta_c, pool);
  c.e_k_11 = conditional_mean(pool, p_c_h1, delta_c, pool);
  return c;
}

DetectionProbs detection_probs(std::size_t n, std::size_t omega, std::size_t delta_c, double p_c_h0,
                               double p_c_h1) {
  require(omega >= 1 && n >= 1, "detection_probs: invalid n or omega");
  const std::size_t pool = (n + omega - 1) / omega;
  const auto split = [&](double p_c) {
    const double below = delta_c == 0 ? 0.0 : binomial_mass(pool, p_c, 0, delta_c - 1);
    const double above = delta_c > pool ? 0.0 : binomial_mass(pool, p_c, delta_c, pool);
    const double total = below + above;
    return std::pair{below / total, above / total};
  };
  DetectionProbs d;
  std::tie(d.p00, d.p10) = split(p_c_h0);
  std::tie(d.p01, d.p11) = split(p_c_h1);
  return d;
}

AnalysisReport expected_costs(const ProtocolParams& params, const ActivityProbs& activity, double p_h1) {
  params.validate();
  const auto resolution = resolution_probs(params.omega, params.l1, params.l2, activity.p_a0);
  return expected_costs(params, activity, p_h1, resolution);
}

AnalysisReport expected_costs(const ProtocolParams& params, const ActivityProbs& activity, double p_h1,
                              const ResolutionProbs& resolution) {
  params.validate();
  require(p_h1 >= 0.0 && p_h1 <= 1.0, "expected_costs: P(H1) must lie in [0, 1]");

  AnalysisReport r;
  r.p_h1 = p_h1;
  r.pool_size = params.pool_size();
  r.p_c_h0 = collision_prob(activity.p_a0, params.omega);
  r.p_c_h1 = collision_prob(activity.p_a1, params.omega);
  r.detection = detection_probs(params.n, params.omega, params.delta_c, r.p_c_h0, r.p_c_h1);
  r.counts = expected_collision_counts(params.n, params.omega, params.delta_c, r.p_c_h0, r.p_c_h1);
  r.resolution = resolution;
  r.e_s = expected_frame_cost(params.omega, params.l1, params.l2, resolution);

  const double base = static_cast<double>(r.pool_size);
  const double omega = static_cast<double>(params.omega);
  const double escalation = static_cast<double>(params.l1 + params.l2 + params.omega);
  const auto cost = [base](std::optional<double> k, double per_collision) -> std::optional<double> {
    if (!k) return std::nullopt;
    return base + *k * per_collision;
  };
  r.e_c_00 = cost(r.counts.e_k_00, r.e_s);
  r.e_c_10 = cost(r.counts.e_k_10, omega);
  r.e_c_01 = cost(r.counts.e_k_01, escalation);
  r.e_c_11 = cost(r.counts.e_k_11, omega);

  const double p_h0 = 1.0 - p_h1;
  const auto term = [](std::optional<double> c, double p_decision, double p_hyp) {
    return c ? *c * p_decision * p_hyp : 0.0;
  };
  r.e_c = term(r.e_c_00, r.detection.p00, p_h0) + term(r.e_c_10, r.detection.p10, p_h0) +
          term(r.e_c_01, r.detection.p01, p_h1) + term(r.e_c_11, r.detection.p11, p_h1);
  return r;
}

double expected_cost_naive(const ProtocolParams& params, const ActivityProbs& activity, double p_h1) {
  params.validate();
  require(p_h1 >= 0.0 && p_h1 <= 1.0, "expected_cost_naive: P(H1) must lie in [0, 1]");
  const double pool = static_cast<double>(params.pool_size());
  const double p_c = (1.0 - p_h1) * collision_prob(activity.p_a0, params.omega) +
                     p_h1 * collision_prob(activity.p_a1, params.omega);
  return pool + pool * p_c * static_cast<double>(params.omega);
}

}  // namespace m2m
