#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "m2m/error.hpp"
#include "m2m/traffic.hpp"

namespace m2m {

CellGeometry place_stations(std::size_t n, double radius_m, std::uint64_t seed) {
  require(n >= 1, "place_stations: need at least one station");
  require(radius_m > 0.0, "place_stations: radius must be > 0");
  CellGeometry cell;
  cell.radius_m = radius_m;
  cell.positions.reserve(n);
  auto rng = make_stream(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    // Radial CDF d^2 / r^2.
    const double d = radius_m * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    cell.positions.push_back({d * std::cos(phi), d * std::sin(phi)});
  }
  return cell;
}

void RegularTrafficParams::validate() const {
  require(lambda_p > 0.0, "lambda_p must be > 0");
  require(lambda_d >= 0.0, "lambda_d must be >= 0");
}

std::string_view to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::Periodic: return "periodic";
    case ReportKind::OnDemand: return "on_demand";
    case ReportKind::Alarm: return "alarm";
  }
  return "unknown";
}

double Deadlines::for_kind(ReportKind kind) const {
  switch (kind) {
    case ReportKind::Periodic: return tau_p_s;
    case ReportKind::OnDemand: return tau_d_s;
    case ReportKind::Alarm: return tau_a_s;
  }
  return tau_p_s;
}

void Deadlines::validate() const {
  require(tau_a_s > 0.0, "tau_a must be > 0");
  require(tau_a_s < tau_d_s && tau_d_s <= tau_p_s, "deadlines must satisfy tau_a < tau_d <= tau_p");
}

TransitionMatrix transition_matrix(double theta) {
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  // P0 = [[1, 0], [1, 0]], P1 = [[0, 1], [1, 0]].
  return {{{1.0 - theta, theta}, {1.0, 0.0}}};
}

std::array<double, 2> stationary_distribution(double theta) {
  const auto p = transition_matrix(theta);
  // Two-state balance: pi0 * p01 = pi1 * p10.
  const double pi1 = p[0][1] / (p[0][1] + p[1][0]);
  return {1.0 - pi1, pi1};
}

StepResult step_station(StationState& state, double theta, const StepContext& context,
                        SplitMix64& rng) {
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  require(context.lambda0 >= 0.0, "lambda0 must be >= 0");

  StepResult result;
  const ReportingState previous = state.reporting_state;
  if (previous == ReportingState::Alarm) {
    state.reporting_state = ReportingState::Regular;
  } else if (theta > 0.0 && rng.uniform() < theta) {
    state.reporting_state = ReportingState::Alarm;
    result.activated = true;
  }

  const bool alarm = state.reporting_state == ReportingState::Alarm;
  const double mean = alarm ? kAlarmArrivalsPerStep : context.lambda0;
  if (mean <= 0.0) return result;

  const int count = std::poisson_distribution<int>(mean)(rng);
  result.generated.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Arrival a;
    if (alarm) {
      a.kind = ReportKind::Alarm;
      a.time_s = context.pulse_time_s ? *context.pulse_time_s
                                      : context.start_s + rng.uniform() * context.dt_s;
    } else {
      a.kind = rng.uniform() < context.periodic_share ? ReportKind::Periodic : ReportKind::OnDemand;
      a.time_s = context.start_s + rng.uniform() * context.dt_s;
    }
    result.generated.push_back(a);
  }
  std::sort(result.generated.begin(), result.generated.end(),
            [](const Arrival& x, const Arrival& y) { return x.time_s < y.time_s; });

  // One admitted report per gating window; the rest is discarded.
  if (state.pending.empty() && !result.generated.empty()) {
    state.pending.push_back({result.generated.front().kind, result.generated.front().time_s});
    result.admitted = 1;
  }
  return result;
}

double expected_arrivals(std::span<const double> thetas, double lambda0) {
  std::array<double, 2> pi{1.0, 0.0};
  double total = 0.0;
  for (double theta : thetas) {
    const auto p = transition_matrix(theta);
    pi = {pi[0] * p[0][0] + pi[1] * p[1][0], pi[0] * p[0][1] + pi[1] * p[1][1]};
    total += lambda0 * pi[0] + kAlarmArrivalsPerStep * pi[1];
  }
  return total;
}

std::uint64_t ActivationCurve::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

double ActivationCurve::span_s() const {
  const auto first = std::find_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  if (first == counts.end()) return 0.0;
  const auto last = std::find_if(counts.rbegin(), counts.rend(), [](auto c) { return c > 0; });
  const auto bins = std::distance(first, last.base());
  return static_cast<double>(bins) * bin_width_s;
}

ActivationCurve activation_curve(const CellGeometry& geometry, const AlarmScenario& scenario,
                                 double bin_width_s, std::uint64_t seed) {
  require(bin_width_s > 0.0, "activation_curve: bin width must be > 0");
  scenario.validate();

  double latest = 0.0;
  for (const auto& p : geometry.positions)
    latest = std::max(latest, scenario.activation_time(p) - scenario.t_a_s);
  // One spare bin absorbs rounding at the last boundary; trimmed below.
  const auto bins = static_cast<std::size_t>(std::floor(latest / bin_width_s)) + 2;

  ActivationCurve curve;
  curve.origin_s = scenario.t_a_s;
  curve.bin_width_s = bin_width_s;
  curve.counts.assign(bins, 0);

  StepContext context;
  context.dt_s = bin_width_s;
  for (std::size_t n = 0; n < geometry.size(); ++n) {
    const Point position = geometry.positions[n];
    StationState state;
    state.station_id = n;
    auto rng = make_stream(seed, n);
    for (std::size_t i = 0; i < bins; ++i) {
      context.start_s = scenario.t_a_s + static_cast<double>(i) * bin_width_s;
      const double theta = background_sample(scenario, position, context.start_s, bin_width_s);
      if (theta == 0.0 && state.reporting_state == ReportingState::Regular) continue;
      context.pulse_time_s = scenario.activation_time(position);
      if (step_station(state, theta, context, rng).activated) ++curve.counts[i];
      state.pending.clear();
    }
  }
  while (curve.counts.size() > 1 && curve.counts.back() == 0) curve.counts.pop_back();
  return curve;
}

}  // namespace m2m
