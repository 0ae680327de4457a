#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "m2m/rng.hpp"

namespace m2m {

// ---------------------------------------------------------------------------
// Cell geometry
// ---------------------------------------------------------------------------

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

double distance(Point a, Point b);

/// Circular cell with the AP at the origin.
struct CellGeometry {
  double radius_m = 0.0;
  std::vector<Point> positions;

  std::size_t size() const { return positions.size(); }
};

/// Places `n` stations i.i.d. uniformly over the disk of radius `radius_m`.
CellGeometry place_stations(std::size_t n, double radius_m, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Regular traffic and deadlines
// ---------------------------------------------------------------------------

struct RegularTrafficParams {
  double lambda_p = 0.0;  ///< periodic rate, reports/s (= 1 / t_ri)
  double lambda_d = 0.0;  ///< on-demand rate, reports/s

  double t_ri() const { return 1.0 / lambda_p; }
  double total_rate() const { return lambda_p + lambda_d; }
  void validate() const;
};

enum class ReportKind : std::uint8_t { Periodic, OnDemand, Alarm };

std::string_view to_string(ReportKind kind);

struct Deadlines {
  double tau_a_s = 5.0;
  double tau_d_s = 60.0;
  double tau_p_s = 300.0;

  double for_kind(ReportKind kind) const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// Alarm propagation
// ---------------------------------------------------------------------------

struct UnitCorrelation {};
struct ExpDecayCorrelation {
  double decay_per_m = 0.0;
};
/// Square-root cap, normalized so that the value at the epicenter is 1.
struct SqrtCapCorrelation {
  double d_max_m = 0.0;
};

using CorrelationModel = std::variant<UnitCorrelation, ExpDecayCorrelation, SqrtCapCorrelation>;

/// Probability that a station at distance `d_m` from the epicenter is triggered.
double spatial_correlation(const CorrelationModel& model, double d_m);
std::string describe(const CorrelationModel& model);
void validate(const CorrelationModel& model);

struct AlarmScenario {
  Point epicenter;
  double speed_m_per_s = 4000.0;
  double t_a_s = 0.0;
  CorrelationModel correlation = UnitCorrelation{};

  /// Instant the wavefront reaches `position`.
  double activation_time(Point position) const;
  void validate() const;
};

/// Discrete-time background sample: Psi(d) if the wavefront reaches
/// `position` inside [t, t + dt), else 0.
double background_sample(const AlarmScenario& scenario, Point position, double t_s, double dt_s);

/// Superposition over several independent events: 1 - prod(1 - theta_i).
double background_sample(std::span<const AlarmScenario> scenarios, Point position, double t_s,
                         double dt_s);

// ---------------------------------------------------------------------------
// Coupled Markov-modulated Poisson station model
// ---------------------------------------------------------------------------

enum class ReportingState : std::uint8_t { Regular = 0, Alarm = 1 };

struct PendingReport {
  ReportKind kind = ReportKind::Periodic;
  double generated_s = 0.0;
};

struct StationState {
  std::size_t station_id = 0;
  ReportingState reporting_state = ReportingState::Regular;
  std::vector<PendingReport> pending;
};

using TransitionMatrix = std::array<std::array<double, 2>, 2>;

/// (1 - theta) * P0 + theta * P1.
TransitionMatrix transition_matrix(double theta);

/// Solution of pi = pi * P(theta) with pi0 + pi1 = 1.
std::array<double, 2> stationary_distribution(double theta);

/// Arrival intensity per step in the alarm state.
inline constexpr double kAlarmArrivalsPerStep = 1.0;

struct StepContext {
  double lambda0 = 0.0;          ///< regular arrivals per step, (lambda_p + lambda_d) * dt
  double periodic_share = 1.0;   ///< lambda_p / (lambda_p + lambda_d)
  double start_s = 0.0;
  double dt_s = 1.0;
  std::optional<double> pulse_time_s;  ///< alarm arrival instant when theta comes from a pulse
};

struct Arrival {
  ReportKind kind = ReportKind::Periodic;
  double time_s = 0.0;
};

struct StepResult {
  std::vector<Arrival> generated;
  std::size_t admitted = 0;
  bool activated = false;  ///< moved Regular -> Alarm in this step
};

/// Advances one station by one time step: draws the state transition from
/// P(theta), then Poisson arrivals for the new state. A station leaves the
/// alarm state after one step. Arrivals are admitted into `pending` only if
/// no report is already waiting for the next pool.
StepResult step_station(StationState& state, double theta, const StepContext& context,
                        SplitMix64& rng);

/// Mean arrival count of a station over `steps` steps starting in the
/// regular state, with per-step background samples `thetas`.
double expected_arrivals(std::span<const double> thetas, double lambda0);

// ---------------------------------------------------------------------------
// Activation curves and Beta fits
// ---------------------------------------------------------------------------

struct ActivationCurve {
  double origin_s = 0.0;
  double bin_width_s = 0.0;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
  /// First-to-last nonempty bin, inclusive, in seconds. Zero when empty.
  double span_s() const;
};

ActivationCurve activation_curve(const CellGeometry& geometry, const AlarmScenario& scenario,
                                 double bin_width_s, std::uint64_t seed);

struct BetaFit {
  double alpha = 0.0;
  double beta = 0.0;
  double t_span_s = 0.0;
  double residual = 0.0;  ///< sum of squared per-bin probability errors
};

/// Beta activation density over [0, T].
double beta_pdf(double t, double alpha, double beta, double t_span);

/// Least-squares fit of the Beta density to the normalized curve, with T
/// fixed to the observed span.
BetaFit fit_beta(const ActivationCurve& curve);

}  // namespace m2m
