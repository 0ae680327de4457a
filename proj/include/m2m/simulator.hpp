#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "m2m/analysis.hpp"
#include "m2m/rng.hpp"
#include "m2m/traffic.hpp"

namespace m2m {

enum class AccessMode { Adaptive, NaiveContentionFree };
enum class Decision { Regular, Alarm };

std::string_view to_string(AccessMode mode);
std::string_view to_string(Decision decision);

/// Contiguous AID-style grouping: station i sits in group i / omega at
/// in-group index i % omega.
class GroupAssignment {
 public:
  GroupAssignment(std::size_t n, std::size_t omega);

  std::size_t omega() const { return omega_; }
  std::size_t group_count() const { return groups_.size(); }
  std::size_t group_of(std::size_t station) const { return station / omega_; }
  std::size_t in_group_index(std::size_t station) const { return station % omega_; }
  std::span<const std::size_t> members(std::size_t group) const { return groups_[group]; }

 private:
  std::size_t omega_;
  std::vector<std::vector<std::size_t>> groups_;
};

struct SlotOutcome {
  enum class Kind : std::uint8_t { Idle, Singleton, Collision };

  Kind kind = Kind::Idle;
  std::vector<std::size_t> stations;

  static SlotOutcome from(std::vector<std::size_t> transmitters);
};

enum class FrameKind : std::uint8_t { FirstContention, SecondContention, ContentionFree };

std::string_view to_string(FrameKind kind);

struct CommonFrame {
  std::size_t group = 0;
  FrameKind kind = FrameKind::FirstContention;
  std::size_t first_rs = 0;  ///< offset of the frame's first RS within the pool
  std::vector<SlotOutcome> slots;
};

struct Resolution {
  std::size_t station = 0;
  std::size_t rs_index = 0;  ///< resolving RS within the pool
  ReportKind kind = ReportKind::Periodic;
  double generated_s = 0.0;
  double delay_s = 0.0;  ///< generation to end of the resolving RS
};

struct PoolOutcome {
  double start_s = 0.0;
  std::size_t active = 0;
  std::vector<SlotOutcome> preallocated;
  std::size_t k_c = 0;
  Decision decision = Decision::Regular;
  std::vector<CommonFrame> common_pool;
  std::size_t total_rs = 0;
  double pool_duration_s = 0.0;
  std::vector<Resolution> resolved;
};

/// Largest pool (in RSs) the protocol can ever allocate.
std::size_t max_pool_rs(const ProtocolParams& params, AccessMode mode);

/// Throws Error{Infeasible} unless tau_a > T_R + max T_pool and max T_pool <= T_R.
void check_deadline_feasibility(const ProtocolParams& params, AccessMode mode, double tau_a_s);

/// One reservation pool: preallocated contention, threshold decision and
/// common-pool resolution. Stations with a pending report are active.
PoolOutcome run_pool(std::span<const StationState> stations, const GroupAssignment& assignment,
                     const ProtocolParams& params, AccessMode mode, double pool_start_s, SplitMix64& rng);

/// Validated pool configuration; construction rejects deadline-infeasible setups.
class ReservationPool {
 public:
  ReservationPool(const ProtocolParams& params, AccessMode mode, double tau_a_s);

  PoolOutcome run(std::span<const StationState> stations, double pool_start_s, SplitMix64& rng) const;

  const ProtocolParams& params() const { return params_; }
  AccessMode mode() const { return mode_; }

 private:
  ProtocolParams params_;
  AccessMode mode_;
  GroupAssignment assignment_;
};

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Sum / sum-of-squares accumulator.
struct RunningStat {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x);
  void merge(const RunningStat& other);
  double mean() const;
  double standard_error() const;
};

struct DelayHistogram {
  double bin_width_s = 0.1;
  std::vector<std::uint64_t> counts;

  void add(double delay_s);
  void merge(const DelayHistogram& other);
};

struct ScenarioStats {
  std::size_t n_stations = 0;
  double t_r_s = 0.0;
  double t_ri_s = 0.0;
  double rs_duration_s = 0.0;

  std::uint64_t pools_run = 0;
  RunningStat total_rs;
  std::uint64_t pools_h0 = 0;
  std::uint64_t pools_h1 = 0;
  std::uint64_t alarm_decisions_h0 = 0;
  std::uint64_t alarm_decisions_h1 = 0;
  std::vector<std::uint64_t> kc_h0;  ///< k_c histogram under H0
  std::vector<std::uint64_t> kc_h1;

  std::uint64_t active_stations = 0;
  std::uint64_t unresolved_stations = 0;
  std::uint64_t reports_delivered = 0;
  std::uint64_t dropped_reports = 0;  ///< delay above the report kind's deadline
  std::uint64_t alarm_reports = 0;
  std::uint64_t late_alarm_reports = 0;
  double max_alarm_delay_s = 0.0;
  double max_delay_s = 0.0;
  DelayHistogram delays;

  double mean_rs_per_pool() const { return total_rs.mean(); }
  double mean_pool_duration_s() const { return total_rs.mean() * rs_duration_s; }
  double rs_per_station_per_ri() const;
  double p_alarm_given_h0() const;
  double p_alarm_given_h1() const;

  void record(const PoolOutcome& pool, bool alarm_hypothesis, const Deadlines& deadlines);
  void merge(const ScenarioStats& other);
};

// ---------------------------------------------------------------------------
// Scenario runs
// ---------------------------------------------------------------------------

/// Full cell / protocol / traffic description.
struct CellConfig {
  std::size_t n_stations = 8000;
  double radius_m = 1000.0;
  std::uint64_t geometry_seed = 1;
  RegularTrafficParams traffic{1.0 / 300.0, 1.0 / 1500.0};
  Deadlines deadlines{5.0, 60.0, 300.0};
  ProtocolParams protocol{8000, 40, 100, 24, 16, 2.5, 200e-6};
  double p_h1 = 5e-3;
  std::vector<AlarmScenario> alarms;
  double horizon_s = 300.0;
  double bin_width_s = 0.005;

  void validate() const;
};

/// Continuous run: pools every T_R over the horizon, station state carried
/// across pools, alarm events injected at their configured instants.
/// `trace`, when given, receives one JSON summary line per pool.
ScenarioStats run_scenario(const CellConfig& config, AccessMode mode, std::uint64_t seed,
                           std::ostream* trace = nullptr);

enum class HypothesisDraw { Prior, AlwaysRegular, AlwaysAlarm };

/// Independent pool replications. Each pool starts from idle stations; under
/// H1 the first configured alarm is shifted to a random instant such that its
/// wavefront sweeps the cell inside one gating window.
ScenarioStats simulate_pools(const CellConfig& config, AccessMode mode, std::size_t pools,
                             HypothesisDraw draw, std::uint64_t seed);

/// Chi-square goodness of fit of a k_c histogram against Binomial(pool_size, p_c).
struct KcFit {
  double chi_square = 0.0;
  std::size_t dof = 0;
  double critical_value = 0.0;  ///< at `significance`
  bool consistent = false;
};

KcFit kc_goodness_of_fit(std::span<const std::uint64_t> histogram, std::size_t pool_size, double p_c,
                         double significance = 0.01);

/// Analytical activity probabilities matching `config` (uses its first alarm for H1).
ActivityProbs activity_for(const CellConfig& config, const CellGeometry& geometry);

}  // namespace m2m
