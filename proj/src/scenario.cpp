#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "m2m/error.hpp"
#include "m2m/simulator.hpp"

namespace m2m {

void RunningStat::add(double x) {
  ++count;
  sum += x;
  sum_sq += x * x;
}

void RunningStat::merge(const RunningStat& other) {
  count += other.count;
  sum += other.sum;
  sum_sq += other.sum_sq;
}

double RunningStat::mean() const { return count ? sum / static_cast<double>(count) : 0.0; }

double RunningStat::standard_error() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  return std::sqrt(var / n);
}

void DelayHistogram::add(double delay_s) {
  const auto bin = static_cast<std::size_t>(std::max(0.0, delay_s) / bin_width_s);
  if (bin >= counts.size()) counts.resize(bin + 1, 0);
  ++counts[bin];
}

void DelayHistogram::merge(const DelayHistogram& other) {
  if (other.counts.size() > counts.size()) counts.resize(other.counts.size(), 0);
  for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
}

double ScenarioStats::rs_per_station_per_ri() const {
  return mean_rs_per_pool() * (t_ri_s / t_r_s) / static_cast<double>(n_stations);
}

double ScenarioStats::p_alarm_given_h0() const {
  return pools_h0 ? static_cast<double>(alarm_decisions_h0) / static_cast<double>(pools_h0) : 0.0;
}

double ScenarioStats::p_alarm_given_h1() const {
  return pools_h1 ? static_cast<double>(alarm_decisions_h1) / static_cast<double>(pools_h1) : 0.0;
}

namespace {

void bump(std::vector<std::uint64_t>& histogram, std::size_t k) {
  if (k >= histogram.size()) histogram.resize(k + 1, 0);
  ++histogram[k];
}

void merge_histogram(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
  if (from.size() > into.size()) into.resize(from.size(), 0);
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

}  // namespace

void ScenarioStats::record(const PoolOutcome& pool, bool alarm_hypothesis, const Deadlines& deadlines) {
  ++pools_run;
  total_rs.add(static_cast<double>(pool.total_rs));
  const bool alarm = pool.decision == Decision::Alarm;
  if (alarm_hypothesis) {
    ++pools_h1;
    alarm_decisions_h1 += alarm;
    bump(kc_h1, pool.k_c);
  } else {
    ++pools_h0;
    alarm_decisions_h0 += alarm;
    bump(kc_h0, pool.k_c);
  }

  active_stations += pool.active;
  std::vector<std::size_t> seen;
  seen.reserve(pool.resolved.size());
  for (const auto& r : pool.resolved) {
    seen.push_back(r.station);
    ++reports_delivered;
    delays.add(r.delay_s);
    max_delay_s = std::max(max_delay_s, r.delay_s);
    if (r.delay_s > deadlines.for_kind(r.kind)) ++dropped_reports;
    if (r.kind == ReportKind::Alarm) {
      ++alarm_reports;
      max_alarm_delay_s = std::max(max_alarm_delay_s, r.delay_s);
      if (r.delay_s > deadlines.tau_a_s) ++late_alarm_reports;
    }
  }
  std::sort(seen.begin(), seen.end());
  const auto unique = static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
  unresolved_stations += pool.active - std::min(pool.active, unique);
}

void ScenarioStats::merge(const ScenarioStats& other) {
  pools_run += other.pools_run;
  total_rs.merge(other.total_rs);
  pools_h0 += other.pools_h0;
  pools_h1 += other.pools_h1;
  alarm_decisions_h0 += other.alarm_decisions_h0;
  alarm_decisions_h1 += other.alarm_decisions_h1;
  merge_histogram(kc_h0, other.kc_h0);
  merge_histogram(kc_h1, other.kc_h1);
  active_stations += other.active_stations;
  unresolved_stations += other.unresolved_stations;
  reports_delivered += other.reports_delivered;
  dropped_reports += other.dropped_reports;
  alarm_reports += other.alarm_reports;
  late_alarm_reports += other.late_alarm_reports;
  max_alarm_delay_s = std::max(max_alarm_delay_s, other.max_alarm_delay_s);
  max_delay_s = std::max(max_delay_s, other.max_delay_s);
  delays.merge(other.delays);
}

void CellConfig::validate() const {
  require(n_stations >= 1, "n_stations must be >= 1");
  require(radius_m > 0.0, "radius_m must be > 0");
  require(protocol.n == n_stations, "protocol station count must equal n_stations");
  require(p_h1 >= 0.0 && p_h1 <= 1.0, "p_h1 must lie in [0, 1]");
  require(horizon_s >= protocol.t_r_s, "horizon must cover at least one pool period");
  require(bin_width_s > 0.0, "bin width must be > 0");
  traffic.validate();
  deadlines.validate();
  protocol.validate();
  for (const auto& a : alarms) a.validate();
}

ActivityProbs activity_for(const CellConfig& config, const CellGeometry& geometry) {
  ActivityProbs a;
  a.p_a0 = activity_prob_regular(config.traffic.lambda_p, config.traffic.lambda_d, config.protocol.t_r_s);
  a.p_a1 = a.p_a0;
  if (!config.alarms.empty()) {
    AlarmScenario event = config.alarms.front();
    event.t_a_s = 0.0;
    a.p_a1 = activity_prob_alarm(event, geometry, config.traffic, config.protocol.t_r_s);
  }
  return a;
}

namespace {

struct Population {
  CellGeometry geometry;
  std::vector<StationState> stations;
  std::vector<SplitMix64> streams;
  StepContext context;

  Population(const CellConfig& config, std::uint64_t seed)
      : geometry(place_stations(config.n_stations, config.radius_m, config.geometry_seed)) {
    stations.resize(config.n_stations);
    streams.reserve(config.n_stations);
    for (std::size_t i = 0; i < config.n_stations; ++i) {
      stations[i].station_id = i;
      streams.push_back(make_stream(seed, i));
    }
    const double dt = config.protocol.t_r_s;
    context.dt_s = dt;
    context.lambda0 = config.traffic.total_rate() * dt;
    context.periodic_share = config.traffic.lambda_p / config.traffic.total_rate();
  }

  /// Steps every station through [start, start + T_R); true if any alarm activated.
  bool step(std::span<const AlarmScenario> alarms, double start_s) {
    context.start_s = start_s;
    bool activated = false;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const Point position = geometry.positions[i];
      double theta = 0.0;
      context.pulse_time_s.reset();
      if (!alarms.empty()) {
        theta = background_sample(alarms, position, start_s, context.dt_s);
        for (const auto& a : alarms) {
          const double t = a.activation_time(position);
          if (t >= start_s && t < start_s + context.dt_s) {
            context.pulse_time_s = t;
            break;
          }
        }
      }
      activated |= step_station(stations[i], theta, context, streams[i]).activated;
    }
    return activated;
  }

  void serve(const PoolOutcome&) {
    // Every active station is resolved within its pool.
    for (auto& s : stations) s.pending.clear();
  }
};

ScenarioStats empty_stats(const CellConfig& config) {
  ScenarioStats stats;
  stats.n_stations = config.n_stations;
  stats.t_r_s = config.protocol.t_r_s;
  stats.t_ri_s = config.traffic.t_ri();
  stats.rs_duration_s = config.protocol.rs_duration_s;
  return stats;
}

void write_trace(std::ostream& os, std::size_t index, const PoolOutcome& pool) {
  nlohmann::ordered_json line;
  line["pool"] = index;
  line["start_s"] = pool.start_s;
  line["active"] = pool.active;
  line["k_c"] = pool.k_c;
  line["decision"] = to_string(pool.decision);
  auto frames = nlohmann::json::array();
  for (const auto& f : pool.common_pool)
    frames.push_back({{"group", f.group}, {"kind", to_string(f.kind)}, {"first_rs", f.first_rs},
                      {"length", f.slots.size()}});
  line["common_pool"] = std::move(frames);
  line["total_rs"] = pool.total_rs;
  line["pool_duration_s"] = pool.pool_duration_s;
  line["resolved"] = pool.resolved.size();
  os << line.dump() << '\n';
}

}  // namespace

ScenarioStats run_scenario(const CellConfig& config, AccessMode mode, std::uint64_t seed, std::ostream* trace) {
  config.validate();
  const ReservationPool pool(config.protocol, mode, config.deadlines.tau_a_s);
  Population population(config, seed);
  auto contention = make_stream(seed, kContentionStream);
  ScenarioStats stats = empty_stats(config);

  const double t_r = config.protocol.t_r_s;
  const auto periods = static_cast<std::size_t>(std::floor(config.horizon_s / t_r + 1e-9));
  for (std::size_t m = 0; m < periods; ++m) {
    const double start = static_cast<double>(m) * t_r;
    const bool alarm = population.step(config.alarms, start);
    const auto outcome = pool.run(population.stations, start + t_r, contention);
    stats.record(outcome, alarm, config.deadlines);
    if (trace) write_trace(*trace, m, outcome);
    population.serve(outcome);
  }
  return stats;
}

ScenarioStats simulate_pools(const CellConfig& config, AccessMode mode, std::size_t pools, HypothesisDraw draw,
                             std::uint64_t seed) {
  config.validate();
  require(pools >= 1, "simulate_pools: need at least one pool");
  const bool needs_alarm = draw == HypothesisDraw::AlwaysAlarm || (draw == HypothesisDraw::Prior && config.p_h1 > 0.0);
  require(!needs_alarm || !config.alarms.empty(), "simulate_pools: alarm hypothesis requires an alarm scenario");

  const ReservationPool pool(config.protocol, mode, config.deadlines.tau_a_s);
  Population population(config, seed);
  auto contention = make_stream(seed, kContentionStream);
  auto hypothesis = make_stream(seed, kHypothesisStream);
  ScenarioStats stats = empty_stats(config);

  const double t_r = config.protocol.t_r_s;
  double sweep_s = 0.0;
  if (!config.alarms.empty()) {
    const auto& a = config.alarms.front();
    for (const auto& p : population.geometry.positions)
      sweep_s = std::max(sweep_s, distance(p, a.epicenter) / a.speed_m_per_s);
    require(sweep_s < t_r, "simulate_pools: alarm wavefront does not fit inside one pool period");
  }

  std::vector<AlarmScenario> active;
  for (std::size_t m = 0; m < pools; ++m) {
    const double start = static_cast<double>(m) * t_r;
    bool h1 = draw == HypothesisDraw::AlwaysAlarm;
    if (draw == HypothesisDraw::Prior) h1 = hypothesis.uniform() < config.p_h1;
    active.clear();
    if (h1) {
      AlarmScenario event = config.alarms.front();
      event.t_a_s = start + hypothesis.uniform() * (t_r - sweep_s);
      active.push_back(event);
    }
    for (auto& s : population.stations) s.reporting_state = ReportingState::Regular;
    population.step(active, start);
    const auto outcome = pool.run(population.stations, start + t_r, contention);
    stats.record(outcome, h1, config.deadlines);
    population.serve(outcome);
  }
  return stats;
}

}  // namespace m2m
