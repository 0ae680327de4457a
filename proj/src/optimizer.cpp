#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "m2m/error.hpp"
#include "m2m/optimizer.hpp"

namespace m2m {

void SweepGrid::validate() const {
  require(!omega_values.empty(), "sweep grid: no omega values");
  require(!delta_c_pct.empty(), "sweep grid: no delta_c values");
  require(evaluation == Evaluation::Analytical || replications >= 1,
          "sweep grid: simulated evaluation needs at least one replication");
  for (auto o : omega_values) require(o >= 1, "sweep grid: omega must be >= 1");
  for (auto d : delta_c_pct) require(d > 0.0 && d <= 100.0, "sweep grid: delta_c must lie in (0, 100]");
}

SweepGrid default_grid() {
  SweepGrid grid;
  for (std::size_t o = 10; o <= 200; o += 10) grid.omega_values.push_back(o);
  for (int d = 10; d <= 90; d += 10) grid.delta_c_pct.push_back(d);
  return grid;
}

ProtocolParams protocol_at(const CellConfig& base, std::size_t omega, double delta_c_pct, std::size_t l1,
                           std::size_t l2) {
  ProtocolParams p = base.protocol;
  p.n = base.n_stations;
  p.omega = omega;
  p.delta_c = delta_c_from_percent(delta_c_pct, p.pool_size());
  p.l1 = l1;
  p.l2 = l2;
  return p;
}

namespace {

bool feasible(const ProtocolParams& params, AccessMode mode, double tau_a) {
  try {
    check_deadline_feasibility(params, mode, tau_a);
    return true;
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::Infeasible) throw;
    return false;
  }
}

// Canonical order and tie-break: smaller omega, then smaller delta_c.
bool row_less(const SweepRow& a, const SweepRow& b) {
  if (a.omega != b.omega) return a.omega < b.omega;
  return a.delta_c_pct < b.delta_c_pct;
}

}  // namespace

FrameSplit search_frame_lengths(const CellConfig& base, std::size_t omega, double delta_c_pct) {
  const auto geometry = place_stations(base.n_stations, base.radius_m, base.geometry_seed);
  const auto activity = activity_for(base, geometry);
  FrameSplit best;
  best.e_c = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 10; ++i) {
    const std::size_t l1 = frame_length_from_fraction(0.1 * i, omega);
    if (omega > 1 && l1 >= omega) continue;
    for (int j = 1; j <= i; ++j) {
      const std::size_t l2 = frame_length_from_fraction(0.1 * j, omega);
      if (l2 > l1) continue;
      const auto params = protocol_at(base, omega, delta_c_pct, l1, l2);
      const double e_c = expected_costs(params, activity, base.p_h1).e_c;
      if (e_c < best.e_c) best = {l1, l2, e_c};
    }
  }
  return best;
}

SweepResult sweep(const SweepGrid& grid, const CellConfig& base, std::uint64_t seed) {
  grid.validate();
  const auto geometry = place_stations(base.n_stations, base.radius_m, base.geometry_seed);
  const auto activity = activity_for(base, geometry);

  SweepResult result;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, ResolutionProbs> resolutions;
  std::uint64_t point = 0;
  for (auto omega : grid.omega_values) {
    for (auto pct : grid.delta_c_pct) {
      std::size_t l1 = 0;
      std::size_t l2 = 0;
      if (grid.l1_frac && grid.l2_frac) {
        l1 = frame_length_from_fraction(*grid.l1_frac, omega);
        l2 = frame_length_from_fraction(*grid.l2_frac, omega);
      } else {
        const auto split = search_frame_lengths(base, omega, pct);
        l1 = split.l1;
        l2 = split.l2;
      }
      const auto params = protocol_at(base, omega, pct, l1, l2);

      auto key = std::tuple{omega, l1, l2};
      auto it = resolutions.find(key);
      if (it == resolutions.end())
        it = resolutions.emplace(key, resolution_probs(omega, l1, l2, activity.p_a0)).first;
      const auto report = expected_costs(params, activity, base.p_h1, it->second);

      SweepRow row;
      row.omega = omega;
      row.delta_c_pct = pct;
      row.delta_c = params.delta_c;
      row.l1 = l1;
      row.l2 = l2;
      row.max_pool_duration_s =
          static_cast<double>(max_pool_rs(params, AccessMode::Adaptive)) * params.rs_duration_s;
      row.feasible = feasible(params, AccessMode::Adaptive, base.deadlines.tau_a_s);
      row.e_c_analytical = report.e_c;
      row.p11 = report.detection.p11;
      row.p10 = report.detection.p10;
      if (grid.evaluation == Evaluation::Simulated && row.feasible) {
        CellConfig cfg = base;
        cfg.protocol = params;
        const auto stats = simulate_pools(cfg, AccessMode::Adaptive, grid.replications, HypothesisDraw::Prior,
                                          mix64(seed ^ mix64(kReplicationStream + point)));
        row.e_c_simulated = stats.mean_rs_per_pool();
        row.e_c_simulated_se = stats.total_rs.standard_error();
      }
      ++point;
      result.rows.push_back(row);
    }
  }
  std::sort(result.rows.begin(), result.rows.end(), row_less);

  const auto cost = [&](const SweepRow& r) {
    return grid.evaluation == Evaluation::Simulated && r.e_c_simulated ? *r.e_c_simulated : r.e_c_analytical;
  };
  const SweepRow* best = nullptr;
  for (const auto& r : result.rows) {
    if (!r.feasible) continue;
    if (!best || cost(r) < cost(*best)) best = &r;  // rows are canonical, so ties keep the earlier
  }
  if (!best) fail(ErrorCategory::Infeasible, "sweep: every grid point violates the alarm deadline");
  result.argmin = *best;
  return result;
}

NaiveComparison compare_naive(const CellConfig& base, std::span<const std::size_t> omega_values, double delta_c_pct,
                              double l1_frac, double l2_frac) {
  require(!omega_values.empty(), "compare_naive: no omega values");
  const auto geometry = place_stations(base.n_stations, base.radius_m, base.geometry_seed);
  const auto activity = activity_for(base, geometry);

  NaiveComparison out;
  out.min_adaptive = out.min_naive = std::numeric_limits<double>::infinity();
  for (auto omega : omega_values) {
    const auto params = protocol_at(base, omega, delta_c_pct, frame_length_from_fraction(l1_frac, omega),
                                    frame_length_from_fraction(l2_frac, omega));
    NaiveRow row{omega, expected_costs(params, activity, base.p_h1).e_c,
                 expected_cost_naive(params, activity, base.p_h1)};
    if (row.e_c_adaptive < out.min_adaptive) {
      out.min_adaptive = row.e_c_adaptive;
      out.best_omega_adaptive = omega;
    }
    if (row.e_c_naive < out.min_naive) {
      out.min_naive = row.e_c_naive;
      out.best_omega_naive = omega;
    }
    out.rows.push_back(row);
  }
  out.ratio = out.min_naive / out.min_adaptive;
  return out;
}

}  // namespace m2m
