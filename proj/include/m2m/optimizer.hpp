#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "m2m/simulator.hpp"

namespace m2m {

enum class Evaluation { Analytical, Simulated };

struct SweepGrid {
  std::vector<std::size_t> omega_values;
  std::vector<double> delta_c_pct;
  std::optional<double> l1_frac = 0.6;  ///< empty: searched per omega
  std::optional<double> l2_frac = 0.4;
  Evaluation evaluation = Evaluation::Analytical;
  std::size_t replications = 0;  ///< pools per point when simulated

  void validate() const;
};

struct SweepRow {
  std::size_t omega = 0;
  double delta_c_pct = 0.0;
  std::size_t delta_c = 0;
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  bool feasible = false;
  double max_pool_duration_s = 0.0;
  double e_c_analytical = 0.0;
  std::optional<double> e_c_simulated;
  std::optional<double> e_c_simulated_se;
  double p11 = 0.0;
  double p10 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< sorted by (omega, delta_c_pct)
  SweepRow argmin;
};

/// Exhaustive search over (omega, delta_c). Points violating the alarm
/// deadline are kept with feasible = false and excluded from the argmin.
SweepResult sweep(const SweepGrid& grid, const CellConfig& base, std::uint64_t seed = 0);

struct FrameSplit {
  std::size_t l1 = 1;
  std::size_t l2 = 1;
  double e_c = 0.0;
};

/// Best (L1, L2) over fractions 0.1, 0.2, ... of omega with L2 <= L1 < omega,
/// minimizing the analytical expected cost.
FrameSplit search_frame_lengths(const CellConfig& base, std::size_t omega, double delta_c_pct);

struct NaiveRow {
  std::size_t omega = 0;
  double e_c_adaptive = 0.0;
  double e_c_naive = 0.0;
};

struct NaiveComparison {
  std::vector<NaiveRow> rows;
  std::size_t best_omega_adaptive = 0;
  std::size_t best_omega_naive = 0;
  double min_adaptive = 0.0;
  double min_naive = 0.0;
  double ratio = 0.0;  ///< min_naive / min_adaptive
};

NaiveComparison compare_naive(const CellConfig& base, std::span<const std::size_t> omega_values,
                              double delta_c_pct = 50.0, double l1_frac = 0.6, double l2_frac = 0.4);

/// Omega 10..200 step 10 and delta_c 10%..90% step 10%.
SweepGrid default_grid();

/// Protocol for a grid point derived from `base`.
ProtocolParams protocol_at(const CellConfig& base, std::size_t omega, double delta_c_pct, std::size_t l1,
                           std::size_t l2);

}  // namespace m2m
