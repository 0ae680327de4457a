#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "m2m/optimizer.hpp"
#include "m2m/simulator.hpp"

namespace m2m {

/// Everything a config file can describe.
struct ExperimentConfig {
  CellConfig cell;
  AccessMode mode = AccessMode::Adaptive;
  bool trace_pools = false;
  SweepGrid grid = default_grid();
  std::vector<std::size_t> compare_omega;
  double compare_delta_c_pct = 50.0;
};

/// Parses the `key = value` format (one pair per line, `#` comments).
/// Unknown keys and malformed values raise Error{Config} naming the key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace m2m
