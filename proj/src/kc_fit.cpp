#include <gsl/gsl_cdf.h>
#include <gsl/gsl_randist.h>

#include "m2m/error.hpp"
#include "m2m/simulator.hpp"

namespace m2m {

KcFit kc_goodness_of_fit(std::span<const std::uint64_t> histogram, std::size_t pool_size, double p_c,
                         double significance) {
  require(p_c >= 0.0 && p_c <= 1.0, "kc_goodness_of_fit: p_c must lie in [0, 1]");
  std::uint64_t total = 0;
  for (auto c : histogram) total += c;
  require(total > 0, "kc_goodness_of_fit: empty histogram");
  require(histogram.size() <= pool_size + 1, "kc_goodness_of_fit: k_c above the pool size");

  KcFit fit;
  const auto observed = [&](std::size_t k) { return k < histogram.size() ? histogram[k] : 0; };
  if (p_c == 0.0 || p_c == 1.0) {
    const std::size_t point = p_c == 0.0 ? 0 : pool_size;
    fit.consistent = observed(point) == total;
    return fit;
  }

  // Adjacent k merged until each cell expects at least five pools.
  const double n = static_cast<double>(total);
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs = 0.0;
  double exp = 0.0;
  for (std::size_t k = 0; k <= pool_size; ++k) {
    obs += static_cast<double>(observed(k));
    exp += n * gsl_ran_binomial_pdf(static_cast<unsigned>(k), p_c, static_cast<unsigned>(pool_size));
    if (exp >= 5.0) {
      cells.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (cells.empty()) {
    cells.emplace_back(obs, exp);
  } else {
    cells.back().first += obs;
    cells.back().second += exp;
  }

  for (const auto& [o, e] : cells) fit.chi_square += (o - e) * (o - e) / e;
  fit.dof = cells.size() - 1;
  if (fit.dof == 0) {
    fit.consistent = true;
    return fit;
  }
  fit.critical_value = gsl_cdf_chisq_Qinv(significance, static_cast<double>(fit.dof));
  fit.consistent = fit.chi_square <= fit.critical_value;
  return fit;
}

}  // namespace m2m
