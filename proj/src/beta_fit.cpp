#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "m2m/error.hpp"
#include "m2m/traffic.hpp"

namespace m2m {

double beta_pdf(double t, double alpha, double beta, double t_span) {
  require(alpha > 0.0 && beta > 0.0 && t_span > 0.0, "beta_pdf: parameters must be > 0");
  if (t < 0.0 || t > t_span) return 0.0;
  // x * log(y) with 0 * log(0) = 0, so alpha or beta of 1 stays finite at the edges
  const auto xlogy = [](double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); };
  const double log_p = xlogy(alpha - 1.0, t) + xlogy(beta - 1.0, t_span - t) -
                       (alpha + beta - 1.0) * std::log(t_span) - gsl_sf_lnbeta(alpha, beta);
  return std::exp(log_p);
}

namespace {

struct BinnedMass {
  std::vector<double> lo;  // bin edges as fractions of the span
  std::vector<double> hi;
  std::vector<double> mass;
};

double beta_cdf(double x, double alpha, double beta) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return gsl_sf_beta_inc(alpha, beta, x);
}

double squared_error(const BinnedMass& data, double alpha, double beta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.mass.size(); ++i) {
    const double model = beta_cdf(data.hi[i], alpha, beta) - beta_cdf(data.lo[i], alpha, beta);
    const double e = data.mass[i] - model;
    sum += e * e;
  }
  return sum;
}

double objective(const gsl_vector* x, void* params) {
  const auto& data = *static_cast<const BinnedMass*>(params);
  const double alpha = std::exp(gsl_vector_get(x, 0));
  const double beta = std::exp(gsl_vector_get(x, 1));
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha > 1e4 || beta > 1e4) return 1e9;
  return squared_error(data, alpha, beta);
}

}  // namespace

BetaFit fit_beta(const ActivationCurve& curve) {
  static const bool quiet_gsl = (gsl_set_error_handler_off(), true);
  (void)quiet_gsl;
  require(curve.bin_width_s > 0.0, "fit_beta: bin width must be > 0");
  const auto first = std::find_if(curve.counts.begin(), curve.counts.end(), [](auto c) { return c > 0; });
  const auto nonempty = std::count_if(curve.counts.begin(), curve.counts.end(), [](auto c) { return c > 0; });
  if (nonempty < 2) fail(ErrorCategory::Unfittable, "fit_beta: curve has fewer than two nonempty bins");

  const double span = curve.span_s();
  const auto offset = static_cast<std::size_t>(std::distance(curve.counts.begin(), first));
  const auto bins = static_cast<std::size_t>(std::llround(span / curve.bin_width_s));
  const double total = static_cast<double>(curve.total());

  BinnedMass data;
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double lo = static_cast<double>(i) / static_cast<double>(bins);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(bins);
    const double m = static_cast<double>(curve.counts[offset + i]) / total;
    data.lo.push_back(lo);
    data.hi.push_back(hi);
    data.mass.push_back(m);
    const double mid = 0.5 * (lo + hi);
    mean += m * mid;
    second += m * mid * mid;
  }

  // Method-of-moments start.
  const double var = std::max(second - mean * mean, 1e-6);
  const double common = std::max(mean * (1.0 - mean) / var - 1.0, 0.1);
  const double alpha0 = std::max(mean * common, 0.05);
  const double beta0 = std::max((1.0 - mean) * common, 0.05);

  gsl_multimin_function fn{&objective, 2, &data};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2), &gsl_vector_free);
  gsl_vector_set(x.get(), 0, std::log(alpha0));
  gsl_vector_set(x.get(), 1, std::log(beta0));
  gsl_vector_set_all(step.get(), 0.3);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2),
      &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

  for (int iter = 0; iter < 2000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-9) == GSL_SUCCESS) break;
  }

  BetaFit fit;
  fit.alpha = std::exp(gsl_vector_get(solver->x, 0));
  fit.beta = std::exp(gsl_vector_get(solver->x, 1));
  fit.t_span_s = span;
  fit.residual = solver->fval;
  return fit;
}

}  // namespace m2m
