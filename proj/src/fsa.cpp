#include <gmpxx.h>
#include <gsl/gsl_randist.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "m2m/error.hpp"
#include "m2m/fsa.hpp"

namespace m2m {

namespace {

mpz_class binomial(std::size_t n, std::size_t k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpz_class power(std::size_t base, std::size_t exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

// Inclusion-exclusion over the set of singleton slots:
// G(u, v) = sum_t (-1)^t C(v,t) C(u,t) t! (u-t)^(v-t).
mpz_class no_singletons(std::size_t u, std::size_t v) {
  mpz_class sum = 0;
  mpz_class t_fact = 1;
  for (std::size_t t = 0; t <= std::min(u, v); ++t) {
    if (t > 0) t_fact *= static_cast<unsigned long>(t);
    mpz_class term = binomial(v, t) * binomial(u, t) * t_fact * power(u - t, v - t);
    if (t % 2 == 0) sum += term;
    else sum -= term;
  }
  return sum;
}

// Memoized rows; the sweep asks for the same (m, L) many times.
class RowCache {
 public:
  const std::vector<double>& row(std::size_t m, std::size_t l) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(m, l);
    auto it = rows_.find(key);
    if (it != rows_.end()) return it->second;
    return rows_.emplace(key, compute(m, l)).first->second;
  }

 private:
  static std::vector<double> compute(std::size_t m, std::size_t l) {
    const mpz_class denom = power(l, m);
    std::vector<double> out(std::min(m, l) + 1);
    mpz_class falling = 1;  // m (m-1) ... (m-h+1)
    for (std::size_t h = 0; h < out.size(); ++h) {
      if (h > 0) falling *= static_cast<unsigned long>(m - h + 1);
      mpq_class r(binomial(l, h) * falling * no_singletons(l - h, m - h), denom);
      r.canonicalize();
      out[h] = r.get_d();
    }
    return out;
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> rows_;
};

RowCache& cache() {
  static RowCache instance;
  return instance;
}

std::vector<double> active_dist(std::size_t omega, double p_a) {
  std::vector<double> dist(omega + 1, 0.0);
  if (omega < 2 || p_a <= 0.0) return dist;
  if (p_a >= 1.0) {
    dist[omega] = 1.0;
    return dist;
  }
  double f = 0.0;
  for (std::size_t m = 2; m <= omega; ++m) {
    dist[m] = gsl_ran_binomial_pdf(static_cast<unsigned>(m), p_a, static_cast<unsigned>(omega));
    f += dist[m];
  }
  for (auto& d : dist) d /= f;
  return dist;
}

// Multiplicities whose weight is this far below the mode cannot move a
// double-precision sum.
constexpr double kNegligibleWeight = 1e-24;

}  // namespace

double no_singleton_assignments(std::size_t u, std::size_t v) { return no_singletons(u, v).get_d(); }

std::vector<double> resolve_row(std::size_t m, std::size_t l) {
  require(l >= 1, "resolve_prob: frame length must be >= 1");
  return cache().row(m, l);
}

double resolve_prob(std::size_t h, std::size_t m, std::size_t l) {
  require(l >= 1, "resolve_prob: frame length must be >= 1");
  require(h <= m, "resolve_prob: cannot resolve more users than contend");
  require(h <= l, "resolve_prob: cannot resolve more users than slots");
  return cache().row(m, l)[h];
}

std::vector<double> truncated_active_dist(std::size_t omega, double p_a) {
  require(omega >= 2, "truncated_active_dist: omega must be >= 2");
  require(p_a > 0.0 && p_a < 1.0, "truncated_active_dist: p_a must lie in (0, 1)");
  return active_dist(omega, p_a);
}

ResolutionProbs resolution_probs(std::size_t omega, std::size_t l1, std::size_t l2, double p_a) {
  require(l1 >= 1 && l2 >= 1, "resolution_probs: frame lengths must be >= 1");
  require(p_a >= 0.0 && p_a <= 1.0, "resolution_probs: p_a must lie in [0, 1]");
  const auto dist = active_dist(omega, p_a);
  const double peak = *std::max_element(dist.begin(), dist.end());
  ResolutionProbs r;
  for (std::size_t m = 2; m <= omega; ++m) {
    if (dist[m] == 0.0 || dist[m] < kNegligibleWeight * peak) continue;
    const auto& first = resolve_row(m, l1);
    if (m <= l1) r.r1 += first[m] * dist[m];
    for (std::size_t h = 2; h <= m; ++h) {
      // h users left unresolved after the first frame, all resolved in the second.
      if (h > l2 || m - h >= first.size()) continue;
      r.r2 += resolve_row(h, l2)[h] * first[m - h] * dist[m];
    }
  }
  return r;
}

double expected_frame_cost(std::size_t omega, std::size_t l1, std::size_t l2, ResolutionProbs r) {
  require(r.r1 >= 0.0 && r.r2 >= 0.0 && r.r1 + r.r2 <= 1.0 + 1e-12,
          "expected_frame_cost: resolution probabilities out of range");
  const double o = static_cast<double>(omega);
  return static_cast<double>(l1) + static_cast<double>(l2) * (1.0 - r.r1) + o * (1.0 - (r.r1 + r.r2));
}

}  // namespace m2m
