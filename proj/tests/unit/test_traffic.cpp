#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "m2m/error.hpp"
#include "m2m/traffic.hpp"

using namespace m2m;

namespace {

// Sampled Beta(a, b) curve over [0, span] with `samples` draws.
ActivationCurve beta_curve(double a, double b, double span, double bw, std::size_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  ActivationCurve c{0.0, bw, std::vector<std::uint64_t>(static_cast<std::size_t>(std::ceil(span / bw)), 0)};
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ga(rng);
    const double t = span * x / (x + gb(rng));
    ++c.counts[std::min(c.counts.size() - 1, static_cast<std::size_t>(t / bw))];
  }
  return c;
}

}  // namespace

TEST_CASE("placement stays inside the disk") {
  const auto one = place_stations(1, 10.0, 3);
  REQUIRE(one.size() == 1);
  CHECK(distance(one.positions[0], {}) <= 10.0);

  const auto small = place_stations(1000, 10.0, 4);
  for (const auto& p : small.positions) CHECK(distance(p, {}) <= 10.0);
}

TEST_CASE("placement radial density") {
  const auto g = place_stations(8000, 1000.0, 1);
  double sum = 0.0;
  for (const auto& p : g.positions) sum += distance(p, {});
  CHECK(sum / 8000.0 == doctest::Approx(2000.0 / 3.0).epsilon(0.01));
}

TEST_CASE("placement is seed-deterministic") {
  const auto a = place_stations(50, 100.0, 9);
  const auto b = place_stations(50, 100.0, 9);
  const auto c = place_stations(50, 100.0, 10);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a.positions[i].x_m == b.positions[i].x_m);
    CHECK(a.positions[i].y_m == b.positions[i].y_m);
  }
  CHECK(a.positions[0].x_m != c.positions[0].x_m);
}

TEST_CASE("spatial correlation values") {
  CHECK(spatial_correlation(UnitCorrelation{}, 500.0) == 1.0);
  CHECK(spatial_correlation(ExpDecayCorrelation{0.005}, 0.0) == 1.0);
  CHECK(spatial_correlation(ExpDecayCorrelation{0.005}, 1000.0) == doctest::Approx(0.006737947).epsilon(1e-6));
  CHECK(spatial_correlation(SqrtCapCorrelation{500.0}, 500.0) == 0.0);
  CHECK(spatial_correlation(SqrtCapCorrelation{500.0}, 0.0) == 1.0);
  CHECK(spatial_correlation(SqrtCapCorrelation{500.0}, 900.0) == 0.0);
  CHECK(spatial_correlation(SqrtCapCorrelation{500.0}, 300.0) == doctest::Approx(0.8));
  CHECK_THROWS_AS(spatial_correlation(UnitCorrelation{}, -1.0), Error);
  CHECK_THROWS_AS(validate(ExpDecayCorrelation{-1.0}), Error);
  CHECK_THROWS_AS(validate(SqrtCapCorrelation{0.0}), Error);
}

TEST_CASE("spatial correlation is bounded and non-increasing") {
  const CorrelationModel models[] = {UnitCorrelation{}, ExpDecayCorrelation{0.005}, ExpDecayCorrelation{0.1},
                                     SqrtCapCorrelation{250.0}, SqrtCapCorrelation{500.0}};
  for (const auto& m : models) {
    double prev = 2.0;
    for (double d = 0.0; d <= 2000.0; d += 3.7) {
      const double v = spatial_correlation(m, d);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("background pulse") {
  AlarmScenario s;
  s.speed_m_per_s = 4000.0;
  const Point at{400.0, 0.0};
  CHECK(background_sample(s, at, 0.1, 0.005) == 1.0);
  CHECK(background_sample(s, at, 0.105, 0.005) == 0.0);
  CHECK(background_sample(s, at, 0.095, 0.005) == 0.0);
  CHECK(background_sample(std::span<const AlarmScenario>{}, at, 0.1, 0.005) == 0.0);

  AlarmScenario half = s;
  half.correlation = SqrtCapCorrelation{500.0};
  const AlarmScenario both[] = {half, half};
  CHECK(background_sample(both, {300.0, 0.0}, 0.075, 0.005) == doctest::Approx(1.0 - 0.2 * 0.2));
}

TEST_CASE("background pulse fires in exactly one step") {
  AlarmScenario s;
  s.t_a_s = 0.37;
  s.epicenter = {120.0, -40.0};
  s.correlation = ExpDecayCorrelation{0.001};
  const auto g = place_stations(300, 1000.0, 5);
  for (double dt : {0.005, 0.05, 0.5}) {
    for (const auto& p : g.positions) {
      int fired = 0;
      for (int k = 0; k * dt < 2.0; ++k)
        if (background_sample(s, p, k * dt, dt) > 0.0) ++fired;
      CHECK(fired == 1);
    }
  }
}

TEST_CASE("transition matrix is row-stochastic") {
  for (double theta = 0.0; theta <= 1.0; theta += 0.05) {
    const auto p = transition_matrix(theta);
    for (const auto& row : p) {
      CHECK(row[0] >= 0.0);
      CHECK(row[1] >= 0.0);
      CHECK(row[0] + row[1] == doctest::Approx(1.0));
    }
    const auto pi = stationary_distribution(theta);
    CHECK(pi[0] + pi[1] == doctest::Approx(1.0));
    CHECK(pi[0] * p[0][1] == doctest::Approx(pi[1] * p[1][0]));
  }
}

TEST_CASE("step transitions at the extremes") {
  SplitMix64 rng(1);
  StepContext ctx{0.5, 0.8, 0.0, 1.0, std::nullopt};
  for (int i = 0; i < 200; ++i) {
    StationState s;
    step_station(s, 0.0, ctx, rng);
    CHECK(s.reporting_state == ReportingState::Regular);
  }
  for (int i = 0; i < 200; ++i) {
    StationState s;
    const auto r = step_station(s, 1.0, ctx, rng);
    CHECK(s.reporting_state == ReportingState::Alarm);
    CHECK(r.activated);
    CHECK(r.admitted <= 1);
    for (const auto& a : r.generated) CHECK(a.kind == ReportKind::Alarm);
    step_station(s, 1.0, ctx, rng);
    CHECK(s.reporting_state == ReportingState::Regular);
  }
}

TEST_CASE("alarm state emits Poisson(1) and admits at most one") {
  SplitMix64 rng(2);
  StepContext ctx{0.0, 1.0, 0.0, 1.0, 0.25};
  const int n = 100000;
  double generated = 0.0;
  int admitted = 0;
  for (int i = 0; i < n; ++i) {
    StationState s;
    const auto r = step_station(s, 1.0, ctx, rng);
    generated += static_cast<double>(r.generated.size());
    admitted += static_cast<int>(r.admitted);
    CHECK(s.pending.size() <= 1);
    if (!s.pending.empty()) CHECK(s.pending.front().generated_s == 0.25);
  }
  CHECK(std::abs(generated / n - 1.0) < 3.0 * std::sqrt(1.0 / n) + 1e-12);
  const double p_any = 1.0 - std::exp(-1.0);
  CHECK(std::abs(admitted / double(n) - p_any) < 3.0 * std::sqrt(p_any * (1 - p_any) / n));
}

TEST_CASE("pending report blocks further admissions") {
  SplitMix64 rng(3);
  StationState s;
  s.pending.push_back({ReportKind::Periodic, 0.0});
  StepContext ctx{5.0, 1.0, 0.0, 1.0, std::nullopt};
  const auto r = step_station(s, 0.0, ctx, rng);
  CHECK(r.admitted == 0);
  CHECK(s.pending.size() == 1);
}

TEST_CASE("long-run occupancy matches the stationary distribution") {
  for (double theta : {0.05, 0.2, 0.6}) {
    SplitMix64 rng(11);
    StationState s;
    StepContext ctx{0.1, 1.0, 0.0, 1.0, std::nullopt};
    const int steps = 1000000;
    int in_alarm = 0;
    for (int i = 0; i < steps; ++i) {
      step_station(s, theta, ctx, rng);
      s.pending.clear();
      if (s.reporting_state == ReportingState::Alarm) ++in_alarm;
    }
    const auto pi = stationary_distribution(theta);
    CHECK(in_alarm / double(steps) == doctest::Approx(pi[1]).epsilon(0.01));
  }
}

TEST_CASE("aggregated arrival count matches the transient sum") {
  const std::vector<double> thetas = {0.0, 0.0, 0.3, 0.0, 0.7, 0.0, 0.0, 0.2};
  const double lambda0 = 0.4;
  const double expected = expected_arrivals(thetas, lambda0);
  SplitMix64 rng(12);
  const int reps = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    StationState s;
    double count = 0.0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      StepContext ctx{lambda0, 1.0, double(k), 1.0, std::nullopt};
      count += static_cast<double>(step_station(s, thetas[k], ctx, rng).generated.size());
    }
    sum += count;
    sum_sq += count * count;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - expected) < 3.0 * se);
  CHECK(expected_arrivals(std::vector<double>(10, 0.0), 0.3) == doctest::Approx(3.0));
}

TEST_CASE("beta pdf integrates to one") {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {3.0, 4.0}, {2.0, 8.0}}) {
    const double span = 10.0;
    const int n = 200000;  // Simpson
    const double h = span / n;
    double s = beta_pdf(0.0, a, b, span) + beta_pdf(span, a, b, span);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * beta_pdf(i * h, a, b, span);
    CHECK(std::abs(s * h / 3.0 - 1.0) < 1e-6);
  }
  CHECK(beta_pdf(-1.0, 3, 4, 10) == 0.0);
  CHECK(beta_pdf(11.0, 3, 4, 10) == 0.0);
}

TEST_CASE("beta fit round trip") {
  const auto curve = beta_curve(3.0, 4.0, 10.0, 0.05, 1000000, 21);
  const auto fit = fit_beta(curve);
  CHECK(fit.alpha == doctest::Approx(3.0).epsilon(0.05));
  CHECK(fit.beta == doctest::Approx(4.0).epsilon(0.05));
  // T is the observed span; the extreme tails stay empty even at 10^6 samples
  CHECK(fit.t_span_s == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("symmetric curve fits alpha close to beta") {
  const auto fit = fit_beta(beta_curve(2.5, 2.5, 1.0, 0.01, 200000, 22));
  CHECK(fit.alpha == doctest::Approx(fit.beta).epsilon(0.05));
}

TEST_CASE("unfittable curves") {
  CHECK_THROWS_AS(fit_beta(ActivationCurve{0.0, 0.01, {}}), Error);
  CHECK_THROWS_AS(fit_beta(ActivationCurve{0.0, 0.01, {0, 5, 0}}), Error);
  try {
    fit_beta(ActivationCurve{0.0, 0.01, {0, 0}});
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Unfittable);
  }
}

TEST_CASE("unit model activation curve") {
  const auto g = place_stations(1000, 1000.0, 1);
  AlarmScenario s;
  s.t_a_s = 3.0;
  const double bw = 0.005;
  const auto c = activation_curve(g, s, bw, 7);
  CHECK(c.total() == 1000);
  CHECK(std::abs(c.span_s() - 0.25) <= bw + 1e-12);
  CHECK(c.origin_s == doctest::Approx(3.0));
  const auto fit = fit_beta(c);
  CHECK(fit.t_span_s < 1.0);
}

TEST_CASE("sqrt-cap activation count matches the geometric mean") {
  const auto g = place_stations(8000, 1000.0, 1);
  AlarmScenario s;
  s.correlation = SqrtCapCorrelation{500.0};
  double mean = 0.0, var = 0.0;
  for (const auto& p : g.positions) {
    const double psi = spatial_correlation(s.correlation, distance(p, s.epicenter));
    mean += psi;
    var += psi * (1.0 - psi);
  }
  const auto c = activation_curve(g, s, 0.005, 8);
  CHECK(std::abs(double(c.total()) - mean) < 3.0 * std::sqrt(var));
  // Over the uniform disk the mean factor is (2/r^2) * dmax^2 / 3.
  CHECK(mean / 8000.0 == doctest::Approx(1.0 / 6.0).epsilon(0.05));
}

TEST_CASE("exp decay activates fewer stations over a longer span than sqrt cap") {
  const auto g = place_stations(8000, 1000.0, 1);
  AlarmScenario e, q;
  e.correlation = ExpDecayCorrelation{0.005};
  q.correlation = SqrtCapCorrelation{500.0};
  const auto ce = activation_curve(g, e, 0.005, 30);
  const auto cq = activation_curve(g, q, 0.005, 31);
  CHECK(cq.total() > ce.total());
  CHECK(ce.span_s() > cq.span_s());
}

TEST_CASE("activation curves are seed-deterministic") {
  const auto g = place_stations(2000, 1000.0, 1);
  AlarmScenario s;
  s.correlation = ExpDecayCorrelation{0.003};
  CHECK(activation_curve(g, s, 0.005, 4).counts == activation_curve(g, s, 0.005, 4).counts);
}

TEST_CASE("deadline validation") {
  CHECK_NOTHROW(Deadlines{}.validate());
  CHECK_THROWS_AS((Deadlines{60.0, 5.0, 300.0}.validate()), Error);
  CHECK(Deadlines{}.for_kind(ReportKind::Alarm) == 5.0);
  CHECK(Deadlines{}.for_kind(ReportKind::Periodic) == 300.0);
}
