#include <cmath>
#include <sstream>

#include "m2m/error.hpp"
#include "m2m/traffic.hpp"

namespace m2m {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::InvalidArgument: return "invalid_argument";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Infeasible: return "infeasible";
    case ErrorCategory::Unfittable: return "unfittable";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

double distance(Point a, Point b) { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

double spatial_correlation(const CorrelationModel& model, double d_m) {
  require(d_m >= 0.0, "spatial_correlation: negative distance");
  return std::visit(
      overloaded{
          [](const UnitCorrelation&) { return 1.0; },
          [d_m](const ExpDecayCorrelation& m) { return std::exp(-m.decay_per_m * d_m); },
          [d_m](const SqrtCapCorrelation& m) {
            if (d_m > m.d_max_m) return 0.0;
            return std::sqrt(m.d_max_m * m.d_max_m - d_m * d_m) / m.d_max_m;
          },
      },
      model);
}

std::string describe(const CorrelationModel& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const UnitCorrelation&) { os << "unit"; },
                 [&](const ExpDecayCorrelation& m) { os << "exp(a=" << m.decay_per_m << "/m)"; },
                 [&](const SqrtCapCorrelation& m) { os << "sqrt(d_max=" << m.d_max_m << "m)"; },
             },
             model);
  return os.str();
}

void validate(const CorrelationModel& model) {
  std::visit(overloaded{
                 [](const UnitCorrelation&) {},
                 [](const ExpDecayCorrelation& m) {
                   require(m.decay_per_m > 0.0, "exponential decay constant must be > 0");
                 },
                 [](const SqrtCapCorrelation& m) { require(m.d_max_m > 0.0, "d_max must be > 0"); },
             },
             model);
}

double AlarmScenario::activation_time(Point position) const {
  return t_a_s + distance(position, epicenter) / speed_m_per_s;
}

void AlarmScenario::validate() const {
  require(speed_m_per_s > 0.0, "alarm propagation speed must be > 0");
  m2m::validate(correlation);
}

double background_sample(const AlarmScenario& scenario, Point position, double t_s, double dt_s) {
  require(dt_s > 0.0, "background_sample: dt must be > 0");
  const double d = distance(position, scenario.epicenter);
  const double arrival = scenario.t_a_s + d / scenario.speed_m_per_s;
  if (arrival < t_s || arrival >= t_s + dt_s) return 0.0;
  return spatial_correlation(scenario.correlation, d);
}

double background_sample(std::span<const AlarmScenario> scenarios, Point position, double t_s,
                         double dt_s) {
  double quiet = 1.0;
  for (const auto& s : scenarios) quiet *= 1.0 - background_sample(s, position, t_s, dt_s);
  return 1.0 - quiet;
}

}  // namespace m2m
