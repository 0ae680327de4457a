#include <iomanip>

#include "m2m/report_io.hpp"

namespace m2m {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::ostream& csv_numbers(std::ostream& os) { return os << std::setprecision(12); }

}  // namespace

Json to_json(const BetaFit& fit) {
  return Json{{"alpha", fit.alpha}, {"beta", fit.beta}, {"t_span_s", fit.t_span_s}, {"residual", fit.residual}};
}

Json to_json(const AnalysisReport& r, const ProtocolParams& params, const ActivityProbs& activity) {
  Json j;
  j["n"] = params.n;
  j["omega"] = params.omega;
  j["delta_c"] = params.delta_c;
  j["l1"] = params.l1;
  j["l2"] = params.l2;
  j["pool_size"] = r.pool_size;
  j["p_a0"] = activity.p_a0;
  j["p_a1"] = activity.p_a1;
  j["p_h1"] = r.p_h1;
  j["p_c_h0"] = r.p_c_h0;
  j["p_c_h1"] = r.p_c_h1;
  j["p_00"] = r.detection.p00;
  j["p_10"] = r.detection.p10;
  j["p_01"] = r.detection.p01;
  j["p_11"] = r.detection.p11;
  j["r1"] = r.resolution.r1;
  j["r2"] = r.resolution.r2;
  j["e_s"] = r.e_s;
  j["e_k_00"] = optional_number(r.counts.e_k_00);
  j["e_k_10"] = optional_number(r.counts.e_k_10);
  j["e_k_01"] = optional_number(r.counts.e_k_01);
  j["e_k_11"] = optional_number(r.counts.e_k_11);
  j["e_c_00"] = optional_number(r.e_c_00);
  j["e_c_10"] = optional_number(r.e_c_10);
  j["e_c_01"] = optional_number(r.e_c_01);
  j["e_c_11"] = optional_number(r.e_c_11);
  j["e_c"] = r.e_c;
  j["pool_duration_s"] = r.e_c * params.rs_duration_s;
  return j;
}

Json to_json(const ScenarioStats& s) {
  Json j;
  j["pools_run"] = s.pools_run;
  j["mean_rs_per_pool"] = s.mean_rs_per_pool();
  j["rs_per_pool_standard_error"] = s.total_rs.standard_error();
  j["mean_pool_duration_s"] = s.mean_pool_duration_s();
  j["rs_per_station_per_ri"] = s.rs_per_station_per_ri();
  j["pools_h0"] = s.pools_h0;
  j["pools_h1"] = s.pools_h1;
  j["p_alarm_decision_given_h0"] = s.p_alarm_given_h0();
  j["p_alarm_decision_given_h1"] = s.p_alarm_given_h1();
  j["active_stations"] = s.active_stations;
  j["unresolved_stations"] = s.unresolved_stations;
  j["reports_delivered"] = s.reports_delivered;
  j["dropped_reports"] = s.dropped_reports;
  j["alarm_reports"] = s.alarm_reports;
  j["late_alarm_reports"] = s.late_alarm_reports;
  j["max_alarm_delay_s"] = s.max_alarm_delay_s;
  j["max_delay_s"] = s.max_delay_s;
  j["k_c_histogram_h0"] = s.kc_h0;
  j["k_c_histogram_h1"] = s.kc_h1;
  return j;
}

Json to_json(const SweepRow& row) {
  Json j;
  j["omega"] = row.omega;
  j["delta_c_pct"] = row.delta_c_pct;
  j["delta_c"] = row.delta_c;
  j["l1"] = row.l1;
  j["l2"] = row.l2;
  j["feasible"] = row.feasible;
  j["max_pool_duration_s"] = row.max_pool_duration_s;
  j["e_c_analytical"] = row.e_c_analytical;
  j["e_c_simulated"] = optional_number(row.e_c_simulated);
  j["e_c_simulated_se"] = optional_number(row.e_c_simulated_se);
  j["p11"] = row.p11;
  j["p10"] = row.p10;
  return j;
}

Json to_json(const SweepResult& result) {
  Json rows = Json::array();
  for (const auto& r : result.rows) rows.push_back(to_json(r));
  return Json{{"rows", rows}, {"argmin", to_json(result.argmin)}};
}

Json to_json(const NaiveComparison& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back(Json{{"omega", r.omega}, {"e_c_adaptive", r.e_c_adaptive}, {"e_c_naive", r.e_c_naive}});
  Json j;
  j["rows"] = rows;
  j["best_omega_adaptive"] = c.best_omega_adaptive;
  j["best_omega_naive"] = c.best_omega_naive;
  j["min_adaptive"] = c.min_adaptive;
  j["min_naive"] = c.min_naive;
  j["ratio"] = c.ratio;
  return j;
}

void write_csv(std::ostream& os, const ActivationCurve& curve) {
  csv_numbers(os) << "bin_start_s,count\n";
  for (std::size_t i = 0; i < curve.counts.size(); ++i)
    os << curve.origin_s + static_cast<double>(i) * curve.bin_width_s << ',' << curve.counts[i] << '\n';
}

void write_csv(std::ostream& os, const DelayHistogram& h) {
  csv_numbers(os) << "delay_start_s,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    os << static_cast<double>(i) * h.bin_width_s << ',' << h.counts[i] << '\n';
}

void write_csv(std::ostream& os, const SweepResult& result) {
  csv_numbers(os) << "omega,delta_c_pct,delta_c,l1,l2,feasible,max_pool_duration_s,e_c,e_c_simulated,"
                     "e_c_simulated_se,p11,p10\n";
  for (const auto& r : result.rows) {
    os << r.omega << ',' << r.delta_c_pct << ',' << r.delta_c << ',' << r.l1 << ',' << r.l2 << ','
       << (r.feasible ? 1 : 0) << ',' << r.max_pool_duration_s << ',' << r.e_c_analytical << ',';
    if (r.e_c_simulated) os << *r.e_c_simulated;
    os << ',';
    if (r.e_c_simulated_se) os << *r.e_c_simulated_se;
    os << ',' << r.p11 << ',' << r.p10 << '\n';
  }
}

void write_csv(std::ostream& os, const NaiveComparison& c) {
  csv_numbers(os) << "omega,e_c_adaptive,e_c_naive\n";
  for (const auto& r : c.rows) os << r.omega << ',' << r.e_c_adaptive << ',' << r.e_c_naive << '\n';
}

}  // namespace m2m
