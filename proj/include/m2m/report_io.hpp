#pragma once

#include <ostream>

#include "json.hpp"
#include "m2m/analysis.hpp"
#include "m2m/optimizer.hpp"
#include "m2m/simulator.hpp"
#include "m2m/traffic.hpp"

namespace m2m {

using Json = nlohmann::ordered_json;

Json to_json(const BetaFit& fit);
Json to_json(const AnalysisReport& report, const ProtocolParams& params, const ActivityProbs& activity);
Json to_json(const ScenarioStats& stats);
Json to_json(const SweepRow& row);
Json to_json(const SweepResult& result);
Json to_json(const NaiveComparison& comparison);

// CSV writers; each emits a header row.
void write_csv(std::ostream& os, const ActivationCurve& curve);  // bin_start_s,count
void write_csv(std::ostream& os, const DelayHistogram& histogram);
void write_csv(std::ostream& os, const SweepResult& result);
void write_csv(std::ostream& os, const NaiveComparison& comparison);

}  // namespace m2m
