#pragma once

#include "fracvar/estimators.hpp"
#include "fracvar/mc.hpp"
#include "fracvar/models.hpp"
#include "fracvar/sampling.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace fracvar {

using nlohmann::json;

// Model descriptions mirror ProcessModel; see docs/schema.md.
json model_to_json(const ProcessModel& model);
ProcessModel model_from_json(const json& j);

json constants_to_json(const TheoreticalConstants& c);
json report_to_json(const EstimateReport& r);
json mc_report_to_json(const McReport& r);

json experiment_to_json(const ExperimentConfig& c);
ExperimentConfig experiment_from_json(const json& j);

// Path CSV: header "t,value", one row per grid point, 17 significant digits.
void write_path_csv(std::ostream& os, const PathSample& path);
std::vector<double> read_path_csv(std::istream& is);

} // namespace fracvar
