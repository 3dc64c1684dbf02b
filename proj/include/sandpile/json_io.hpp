#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "sandpile/analysis.hpp"
#include "sandpile/continuum.hpp"
#include "sandpile/patterns.hpp"
#include "sandpile/solver.hpp"

namespace sandpile {

using Json = nlohmann::json;

Json pattern_to_json(const PeriodicPattern& p);
PeriodicPattern pattern_from_json(const Json& j);

Json pattern_data_to_json(const PatternData& d);
PatternData pattern_data_from_json(const Json& j);

Json match_report_to_json(const MatchReport& r);

Json pieces_to_json(const std::vector<QuadraticPiece>& ps);

Json stats_to_json(const Solution& sol);

Json convergence_to_json(const std::vector<ConvergenceRow>& rows);
Json defects_to_json(const std::vector<DefectReport>& rows);
Json perfect_to_json(const std::vector<PerfectPatchRow>& rows);
Json decay_to_json(const DecayReport& rep);

std::string dump_json(const Json& j);  // canonical two-space dump with newline

}  // namespace sandpile
