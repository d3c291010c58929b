#pragma once

// JSON encoders/decoders shared by the report, project and API layers.
// Internal: nlohmann::json does not appear in the installed headers.

#include <string>

#include "creamkit/extended.hpp"
#include "creamkit/hta.hpp"
#include "creamkit/screening.hpp"
#include "creamkit/whatif.hpp"
#include "json.hpp"

namespace creamkit::codec {

using nlohmann::json;

json tree_to_json(const TaskTree& tree);
Result<TaskTree> tree_from_json(const json& j);

json assessment_to_json(const CpcAssessment& a);
/// Choices are not checked against a taxonomy here; see CpcAssessment::create.
Result<AssessmentDraft> assessment_from_json(const json& j);

json interval_to_json(const HepInterval& i);
json screening_to_json(const ScreeningResult& r);
ScreeningResult screening_from_json(const json& j);

json assignment_result_to_json(const AssignmentResult& r);
AssignmentResult assignment_result_from_json(const json& j);
json profile_to_json(const DemandProfile& p);
DemandProfile profile_from_json(const json& j);
json extended_to_json(const ExtendedResult& r);
ExtendedResult extended_from_json(const json& j);

json delta_to_json(const WhatIfDelta& d);
WhatIfDelta delta_from_json(const json& j);

}  // namespace creamkit::codec
