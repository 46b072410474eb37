#pragma once

#include <string>

#include "mql/structure.hpp"

namespace mql {

std::string to_string(SimplicityVerdict v);
std::string to_string(ConditionLVerdict v);

// Machine-readable JSON document with stable field names: verdict,
// condition_l, witnesses[], classes[]. Deterministic for a given report.
std::string simplicity_report_json(const SimplicityReport& report);

// Human-readable rendering of the same content.
std::string simplicity_report_text(const SimplicityReport& report);

}  // namespace mql
