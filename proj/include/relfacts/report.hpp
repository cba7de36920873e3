#ifndef RELFACTS_REPORT_HPP
#define RELFACTS_REPORT_HPP

#include <string>

#include "relfacts/interpret.hpp"

namespace relfacts::scn {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { kJson, kCsv, kText };

// Serializes a run deterministically: same result, same bytes. JSON is the
// canonical structured form (schema_version 1, documented in
// docs/report-schema.md); CSV flattens the fact logs only; text is for
// reading. Every floating-point value is printed with 17 significant digits.
std::string render_report(const ScenarioResult& result, ReportFormat format);

}  // namespace relfacts::scn

#endif
