#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "plarod/forces.hpp"
#include "plarod/recovery.hpp"
#include "plarod/solver.hpp"

namespace plarod {

inline constexpr const char* kToolVersion = "plarod 0.1.0";

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

nlohmann::json admissibility_json(const AdmissibilityReport& rep);
nlohmann::json solve_report_json(const SolveReport& rep);
nlohmann::json sweep_rows_json(const std::vector<SweepRow>& rows);
std::string sweep_rows_csv(const std::vector<SweepRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace plarod
