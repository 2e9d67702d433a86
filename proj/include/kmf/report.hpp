#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kmf/rank2.hpp"

namespace kmf {

// Machine-readable verification report with a stable field order.
// status: pass | fail | gate_failed. Exit codes: 0 all pass, 1 any fail,
// 2 usage or gate errors.
struct Report {
  std::string check;
  std::string case_name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::string status;
  std::vector<std::string> witnesses;
  double timings_ms = 0.0;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;

  static Report from_check(const CheckReport& c, double ms);
  static Report gate_failed(const std::string& check, const std::string& case_name,
                            const std::string& reason);
};

std::string reports_to_json(const std::vector<Report>& reports);
int exit_code_for(const std::vector<Report>& reports);

} // namespace kmf
