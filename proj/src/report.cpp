#include "kmf/report.hpp"

#include <sstream>

namespace kmf {

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["case"] = case_name;
  j["params"] = params;
  j["status"] = status;
  j["witnesses"] = witnesses;
  j["timings_ms"] = timings_ms;
  return j;
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << "[" << status << "] " << check;
  if (!case_name.empty() && case_name != "-") os << " (" << case_name << ")";
  if (!params.empty()) {
    os << " ";
    bool first = true;
    for (auto& [k, v] : params.items()) {
      os << (first ? "" : " ") << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
      first = false;
    }
  }
  for (auto& w : witnesses) os << "\n    " << w;
  return os.str();
}

Report Report::from_check(const CheckReport& c, double ms) {
  Report r;
  r.check = c.check;
  r.case_name = c.case_name;
  for (auto& [k, v] : c.params) r.params[k] = v;
  r.status = c.pass ? "pass" : "fail";
  r.witnesses = c.witnesses;
  r.timings_ms = ms;
  return r;
}

Report Report::gate_failed(const std::string& check, const std::string& case_name,
                           const std::string& reason) {
  Report r;
  r.check = check;
  r.case_name = case_name;
  r.status = "gate_failed";
  r.witnesses = {reason};
  return r;
}

std::string reports_to_json(const std::vector<Report>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto& r : reports) arr.push_back(r.to_json());
  return arr.dump(2);
}

int exit_code_for(const std::vector<Report>& reports) {
  bool any_fail = false, any_gate = false;
  for (auto& r : reports) {
    if (r.status == "fail") any_fail = true;
    if (r.status == "gate_failed") any_gate = true;
  }
  if (any_fail) return 1;
  if (any_gate) return 2;
  return 0;
}

} // namespace kmf
