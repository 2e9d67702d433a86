#pragma once

#include <stdexcept>
#include <string>

namespace kmf {

// All library failures carry a short machine-readable code ("DivisionByZero",
// "NotARealRoot", ...) next to the human-readable message, so callers and
// tests can branch on the code without parsing text.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

private:
  std::string code_;
};

} // namespace kmf
