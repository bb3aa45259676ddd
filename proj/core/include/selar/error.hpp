#pragma once

#include <stdexcept>
#include <string>

namespace selar {

// Error kinds double as CLI exit codes (0 = success, 1 = unexpected).
enum class ErrorKind : int {
  Config = 2,    // bad configuration or flag values
  Data = 3,      // malformed input files, infeasible sampling, schema violations
  Numeric = 4,   // NaN/Inf produced where finite values are required
  Shape = 5,     // tensor or graph dimension mismatch
  Contract = 6,  // API misuse: nesting without retain, head-kind mixups, caps
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

  static Error config(const std::string& m) { return {ErrorKind::Config, m}; }
  static Error data(const std::string& m) { return {ErrorKind::Data, m}; }
  static Error numeric(const std::string& m) { return {ErrorKind::Numeric, m}; }
  static Error shape(const std::string& m) { return {ErrorKind::Shape, m}; }
  static Error contract(const std::string& m) { return {ErrorKind::Contract, m}; }

 private:
  ErrorKind kind_;
};

}  // namespace selar
