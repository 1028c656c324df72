#pragma once

// Command layer shared by the C API: JSON parameters in, a result document,
// a CSV table and a text summary out. normalize() validates and fills in
// defaults without computing anything; run() normalizes and computes.

#include <string>
#include <vector>

#include "json.hpp"

namespace smalldig::service {

// Status codes, shared with the C API and the CLI exit codes.
enum Status : int { kOk = 0, kInternal = 1, kInvalid = 2, kBudget = 3, kIndeterminate = 4 };

struct Result {
  nlohmann::json result;
  std::string csv;
  std::string summary;
  int status = kOk;
};

const std::vector<std::string>& commands();

nlohmann::json normalize(const std::string& command, const nlohmann::json& params);
Result run(const std::string& command, const nlohmann::json& params);

} // namespace smalldig::service
