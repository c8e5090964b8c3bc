#pragma once

// Versioned parameter file holding MotorParams and DecisionParams:
//
//   {"version": 1,
//    "motor":    {"fitts_a": ..., "fitts_b": ..., ...},
//    "decision": {"react_ms": ..., ...}}
//
// Every field is required; unknown fields are rejected.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "padbench/usersim.hpp"

namespace padbench {

class ParamsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SimParams parse_params(std::string_view text);
std::string format_params(const SimParams& params);

/// Reads a field by its dotted name, e.g. "motor.fitts_b". Throws ParamsError
/// for unknown names.
double get_param(const SimParams& params, std::string_view name);
void set_param(SimParams& params, std::string_view name, double value);
/// All dotted names in file order.
const std::vector<std::string>& param_names();

}  // namespace padbench
