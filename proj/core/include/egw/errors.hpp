#pragma once

#include <stdexcept>
#include <string>

namespace egw {

// Stable error codes shared by the library and the CLI exit-code mapping.
enum class errc {
  none = 0,
  parse_error,            // malformed input file / JSON
  negative_entry,         // pmf or channel entry below -1e-12
  mass_deviation,         // total mass further than 1e-9 from 1
  empty_matrix,
  dimension_mismatch,
  alphabet_too_large,
  graph_too_large,
  enumeration_too_large,
  oracle_too_large,
  invalid_argument,       // bad direction, bad grid, bad flag combination
  outer_bound_violated,
  infeasible,             // no witness within constraint tolerance
  infeasible_t,           // curve parameter outside the feasible range
  degenerate_ratio,
  epsilon_too_large,
  invalid_path,
  invalid_cycle,
  condition_not_met,
  not_independent,
};

const char* errc_name(errc c);

// Errors are reported with the code name so callers and the CLI can match on
// a stable string instead of the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        message_(message) {}
  errc code() const { return code_; }
  const char* name() const { return errc_name(code_); }
  const std::string& message() const { return message_; }

 private:
  errc code_;
  std::string message_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace egw
