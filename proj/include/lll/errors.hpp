// Error taxonomy shared by the whole engine.
//
// Every failure mode carries a kind (mapped to a process exit code by the
// CLI) plus a machine-readable JSON detail record, so scripted callers never
// have to parse prose messages.
#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace lll {

enum class ErrorKind {
  // Input and usage problems (CLI exit code 2).
  ParseError,
  MalformedTable,
  CriterionViolated,
  RankExceeded,
  DomainError,
  UsageError,
  // Internal sentinels: states the theory says are unreachable on valid
  // input (CLI exit code 3).
  VarDoesNotAffect,
  PStarViolatedPre,
  NoGoodValue,
  AllValuesEvil,
  FinalEventOccurred,
  DisjointnessViolation,
  NotRepresentable,
  Internal,
};

const char* to_string(ErrorKind kind);

// 2 for input/usage errors, 3 for internal sentinels.
int exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        nlohmann::json detail = nlohmann::json::object());

  ErrorKind kind() const { return kind_; }
  const nlohmann::json& detail() const { return detail_; }

  // {"error": {"kind": ..., "message": ..., "detail": {...}}}
  nlohmann::json record() const;

 private:
  ErrorKind kind_;
  nlohmann::json detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message,
                       nlohmann::json detail = nlohmann::json::object());

// Always-on invariant check (never compiled out; the engine's job is to
// certify, so its own guards must not disappear in release builds).
inline void require(bool cond, ErrorKind kind, const char* message) {
  if (!cond) fail(kind, message);
}

}  // namespace lll
