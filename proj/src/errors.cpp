#include "lll/errors.hpp"

namespace lll {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MalformedTable: return "MalformedTable";
    case ErrorKind::CriterionViolated: return "CriterionViolated";
    case ErrorKind::RankExceeded: return "RankExceeded";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::VarDoesNotAffect: return "VarDoesNotAffect";
    case ErrorKind::PStarViolatedPre: return "PStarViolatedPre";
    case ErrorKind::NoGoodValue: return "NoGoodValue";
    case ErrorKind::AllValuesEvil: return "AllValuesEvil";
    case ErrorKind::FinalEventOccurred: return "FinalEventOccurred";
    case ErrorKind::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorKind::NotRepresentable: return "NotRepresentable";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::MalformedTable:
    case ErrorKind::CriterionViolated:
    case ErrorKind::RankExceeded:
    case ErrorKind::DomainError:
    case ErrorKind::UsageError:
      return 2;
    default:
      return 3;
  }
}

Error::Error(ErrorKind kind, const std::string& message, nlohmann::json detail)
    : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

nlohmann::json Error::record() const {
  return {{"error",
           {{"kind", to_string(kind_)}, {"message", what()}, {"detail", detail_}}}};
}

void fail(ErrorKind kind, const std::string& message, nlohmann::json detail) {
  throw Error(kind, message, std::move(detail));
}

}  // namespace lll
