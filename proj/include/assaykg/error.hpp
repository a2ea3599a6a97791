#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace assaykg {

// Every failure the engine can report. Names are stable: the HTTP layer and
// the CLI print them as machine-readable codes.
enum class ErrorCode {
  kEmptyTitle,
  kEmptyLabel,
  kInvalidUri,
  kInvalidLiteral,
  kInvalidArgument,
  kUnknownContribution,
  kUnknownNode,
  kDuplicateStatement,
  kUnreadableSource,
  kEmptyCorpus,
  kEmptyText,
  kSessionClosed,
  kUnknownProposal,
  kUnknownSession,
  kUnknownAssay,
  kDuplicateStatementInSession,
  kPendingProposalsRemain,
  kEmptySelection,
  kIoFailure,
  kVersionMismatch,
  kChecksumMismatch,
  kInvalidBaseUri,
  kParseError,
  kModelUnavailable,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

// ParseError carries the 1-based line that failed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace assaykg
