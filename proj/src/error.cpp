#include "assaykg/error.hpp"

namespace assaykg {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTitle: return "EmptyTitle";
    case ErrorCode::kEmptyLabel: return "EmptyLabel";
    case ErrorCode::kInvalidUri: return "InvalidUri";
    case ErrorCode::kInvalidLiteral: return "InvalidLiteral";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownContribution: return "UnknownContribution";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kDuplicateStatement: return "DuplicateStatement";
    case ErrorCode::kUnreadableSource: return "UnreadableSource";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kSessionClosed: return "SessionClosed";
    case ErrorCode::kUnknownProposal: return "UnknownProposal";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownAssay: return "UnknownAssay";
    case ErrorCode::kDuplicateStatementInSession:
      return "DuplicateStatementInSession";
    case ErrorCode::kPendingProposalsRemain: return "PendingProposalsRemain";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kInvalidBaseUri: return "InvalidBaseUri";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kModelUnavailable: return "ModelUnavailable";
  }
  return "Unknown";
}

}  // namespace assaykg
