#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace landsig {

enum class ErrorCode {
  DegenerateBox,
  OutOfRange,
  MalformedRecord,
  EmptyDataset,
  IoError,
  EmptySignature,
  IncompleteZone,
  SessionClosed,
  IncompleteCluster,
  DegenerateRing,
  InvalidZone,
  NoZonesForLabel,
  InvalidProfile,
  InvalidArgument,
  NotFound,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// service layer can map it onto its public error vocabulary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace landsig
