#ifndef SKETCHREF_ERROR_HPP_
#define SKETCHREF_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchref {

enum class ErrorCode {
  kIo,
  kParse,
  kValidation,
  kDuplicateId,
  kSchemaMismatch,
  kDimMismatch,
  kZeroVector,
  kKindMismatch,
  kDegenerate,
  kPairing,
  kNoTargets,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// (the evaluation ledger, tests) branch on the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sketchref

#endif  // SKETCHREF_ERROR_HPP_
