#pragma once

#include <stdexcept>
#include <string>

namespace sdnlab {

enum class ErrorKind {
  Parse,
  Validation,
  UnknownEntity,
  Directive,
  Exhausted,
  Isolation,
  Incomparable,
  Replay,
  Io,
};

/// Every failure raised by the core carries a kind so the C API and the CLI
/// can map it onto a status / exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sdnlab
