#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cantor {

enum class ErrorKind {
  CapExceeded,
  InvalidDigit,
  InvalidIndex,
  IndexMismatch,
  DepthExceeded,
  NotFixed,
  InvalidElement,
  InvalidParams,
  SearchExhausted,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Structured domain error. The CLI maps these to exit code 1.
class CantorError : public std::runtime_error {
public:
  CantorError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw CantorError(kind, what);
}

} // namespace cantor
