#include "cantor/error.hpp"

namespace cantor {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::CapExceeded: return "cap_exceeded";
  case ErrorKind::InvalidDigit: return "invalid_digit";
  case ErrorKind::InvalidIndex: return "invalid_index";
  case ErrorKind::IndexMismatch: return "index_mismatch";
  case ErrorKind::DepthExceeded: return "depth_exceeded";
  case ErrorKind::NotFixed: return "not_fixed";
  case ErrorKind::InvalidElement: return "invalid_element";
  case ErrorKind::InvalidParams: return "invalid_params";
  case ErrorKind::SearchExhausted: return "search_exhausted";
  case ErrorKind::Io: return "io";
  }
  return "unknown";
}

} // namespace cantor
