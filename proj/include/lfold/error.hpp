#pragma once

#include <stdexcept>
#include <string>

namespace lfold {

/// Error categories surfaced by the library. The CLI maps them onto the
/// `kind` field of its error JSON.
enum class ErrorKind {
  domain,
  index,
  resource_limit,
  deligne_violation,
  format,
  ill_conditioned,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::index: return "index";
    case ErrorKind::resource_limit: return "resource_limit";
    case ErrorKind::deligne_violation: return "deligne_violation";
    case ErrorKind::format: return "format";
    case ErrorKind::ill_conditioned: return "ill_conditioned";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(ErrorKind::domain, msg) {}
};
struct IndexError : Error {
  explicit IndexError(const std::string& msg) : Error(ErrorKind::index, msg) {}
};
struct ResourceLimitError : Error {
  explicit ResourceLimitError(const std::string& msg) : Error(ErrorKind::resource_limit, msg) {}
};
/// A normalized prime coefficient outside [-2, 2]: the table is corrupted or
/// the input is not an eigenform.
struct DeligneViolation : Error {
  explicit DeligneViolation(const std::string& msg) : Error(ErrorKind::deligne_violation, msg) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& msg) : Error(ErrorKind::format, msg) {}
};
struct IllConditionedError : Error {
  explicit IllConditionedError(const std::string& msg) : Error(ErrorKind::ill_conditioned, msg) {}
};

}  // namespace lfold
