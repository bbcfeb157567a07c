#pragma once

#include <stdexcept>
#include <string>

namespace rova {

enum class ErrorKind {
  kFormat,     // malformed container, spec or stream
  kShape,      // dimension or length mismatch
  kDomain,     // value outside its allowed set
  kIo,         // filesystem failure
  kTransport,  // remote judge unreachable after retries
  kParse,      // judge response not understood
  kValidation  // configuration / precondition violation
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace rova
