#include "rova/error.hpp"

namespace rova {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
  }
  return "unknown";
}

}  // namespace rova
