#include "keyclip/error.hpp"

namespace keyclip {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::insufficient_pool: return "insufficient pool";
    case ErrorKind::format: return "format error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::transport: return "transport error";
    case ErrorKind::scoring: return "scoring error";
    case ErrorKind::io: return "I/O error";
    }
    return "error";
}

} // namespace keyclip
