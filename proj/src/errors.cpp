#include "modalbridge/errors.hpp"

namespace modalbridge {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::Evaluation: return "evaluation";
        case ErrorKind::Conditioning: return "conditioning";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

}  // namespace modalbridge
