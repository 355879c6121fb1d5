#include "agc/error.hpp"

namespace agc {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "dimension mismatch";
        case ErrorKind::NonFinite: return "non-finite input";
        case ErrorKind::InvalidArgument: return "invalid argument";
        case ErrorKind::Validation: return "validation failure";
        case ErrorKind::Singular: return "singular matrix";
        case ErrorKind::Construction: return "construction failure";
        case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace agc
