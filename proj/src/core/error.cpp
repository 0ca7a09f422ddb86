#include "error.hpp"

namespace wavecast {

const char* error_kind_name(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Config: return "config error";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Io: return "I/O error";
    }
    return "error";
}

} // namespace wavecast
