#pragma once

#include <stdexcept>
#include <string>

namespace wavecast {

enum class ErrorKind {
    Config,   // shapes, counts, or settings that do not fit together
    Usage,    // invalid call arguments (empty inputs, short windows, n <= 0)
    Numeric,  // non-finite values or divergence
    Data,     // bad input data (CSV content, prices, zero variance)
    Format,   // corrupt or incompatible checkpoint / config files
    Io,
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what)
{
    if (!condition) {
        throw Error(kind, what);
    }
}

} // namespace wavecast
