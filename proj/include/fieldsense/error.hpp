#pragma once

#include <stdexcept>
#include <string>

namespace fieldsense {

enum class ErrorKind {
    Io,              // file cannot be opened or written
    Format,          // malformed input file
    InvalidArgument, // precondition violated by the caller
    Numerical,       // singular / ill-conditioned system, failed factorization
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond)
        fail(ErrorKind::InvalidArgument, what);
}

} // namespace fieldsense
