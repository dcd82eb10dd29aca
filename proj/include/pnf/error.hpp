#pragma once

#include <stdexcept>
#include <string>

namespace pnf {

enum class ErrorCode : int {
    kOk = 0,
    kInvalidArgument = 1,
    kNotInvertible = 2,
    kUnsupported = 3,
    kOverflow = 4,
    kVerificationFailed = 5,
    kIo = 6,
    kInternal = 7,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

}  // namespace pnf
