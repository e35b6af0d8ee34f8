#pragma once

#include <stdexcept>
#include <string>

namespace insider {

enum class ErrorKind {
    Domain,          // argument outside the operation's domain
    Validation,      // configuration violates a type invariant
    NonConvergence,  // shooting / root finding did not converge
    RankDeficient,   // regression design matrix is singular
    GridMismatch,    // inputs built on different time grids
    Io,
    Usage,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& what)
        : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Machine-readable violation code, e.g. "varrho_out_of_range".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string code, const std::string& what) {
    throw Error(kind, std::move(code), what);
}

} // namespace insider
