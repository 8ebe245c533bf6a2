#pragma once

#include <stdexcept>
#include <string>

namespace fringe {

// Error taxonomy shared by all modules. Domain and singularity failures are
// kept distinct so parameter scans can surface divergences instead of
// clamping them, and so the CLI can map them to its exit codes
// (usage/config -> 2, numeric -> 3).
enum class ErrorKind {
    invalid_argument,  // bad sizes, mismatched cutoffs, malformed input
    domain,            // value outside the physical domain of a formula
    structure,         // density matrix lacks the required sparsity pattern
    singularity,       // formula diverges at this parameter point
    unlocked,          // interferometer lock conditions violated
    parse,             // config or stream file could not be parsed
    missing_key,       // required config key absent
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

}  // namespace fringe
