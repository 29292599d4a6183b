#pragma once

#include <stdexcept>
#include <string>

namespace surfacc {

// Base of every error raised by the library. The CLI maps the kind to an exit code.
class Error : public std::runtime_error {
public:
    enum class Kind { precondition, degeneracy, ambiguity, convergence, consistency, configuration, format, duplicate };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error(Kind::precondition, w) {}
};
struct DegeneracyError : Error {
    explicit DegeneracyError(const std::string& w) : Error(Kind::degeneracy, w) {}
};
// Query point has two nearest-point candidates that cannot be told apart.
struct AmbiguityError : Error {
    explicit AmbiguityError(const std::string& w) : Error(Kind::ambiguity, w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error(Kind::convergence, w) {}
};
// An internally checked postcondition failed.
struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& w) : Error(Kind::consistency, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(Kind::configuration, w) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& w) : Error(Kind::format, w) {}
};
struct DuplicatePointError : Error {
    explicit DuplicatePointError(const std::string& w) : Error(Kind::duplicate, w) {}
};

}  // namespace surfacc
