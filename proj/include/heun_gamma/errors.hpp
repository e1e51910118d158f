#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heun {

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the command-line front end.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HEUN_DEFINE_ERROR(Name)                                                \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& message) : Error(#Name, message) {}  \
    }

HEUN_DEFINE_ERROR(PoleError);
HEUN_DEFINE_ERROR(ConvergenceError);
HEUN_DEFINE_ERROR(DegenerateError);
HEUN_DEFINE_ERROR(NotSingularError);
HEUN_DEFINE_ERROR(IrregularError);
HEUN_DEFINE_ERROR(PreconditionError);
HEUN_DEFINE_ERROR(UnsupportedSchemeError);
HEUN_DEFINE_ERROR(NoRootsError);
HEUN_DEFINE_ERROR(SingularPathError);
HEUN_DEFINE_ERROR(StepUnderflowError);
HEUN_DEFINE_ERROR(EvaluationError);
HEUN_DEFINE_ERROR(SingularRefError);
HEUN_DEFINE_ERROR(RegionError);
HEUN_DEFINE_ERROR(ParseError);
HEUN_DEFINE_ERROR(ValidationError);

#undef HEUN_DEFINE_ERROR

/// Raised by coefficient generation when the leading recurrence coefficient
/// vanishes at an interior index while the remaining terms do not.
class DegenerateIndexError : public Error {
public:
    explicit DegenerateIndexError(std::size_t index)
        : Error("DegenerateIndexError",
                "leading recurrence coefficient vanishes at n = " + std::to_string(index)),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

} // namespace heun
