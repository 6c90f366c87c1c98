#pragma once

#include <stdexcept>
#include <string>

namespace mahler {

// Every error raised by the library carries a stable kind so the CLI can map
// it to an exit code without string matching.
enum class ErrorKind {
    InvalidArgument,
    ParseError,
    DivisionByZeroSeries,
    IndeterminateValuation,
    PrecisionLoss,
    UnsupportedSplitting,
    SingularGauge,
    CyclicSearchExhausted,
    FactorRecurrenceStuck,
    NotRegularSingularShape,
    NoRelationFound,
    RecursionBudgetExceeded,
    InsufficientData,
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) raise(kind, what);
}

}  // namespace mahler
