#ifndef FAMA_ERRORS_HPP
#define FAMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fama {

// Bad input: a precondition or config invariant was violated.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class NumericalErrorKind { nonconvergence, overflow, cost_guard, inconsistency };

inline const char* to_string(NumericalErrorKind k) {
    switch (k) {
    case NumericalErrorKind::nonconvergence: return "nonconvergence";
    case NumericalErrorKind::overflow: return "overflow";
    case NumericalErrorKind::cost_guard: return "cost_guard";
    case NumericalErrorKind::inconsistency: return "inconsistency";
    }
    return "unknown";
}

class NumericalError : public std::runtime_error {
public:
    NumericalError(NumericalErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    NumericalErrorKind kind() const noexcept { return kind_; }

private:
    NumericalErrorKind kind_;
};

} // namespace fama

#endif
