// errors.hpp - exception types shared by every module.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace collective {

// Caller supplied something outside an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation could not complete (eigensolve failure, unstable sector,
// missing bracket root, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Violation {
    too_few_particles,
    nonpositive_mass,
    nonpositive_hbar,
    dimension_mismatch,
    w_not_symmetric,
    w_not_shift_invariant,
    w_row_sum_nonzero,
    k_not_symmetric,
    k_negative_entry,
    hamiltonian_not_psd,
};

std::string_view to_string(Violation v) noexcept;

struct ViolationRecord {
    Violation kind;
    std::string detail;
};

// Thrown by the model builders; carries every violated invariant, not just
// the first one found.
class ModelValidationError : public InvalidInput {
public:
    explicit ModelValidationError(std::vector<ViolationRecord> violations);

    const std::vector<ViolationRecord>& violations() const noexcept { return violations_; }
    bool has(Violation v) const noexcept;

private:
    std::vector<ViolationRecord> violations_;
};

} // namespace collective
