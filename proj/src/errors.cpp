#include "collective/errors.hpp"

#include <algorithm>

namespace collective {

std::string_view to_string(Violation v) noexcept {
    switch (v) {
        case Violation::too_few_particles: return "too_few_particles";
        case Violation::nonpositive_mass: return "nonpositive_mass";
        case Violation::nonpositive_hbar: return "nonpositive_hbar";
        case Violation::dimension_mismatch: return "dimension_mismatch";
        case Violation::w_not_symmetric: return "w_not_symmetric";
        case Violation::w_not_shift_invariant: return "w_not_shift_invariant";
        case Violation::w_row_sum_nonzero: return "w_row_sum_nonzero";
        case Violation::k_not_symmetric: return "k_not_symmetric";
        case Violation::k_negative_entry: return "k_negative_entry";
        case Violation::hamiltonian_not_psd: return "hamiltonian_not_psd";
    }
    return "unknown";
}

namespace {

std::string summarize(const std::vector<ViolationRecord>& violations) {
    std::string msg = "invalid model:";
    for (const auto& v : violations) {
        msg += " [";
        msg += to_string(v.kind);
        if (!v.detail.empty()) {
            msg += ": ";
            msg += v.detail;
        }
        msg += "]";
    }
    return msg;
}

} // namespace

ModelValidationError::ModelValidationError(std::vector<ViolationRecord> violations)
    : InvalidInput(summarize(violations)), violations_(std::move(violations)) {}

bool ModelValidationError::has(Violation v) const noexcept {
    return std::any_of(violations_.begin(), violations_.end(),
                       [v](const ViolationRecord& r) { return r.kind == v; });
}

} // namespace collective
