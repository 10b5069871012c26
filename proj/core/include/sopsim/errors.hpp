#pragma once

#include <stdexcept>
#include <string>

namespace sopsim {

enum class errc {
    empty_spectrum,
    non_monotone_values,
    multiplicity_sum_mismatch,
    marked_count_out_of_range,
    dimension_too_large,
    degenerate_ground,
    bracketing_failure,
    step_size_underflow,
    tolerance_not_met,
    non_positive_gap,
    quadrature_failure,
    endpoint_singularity,
    path_ill_defined,
    divergent_runtime,
    promise_violation,
    degenerate_fit,
    io_failure,
    bad_argument,
};

const char* errc_name(errc c);

// Domain error carrying a stable code; the CLI maps codes to exit statuses.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

} // namespace sopsim
