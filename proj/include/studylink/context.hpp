#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace studylink {

// Single tuning point for all numerical decisions in the library.
// tol_real:  threshold for treating a complex value as real.
// tol_proj:  threshold for projective equality (second singular value ratio).
// tol_rank:  threshold for rank decisions and quadric regularity.
struct Context {
    double tol_real = 1e-9;
    double tol_proj = 1e-9;
    double tol_rank = 1e-8;
    std::uint64_t seed = 0x5eed1234abcdef01ULL;
};

enum class Errc {
    non_scalar_norm,
    primal_zero,
    zero_rotation,
    invalid_line,
    not_a_rotation,
    dependent_points,
    contained_in_study,
    no_quadrilateral,
    degenerate_config,
    singular_b,
    not_a_motion_polynomial,
    real_root_present,
    non_invertible_lead,
    non_generic,
    commuting_axes,
    degenerate_plane,
    meets_exceptional,
    numerical_failure,
    degenerate_chart_data,
    non_real_curve,
    no_degenerate_factorization,
    bad_input,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace studylink
