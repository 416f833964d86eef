#pragma once

#include <vector>

#include "studylink/dual_quaternion.hpp"

namespace studylink {

// Curve parameter value in R u {inf}; inf corresponds to zero rotation angle.
struct Param {
    Scalar t{0.0, 0.0};
    bool inf = false;

    Param() = default;
    explicit Param(Scalar value) : t(value) {}
    explicit Param(double value) : t(value, 0.0) {}
    static Param infinity() {
        Param p;
        p.inf = true;
        return p;
    }
};

// Polynomial in a central indeterminate t with dual quaternion coefficients.
// coeff[i] multiplies t^i.
struct MotionPoly {
    std::vector<DualQuaternion> coeff;

    MotionPoly() = default;
    explicit MotionPoly(std::vector<DualQuaternion> c) : coeff(std::move(c)) {}

    static MotionPoly constant(const DualQuaternion& q) { return MotionPoly({q}); }
    // t - h
    static MotionPoly linear(const DualQuaternion& h) { return MotionPoly({-h, DualQuaternion::one()}); }

    int degree() const { return static_cast<int>(coeff.size()) - 1; }
    double abs() const;

    // Drop numerically zero leading coefficients.
    MotionPoly trimmed(double rel_eps = 1e-12) const;

    MotionPoly operator+(const MotionPoly& o) const;
    MotionPoly operator-(const MotionPoly& o) const;
    MotionPoly operator*(const MotionPoly& o) const;  // noncommutative convolution
    MotionPoly operator*(const Scalar& s) const;
    MotionPoly operator*(double s) const;

    DualQuaternion eval(const Scalar& t) const;  // Horner
    DualQuaternion eval(const Param& p) const;   // inf returns the leading coefficient
};

double mp_distance(const MotionPoly& a, const MotionPoly& b);  // projective, flattened coefficients

// Real-coefficient polynomial; coeff[i] multiplies t^i.
struct RealPoly {
    std::vector<double> coeff;

    RealPoly() = default;
    explicit RealPoly(std::vector<double> c) : coeff(std::move(c)) {}

    int degree() const { return static_cast<int>(coeff.size()) - 1; }
    double eval(double t) const;
    Scalar eval(const Scalar& t) const;
    RealPoly operator*(const RealPoly& o) const;
    RealPoly trimmed(double rel_eps = 1e-12) const;
};

// C * conj(C) collapsed to a real polynomial. Throws not_a_motion_polynomial
// when a product coefficient has quaternion or imaginary residue beyond tol.
RealPoly norm_poly(const MotionPoly& c, const Context& ctx = {});

// All complex roots via companion-matrix eigenvalues.
std::vector<std::complex<double>> real_poly_roots(const RealPoly& p);

struct QuadraticFactors {
    std::vector<RealPoly> quads;  // monic irreducible quadratics, canonically sorted
    bool repeated = false;        // two factors coincide within tolerance
};

// Splits an even-degree real polynomial with no real roots into monic
// quadratic factors by conjugate pairing. Throws real_root_present otherwise.
QuadraticFactors quadratic_factors(const RealPoly& nu, const Context& ctx = {});

// C = Q*M + R with deg R <= 1; M is a monic real quadratic, so division is two-sided.
std::pair<MotionPoly, MotionPoly> div_rem_quadratic(const MotionPoly& c, const RealPoly& m);

// Unique common zero h of M and the remainder of C mod M; (t - h) is then a
// right factor of C. Throws non_invertible_lead when the remainder's leading
// coefficient is not invertible.
DualQuaternion right_factor(const MotionPoly& c, const RealPoly& m, const Context& ctx = {});

// Exact right division C = Q*(t-h) (remainder discarded; callers verify products).
MotionPoly divide_linear_right(const MotionPoly& c, const DualQuaternion& h);

// Ordered factor list meaning C = lead * (t-h1)(t-h2)...(t-hk).
// lead is 1 for monic inputs; permutation records which norm quadratic
// produced each position (rightmost factor last).
struct Factorization {
    std::vector<DualQuaternion> factors;
    DualQuaternion lead = DualQuaternion::one();
    std::vector<int> permutation;

    MotionPoly remultiply() const;
};

// All factorizations of a generic quadratic or cubic motion polynomial, one
// per permutation of the norm quadratics (deduplicated when factors repeat).
// Throws non_generic when no permutation yields a valid factorization.
std::vector<Factorization> factorize_motion_poly(const MotionPoly& c, const Context& ctx = {});

// Degree-3 entry point; generically returns six factorizations.
std::vector<Factorization> factorize_cubic(const MotionPoly& c, const Context& ctx = {});

// Substitute t -> (a t + b)/(c t + d) and clear denominators; the curve in P^7
// is unchanged as a point set. Requires ad - bc != 0.
MotionPoly mobius_reparam(const MotionPoly& c, double a, double b, double cc, double d);

}  // namespace studylink
