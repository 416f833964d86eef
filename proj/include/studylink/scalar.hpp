#pragma once

#include <cmath>
#include <complex>

#include "studylink/context.hpp"

namespace studylink {

// Coefficients live in C throughout; the complex unit is central and distinct
// from the quaternion unit i. Real results are detected by |imag| <= tol_real.
using Scalar = std::complex<double>;

inline bool is_real(const Scalar& s, double tol) { return std::abs(s.imag()) <= tol; }

// Dual number a + eps*b with eps^2 = 0.
struct DualNumber {
    Scalar p{0.0, 0.0};
    Scalar d{0.0, 0.0};

    DualNumber() = default;
    DualNumber(Scalar primal, Scalar dual) : p(primal), d(dual) {}
    explicit DualNumber(double primal) : p(primal, 0.0) {}

    DualNumber operator+(const DualNumber& o) const { return {p + o.p, d + o.d}; }
    DualNumber operator-(const DualNumber& o) const { return {p - o.p, d - o.d}; }
    DualNumber operator*(const DualNumber& o) const { return {p * o.p, p * o.d + d * o.p}; }
    DualNumber operator-() const { return {-p, -d}; }

    double abs() const { return std::sqrt(std::norm(p) + std::norm(d)); }
};

inline double dual_distance(const DualNumber& a, const DualNumber& b) { return (a - b).abs(); }

}  // namespace studylink
