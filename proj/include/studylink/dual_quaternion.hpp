#pragma once

#include <array>
#include <iosfwd>

#include "studylink/quaternion.hpp"

namespace studylink {

using Vec8 = Eigen::Matrix<Scalar, 8, 1>;

// Element p + eps*d of the (complexified) dual quaternion algebra.
// Base element order for 8-vector coordinates: 1, i, j, k, e, ei, ej, ek.
struct DualQuaternion {
    Quaternion p;  // primal
    Quaternion d;  // dual

    DualQuaternion() = default;
    DualQuaternion(Quaternion primal, Quaternion dual) : p(primal), d(dual) {}
    explicit DualQuaternion(double s) : p(Scalar(s), {}, {}, {}) {}
    explicit DualQuaternion(Scalar s) : p(s, {}, {}, {}) {}

    static DualQuaternion one() { return DualQuaternion(1.0); }
    static DualQuaternion i() { return {{{}, Scalar(1.0), {}, {}}, {}}; }
    static DualQuaternion j() { return {{{}, {}, Scalar(1.0), {}}, {}}; }
    static DualQuaternion k() { return {{{}, {}, {}, Scalar(1.0)}, {}}; }
    static DualQuaternion e() { return {{}, {Scalar(1.0), {}, {}, {}}}; }
    static DualQuaternion ei() { return {{}, {{}, Scalar(1.0), {}, {}}}; }
    static DualQuaternion ej() { return {{}, {{}, {}, Scalar(1.0), {}}}; }
    static DualQuaternion ek() { return {{}, {{}, {}, {}, Scalar(1.0)}}; }

    DualQuaternion operator+(const DualQuaternion& o) const { return {p + o.p, d + o.d}; }
    DualQuaternion operator-(const DualQuaternion& o) const { return {p - o.p, d - o.d}; }
    DualQuaternion operator-() const { return {-p, -d}; }
    DualQuaternion operator*(const DualQuaternion& o) const { return {p * o.p, p * o.d + d * o.p}; }
    DualQuaternion operator*(const Scalar& s) const { return {p * s, d * s}; }
    DualQuaternion operator*(double s) const { return {p * s, d * s}; }

    // Quaternion conjugation applied to both parts: conj(p) + eps*conj(d).
    DualQuaternion conj() const { return {p.conj(), d.conj()}; }

    // conj(p) - eps*conj(d); the right-hand factor of the point action.
    DualQuaternion point_conj() const { return {p.conj(), -d.conj()}; }

    double abs() const { return std::sqrt(p.abs() * p.abs() + d.abs() * d.abs()); }
    bool is_real(double tol) const { return p.is_real(tol) && d.is_real(tol); }

    Vec8 vec() const {
        Vec8 v;
        v << p.w, p.x, p.y, p.z, d.w, d.x, d.y, d.z;
        return v;
    }
    static DualQuaternion from_vec(const Vec8& v) {
        return {{v[0], v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7]}};
    }
    static DualQuaternion from_real(const std::array<double, 8>& a) {
        return {{Scalar(a[0]), Scalar(a[1]), Scalar(a[2]), Scalar(a[3])},
                {Scalar(a[4]), Scalar(a[5]), Scalar(a[6]), Scalar(a[7])}};
    }
};

inline DualQuaternion operator*(const Scalar& s, const DualQuaternion& q) { return q * s; }
inline DualQuaternion operator*(double s, const DualQuaternion& q) { return q * s; }

// q*conj(q) without the scalar-ness guard; primal and dual parts taken from
// the scalar coefficients of the product.
DualNumber norm_unchecked(const DualQuaternion& q);

// q*conj(q) as a dual number. Throws non_scalar_norm if the product has
// quaternion components beyond tol (possible only through numerical corruption).
DualNumber dq_norm(const DualQuaternion& q, const Context& ctx = {});

// Scalar part of p*conj(d) + d*conj(p); zero iff [q] lies on the Study quadric.
// The dual component of the returned value is structurally zero.
DualNumber study_residual(const DualQuaternion& q);

// Complex-bilinear Study form B(a,b) = sum_i (a_p,i * b_d,i + a_d,i * b_p,i).
Scalar study_bilinear(const Vec8& a, const Vec8& b);

// Null-cone form: complex-bilinear square sum of the primal part.
Scalar nullcone_bilinear(const Vec8& a, const Vec8& b);

// Rigid displacement: real dual quaternion on the Study quadric with nonzero
// primal part, normalized to unit norm.
class Pose {
public:
    explicit Pose(const DualQuaternion& q, const Context& ctx = {});
    static Pose identity();

    const DualQuaternion& dq() const { return dq_; }
    Pose inverse() const;
    Pose operator*(const Pose& o) const;

private:
    Pose() = default;
    DualQuaternion dq_;
};

// Image of x under the displacement: embed x as 1 + eps*(x1 i + x2 j + x3 k),
// sandwich with (p + eps d) and (conj p - eps conj d), read the point back off.
Vec3 act_on_point(const Pose& q, const Vec3& x);

// r + eps*(t*r)/2, normalized; t is identified with t1 i + t2 j + t3 k.
Pose pose_from_rot_trans(const Quaternion& r, const Vec3& t, const Context& ctx = {});

std::ostream& operator<<(std::ostream& os, const DualQuaternion& q);

}  // namespace studylink
