#pragma once

#include <Eigen/Dense>

#include "studylink/scalar.hpp"

namespace studylink {

using Vec3 = Eigen::Vector3d;

// Quaternion over the complexified coefficient field.
// Conjugation negates the i, j, k coefficients; it leaves the central complex
// unit alone, so q*conj(q) = w^2+x^2+y^2+z^2 with complex (not Hermitian) squares.
struct Quaternion {
    Scalar w{0.0, 0.0};
    Scalar x{0.0, 0.0};
    Scalar y{0.0, 0.0};
    Scalar z{0.0, 0.0};

    Quaternion() = default;
    Quaternion(Scalar w_, Scalar x_, Scalar y_, Scalar z_) : w(w_), x(x_), y(y_), z(z_) {}
    explicit Quaternion(double w_) : w(w_, 0.0) {}

    static Quaternion from_vector(const Vec3& v) { return {Scalar(0.0), Scalar(v.x()), Scalar(v.y()), Scalar(v.z())}; }

    Quaternion conj() const { return {w, -x, -y, -z}; }

    Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    Quaternion operator-() const { return {-w, -x, -y, -z}; }

    Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Quaternion operator*(const Scalar& s) const { return {w * s, x * s, y * s, z * s}; }
    Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }

    // Complex-bilinear square sum; equals q*conj(q) as a scalar.
    Scalar squared_norm() const { return w * w + x * x + y * y + z * z; }

    // Euclidean magnitude of the 4 complex coefficients (for scaling/thresholds).
    double abs() const { return std::sqrt(std::norm(w) + std::norm(x) + std::norm(y) + std::norm(z)); }

    bool is_real(double tol) const {
        return studylink::is_real(w, tol) && studylink::is_real(x, tol) && studylink::is_real(y, tol) &&
               studylink::is_real(z, tol);
    }

    Vec3 vector_real() const { return {x.real(), y.real(), z.real()}; }
};

inline Quaternion operator*(const Scalar& s, const Quaternion& q) { return q * s; }
inline Quaternion operator*(double s, const Quaternion& q) { return q * s; }

}  // namespace studylink
