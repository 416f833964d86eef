#include "studylink/dual_quaternion.hpp"

#include <ostream>

namespace studylink {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::non_scalar_norm: return "NonScalarNorm";
        case Errc::primal_zero: return "PrimalZero";
        case Errc::zero_rotation: return "ZeroRotation";
        case Errc::invalid_line: return "InvalidLine";
        case Errc::not_a_rotation: return "NotARotation";
        case Errc::dependent_points: return "DependentPoints";
        case Errc::contained_in_study: return "ContainedInStudy";
        case Errc::no_quadrilateral: return "NoQuadrilateral";
        case Errc::degenerate_config: return "DegenerateConfig";
        case Errc::singular_b: return "SingularB";
        case Errc::not_a_motion_polynomial: return "NotAMotionPolynomial";
        case Errc::real_root_present: return "RealRootPresent";
        case Errc::non_invertible_lead: return "NonInvertibleLead";
        case Errc::non_generic: return "NonGeneric";
        case Errc::commuting_axes: return "CommutingAxes";
        case Errc::degenerate_plane: return "DegeneratePlane";
        case Errc::meets_exceptional: return "MeetsExceptional";
        case Errc::numerical_failure: return "NumericalFailure";
        case Errc::degenerate_chart_data: return "DegenerateChartData";
        case Errc::non_real_curve: return "NonRealCurve";
        case Errc::no_degenerate_factorization: return "NoDegenerateFactorization";
        case Errc::bad_input: return "BadInput";
    }
    return "UnknownError";
}

DualNumber norm_unchecked(const DualQuaternion& q) {
    const DualQuaternion n = q * q.conj();
    return {n.p.w, n.d.w};
}

DualNumber dq_norm(const DualQuaternion& q, const Context& ctx) {
    const DualQuaternion n = q * q.conj();
    const double scale = std::max(1.0, q.abs() * q.abs());
    const double residue = std::sqrt(std::norm(n.p.x) + std::norm(n.p.y) + std::norm(n.p.z) +
                                     std::norm(n.d.x) + std::norm(n.d.y) + std::norm(n.d.z));
    if (residue > ctx.tol_real * scale)
        fail(Errc::non_scalar_norm, "q*conj(q) has quaternion components of size " + std::to_string(residue));
    return {n.p.w, n.d.w};
}

DualNumber study_residual(const DualQuaternion& q) {
    // p*conj(d) + d*conj(p) is self-conjugate, hence a scalar: 2*sum_i p_i d_i.
    const Scalar s = 2.0 * (q.p.w * q.d.w + q.p.x * q.d.x + q.p.y * q.d.y + q.p.z * q.d.z);
    return {s, Scalar(0.0)};
}

Scalar study_bilinear(const Vec8& a, const Vec8& b) {
    Scalar s{0.0, 0.0};
    for (int i = 0; i < 4; ++i) s += a[i] * b[i + 4] + a[i + 4] * b[i];
    return s;
}

Scalar nullcone_bilinear(const Vec8& a, const Vec8& b) {
    Scalar s{0.0, 0.0};
    for (int i = 0; i < 4; ++i) s += a[i] * b[i];
    return s;
}

Pose::Pose(const DualQuaternion& q, const Context& ctx) {
    const double scale = q.abs();
    if (scale == 0.0) fail(Errc::bad_input, "zero dual quaternion is not a pose");
    if (!q.is_real(ctx.tol_real * scale)) fail(Errc::bad_input, "pose coefficients must be real");
    const double primal = q.p.abs();
    if (primal <= ctx.tol_real * scale) fail(Errc::primal_zero, "pose has vanishing primal part");
    const double study = std::abs(study_residual(q).p);
    if (study > ctx.tol_real * scale * scale * 10.0)
        fail(Errc::bad_input, "Study condition violated, residual " + std::to_string(study));
    dq_ = q * (1.0 / primal);
}

Pose Pose::identity() {
    Pose p;
    p.dq_ = DualQuaternion::one();
    return p;
}

Pose Pose::inverse() const {
    Pose r;
    r.dq_ = dq_.conj();  // unit norm
    return r;
}

Pose Pose::operator*(const Pose& o) const {
    Pose r;
    r.dq_ = dq_ * o.dq_;
    const double n = std::sqrt(std::abs(norm_unchecked(r.dq_).p));
    r.dq_ = r.dq_ * (1.0 / n);
    return r;
}

Vec3 act_on_point(const Pose& q, const Vec3& x) {
    DualQuaternion xe{Quaternion(1.0), Quaternion::from_vector(x)};
    const DualQuaternion y = q.dq() * xe * q.dq().point_conj();
    const Scalar w = y.p.w;
    if (std::abs(w) == 0.0) fail(Errc::primal_zero, "point action produced zero weight");
    return {(y.d.x / w).real(), (y.d.y / w).real(), (y.d.z / w).real()};
}

Pose pose_from_rot_trans(const Quaternion& r, const Vec3& t, const Context& ctx) {
    if (r.abs() == 0.0) fail(Errc::zero_rotation, "rotation quaternion is zero");
    const Quaternion tq = Quaternion::from_vector(t);
    DualQuaternion q{r, (tq * r) * 0.5};
    return Pose(q, ctx);
}

std::ostream& operator<<(std::ostream& os, const DualQuaternion& q) {
    const Vec8 v = q.vec();
    os << "[";
    for (int i = 0; i < 8; ++i) {
        if (i) os << ", ";
        os << v[i].real();
        if (v[i].imag() != 0.0) os << (v[i].imag() > 0 ? "+" : "") << v[i].imag() << "im";
    }
    return os << "]";
}

}  // namespace studylink
