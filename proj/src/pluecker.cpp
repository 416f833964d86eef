#include "studylink/pluecker.hpp"

namespace studylink {

PlueckerLine PlueckerLine::normalized(const Context& ctx) const {
    const double n = dir.norm();
    if (n <= ctx.tol_rank) fail(Errc::invalid_line, "direction vector is zero");
    PlueckerLine out{dir / n, mom / n};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(out.dir[i]) > 1e-12) {
            if (out.dir[i] < 0) {
                out.dir = -out.dir;
                out.mom = -out.mom;
            }
            break;
        }
    }
    return out;
}

bool PlueckerLine::valid(const Context& ctx) const {
    const double n = dir.norm();
    if (n <= ctx.tol_rank) return false;
    const double scale = std::max(1.0, mom.norm() / n);
    return std::abs(dir.dot(mom)) / (n * n) <= 1e-8 * scale;
}

DualQuaternion half_turn_from_line(const PlueckerLine& line, const Context& ctx) {
    if (!line.valid(ctx)) fail(Errc::invalid_line, "Pluecker invariants violated");
    const PlueckerLine l = line.normalized(ctx);
    return {Quaternion::from_vector(l.dir), Quaternion::from_vector(l.mom)};
}

PlueckerLine axis_of(const DualQuaternion& h, const Context& ctx) {
    const double scale = h.abs();
    if (scale == 0.0) fail(Errc::not_a_rotation, "zero element");
    if (!h.is_real(ctx.tol_real * scale * 100)) fail(Errc::not_a_rotation, "coefficients are not real");
    const Vec3 pv = h.p.vector_real();
    const double s = pv.norm();
    if (s <= 1e-7 * scale) fail(Errc::not_a_rotation, "primal vector part is zero (translation or identity)");
    if (std::abs(h.d.w) > 1e-7 * scale) fail(Errc::not_a_rotation, "dual scalar part is nonzero (screw)");
    const double study = std::abs(study_residual(h).p);
    if (study > 1e-7 * scale * scale) fail(Errc::not_a_rotation, "element is off the Study quadric");
    const Vec3 dv = h.d.vector_real();
    return PlueckerLine{pv / s, dv / s}.normalized(ctx);
}

double line_distance(const PlueckerLine& a, const PlueckerLine& b) {
    Eigen::Matrix<double, 6, 1> va, vb;
    const PlueckerLine an = a.normalized();
    const PlueckerLine bn = b.normalized();
    va << an.dir, an.mom;
    vb << bn.dir, bn.mom;
    return std::min((va - vb).cwiseAbs().maxCoeff(), (va + vb).cwiseAbs().maxCoeff());
}

bool same_line(const PlueckerLine& a, const PlueckerLine& b, double tol) {
    return line_distance(a, b) <= tol;
}

double line_pair_distance(const PlueckerLine& a, const PlueckerLine& b) {
    const PlueckerLine an = a.normalized();
    const PlueckerLine bn = b.normalized();
    const Vec3 cx = an.dir.cross(bn.dir);
    const double cn = cx.norm();
    if (cn < 1e-12) {  // parallel
        return (bn.closest_point() - an.closest_point()).cross(an.dir).norm();
    }
    // Reciprocal product over sine of angle.
    return std::abs(an.dir.dot(bn.mom) + bn.dir.dot(an.mom)) / cn;
}

double line_pair_angle(const PlueckerLine& a, const PlueckerLine& b) {
    const double c = std::clamp(std::abs(a.dir.normalized().dot(b.dir.normalized())), 0.0, 1.0);
    return std::acos(c);
}

}  // namespace studylink
