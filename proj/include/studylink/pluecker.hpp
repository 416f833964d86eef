#pragma once

#include "studylink/dual_quaternion.hpp"

namespace studylink {

// Oriented line in Pluecker coordinates (dir, mom) with dir.mom = 0.
// For a line through point c with unit direction v the moment is m = c x v.
struct PlueckerLine {
    Vec3 dir{0, 0, 0};
    Vec3 mom{0, 0, 0};

    PlueckerLine() = default;
    PlueckerLine(const Vec3& direction, const Vec3& moment) : dir(direction), mom(moment) {}

    static PlueckerLine through_point(const Vec3& point, const Vec3& direction) {
        const Vec3 v = direction.normalized();
        return {v, point.cross(v)};
    }

    // Unit direction, canonical sign: first nonzero direction component positive.
    PlueckerLine normalized(const Context& ctx = {}) const;

    // Point of the line closest to the origin.
    Vec3 closest_point() const { return dir.cross(mom) / dir.squaredNorm(); }

    bool valid(const Context& ctx = {}) const;
};

// Half-turn dual quaternion h = dir.(i,j,k) + eps*mom.(i,j,k).
// Satisfies h + conj(h) = 0 and h*conj(h) = 1 by construction.
DualQuaternion half_turn_from_line(const PlueckerLine& line, const Context& ctx = {});

// Fixed axis of the rotations t -> (t - h). Invariant under real shifts
// h -> h + c and real scaling. Throws not_a_rotation when h is not a rotation
// about a line (zero primal vector part, or a screw/translation component).
PlueckerLine axis_of(const DualQuaternion& h, const Context& ctx = {});

// Lines equal as sets: normalized Pluecker 6-vectors match up to sign.
bool same_line(const PlueckerLine& a, const PlueckerLine& b, double tol = 1e-7);

// Max-norm gap between normalized Pluecker vectors (minimized over sign).
double line_distance(const PlueckerLine& a, const PlueckerLine& b);

// Common perpendicular distance and angle between two lines.
double line_pair_distance(const PlueckerLine& a, const PlueckerLine& b);
double line_pair_angle(const PlueckerLine& a, const PlueckerLine& b);

}  // namespace studylink
