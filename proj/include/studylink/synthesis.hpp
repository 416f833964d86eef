#pragma once

#include <optional>
#include <string>

#include "studylink/motion_poly.hpp"
#include "studylink/pluecker.hpp"
#include "studylink/projective.hpp"

namespace studylink {

// Three-space spanned by the kinematic image of a 2R dyad: basis
// [1, h1, h2, h1*h2] with half-turns h1 (base axis) and h2 (moving axis).
struct TwoRSpace {
    std::array<DualQuaternion, 4> basis;
    QuadricForm q_form;
    DualQuaternion h1, h2;
    PlueckerLine base_axis, moving_axis;

    ProjSubspace space() const {
        return ProjSubspace::span_dq({basis[0], basis[1], basis[2], basis[3]});
    }
};

struct TwoRSpaceReport {
    enum class Fail {
        none,
        not_three_space,
        missing_identity,
        contained_in_study,
        not_regular,
        not_ruled,
        meets_exceptional,
        no_null_quadrilateral,
        no_real_axes,
        product_not_in_space,
    };
    bool ok = false;
    Fail reason = Fail::none;
    std::string detail;
    std::optional<TwoRSpace> space;
};

const char* fail_name(TwoRSpaceReport::Fail f);

// (identity, p0^-1 p1, p0^-1 p2); synthesis outputs are transformed back by p0.
std::array<Pose, 3> normalize_poses(const Pose& p0, const Pose& p1, const Pose& p2);

// (t1 - h1)(t2 - h2) for normalized half-turns with distinct axes.
DualQuaternion dyad_constraint(const DualQuaternion& h1, const DualQuaternion& h2, const Param& t1,
                               const Param& t2, const Context& ctx = {});

// Full predicate: regular ruled Study restriction, empty intersection with the
// exceptional space, existence of a null quadrilateral; on success recovers the
// axes from the quadrilateral sides and checks [h1 h2] in P (or [h2 h1], in
// which case the labels swap).
TwoRSpaceReport is_2r_space(const ProjSubspace& p, const Context& ctx = {});

// The two 2R spaces through [1], [p1], [p2] (poses normalized so p0 = 1).
// Throws degenerate_plane / meets_exceptional / numerical_failure.
std::array<TwoRSpace, 2> two_r_spaces(const Pose& p1, const Pose& p2, const Context& ctx = {});

// Bilinear chart of the ruled quadric Q = P cap S:
// (s, u) -> (s0 - s1 h1)(u0 - u1 h2) in the basis [1, h1, h2, h1 h2].
// Rulings with the u factor fixed form the first family (they contain the
// line of rotations about the base axis at u = [1:0]); rulings with s fixed
// form the second family.
struct RuledChart {
    DualQuaternion h1, h2;
    std::array<DualQuaternion, 4> basis;
    Mat4c change_of_basis;  // basis coords are already canonical for x0 x3 - x1 x2
    Scalar form_scale;      // q_form gram = form_scale * canonical gram

    DualQuaternion eval(const Eigen::Vector2d& s, const Eigen::Vector2d& u) const;
    // Basis coordinates of a point of the space (real least squares).
    Eigen::Vector4d coords(const Vec8& v) const;
    Eigen::Vector2d s_coord(const Eigen::Vector4d& x) const;
    Eigen::Vector2d u_coord(const Eigen::Vector4d& x) const;
};

RuledChart ruled_chart(const TwoRSpace& p);

enum class CubicFamily { first, second };
const char* family_name(CubicFamily f);

// Twisted cubic on Q through the three poses at parameters (inf, 0, 1).
// Cubics of the first family meet every first-family ruling twice (the factor
// about the moving axis is quadratic); second-family cubics have the quadratic
// factor on the base side. Two residual real freedoms are exposed as params.
MotionPoly interpolate_cubic(const TwoRSpace& p, const std::array<Pose, 3>& poses, CubicFamily family,
                             const std::array<double, 2>& params, const Context& ctx = {});

// Class of a twisted cubic on Q by intersection counts with sample rulings.
CubicFamily classify_cubic(const MotionPoly& c, const TwoRSpace& p, const Context& ctx = {});

enum class LinkageKind { bennett4r, goldberg5r };

struct Joint {
    PlueckerLine line;
    std::string role;
};

// Closed revolute loop produced by pairing two factorizations of the coupler
// motion. Joints are in cyclic loop order starting at the base of the dyad
// side. coupler_motion is the physical motion (left-composed with base_pose);
// the pairing stores factorizations of the normalized motion.
struct Linkage {
    LinkageKind kind = LinkageKind::bennett4r;
    std::vector<Joint> joints;
    MotionPoly coupler_motion;
    Factorization pair_a;  // dyad side for 5R
    Factorization pair_b;
    Pose base_pose = Pose::identity();
    std::optional<CubicFamily> family;
    std::array<double, 2> params{0.0, 0.0};
    int which_space = 0;
};

// Bennett 4R synthesis: the two dyads of the three-pose problem combined into
// a closed loop whose coupler follows the conic through the poses.
Linkage bennett_from_poses(const Pose& p0, const Pose& p1, const Pose& p2, const Context& ctx = {});

// Goldberg 5R synthesis: factorize the interpolating cubic, locate the
// factorization with two coaxial adjacent factors (the 2R dyad side) and pair
// it with every admissible remaining factorization. Generically two linkages.
std::vector<Linkage> synthesize_5r(const Pose& p0, const Pose& p1, const Pose& p2, CubicFamily family,
                                   const std::array<double, 2>& params, int which_space,
                                   const Context& ctx = {});

// Study residual of the unique point of the space with the given primal part,
// on the unit-normalized representative. Generically bounded away from zero:
// orientations cannot be prescribed freely inside a 2R space.
double orientation_obstruction_residual(const TwoRSpace& p, const Quaternion& orientation);

// Conjugate a line by a pose (rigidly displace it).
PlueckerLine transform_line(const Pose& p, const PlueckerLine& line, const Context& ctx = {});

}  // namespace studylink
