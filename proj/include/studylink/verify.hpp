#pragma once

#include "studylink/synthesis.hpp"

namespace studylink {

// Max projective distance between the re-multiplied products of two
// factorizations; zero within tolerance iff the loop closes for all t.
double check_closure(const Factorization& a, const Factorization& b);

// Projective distances between the evaluated motion and the target poses.
std::vector<double> visits_poses(const MotionPoly& c, const std::vector<Param>& ws,
                                 const std::vector<Pose>& poses);

// Rotation angle of each linear factor (t - h_i) at the parameter value;
// zero at t = inf, continuous away from the norm-quadratic poles. Signed,
// relative to the canonically oriented axis.
std::vector<double> joint_angles(const Factorization& f, double t, const Context& ctx = {});

// cos(angle/2) + sin(angle/2) * half_turn(line); test helper for the
// composition property.
DualQuaternion rotation_about(const PlueckerLine& line, double angle, const Context& ctx = {});

struct SampleRow {
    double t;
    std::array<double, 8> pose;
    std::vector<double> angles;  // in joint order of the linkage
    bool pole_warning = false;
};

// n samples of the coupler motion over [t0, t1] with per-chain joint angles;
// angles of coaxial factor pairs are merged into the single physical joint.
std::vector<SampleRow> sample_motion(const Linkage& linkage, int n, double t0, double t1,
                                     const Context& ctx = {});

struct VerificationReport {
    double closure_residual = 0.0;
    std::vector<double> pose_errors;
    Eigen::MatrixXd axis_distance;  // pairwise normalized Pluecker gaps
    int coupler_degree = 0;
    int base_relative_degree = 0;
    double motion_consistency = 0.0;  // base_pose * pairing product vs coupler motion
    double max_axis_mismatch = 0.0;   // stored joints vs transformed factor axes
    bool passed = false;
    std::string detail;
};

// Full independent check of a linkage against the poses it was built for
// (poses in original coordinates; interpolation nodes are inf, 0, 1).
VerificationReport verify_linkage(const Linkage& linkage, const std::vector<Pose>& poses,
                                  const Context& ctx = {});

std::string report_text(const VerificationReport& r);

}  // namespace studylink
