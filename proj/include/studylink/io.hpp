#pragma once

#include <string>
#include <vector>

#include "studylink/verify.hpp"

namespace studylink::io {

// Pose file: { "poses": [ {"dq": [8]} | {"quat": [4], "trans": [3]} ] }
std::vector<Pose> load_poses(const std::string& path, const Context& ctx = {});
void save_poses(const std::vector<Pose>& poses, const std::string& path);

// Linkage file: kind, base_pose, joints, coupler_motion, pairing, context.
void save_linkage(const Linkage& linkage, const Context& ctx, const std::string& path);
Linkage load_linkage(const std::string& path, Context* ctx_out = nullptr);

// Motion file: { "motion": [ [8] per coefficient, index = degree ] }
MotionPoly load_motion(const std::string& path);
void save_motion(const MotionPoly& c, const std::string& path);

void save_factorizations(const std::vector<Factorization>& fs, const std::string& path,
                         const Context& ctx = {});

// CSV with header t,dq0..dq7,theta1..thetaN.
void write_sample_csv(const std::vector<SampleRow>& rows, const std::string& path);

std::string report_json(const VerificationReport& r);

}  // namespace studylink::io
