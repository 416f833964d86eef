#include "studylink/io.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

namespace studylink::io {

using nlohmann::json;

namespace {

json dq_to_json(const DualQuaternion& q) {
    const Vec8 v = q.vec();
    json a = json::array();
    for (int i = 0; i < 8; ++i) a.push_back(v[i].real());
    return a;
}

DualQuaternion dq_from_json(const json& a) {
    if (!a.is_array() || a.size() != 8) fail(Errc::bad_input, "expected an array of 8 numbers");
    std::array<double, 8> v{};
    for (int i = 0; i < 8; ++i) v[i] = a[i].get<double>();
    return DualQuaternion::from_real(v);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::bad_input, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(Errc::bad_input, "malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void dump_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::bad_input, "cannot write " + path);
    out << j.dump(2) << "\n";
}

json motion_to_json(const MotionPoly& c) {
    json a = json::array();
    for (const auto& q : c.coeff) a.push_back(dq_to_json(q));
    return a;
}

MotionPoly motion_from_json(const json& a) {
    if (!a.is_array() || a.empty()) fail(Errc::bad_input, "motion must be a nonempty coefficient list");
    std::vector<DualQuaternion> coeff;
    for (const auto& e : a) coeff.push_back(dq_from_json(e));
    return MotionPoly(std::move(coeff));
}

json factorization_to_json(const Factorization& f) {
    json jf;
    jf["factors"] = json::array();
    for (const auto& h : f.factors) jf["factors"].push_back(dq_to_json(h));
    jf["lead"] = dq_to_json(f.lead);
    jf["permutation"] = f.permutation;
    return jf;
}

Factorization factorization_from_json(const json& jf) {
    Factorization f;
    for (const auto& e : jf.at("factors")) f.factors.push_back(dq_from_json(e));
    if (jf.contains("lead")) f.lead = dq_from_json(jf.at("lead"));
    if (jf.contains("permutation")) f.permutation = jf.at("permutation").get<std::vector<int>>();
    return f;
}

}  // namespace

std::vector<Pose> load_poses(const std::string& path, const Context& ctx) {
    const json j = load_json(path);
    if (!j.contains("poses") || !j["poses"].is_array())
        fail(Errc::bad_input, path + ": missing \"poses\" array");
    std::vector<Pose> out;
    for (const auto& e : j["poses"]) {
        if (e.contains("dq")) {
            out.emplace_back(dq_from_json(e["dq"]), ctx);
        } else if (e.contains("quat") && e.contains("trans")) {
            const auto& q = e["quat"];
            const auto& t = e["trans"];
            if (q.size() != 4 || t.size() != 3) fail(Errc::bad_input, "quat/trans entry has wrong arity");
            Quaternion r{Scalar(q[0].get<double>()), Scalar(q[1].get<double>()), Scalar(q[2].get<double>()),
                         Scalar(q[3].get<double>())};
            Vec3 tv{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
            out.push_back(pose_from_rot_trans(r, tv, ctx));
        } else {
            fail(Errc::bad_input, "pose entry needs either \"dq\" or \"quat\"+\"trans\"");
        }
    }
    return out;
}

void save_poses(const std::vector<Pose>& poses, const std::string& path) {
    json j;
    j["poses"] = json::array();
    for (const auto& p : poses) j["poses"].push_back({{"dq", dq_to_json(p.dq())}});
    dump_json(j, path);
}

void save_linkage(const Linkage& linkage, const Context& ctx, const std::string& path) {
    json j;
    j["kind"] = linkage.kind == LinkageKind::bennett4r ? "bennett4r" : "goldberg5r";
    j["base_pose"] = dq_to_json(linkage.base_pose.dq());
    j["joints"] = json::array();
    for (const auto& joint : linkage.joints) {
        j["joints"].push_back({{"dir", {joint.line.dir[0], joint.line.dir[1], joint.line.dir[2]}},
                               {"mom", {joint.line.mom[0], joint.line.mom[1], joint.line.mom[2]}},
                               {"role", joint.role}});
    }
    j["coupler_motion"] = motion_to_json(linkage.coupler_motion);
    j["pairing"] = {{"a", factorization_to_json(linkage.pair_a)}, {"b", factorization_to_json(linkage.pair_b)}};
    json jctx = {{"tol_real", ctx.tol_real},
                 {"tol_proj", ctx.tol_proj},
                 {"tol_rank", ctx.tol_rank},
                 {"seed", ctx.seed},
                 {"which_space", linkage.which_space},
                 {"params", {linkage.params[0], linkage.params[1]}}};
    if (linkage.family) jctx["family"] = family_name(*linkage.family);
    j["context"] = jctx;
    dump_json(j, path);
}

Linkage load_linkage(const std::string& path, Context* ctx_out) {
    const json j = load_json(path);
    Linkage l;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bennett4r")
        l.kind = LinkageKind::bennett4r;
    else if (kind == "goldberg5r")
        l.kind = LinkageKind::goldberg5r;
    else
        fail(Errc::bad_input, "unknown linkage kind: " + kind);
    Context ctx;
    if (j.contains("context")) {
        const auto& c = j["context"];
        if (c.contains("tol_real")) ctx.tol_real = c["tol_real"].get<double>();
        if (c.contains("tol_proj")) ctx.tol_proj = c["tol_proj"].get<double>();
        if (c.contains("tol_rank")) ctx.tol_rank = c["tol_rank"].get<double>();
        if (c.contains("seed")) ctx.seed = c["seed"].get<std::uint64_t>();
        if (c.contains("which_space")) l.which_space = c["which_space"].get<int>();
        if (c.contains("params")) l.params = {c["params"][0].get<double>(), c["params"][1].get<double>()};
        if (c.contains("family"))
            l.family = c["family"].get<std::string>() == "first" ? CubicFamily::first : CubicFamily::second;
    }
    if (ctx_out) *ctx_out = ctx;
    l.base_pose = Pose(dq_from_json(j.at("base_pose")), ctx);
    for (const auto& e : j.at("joints")) {
        Joint joint;
        const auto& d = e.at("dir");
        const auto& m = e.at("mom");
        joint.line.dir = Vec3(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
        joint.line.mom = Vec3(m[0].get<double>(), m[1].get<double>(), m[2].get<double>());
        joint.role = e.value("role", "");
        l.joints.push_back(std::move(joint));
    }
    l.coupler_motion = motion_from_json(j.at("coupler_motion"));
    l.pair_a = factorization_from_json(j.at("pairing").at("a"));
    l.pair_b = factorization_from_json(j.at("pairing").at("b"));
    return l;
}

MotionPoly load_motion(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("motion")) fail(Errc::bad_input, path + ": missing \"motion\" array");
    return motion_from_json(j["motion"]);
}

void save_motion(const MotionPoly& c, const std::string& path) {
    json j;
    j["motion"] = motion_to_json(c);
    dump_json(j, path);
}

void save_factorizations(const std::vector<Factorization>& fs, const std::string& path, const Context& ctx) {
    json j;
    j["count"] = fs.size();
    j["factorizations"] = json::array();
    for (const auto& f : fs) {
        json jf = factorization_to_json(f);
        jf["axes"] = json::array();
        for (const auto& h : f.factors) {
            const PlueckerLine l = axis_of(h, ctx);
            jf["axes"].push_back({{"dir", {l.dir[0], l.dir[1], l.dir[2]}}, {"mom", {l.mom[0], l.mom[1], l.mom[2]}}});
        }
        j["factorizations"].push_back(std::move(jf));
    }
    dump_json(j, path);
}

void write_sample_csv(const std::vector<SampleRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::bad_input, "cannot write " + path);
    out << std::setprecision(17);
    out << "t";
    for (int i = 0; i < 8; ++i) out << ",dq" << i;
    const std::size_t nangles = rows.empty() ? 0 : rows.front().angles.size();
    for (std::size_t i = 1; i <= nangles; ++i) out << ",theta" << i;
    out << "\n";
    for (const auto& r : rows) {
        out << r.t;
        for (int i = 0; i < 8; ++i) out << "," << r.pose[i];
        for (double a : r.angles) out << "," << a;
        out << "\n";
    }
}

std::string report_json(const VerificationReport& r) {
    json j;
    j["closure_residual"] = r.closure_residual;
    j["pose_errors"] = r.pose_errors;
    j["motion_consistency"] = r.motion_consistency;
    j["max_axis_mismatch"] = r.max_axis_mismatch;
    j["coupler_degree"] = r.coupler_degree;
    j["base_relative_degree"] = r.base_relative_degree;
    j["passed"] = r.passed;
    j["detail"] = r.detail;
    return j.dump(2);
}

}  // namespace studylink::io
