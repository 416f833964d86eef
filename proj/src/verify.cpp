#include "studylink/verify.hpp"

#include <sstream>

namespace studylink {

namespace {

struct FactorAngleData {
    double c;       // real part
    double d;       // signed half-turn coefficient relative to the canonical axis
    PlueckerLine axis;
};

FactorAngleData factor_angle_data(const DualQuaternion& h, const Context& ctx) {
    FactorAngleData out;
    out.axis = axis_of(h, ctx);
    out.c = h.p.w.real();
    const Vec3 pv = h.p.vector_real();
    double sign = 1.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(pv[i]) > 1e-12) {
            sign = pv[i] > 0 ? 1.0 : -1.0;
            break;
        }
    }
    out.d = sign * pv.norm();
    return out;
}

MotionPoly left_compose(const Pose& p, const MotionPoly& c) {
    std::vector<DualQuaternion> coeff(c.coeff.size());
    for (std::size_t i = 0; i < c.coeff.size(); ++i) coeff[i] = p.dq() * c.coeff[i];
    return MotionPoly(std::move(coeff));
}

}  // namespace

double check_closure(const Factorization& a, const Factorization& b) {
    return mp_distance(a.remultiply(), b.remultiply());
}

std::vector<double> visits_poses(const MotionPoly& c, const std::vector<Param>& ws,
                                 const std::vector<Pose>& poses) {
    if (ws.size() != poses.size()) fail(Errc::bad_input, "parameter and pose counts differ");
    std::vector<double> out(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
        out[i] = proj_distance(c.eval(ws[i]).vec(), poses[i].dq().vec());
    return out;
}

std::vector<double> joint_angles(const Factorization& f, double t, const Context& ctx) {
    std::vector<double> out;
    out.reserve(f.factors.size());
    for (const auto& h : f.factors) {
        const FactorAngleData a = factor_angle_data(h, ctx);
        out.push_back(2.0 * std::atan2(-a.d, t - a.c));
    }
    return out;
}

DualQuaternion rotation_about(const PlueckerLine& line, double angle, const Context& ctx) {
    const DualQuaternion h = half_turn_from_line(line, ctx);
    return DualQuaternion(Scalar(std::cos(angle / 2.0))) + h * std::sin(angle / 2.0);
}

namespace {

// Physical joint angles of one chain, merging coaxial adjacent factor pairs.
std::vector<double> chain_angles(const Factorization& f, double t, bool reversed, const Context& ctx) {
    std::vector<double> raw = joint_angles(f, t, ctx);
    std::vector<PlueckerLine> axes;
    for (const auto& h : f.factors) axes.push_back(axis_of(h, ctx));
    std::vector<double> merged;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i + 1 < raw.size() && same_line(axes[i], axes[i + 1], 1e-6)) {
            merged.push_back(raw[i] + raw[i + 1]);
            ++i;
        } else {
            merged.push_back(raw[i]);
        }
    }
    if (reversed) std::reverse(merged.begin(), merged.end());
    return merged;
}

}  // namespace

std::vector<SampleRow> sample_motion(const Linkage& linkage, int n, double t0, double t1, const Context& ctx) {
    if (n < 2) fail(Errc::bad_input, "need at least two samples");
    std::vector<SampleRow> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
        SampleRow row;
        row.t = t;
        DualQuaternion q = linkage.coupler_motion.eval(Scalar(t));
        const double nq = q.abs();
        if (nq > 0) q = q * (1.0 / nq);
        const Vec8 v = q.vec();
        for (int k = 0; k < 8; ++k) row.pose[k] = v[k].real();

        row.angles = chain_angles(linkage.pair_a, t, false, ctx);
        const auto chain_b = chain_angles(linkage.pair_b, t, true, ctx);
        row.angles.insert(row.angles.end(), chain_b.begin(), chain_b.end());

        for (const auto* f : {&linkage.pair_a, &linkage.pair_b}) {
            for (const auto& h : f->factors) {
                const FactorAngleData a = factor_angle_data(h, ctx);
                const double m = (t - a.c) * (t - a.c) + a.d * a.d;
                if (m <= 1e-4 * (1.0 + t * t)) row.pole_warning = true;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

VerificationReport verify_linkage(const Linkage& linkage, const std::vector<Pose>& poses, const Context& ctx) {
    VerificationReport r;
    std::ostringstream detail;
    bool ok = true;

    r.closure_residual = check_closure(linkage.pair_a, linkage.pair_b);
    if (r.closure_residual > 1e-8) {
        ok = false;
        detail << "closure residual " << r.closure_residual << " exceeds 1e-8; ";
    }

    std::vector<Param> nodes = {Param::infinity(), Param(0.0), Param(1.0)};
    nodes.resize(std::min<std::size_t>(poses.size(), 3));
    std::vector<Pose> targets(poses.begin(), poses.begin() + nodes.size());
    r.pose_errors = visits_poses(linkage.coupler_motion, nodes, targets);
    for (double e : r.pose_errors) {
        if (e > 1e-8) {
            ok = false;
            detail << "pose error " << e << " exceeds 1e-8; ";
            break;
        }
    }

    r.motion_consistency = mp_distance(left_compose(linkage.base_pose, linkage.pair_a.remultiply()),
                                       linkage.coupler_motion);
    if (r.motion_consistency > 1e-8) {
        ok = false;
        detail << "pairing does not reproduce the coupler motion; ";
    }

    const int nj = static_cast<int>(linkage.joints.size());
    r.axis_distance.resize(nj, nj);
    r.axis_distance.setZero();
    for (int i = 0; i < nj; ++i)
        for (int j = 0; j < nj; ++j)
            if (i != j) r.axis_distance(i, j) = line_distance(linkage.joints[i].line, linkage.joints[j].line);
    const bool all_pairs = linkage.kind == LinkageKind::goldberg5r;
    for (int i = 0; i < nj; ++i) {
        for (int j = i + 1; j < nj; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == nj - 1);
            if ((all_pairs || adjacent) && r.axis_distance(i, j) <= 1e-7) {
                ok = false;
                detail << "joints " << i << "," << j << " coincide; ";
            }
        }
    }

    // Joint lines must agree with the transformed factorization axes.
    std::vector<PlueckerLine> expected;
    {
        std::vector<PlueckerLine> a_axes, b_axes;
        for (const auto& h : linkage.pair_a.factors) a_axes.push_back(axis_of(h, ctx));
        for (const auto& h : linkage.pair_b.factors) b_axes.push_back(axis_of(h, ctx));
        if (linkage.kind == LinkageKind::goldberg5r) {
            const bool left = same_line(a_axes[0], a_axes[1], 1e-6);
            expected = {a_axes[0], left ? a_axes[2] : a_axes[1], b_axes[2], b_axes[1], b_axes[0]};
        } else {
            expected = {a_axes[0], a_axes[1], b_axes[1], b_axes[0]};
        }
        for (auto& l : expected) l = transform_line(linkage.base_pose, l, ctx);
    }
    if (static_cast<int>(expected.size()) != nj) {
        ok = false;
        detail << "joint count does not match the pairing; ";
    } else {
        for (int i = 0; i < nj; ++i)
            r.max_axis_mismatch = std::max(r.max_axis_mismatch, line_distance(expected[i], linkage.joints[i].line));
        if (r.max_axis_mismatch > 1e-6) {
            ok = false;
            detail << "stored joints disagree with factorization axes; ";
        }
    }

    r.coupler_degree = linkage.coupler_motion.trimmed().degree();
    MotionPoly base_rel = MotionPoly::constant(DualQuaternion::one());
    for (std::size_t i = 0; i + 1 < linkage.pair_b.factors.size(); ++i)
        base_rel = base_rel * MotionPoly::linear(linkage.pair_b.factors[i]);
    r.base_relative_degree = base_rel.trimmed().degree();
    const int want_coupler = linkage.kind == LinkageKind::goldberg5r ? 3 : 2;
    if (r.coupler_degree != want_coupler || r.base_relative_degree != want_coupler - 1) {
        ok = false;
        detail << "unexpected motion degrees (" << r.coupler_degree << ", " << r.base_relative_degree << "); ";
    }

    r.passed = ok;
    r.detail = detail.str();
    return r;
}

std::string report_text(const VerificationReport& r) {
    std::ostringstream os;
    os << "closure residual:      " << r.closure_residual << "\n";
    os << "pose errors:          ";
    for (double e : r.pose_errors) os << " " << e;
    os << "\n";
    os << "motion consistency:    " << r.motion_consistency << "\n";
    os << "axis match residual:   " << r.max_axis_mismatch << "\n";
    os << "degrees (coupler/base):" << r.coupler_degree << "/" << r.base_relative_degree << "\n";
    os << "result:                " << (r.passed ? "PASS" : "FAIL") << "\n";
    if (!r.passed) os << "detail: " << r.detail << "\n";
    return os.str();
}

}  // namespace studylink
