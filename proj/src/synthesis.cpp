#include "studylink/synthesis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <random>

namespace studylink {

namespace {

using Eigen::Vector2d;
using Eigen::Vector4cd;
using Eigen::Vector4d;

Scalar bdot(const Vector4cd& a, const Vector4cd& b) { return (a.transpose() * b)(0); }

double det2(const Vector2d& a, const Vector2d& b) { return a[0] * b[1] - a[1] * b[0]; }

Vec8 embed_primal(const Vector4cd& p) {
    Vec8 v = Vec8::Zero();
    v.head<4>() = p;
    return v;
}

Vec8 conj_vec(const Vec8& v) {
    Vec8 out;
    for (int i = 0; i < 8; ++i) out[i] = std::conj(v[i]);
    return out;
}

// Real part of an almost-real complex vector, with a residue check.
template <typename VecT>
auto real_part_checked(const VecT& v, double tol, const char* what) {
    Eigen::Matrix<double, VecT::RowsAtCompileTime, 1> out(v.rows());
    double res = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        out[i] = v[i].real();
        res = std::max(res, std::abs(v[i].imag()));
    }
    if (res > tol * (1.0 + out.norm())) fail(Errc::non_real_curve, std::string(what) + " is not real");
    return out;
}

}  // namespace

const char* fail_name(TwoRSpaceReport::Fail f) {
    using Fail = TwoRSpaceReport::Fail;
    switch (f) {
        case Fail::none: return "none";
        case Fail::not_three_space: return "not_three_space";
        case Fail::missing_identity: return "missing_identity";
        case Fail::contained_in_study: return "contained_in_study";
        case Fail::not_regular: return "not_regular";
        case Fail::not_ruled: return "not_ruled";
        case Fail::meets_exceptional: return "meets_exceptional";
        case Fail::no_null_quadrilateral: return "no_null_quadrilateral";
        case Fail::no_real_axes: return "no_real_axes";
        case Fail::product_not_in_space: return "product_not_in_space";
    }
    return "unknown";
}

const char* family_name(CubicFamily f) { return f == CubicFamily::first ? "first" : "second"; }

std::array<Pose, 3> normalize_poses(const Pose& p0, const Pose& p1, const Pose& p2) {
    const Pose inv = p0.inverse();
    return {Pose::identity(), inv * p1, inv * p2};
}

DualQuaternion dyad_constraint(const DualQuaternion& h1, const DualQuaternion& h2, const Param& t1,
                               const Param& t2, const Context& ctx) {
    for (const auto* h : {&h1, &h2}) {
        const DualNumber n = norm_unchecked(*h);
        if (std::abs(n.p - 1.0) > 1e-7 || std::abs(n.d) > 1e-7 || (*h + h->conj()).abs() > 1e-7)
            fail(Errc::bad_input, "dyad generators must be normalized half-turns");
    }
    if ((h1 * h2 - h2 * h1).abs() <= 1e-9 * h1.abs() * h2.abs())
        fail(Errc::commuting_axes, "half-turn axes coincide");
    const DualQuaternion f1 = t1.inf ? DualQuaternion::one() : DualQuaternion(t1.t) - h1;
    const DualQuaternion f2 = t2.inf ? DualQuaternion::one() : DualQuaternion(t2.t) - h2;
    return f1 * f2;
}

namespace {

// Point of the side [a] v [b] on the tangent hyperplane of S at [1]
// (vanishing dual scalar coordinate).
Vec8 side_tangent_point(const Vec8& a, const Vec8& b) {
    const Scalar da = a[4], db = b[4];
    if (std::abs(da) <= 1e-12 && std::abs(db) <= 1e-12)
        fail(Errc::numerical_failure, "quadrilateral side lies in the tangent hyperplane");
    Vec8 t;
    if (std::abs(db) >= std::abs(da))
        t = a - (da / db) * b;
    else
        t = b - (db / da) * a;
    return t / t.norm();
}

// Real half-turn on the real line spanned by a conjugate pair of points.
DualQuaternion half_turn_from_conjugate_pair(const Vec8& tau, const Vec8& tau_opp, std::string* why) {
    if (proj_distance(conj_vec(tau), tau_opp) > 1e-5) {
        *why = "opposite side points are not complex conjugate";
        return DualQuaternion(0.0);
    }
    Eigen::Matrix<double, 8, 1> re, im;
    for (int i = 0; i < 8; ++i) {
        re[i] = tau[i].real();
        im[i] = tau[i].imag();
    }
    // Element of span_R(re, im) with zero identity coefficient.
    Eigen::Matrix<double, 8, 1> h = im[0] * re - re[0] * im;
    const double scale = std::max(re.norm(), im.norm());
    if (h.norm() <= 1e-8 * scale) {
        *why = "real line extraction degenerated";
        return DualQuaternion(0.0);
    }
    const Vec3 dir(h[1], h[2], h[3]);
    if (dir.norm() <= 1e-8 * h.norm()) {
        *why = "extracted element has no rotation part";
        return DualQuaternion(0.0);
    }
    h /= dir.norm();
    // Canonical sign.
    for (int i = 1; i < 4; ++i) {
        if (std::abs(h[i]) > 1e-9) {
            if (h[i] < 0) h = -h;
            break;
        }
    }
    DualQuaternion out = DualQuaternion::from_real({h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7]});
    const double residue = std::max({std::abs(h[0]), std::abs(h[4]), std::abs(study_residual(out).p)});
    if (residue > 1e-6) {
        *why = "extracted element is not a half-turn (residue " + std::to_string(residue) + ")";
        return DualQuaternion(0.0);
    }
    return out;
}

TwoRSpaceReport fail_report(TwoRSpaceReport::Fail reason, std::string detail) {
    TwoRSpaceReport r;
    r.ok = false;
    r.reason = reason;
    r.detail = std::move(detail);
    return r;
}

}  // namespace

TwoRSpaceReport is_2r_space(const ProjSubspace& p, const Context& ctx) {
    if (p.proj_dim() != 3) return fail_report(TwoRSpaceReport::Fail::not_three_space, "projective dimension != 3");
    if (p.containment_residual(DualQuaternion::one().vec()) > 1e-6)
        return fail_report(TwoRSpaceReport::Fail::missing_identity, "[1] not contained in the space");

    QuadricForm qf;
    try {
        qf = restrict_study(p, ctx);
    } catch (const Error& e) {
        return fail_report(TwoRSpaceReport::Fail::contained_in_study, e.what());
    }
    if (!qf.regular) return fail_report(TwoRSpaceReport::Fail::not_regular, "Study restriction is singular");
    if (!qf.ruled) return fail_report(TwoRSpaceReport::Fail::not_ruled, "Study restriction is not ruled");
    if (meets_exceptional(p, ctx))
        return fail_report(TwoRSpaceReport::Fail::meets_exceptional, "space meets the exceptional three-space");

    NullQuadrilateral quad;
    try {
        quad = find_null_quadrilateral(p, ctx);
    } catch (const Error& e) {
        return fail_report(TwoRSpaceReport::Fail::no_null_quadrilateral, e.what());
    }

    // Side points on the tangent hyperplane at [1]; opposite sides pair into
    // real lines through [1] carrying the axes.
    std::array<Vec8, 4> tau;
    try {
        for (int i = 0; i < 4; ++i) tau[i] = side_tangent_point(quad.vertex[i], quad.vertex[(i + 1) % 4]);
    } catch (const Error& e) {
        return fail_report(TwoRSpaceReport::Fail::no_real_axes, e.what());
    }
    std::string why;
    const DualQuaternion ha = half_turn_from_conjugate_pair(tau[0], tau[2], &why);
    if (ha.abs() == 0.0) return fail_report(TwoRSpaceReport::Fail::no_real_axes, why);
    const DualQuaternion hb = half_turn_from_conjugate_pair(tau[1], tau[3], &why);
    if (hb.abs() == 0.0) return fail_report(TwoRSpaceReport::Fail::no_real_axes, why);

    DualQuaternion h1 = ha, h2 = hb;
    if (p.containment_residual((ha * hb).vec()) > 1e-6) {
        if (p.containment_residual((hb * ha).vec()) > 1e-6)
            return fail_report(TwoRSpaceReport::Fail::product_not_in_space,
                               "neither [h1 h2] nor [h2 h1] lies in the space");
        h1 = hb;
        h2 = ha;
    }

    TwoRSpace out;
    out.h1 = h1;
    out.h2 = h2;
    out.basis = {DualQuaternion::one(), h1, h2, h1 * h2};
    try {
        out.base_axis = axis_of(h1, ctx);
        out.moving_axis = axis_of(h2, ctx);
        out.q_form = restrict_study(out.space(), ctx);
    } catch (const Error& e) {
        return fail_report(TwoRSpaceReport::Fail::no_real_axes, e.what());
    }
    // The recovered basis must reproduce the input space.
    const ProjSubspace rec = out.space();
    for (int i = 0; i < 4; ++i) {
        if (rec.containment_residual(p.basis().col(i)) > 1e-5)
            return fail_report(TwoRSpaceReport::Fail::product_not_in_space,
                               "recovered dyad span does not match the space");
    }

    TwoRSpaceReport r;
    r.ok = true;
    r.space = std::move(out);
    return r;
}

namespace {

struct ConicData {
    Eigen::Matrix<Scalar, 8, 3> plane;            // basis (1, p1, p2)
    std::array<Eigen::Vector3d, 3> curve_coeffs;  // conic point, quadratic in sigma
    std::array<Scalar, 2> roots_upper;            // m and n parameters (positive imaginary part)
};

// Rational parameterization of the conic P cap S from the identity point and
// its four intersections with the null cone (quartic roots in conjugate pairs).
ConicData conic_nullcone_intersection(const Pose& p1, const Pose& p2, const Context& ctx) {
    ConicData out;
    out.plane.col(0) = DualQuaternion::one().vec();
    out.plane.col(1) = p1.dq().vec();
    out.plane.col(2) = p2.dq().vec();

    MatX pm = out.plane;
    if (numerical_rank(pm, ctx.tol_rank) < 3)
        fail(Errc::degenerate_plane, "poses do not span a plane with the identity");
    MatX pe(8, 7);
    pe << pm, exceptional_space().basis();
    if (numerical_rank(pe, ctx.tol_rank) < 7)
        fail(Errc::meets_exceptional, "pose plane meets the exceptional three-space");

    Eigen::Matrix3d gs, gn;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            gs(i, j) = study_bilinear(out.plane.col(i), out.plane.col(j)).real();
            gn(i, j) = nullcone_bilinear(out.plane.col(i), out.plane.col(j)).real();
        }
    const double gs_scale = gs.norm();
    if (gs_scale <= ctx.tol_rank) fail(Errc::degenerate_plane, "plane is contained in the Study quadric");
    if (std::abs((gs / gs_scale).determinant()) <= ctx.tol_rank)
        fail(Errc::degenerate_plane, "pose plane is tangent to the Study quadric");

    std::mt19937_64 rng(ctx.seed ^ 0x7e03u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::Vector3d d1(0.0, 1.0, 0.0), d2(0.0, 0.0, 1.0);
    const Eigen::Vector3d c0(1.0, 0.0, 0.0);
    for (int attempt = 0;; ++attempt) {
        const double a0 = d1.dot(gs * d1), a1 = 2.0 * d1.dot(gs * d2), a2 = d2.dot(gs * d2);
        const double b0 = c0.dot(gs * d1), b1 = c0.dot(gs * d2);
        out.curve_coeffs[0] = a0 * c0 - 2.0 * b0 * d1;
        out.curve_coeffs[1] = a1 * c0 - 2.0 * (b1 * d1 + b0 * d2);
        out.curve_coeffs[2] = a2 * c0 - 2.0 * b1 * d2;

        std::vector<double> q(5, 0.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) q[i + j] += out.curve_coeffs[i].dot(gn * out.curve_coeffs[j]);
        double qs = 0.0;
        for (double c : q) qs = std::max(qs, std::abs(c));
        if (qs <= 1e-14) fail(Errc::numerical_failure, "step conic-nullcone: quartic vanished");
        if (std::abs(q[4]) > 1e-8 * qs) {
            auto roots = real_poly_roots(RealPoly(q));
            std::vector<Scalar> upper;
            for (const auto& r : roots) {
                if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r)))
                    fail(Errc::numerical_failure, "step conic-nullcone: real intersection point");
                if (r.imag() > 0) upper.push_back(r);
            }
            if (upper.size() == 2) {
                std::sort(upper.begin(), upper.end(), [](const Scalar& a, const Scalar& b) {
                    if (a.real() != b.real()) return a.real() < b.real();
                    return a.imag() < b.imag();
                });
                out.roots_upper = {upper[0], upper[1]};
                return out;
            }
            fail(Errc::numerical_failure, "step conic-nullcone: root pairing failed");
        }
        if (attempt >= 5) fail(Errc::numerical_failure, "step conic-nullcone: no proper parameterization found");
        // The point at sigma = inf landed on the null cone; rotate the frame.
        const double ang = uni(rng) * 1.5 + 0.2;
        const Eigen::Vector3d e1 = std::cos(ang) * d1 + std::sin(ang) * d2;
        const Eigen::Vector3d e2 = -std::sin(ang) * d1 + std::cos(ang) * d2;
        d1 = e1;
        d2 = e2;
    }
}

Vec8 conic_point(const ConicData& c, const Scalar& sigma) {
    Eigen::Vector3cd x = c.curve_coeffs[0].cast<Scalar>() + sigma * c.curve_coeffs[1].cast<Scalar>() +
                         sigma * sigma * c.curve_coeffs[2].cast<Scalar>();
    return c.plane * x;
}

}  // namespace

std::array<TwoRSpace, 2> two_r_spaces(const Pose& p1, const Pose& p2, const Context& ctx) {
    const ConicData conic = conic_nullcone_intersection(p1, p2, ctx);
    const Vec8 m1 = conic_point(conic, conic.roots_upper[0]);
    const Vec8 n1 = conic_point(conic, conic.roots_upper[1]);
    const Vec8 m2 = conj_vec(m1);
    const Vec8 n2 = conj_vec(n1);

    const Vector4cd mp1 = m1.head<4>(), np1 = n1.head<4>(), mp2 = m2.head<4>(), np2 = n2.head<4>();

    // Primal part of u1: orthogonal (bilinear) to m1' and n2', and isotropic.
    Eigen::Matrix<Scalar, 2, 4> cond;
    cond.row(0) = mp1.transpose();
    cond.row(1) = np2.transpose();
    Eigen::JacobiSVD<MatX> svd(cond, Eigen::ComputeFullV);
    const Vector4cd w1 = svd.matrixV().col(2), w2 = svd.matrixV().col(3);
    const Scalar qa = bdot(w1, w1), qb = bdot(w1, w2), qc = bdot(w2, w2);
    const double mag = std::abs(qa) + std::abs(qb) + std::abs(qc);
    if (mag <= 1e-12) fail(Errc::numerical_failure, "step primal-quadratic: form vanished");
    const Scalar disc = std::sqrt(qb * qb - qa * qc);
    if (std::abs(disc) <= 1e-8 * mag)
        fail(Errc::numerical_failure, "step primal-quadratic: coincident solutions");
    std::array<Vector4cd, 2> u1c;
    if (std::abs(qa) >= std::abs(qc)) {
        u1c[0] = ((-qb + disc) / qa) * w1 + w2;
        u1c[1] = ((-qb - disc) / qa) * w1 + w2;
    } else {
        u1c[0] = w1 + ((-qb + disc) / qc) * w2;
        u1c[1] = w1 + ((-qb - disc) / qc) * w2;
    }
    for (auto& u : u1c) u /= u.norm();
    if (canonical_less(embed_primal(u1c[1]), embed_primal(u1c[0]))) std::swap(u1c[0], u1c[1]);

    const ProjSubspace e = exceptional_space();
    const Mat8 omega = study_form_matrix();
    std::array<std::optional<TwoRSpace>, 2> result;
    for (int k = 0; k < 2; ++k) {
        const Vector4cd u1 = u1c[k];
        const Scalar dmn1 = bdot(mp1, np1);
        if (std::abs(dmn1) <= 1e-10) fail(Errc::numerical_failure, "step primal-cycle: m1'.n1' vanished");
        const Vector4cd v1 = u1 - (bdot(u1, np1) / dmn1) * mp1;
        const Scalar dnm2 = bdot(np1, mp2);
        if (std::abs(dnm2) <= 1e-10) fail(Errc::numerical_failure, "step primal-cycle: n1'.m2' vanished");
        const Vector4cd u2 = v1 - (bdot(v1, mp2) / dnm2) * np1;
        const Scalar dmn2 = bdot(mp2, np2);
        if (std::abs(dmn2) <= 1e-10) fail(Errc::numerical_failure, "step primal-cycle: m2'.n2' vanished");
        const Vector4cd v2 = u2 - (bdot(u2, np2) / dmn2) * mp2;

        // The last side must close back onto u1 through n2'.
        Eigen::Matrix<Scalar, 4, 2> side;
        side.col(0) = v2;
        side.col(1) = np2;
        const Vector4cd fit = side * side.colPivHouseholderQr().solve(u1);
        if ((fit - u1).norm() > 1e-6 * u1.norm())
            fail(Errc::numerical_failure, "step primal-cycle: quadrilateral does not close");

        NullQuadrilateral quad;
        try {
            quad = lift_quadrilateral(e, {embed_primal(u1), embed_primal(v1), embed_primal(u2), embed_primal(v2)},
                                      {m1, n1, m2, n2}, omega, ctx);
        } catch (const Error& err) {
            fail(Errc::numerical_failure, std::string("step lift: ") + err.what());
        }
        if (quadrilateral_on_quadric_residual(quad, omega) > 1e-6)
            fail(Errc::numerical_failure, "step lift: lifted quadrilateral off the Study quadric");

        ProjSubspace space = ProjSubspace::span({quad.vertex[0], quad.vertex[1], quad.vertex[2], quad.vertex[3]});
        for (const auto& pv : {DualQuaternion::one().vec(), p1.dq().vec(), p2.dq().vec()}) {
            if (space.containment_residual(pv) > 1e-6)
                fail(Errc::numerical_failure, "step lift: poses escaped the candidate space");
        }
        const TwoRSpaceReport rep = is_2r_space(space, ctx);
        if (!rep.ok)
            fail(Errc::numerical_failure,
                 std::string("step validate: ") + fail_name(rep.reason) + " (" + rep.detail + ")");
        result[k] = rep.space;
    }
    return {*result[0], *result[1]};
}

DualQuaternion RuledChart::eval(const Vector2d& s, const Vector2d& u) const {
    const DualQuaternion left = DualQuaternion(Scalar(s[0])) - h1 * s[1];
    const DualQuaternion right = DualQuaternion(Scalar(u[0])) - h2 * u[1];
    return left * right;
}

Vector4d RuledChart::coords(const Vec8& v) const {
    Eigen::Matrix<double, 8, 4> bm;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 8; ++r) bm(r, c) = basis[c].vec()[r].real();
    Eigen::Matrix<double, 8, 1> rhs = real_part_checked(v, 1e-7, "chart point");
    return bm.colPivHouseholderQr().solve(rhs);
}

Vector2d RuledChart::s_coord(const Vector4d& x) const {
    Vector2d a(x[0], -x[1]), b(-x[2], x[3]);
    Vector2d out = (a.norm() >= b.norm()) ? a : b;
    return out / out.norm();
}

Vector2d RuledChart::u_coord(const Vector4d& x) const {
    Vector2d a(x[0], -x[2]), b(-x[1], x[3]);
    Vector2d out = (a.norm() >= b.norm()) ? a : b;
    return out / out.norm();
}

RuledChart ruled_chart(const TwoRSpace& p) {
    RuledChart c;
    c.h1 = p.h1;
    c.h2 = p.h2;
    c.basis = p.basis;
    c.change_of_basis = Mat4c::Identity();
    // Structural Gram in this basis: antidiagonal (a, -a, -a, a) pattern with
    // a = B(1, h1 h2); the canonical form x0 x3 - x1 x2 has value -1/2 there.
    c.form_scale = -2.0 * study_bilinear(DualQuaternion::one().vec(), (p.h1 * p.h2).vec());
    return c;
}

namespace {

struct MapPair {
    // Homogeneous component polynomials of a P^1 map w -> [f0(w) : f1(w)],
    // coefficient k multiplies w^k.
    std::vector<Vector2d> coeff;
    int degree() const { return static_cast<int>(coeff.size()) - 1; }
};

// Unique Moebius map with (inf, 0, 1) -> (a_inf, a_0, a_1).
MapPair moebius_through(const Vector2d& a_inf, const Vector2d& a0, const Vector2d& a1, const char* what) {
    Eigen::Matrix2d m;
    m.col(0) = a_inf;
    m.col(1) = a0;
    if (std::abs(m.determinant()) <= 1e-10)
        fail(Errc::degenerate_chart_data, std::string(what) + ": two poses share a ruling");
    const Vector2d ab = m.colPivHouseholderQr().solve(a1);
    if (std::abs(ab[0]) <= 1e-10 || std::abs(ab[1]) <= 1e-10)
        fail(Errc::degenerate_chart_data, std::string(what) + ": two poses share a ruling");
    MapPair out;
    out.coeff = {ab[1] * a0, ab[0] * a_inf};
    return out;
}

// Degree-2 map through the same data; the two residual real freedoms move the
// solution away from the scalar multiples of the Moebius interpolant.
MapPair quadratic_through(const Vector2d& a_inf, const Vector2d& a0, const Vector2d& a1,
                          const std::array<double, 2>& params, const char* what) {
    Eigen::Matrix<double, 3, 6> sys = Eigen::Matrix<double, 3, 6>::Zero();
    // det2(c0, a0) = 0; det2(c2, a_inf) = 0; det2(c0+c1+c2, a1) = 0
    sys(0, 0) = a0[1];
    sys(0, 1) = -a0[0];
    sys(1, 4) = a_inf[1];
    sys(1, 5) = -a_inf[0];
    for (int k = 0; k < 3; ++k) {
        sys(2, 2 * k) = a1[1];
        sys(2, 2 * k + 1) = -a1[0];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    const Eigen::Matrix<double, 6, 3> null_basis = svd.matrixV().rightCols(3);

    const MapPair moebius = moebius_through(a_inf, a0, a1, what);
    Eigen::Matrix<double, 6, 1> w1, w2;  // (a w + b) * moebius(w)
    w1 << Vector2d::Zero(), moebius.coeff[0], moebius.coeff[1];
    w2 << moebius.coeff[0], moebius.coeff[1], Vector2d::Zero();
    w1.normalize();
    w2 -= w2.dot(w1) * w1;
    w2.normalize();

    int best = 0;
    double best_norm = -1.0;
    Eigen::Matrix<double, 6, 1> residue;
    for (int i = 0; i < 3; ++i) {
        Eigen::Matrix<double, 6, 1> v = null_basis.col(i);
        v -= v.dot(w1) * w1;
        v -= v.dot(w2) * w2;
        if (v.norm() > best_norm) {
            best_norm = v.norm();
            best = i;
            residue = v;
        }
    }
    if (best_norm <= 1e-8) fail(Errc::degenerate_chart_data, std::string(what) + ": no genuine quadratic map");
    (void)best;
    residue.normalize();
    const Eigen::Matrix<double, 6, 1> sol = residue + params[0] * w1 + params[1] * w2;

    MapPair out;
    out.coeff = {Vector2d(sol[0], sol[1]), Vector2d(sol[2], sol[3]), Vector2d(sol[4], sol[5])};
    // A common root of the two components collapses the map to a Moebius one.
    const double a2 = sol[4], b2 = sol[5], a1c = sol[2], b1c = sol[3], a0c = sol[0], b0c = sol[1];
    Eigen::Matrix4d syl;
    syl << a2, a1c, a0c, 0, 0, a2, a1c, a0c, b2, b1c, b0c, 0, 0, b2, b1c, b0c;
    if (std::abs(syl.determinant()) <= 1e-9 * std::pow(sol.norm(), 4))
        fail(Errc::degenerate_chart_data, std::string(what) + ": parameters collapse the cubic");
    return out;
}

MotionPoly factor_poly(const MapPair& map, const DualQuaternion& h) {
    std::vector<DualQuaternion> coeff(map.coeff.size());
    for (std::size_t i = 0; i < map.coeff.size(); ++i)
        coeff[i] = DualQuaternion(Scalar(map.coeff[i][0])) - h * map.coeff[i][1];
    return MotionPoly(std::move(coeff));
}

}  // namespace

MotionPoly interpolate_cubic(const TwoRSpace& p, const std::array<Pose, 3>& poses, CubicFamily family,
                             const std::array<double, 2>& params, const Context& ctx) {
    const RuledChart chart = ruled_chart(p);
    const ProjSubspace space = p.space();
    std::array<Vector2d, 3> s_data, u_data;
    for (int j = 0; j < 3; ++j) {
        const Vec8 v = poses[j].dq().vec();
        if (space.containment_residual(v) > 1e-6)
            fail(Errc::bad_input, "pose " + std::to_string(j) + " does not lie on the quadric");
        const Vector4d x = chart.coords(v);
        s_data[j] = chart.s_coord(x);
        u_data[j] = chart.u_coord(x);
    }

    // Parameters (inf, 0, 1) for poses 0, 1, 2. Second-family cubics carry the
    // quadratic factor on the base (s) side, first-family on the moving (u) side.
    MapPair s_map, u_map;
    if (family == CubicFamily::second) {
        s_map = quadratic_through(s_data[0], s_data[1], s_data[2], params, "s chart data");
        u_map = moebius_through(u_data[0], u_data[1], u_data[2], "u chart data");
    } else {
        s_map = moebius_through(s_data[0], s_data[1], s_data[2], "s chart data");
        u_map = quadratic_through(u_data[0], u_data[1], u_data[2], params, "u chart data");
    }

    MotionPoly c = (factor_poly(s_map, p.h1) * factor_poly(u_map, p.h2)).trimmed(1e-12);
    if (c.degree() != 3) fail(Errc::degenerate_chart_data, "interpolant degree dropped below 3");

    // The leading coefficient is scalar because pose 0 sits at w = inf.
    const DualQuaternion lead = c.coeff.back();
    const DualQuaternion non_scalar = lead - DualQuaternion(lead.p.w);
    if (non_scalar.abs() > 1e-7 * lead.abs() || std::abs(lead.p.w) <= 1e-10 * c.abs())
        fail(Errc::numerical_failure, "interpolant is not monic at w = inf");
    c = c * (1.0 / lead.p.w);

    for (auto& q : c.coeff) {
        if (!q.is_real(1e-7 * std::max(1.0, c.abs()))) fail(Errc::non_real_curve, "cubic has complex coefficients");
        Vec8 v = q.vec();
        for (int i = 0; i < 8; ++i) v[i] = Scalar(v[i].real());
        q = DualQuaternion::from_vec(v);
    }

    const std::array<Param, 3> nodes = {Param::infinity(), Param(0.0), Param(1.0)};
    for (int j = 0; j < 3; ++j) {
        if (proj_distance(c.eval(nodes[j]).vec(), poses[j].dq().vec()) > 1e-8)
            fail(Errc::numerical_failure, "interpolant misses pose " + std::to_string(j));
    }
    return c;
}

namespace {

// Distinct parameter values at which the coordinate curve x(w) crosses the
// ruling with the given chart value; `pick` selects the s or u coordinate.
int ruling_intersection_count(const std::array<RealPoly, 4>& x, const Vector2d& ruling, bool first_family) {
    // Condition polynomial from one coordinate pair; candidates verified on both.
    // u pairs: (x0, -x2), (-x1, x3);  s pairs: (x0, -x1), (-x2, x3).
    const int ia = first_family ? 2 : 1;  // index paired with x0
    std::vector<double> phi(4, 0.0);
    for (int k = 0; k < 4; ++k) {
        const double c0 = k <= x[0].degree() ? x[0].coeff[k] : 0.0;
        const double ca = k <= x[ia].degree() ? x[ia].coeff[k] : 0.0;
        phi[k] = ruling[1] * c0 + ruling[0] * ca;
    }
    const RealPoly phi_poly = RealPoly(phi).trimmed(1e-10);

    auto point_on_ruling = [&](const Scalar& w, bool at_inf) {
        Eigen::Vector4cd pt;
        for (int i = 0; i < 4; ++i) {
            if (at_inf)
                pt[i] = x[i].degree() >= 3 ? Scalar(x[i].coeff[3]) : Scalar(0.0);
            else
                pt[i] = x[i].eval(w);
        }
        const Eigen::Vector2cd pa = first_family ? Eigen::Vector2cd(pt[0], -pt[2]) : Eigen::Vector2cd(pt[0], -pt[1]);
        const Eigen::Vector2cd pb = first_family ? Eigen::Vector2cd(-pt[1], pt[3]) : Eigen::Vector2cd(-pt[2], pt[3]);
        bool ok = false;
        for (const auto& pair : {pa, pb}) {
            const double n = pair.norm();
            if (n <= 1e-8 * pt.norm()) continue;
            const Scalar d = pair[0] * ruling[1] - pair[1] * ruling[0];
            if (std::abs(d) > 1e-6 * n) return false;
            ok = true;
        }
        return ok;
    };

    std::vector<Scalar> hits;
    for (const auto& w : real_poly_roots(phi_poly)) {
        if (!point_on_ruling(w, false)) continue;
        bool dup = false;
        for (const auto& h : hits)
            if (std::abs(h - w) <= 1e-6 * (1.0 + std::abs(w))) dup = true;
        if (!dup) hits.push_back(w);
    }
    int count = static_cast<int>(hits.size());
    if (phi_poly.degree() < 3 && point_on_ruling(Scalar(0.0), true)) ++count;
    return count;
}

}  // namespace

CubicFamily classify_cubic(const MotionPoly& c_in, const TwoRSpace& p, const Context& ctx) {
    const MotionPoly c = c_in.trimmed();
    if (c.degree() != 3) fail(Errc::bad_input, "classification needs a twisted cubic (degree 3)");
    const RuledChart chart = ruled_chart(p);
    const ProjSubspace space = p.space();

    std::array<RealPoly, 4> x;
    for (int i = 0; i < 4; ++i) x[i].coeff.assign(4, 0.0);
    for (int k = 0; k <= 3; ++k) {
        const Vec8 v = c.coeff[k].vec();
        if (space.containment_residual(v) > 1e-6 && v.norm() > 1e-9 * c.abs())
            fail(Errc::bad_input, "cubic does not lie in the 2R space");
        const Vector4d coords = chart.coords(v);
        for (int i = 0; i < 4; ++i) x[i].coeff[k] = coords[i];
    }

    std::mt19937_64 rng(ctx.seed ^ 0xc1a55u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int votes_first = 0, votes_second = 0;
    for (int trial = 0; trial < 5; ++trial) {
        Vector2d ruling(uni(rng), uni(rng));
        if (ruling.norm() < 0.3) {
            --trial;
            continue;
        }
        ruling.normalize();
        const int nf = ruling_intersection_count(x, ruling, true);
        const int ns = ruling_intersection_count(x, ruling, false);
        if (nf == 2 && ns == 1) ++votes_first;
        if (nf == 1 && ns == 2) ++votes_second;
    }
    if (votes_first >= 3 && votes_second == 0) return CubicFamily::first;
    if (votes_second >= 3 && votes_first == 0) return CubicFamily::second;
    fail(Errc::numerical_failure, "Indeterminate: ruling intersection counts are ambiguous");
}

PlueckerLine transform_line(const Pose& p, const PlueckerLine& line, const Context& ctx) {
    const DualQuaternion h = half_turn_from_line(line, ctx);
    const DualQuaternion moved = p.dq() * h * p.dq().conj();
    return axis_of(moved, ctx);
}

namespace {

MotionPoly left_compose(const Pose& p, const MotionPoly& c) {
    std::vector<DualQuaternion> coeff(c.coeff.size());
    for (std::size_t i = 0; i < c.coeff.size(); ++i) coeff[i] = p.dq() * c.coeff[i];
    return MotionPoly(std::move(coeff));
}

}  // namespace

Linkage bennett_from_poses(const Pose& p0, const Pose& p1, const Pose& p2, const Context& ctx) {
    const auto normalized = normalize_poses(p0, p1, p2);
    const auto spaces = two_r_spaces(normalized[1], normalized[2], ctx);

    // The coupler conic is the unique bidegree (1,1) interpolant on either quadric.
    const RuledChart chart = ruled_chart(spaces[0]);
    std::array<Vector2d, 3> s_data, u_data;
    for (int j = 0; j < 3; ++j) {
        const Vector4d x = chart.coords(normalized[j].dq().vec());
        s_data[j] = chart.s_coord(x);
        u_data[j] = chart.u_coord(x);
    }
    const MapPair s_map = moebius_through(s_data[0], s_data[1], s_data[2], "s chart data");
    const MapPair u_map = moebius_through(u_data[0], u_data[1], u_data[2], "u chart data");
    MotionPoly conic = (factor_poly(s_map, spaces[0].h1) * factor_poly(u_map, spaces[0].h2)).trimmed(1e-12);
    if (conic.degree() != 2) fail(Errc::numerical_failure, "Bennett coupler conic degenerated");
    const DualQuaternion lead = conic.coeff.back();
    if ((lead - DualQuaternion(lead.p.w)).abs() > 1e-7 * lead.abs())
        fail(Errc::numerical_failure, "Bennett conic is not monic at w = inf");
    conic = conic * (1.0 / lead.p.w);

    auto factorizations = factorize_motion_poly(conic, ctx);
    if (factorizations.size() != 2)
        fail(Errc::numerical_failure,
             "expected two factorizations of the Bennett conic, got " + std::to_string(factorizations.size()));

    // Identify the factorization realizing the first space's dyad.
    std::array<PlueckerLine, 2> first_axis;
    for (int i = 0; i < 2; ++i) first_axis[i] = axis_of(factorizations[i].factors[0], ctx);
    int a_idx = same_line(first_axis[0], spaces[0].base_axis, 1e-6) ? 0 : 1;
    if (!same_line(first_axis[a_idx], spaces[0].base_axis, 1e-6))
        fail(Errc::numerical_failure, "factorization axes do not match the synthesized dyads");
    const Factorization& fa = factorizations[a_idx];
    const Factorization& fb = factorizations[1 - a_idx];

    Linkage out;
    out.kind = LinkageKind::bennett4r;
    out.base_pose = p0;
    out.coupler_motion = left_compose(p0, conic);
    out.pair_a = fa;
    out.pair_b = fb;
    out.joints = {
        {transform_line(p0, axis_of(fa.factors[0], ctx), ctx), "dyad_a"},
        {transform_line(p0, axis_of(fa.factors[1], ctx), ctx), "dyad_a"},
        {transform_line(p0, axis_of(fb.factors[1], ctx), ctx), "dyad_b"},
        {transform_line(p0, axis_of(fb.factors[0], ctx), ctx), "dyad_b"},
    };
    return out;
}

std::vector<Linkage> synthesize_5r(const Pose& p0, const Pose& p1, const Pose& p2, CubicFamily family,
                                   const std::array<double, 2>& params, int which_space, const Context& ctx) {
    if (which_space != 0 && which_space != 1) fail(Errc::bad_input, "which_space must be 0 or 1");
    const auto normalized = normalize_poses(p0, p1, p2);
    const auto spaces = two_r_spaces(normalized[1], normalized[2], ctx);
    const TwoRSpace& space = spaces[which_space];

    const MotionPoly cubic = interpolate_cubic(space, normalized, family, params, ctx);
    const auto factorizations = factorize_cubic(cubic, ctx);

    struct Annotated {
        const Factorization* f;
        std::array<PlueckerLine, 3> axes;
        bool left_commuting, right_commuting;
    };
    std::vector<Annotated> ann;
    for (const auto& f : factorizations) {
        Annotated a{&f, {}, false, false};
        try {
            for (int i = 0; i < 3; ++i) a.axes[i] = axis_of(f.factors[i], ctx);
        } catch (const Error&) {
            continue;  // factor without a proper axis cannot enter a linkage
        }
        a.left_commuting = same_line(a.axes[0], a.axes[1], 1e-6);
        a.right_commuting = same_line(a.axes[1], a.axes[2], 1e-6);
        ann.push_back(a);
    }

    std::vector<const Annotated*> degenerate, others;
    for (const auto& a : ann)
        (a.left_commuting || a.right_commuting) ? degenerate.push_back(&a) : others.push_back(&a);
    if (degenerate.empty())
        fail(Errc::no_degenerate_factorization, "no factorization realizes the 2R dyad");

    const Annotated& dyad = *degenerate.front();
    const PlueckerLine dyad_base = dyad.left_commuting ? dyad.axes[0] : dyad.axes[0];
    const PlueckerLine dyad_coupler = dyad.left_commuting ? dyad.axes[2] : dyad.axes[1];

    std::vector<Linkage> out;
    for (const Annotated* cand : others) {
        if (same_line(cand->axes[0], dyad_base, 1e-6)) continue;
        if (same_line(cand->axes[2], dyad_coupler, 1e-6)) continue;
        std::array<PlueckerLine, 5> axes = {dyad_base, dyad_coupler, cand->axes[2], cand->axes[1], cand->axes[0]};
        bool distinct = true;
        for (int i = 0; i < 5 && distinct; ++i)
            for (int j = i + 1; j < 5; ++j)
                if (same_line(axes[i], axes[j], 1e-6)) {
                    distinct = false;
                    break;
                }
        if (!distinct) continue;

        Linkage l;
        l.kind = LinkageKind::goldberg5r;
        l.base_pose = p0;
        l.coupler_motion = left_compose(p0, cubic);
        l.pair_a = *dyad.f;
        l.pair_b = *cand->f;
        l.family = family;
        l.params = params;
        l.which_space = which_space;
        l.joints = {{transform_line(p0, axes[0], ctx), "base_dyad"},
                    {transform_line(p0, axes[1], ctx), "base_dyad"},
                    {transform_line(p0, axes[2], ctx), "coupler_chain"},
                    {transform_line(p0, axes[3], ctx), "coupler_chain"},
                    {transform_line(p0, axes[4], ctx), "coupler_chain"}};
        out.push_back(std::move(l));
    }
    return out;
}

double orientation_obstruction_residual(const TwoRSpace& p, const Quaternion& orientation) {
    Eigen::Matrix4d primal;
    Eigen::Vector4d rhs;
    for (int c = 0; c < 4; ++c) {
        const Vec8 v = p.basis[c].vec();
        for (int r = 0; r < 4; ++r) primal(r, c) = v[r].real();
    }
    rhs << orientation.w.real(), orientation.x.real(), orientation.y.real(), orientation.z.real();
    const Eigen::Vector4d coeffs = primal.colPivHouseholderQr().solve(rhs);
    Vec8 x = Vec8::Zero();
    for (int c = 0; c < 4; ++c) x += Scalar(coeffs[c]) * p.basis[c].vec();
    x /= x.norm();
    return std::abs(study_residual(DualQuaternion::from_vec(x)).p);
}

}  // namespace studylink
