#include "studylink/projective.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

namespace studylink {

namespace {

Eigen::JacobiSVD<MatX> svd_of(const MatX& m, unsigned options = Eigen::ComputeThinU | Eigen::ComputeFullV) {
    return Eigen::JacobiSVD<MatX>(m, options);
}

MatX normalize_columns(const MatX& m) {
    MatX out = m;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        const double n = out.col(c).norm();
        if (n > 0) out.col(c) /= n;
    }
    return out;
}

}  // namespace

double proj_distance(const Vec8& a, const Vec8& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 1.0;
    const double c = std::abs(a.dot(b)) / (na * nb);
    // guard against rounding slightly above 1
    const double c2 = std::min(1.0, c * c);
    return std::sqrt(1.0 - c2);
}

bool proj_equal(const Vec8& a, const Vec8& b, double tol) { return proj_distance(a, b) <= tol; }

Vec8 canonical_rep(const Vec8& v) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < 8; ++i) {
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            imax = i;
        }
    }
    if (best == 0.0) return v;
    const Scalar phase = std::conj(v[imax]) / std::abs(v[imax]);
    Vec8 out = v * phase;
    out /= out.norm();
    return out;
}

bool canonical_less(const Vec8& a, const Vec8& b) {
    const Vec8 ca = canonical_rep(a), cb = canonical_rep(b);
    for (int i = 0; i < 8; ++i) {
        if (ca[i].real() != cb[i].real()) return ca[i].real() < cb[i].real();
        if (ca[i].imag() != cb[i].imag()) return ca[i].imag() < cb[i].imag();
    }
    return false;
}

int numerical_rank(const MatX& m, double tol) {
    if (m.cols() == 0 || m.rows() == 0) return 0;
    Eigen::JacobiSVD<MatX> svd(normalize_columns(m));
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol * s[0]) ++r;
    return r;
}

ProjSubspace::ProjSubspace(MatX basis_columns) : basis_(std::move(basis_columns)) {
    if (basis_.cols() < 1 || basis_.rows() != 8) fail(Errc::bad_input, "subspace basis must be 8 x k, k >= 1");
    Eigen::JacobiSVD<MatX> svd(normalize_columns(basis_), Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const int k = static_cast<int>(basis_.cols());
    if (s[k - 1] <= 1e-10 * s[0]) fail(Errc::bad_input, "subspace basis is rank deficient");
    onb_ = svd.matrixU().leftCols(k);
}

ProjSubspace ProjSubspace::span(const std::vector<Vec8>& vecs) {
    MatX m(8, static_cast<Eigen::Index>(vecs.size()));
    for (std::size_t i = 0; i < vecs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vecs[i];
    return ProjSubspace(std::move(m));
}

ProjSubspace ProjSubspace::span_dq(const std::vector<DualQuaternion>& qs) {
    std::vector<Vec8> v;
    v.reserve(qs.size());
    for (const auto& q : qs) v.push_back(q.vec());
    return span(v);
}

double ProjSubspace::containment_residual(const Vec8& v) const {
    const double n = v.norm();
    if (n == 0.0) return 1.0;
    const Vec8 r = v - onb_ * (onb_.adjoint() * v);
    return r.norm() / n;
}

ProjSubspace exceptional_space() {
    return ProjSubspace::span_dq(
        {DualQuaternion::e(), DualQuaternion::ei(), DualQuaternion::ej(), DualQuaternion::ek()});
}

ProjSubspace subspace_join(const ProjSubspace& a, const ProjSubspace& b) {
    MatX m(8, a.basis().cols() + b.basis().cols());
    m << a.basis(), b.basis();
    Eigen::JacobiSVD<MatX> svd(normalize_columns(m), Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > 1e-10 * s[0]) ++r;
    return ProjSubspace(svd.matrixU().leftCols(r));
}

std::optional<ProjSubspace> subspace_intersection(const ProjSubspace& a, const ProjSubspace& b,
                                                  const Context& ctx) {
    const Eigen::Index ka = a.onb().cols(), kb = b.onb().cols();
    MatX m(8, ka + kb);
    m << a.onb(), -b.onb();
    Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    std::vector<Vec8> hits;
    for (Eigen::Index i = 0; i < ka + kb; ++i) {
        const double sv = (i < s.size()) ? s[i] : 0.0;
        if (sv <= ctx.tol_rank * s[0]) {
            const auto coeff = svd.matrixV().col(i);
            Vec8 v = a.onb() * coeff.head(ka);
            if (v.norm() > 1e-10) hits.push_back(v);
        }
    }
    if (hits.empty()) return std::nullopt;
    return ProjSubspace::span(hits);
}

Mat8 study_form_matrix() {
    Mat8 m = Mat8::Zero();
    for (int i = 0; i < 4; ++i) {
        m(i, i + 4) = Scalar(1.0);
        m(i + 4, i) = Scalar(1.0);
    }
    return m;
}

Mat8 nullcone_form_matrix() {
    Mat8 m = Mat8::Zero();
    for (int i = 0; i < 4; ++i) m(i, i) = Scalar(1.0);
    return m;
}

double null_line_residual(const DualQuaternion& x, const DualQuaternion& y) {
    const DualQuaternion xn = x * (1.0 / x.abs());
    const DualQuaternion yn = y * (1.0 / y.abs());
    const DualNumber nx = norm_unchecked(xn);
    const DualNumber ny = norm_unchecked(yn);
    const DualQuaternion cross = xn * yn.conj() + yn * xn.conj();
    const DualNumber nc{cross.p.w, cross.d.w};
    return std::max({nx.abs(), ny.abs(), nc.abs()});
}

bool is_null_line(const DualQuaternion& x, const DualQuaternion& y, const Context& ctx) {
    MatX m(8, 2);
    m.col(0) = x.vec();
    m.col(1) = y.vec();
    if (numerical_rank(m, ctx.tol_proj) < 2) fail(Errc::dependent_points, "line generators are dependent");
    return null_line_residual(x, y) <= std::max(1e-8, 100.0 * ctx.tol_proj);
}

bool meets_exceptional(const ProjSubspace& p, const Context& ctx) {
    const ProjSubspace e = exceptional_space();
    MatX m(8, p.basis().cols() + 4);
    m << p.basis(), e.basis();
    return numerical_rank(m, ctx.tol_rank) < p.basis().cols() + 4;
}

QuadricForm restrict_study(const ProjSubspace& p, const Context& ctx) {
    if (p.proj_dim() != 3) fail(Errc::bad_input, "restriction needs a 3-space");
    const Mat8 s8 = study_form_matrix();
    const MatX bn = normalize_columns(p.basis());
    Mat4c gram_given, gram_unit;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            gram_given(i, j) = study_bilinear(p.basis().col(i), p.basis().col(j));
            gram_unit(i, j) = study_bilinear(bn.col(i), bn.col(j));
        }
    const double scale = gram_unit.cwiseAbs().maxCoeff();
    if (scale <= ctx.tol_rank) fail(Errc::contained_in_study, "Study form vanishes on the subspace");

    QuadricForm out;
    out.gram = gram_given;
    out.regular = std::abs((gram_unit / scale).determinant()) > ctx.tol_rank;
    out.ruled = out.regular;
    // Real restriction: classify by signature; ruled quadric surfaces have (2,2).
    double imn = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) imn = std::max(imn, std::abs(gram_unit(i, j).imag()));
    if (out.regular && imn <= 1e-7 * scale) {
        Eigen::Matrix4d gr;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) gr(i, j) = 0.5 * (gram_unit(i, j).real() + gram_unit(j, i).real());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(gr);
        int pos = 0, neg = 0;
        for (int i = 0; i < 4; ++i) {
            if (es.eigenvalues()[i] > ctx.tol_rank * scale) ++pos;
            if (es.eigenvalues()[i] < -ctx.tol_rank * scale) ++neg;
        }
        out.ruled = (pos == 2 && neg == 2);
    }
    return out;
}

double NullQuadrilateral::max_side_residual() const {
    double r = 0.0;
    for (int i = 0; i < 4; ++i) {
        r = std::max(r, null_line_residual(DualQuaternion::from_vec(vertex[i]),
                                           DualQuaternion::from_vec(vertex[(i + 1) % 4])));
    }
    return r;
}

namespace {

// Two points of the line span(a1, a2) on the quadric given by its values
// qa = q(a1,a1), qb = q(a1,a2), qc = q(a2,a2).
std::array<Eigen::Vector2cd, 2> line_quadric_points(Scalar qa, Scalar qb, Scalar qc, double scale,
                                                    const char* what) {
    const double mag = std::abs(qa) + std::abs(qb) + std::abs(qc);
    if (mag <= 1e-9 * scale) fail(Errc::no_quadrilateral, std::string(what) + ": line lies in the quadric");
    const Scalar disc = std::sqrt(qb * qb - qa * qc);
    if (std::abs(disc) <= 1e-6 * mag)
        fail(Errc::no_quadrilateral, std::string(what) + ": tangent line, coincident points");
    std::array<Eigen::Vector2cd, 2> out;
    if (std::abs(qa) >= std::abs(qc)) {
        out[0] << (-qb + disc) / qa, Scalar(1.0);
        out[1] << (-qb - disc) / qa, Scalar(1.0);
    } else {
        out[0] << Scalar(1.0), (-qb + disc) / qc;
        out[1] << Scalar(1.0), (-qb - disc) / qc;
    }
    return out;
}

}  // namespace

NullQuadrilateral find_null_quadrilateral(const ProjSubspace& p, const Context& ctx) {
    if (p.proj_dim() != 3) fail(Errc::bad_input, "null quadrilateral search needs a 3-space");
    const MatX b = normalize_columns(p.basis());
    Mat4c gs, gn;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            gs(i, j) = study_bilinear(b.col(i), b.col(j));
            gn(i, j) = nullcone_bilinear(b.col(i), b.col(j));
        }
    gs /= gs.norm();
    const double gn_scale = gn.norm();
    if (gn_scale <= ctx.tol_rank) fail(Errc::no_quadrilateral, "null-cone restriction degenerate");
    gn /= gn_scale;

    Eigen::FullPivLU<Mat4c> lu(gn);
    if (!lu.isInvertible()) fail(Errc::no_quadrilateral, "subspace meets the exceptional space");
    const Mat4c a = -lu.solve(gs);
    Eigen::ComplexEigenSolver<Mat4c> es(a);
    if (es.info() != Eigen::Success) fail(Errc::numerical_failure, "pencil eigensolver failed");
    std::array<Scalar, 4> ev;
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()[i];

    // The pencil of a genuine quadrilateral has two rank-2 members; their
    // parameters show up as two double eigenvalues.
    const double ev_scale = 1.0 + std::max({std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2]), std::abs(ev[3])});
    static const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    int best = -1;
    double best_cost = std::numeric_limits<double>::max();
    for (int k = 0; k < 3; ++k) {
        const double c = std::max(std::abs(ev[pairings[k][0]] - ev[pairings[k][1]]),
                                  std::abs(ev[pairings[k][2]] - ev[pairings[k][3]]));
        if (c < best_cost) {
            best_cost = c;
            best = k;
        }
    }
    const Scalar lam1 = 0.5 * (ev[pairings[best][0]] + ev[pairings[best][1]]);
    const Scalar lam2 = 0.5 * (ev[pairings[best][2]] + ev[pairings[best][3]]);
    if (best_cost > 1e-6 * ev_scale || std::abs(lam1 - lam2) <= 1e-6 * ev_scale)
        fail(Errc::no_quadrilateral, "pencil eigenvalues do not form two double points");

    // Kernels of the two rank-2 members are the quadrilateral's diagonals.
    std::array<std::array<Vec8, 2>, 2> verts;
    const Scalar lams[2] = {lam1, lam2};
    for (int d = 0; d < 2; ++d) {
        const Mat4c m = gs + lams[d] * gn;
        Eigen::JacobiSVD<Mat4c> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv[2] > 1e-6 * sv[0] || sv[1] <= 1e-5 * sv[0])
            fail(Errc::no_quadrilateral, "degenerate pencil member does not have rank 2");
        const Eigen::Vector4cd a1 = svd.matrixV().col(2);
        const Eigen::Vector4cd a2 = svd.matrixV().col(3);
        const Scalar qa = a1.transpose() * gs * a1;
        const Scalar qb = a1.transpose() * gs * a2;
        const Scalar qc = a2.transpose() * gs * a2;
        const auto pts = line_quadric_points(qa, qb, qc, 1.0, "diagonal");
        for (int i = 0; i < 2; ++i) {
            const Eigen::Vector4cd c = pts[i][0] * a1 + pts[i][1] * a2;
            verts[d][i] = b * c;
            verts[d][i] /= verts[d][i].norm();
        }
    }

    // Sides connect vertices of opposite diagonals; verify all four.
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double r = null_line_residual(DualQuaternion::from_vec(verts[0][i]),
                                                DualQuaternion::from_vec(verts[1][j]));
            if (r > std::max(1e-7, 1000.0 * ctx.tol_proj))
                fail(Errc::no_quadrilateral, "candidate side fails the null-line conditions");
        }

    NullQuadrilateral quad;
    quad.vertex = {verts[0][0], verts[1][0], verts[0][1], verts[1][1]};
    // Deterministic start and direction.
    int start = 0;
    for (int i = 1; i < 4; ++i)
        if (canonical_less(quad.vertex[start], quad.vertex[i])) start = i;
    const int prev = (start + 3) % 4, next = (start + 1) % 4;
    const bool forward = canonical_less(quad.vertex[prev], quad.vertex[next]);
    NullQuadrilateral out;
    for (int i = 0; i < 4; ++i)
        out.vertex[i] = quad.vertex[forward ? (start + i) % 4 : (start + 4 - i) % 4];
    return out;
}

Vec8 central_projection(const ProjSubspace& target, const Vec8& centre, const Vec8& x, const Context& ctx) {
    const auto& onb = target.onb();
    const Vec8 rx = x - onb * (onb.adjoint() * x);
    const Vec8 rm = centre - onb * (onb.adjoint() * centre);
    if (rm.norm() <= 1e-9 * centre.norm()) fail(Errc::degenerate_config, "projection centre lies in the target");
    const Scalar c = -(rm.adjoint() * rx)(0) / (rm.adjoint() * rm)(0).real();
    const Vec8 y = x + c * centre;
    const double span_scale = x.norm() + std::abs(c) * centre.norm();
    if ((y - onb * (onb.adjoint() * y)).norm() > 1e-7 * span_scale)
        fail(Errc::degenerate_config, "projected line misses the target");
    if (y.norm() <= 1e-8 * span_scale) fail(Errc::degenerate_config, "point lies at the projection centre");
    return y;
}

Vec8 projection_cycle(const ProjSubspace& e, const std::array<Vec8, 4>& f_points,
                      const std::array<Vec8, 4>& centres, const Vec8& x, const Context& ctx) {
    if (e.proj_dim() != 3) fail(Errc::degenerate_config, "E must be a three-space");
    MatX fm(8, 4);
    for (int i = 0; i < 4; ++i) fm.col(i) = f_points[i];
    if (numerical_rank(fm, ctx.tol_rank) < 4) fail(Errc::degenerate_config, "F-points do not span a three-space");
    MatX ef(8, 8);
    ef << e.basis(), fm;
    if (numerical_rank(ef, ctx.tol_rank) < 8) fail(Errc::degenerate_config, "E and F intersect");
    MatX cm(8, 4);
    for (int i = 0; i < 4; ++i) cm.col(i) = centres[i];
    if (numerical_rank(cm, ctx.tol_rank) < 3) fail(Errc::degenerate_config, "centres are collinear");

    std::array<ProjSubspace, 4> spaces = {
        subspace_join(ProjSubspace::span({f_points[0]}), e), subspace_join(ProjSubspace::span({f_points[1]}), e),
        subspace_join(ProjSubspace::span({f_points[2]}), e), subspace_join(ProjSubspace::span({f_points[3]}), e)};

    if (spaces[0].containment_residual(x) > 1e-7) fail(Errc::degenerate_config, "x does not lie in U1");
    if (e.containment_residual(x) <= 100.0 * ctx.tol_proj) fail(Errc::degenerate_config, "x lies in E");

    Vec8 y = x;
    for (int step = 0; step < 4; ++step) {
        y = central_projection(spaces[(step + 1) % 4], centres[step], y, ctx);
        y /= y.norm();
    }
    return y;
}

NullQuadrilateral lift_quadrilateral(const ProjSubspace& e, const std::array<Vec8, 4>& primal_quad,
                                     const std::array<Vec8, 4>& side_points, const Mat8& omega,
                                     const Context& ctx) {
    if (e.proj_dim() != 3) fail(Errc::degenerate_config, "E must be a three-space");
    MatX fm(8, 4);
    for (int i = 0; i < 4; ++i) fm.col(i) = primal_quad[i] / primal_quad[i].norm();
    if (numerical_rank(fm, ctx.tol_rank) < 4)
        fail(Errc::degenerate_config, "primal quadrilateral does not span a three-space");
    MatX ef(8, 8);
    ef << fm, e.basis();
    Eigen::FullPivLU<MatX> decomp(ef);
    if (!decomp.isInvertible()) fail(Errc::degenerate_config, "E and F intersect");

    // F-components of the side points, consistent with their full representatives.
    std::array<Vec8, 4> side_f;
    for (int i = 0; i < 4; ++i) {
        const Eigen::Matrix<Scalar, 8, 1> c = decomp.solve(side_points[i]);
        side_f[i] = fm * c.head(4);
    }

    // Collinearity scalars along the cycle u1 -> v1 -> u2 -> v2.
    std::array<Scalar, 3> lam;
    std::array<Vec8, 4> y;  // primal representatives with consistent scale
    y[0] = fm.col(0);
    for (int k = 0; k < 3; ++k) {
        MatX a(8, 2);
        a.col(0) = y[k];
        a.col(1) = side_f[k];
        const Eigen::Vector2cd sol = a.colPivHouseholderQr().solve(fm.col(k + 1));
        if (std::abs(sol[0]) <= 1e-10)
            fail(Errc::degenerate_config, "side point coincides with a primal vertex");
        lam[k] = sol[1] / sol[0];
        y[k + 1] = y[k] + lam[k] * side_f[k];
    }

    // On-quadric vertex conditions give a 4x4 linear system for the E-part of u1.
    std::array<Vec8, 4> z;  // y_k plus accumulated full side points
    z[0] = y[0];
    for (int k = 0; k < 3; ++k) z[k + 1] = z[k] + lam[k] * side_points[k];
    Mat4c a = Mat4c::Zero();
    Eigen::Vector4cd rhs;
    const MatX oe = omega * e.basis();
    for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < 4; ++j) a(k, j) = 2.0 * (z[k].transpose() * oe.col(j))(0);
        rhs[k] = -(z[k].transpose() * omega * z[k])(0);
    }
    Eigen::JacobiSVD<Mat4c> asvd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = asvd.singularValues();
    if (sv[3] <= ctx.tol_rank * sv[0]) fail(Errc::singular_b, "lifting system is numerically singular");
    const Eigen::Vector4cd w = asvd.solve(rhs);

    const Vec8 ew = e.basis() * w;
    NullQuadrilateral out;
    out.vertex[0] = z[0] + ew;
    for (int k = 0; k < 3; ++k) out.vertex[k + 1] = out.vertex[k] + lam[k] * side_points[k];
    for (auto& v : out.vertex) v /= v.norm();
    return out;
}

double quadrilateral_on_quadric_residual(const NullQuadrilateral& q, const Mat8& omega) {
    const double os = omega.norm();
    double r = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec8 vi = q.vertex[i] / q.vertex[i].norm();
        const Vec8 vj = q.vertex[(i + 1) % 4] / q.vertex[(i + 1) % 4].norm();
        r = std::max(r, std::abs((vi.transpose() * omega * vi)(0)) / os);
        r = std::max(r, std::abs((vi.transpose() * omega * vj)(0)) / os);
    }
    return r;
}

}  // namespace studylink
