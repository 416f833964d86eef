#pragma once

#include <array>
#include <optional>
#include <vector>

#include "studylink/dual_quaternion.hpp"

namespace studylink {

using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Mat4c = Eigen::Matrix<Scalar, 4, 4>;
using Mat8 = Eigen::Matrix<Scalar, 8, 8>;

// Sine of the principal angle between the complex lines spanned by a and b.
// Scale- and phase-invariant; stable near coordinate zeros.
double proj_distance(const Vec8& a, const Vec8& b);
bool proj_equal(const Vec8& a, const Vec8& b, double tol);

// Representative scaled so the largest-magnitude component is 1 (real, positive
// where possible); used for deterministic ordering of projective outputs.
Vec8 canonical_rep(const Vec8& v);
bool canonical_less(const Vec8& a, const Vec8& b);

// Numerical rank of a matrix whose columns are first normalized.
int numerical_rank(const MatX& m, double tol);

// Flat of P^7 over C, stored as a full-rank basis (8 x k, projective dim k-1).
class ProjSubspace {
public:
    explicit ProjSubspace(MatX basis_columns);
    static ProjSubspace span(const std::vector<Vec8>& vecs);
    static ProjSubspace span_dq(const std::vector<DualQuaternion>& qs);

    const MatX& basis() const { return basis_; }
    const MatX& onb() const { return onb_; }
    int proj_dim() const { return static_cast<int>(basis_.cols()) - 1; }

    // Distance from [v] to the subspace (sine of angle to the projection).
    double containment_residual(const Vec8& v) const;
    bool contains(const Vec8& v, double tol) const { return containment_residual(v) <= tol; }

private:
    MatX basis_;
    MatX onb_;
};

ProjSubspace exceptional_space();
ProjSubspace subspace_join(const ProjSubspace& a, const ProjSubspace& b);
// Intersection computed from the joint null space; empty optional if disjoint.
std::optional<ProjSubspace> subspace_intersection(const ProjSubspace& a, const ProjSubspace& b,
                                                  const Context& ctx = {});

// 8x8 matrices of the Study and null-cone bilinear forms (complex-bilinear).
Mat8 study_form_matrix();
Mat8 nullcone_form_matrix();

// Largest residual among the six scalar conditions of the null-line test,
// on unit-normalized inputs.
double null_line_residual(const DualQuaternion& x, const DualQuaternion& y);

// True iff the line [x] v [y] lies in S intersect N:
// x*conj(x) = y*conj(y) = x*conj(y) + y*conj(x) = 0 (six scalar conditions).
bool is_null_line(const DualQuaternion& x, const DualQuaternion& y, const Context& ctx = {});

// True iff the flat P meets the exceptional three-space E = [eps H].
bool meets_exceptional(const ProjSubspace& p, const Context& ctx = {});

// Restriction of the Study quadric to a 3-space, in that space's basis.
struct QuadricForm {
    Mat4c gram;     // Gram matrix in the given basis
    bool regular;   // |det| above threshold on the unit-normalized basis
    bool ruled;     // real signature (2,2); true for regular complex forms
};

// Throws contained_in_study when the restriction vanishes identically.
QuadricForm restrict_study(const ProjSubspace& p, const Context& ctx = {});

// Spatial quadrilateral with all four sides in S intersect N.
// Vertices in cyclic order; sides are (v0 v1), (v1 v2), (v2 v3), (v3 v0).
struct NullQuadrilateral {
    std::array<Vec8, 4> vertex;

    double max_side_residual() const;
};

// Intersects S|P and N|P through the degenerate members of their pencil and
// extracts the four common lines. Throws no_quadrilateral when the
// intersection is not four lines in general position.
NullQuadrilateral find_null_quadrilateral(const ProjSubspace& p, const Context& ctx = {});

// One central projection: image of [x] on `target` from `centre`.
Vec8 central_projection(const ProjSubspace& target, const Vec8& centre, const Vec8& x,
                        const Context& ctx = {});

// Composition of the four central projections U1 -> V1 -> U2 -> V2 -> U1
// with the given centres. Returns the final point; equals [x] when the
// centres are coplanar.
Vec8 projection_cycle(const ProjSubspace& e, const std::array<Vec8, 4>& f_points,
                      const std::array<Vec8, 4>& centres, const Vec8& x, const Context& ctx = {});

// Reconstructs the unique spatial quadrilateral on the quadric `omega` with
// prescribed projections from E and sides through the given points. The four
// vertex conditions reduce to one 4x4 linear solve; throws singular_b when
// that system is numerically singular.
NullQuadrilateral lift_quadrilateral(const ProjSubspace& e, const std::array<Vec8, 4>& primal_quad,
                                     const std::array<Vec8, 4>& side_points, const Mat8& omega,
                                     const Context& ctx = {});

// Max |omega(v_i, v_j)| residual over the ten vertex/side conditions of a
// quadrilateral on the quadric, unit-normalized.
double quadrilateral_on_quadric_residual(const NullQuadrilateral& q, const Mat8& omega);

}  // namespace studylink
