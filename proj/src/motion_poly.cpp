#include "studylink/motion_poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>

namespace studylink {

double MotionPoly::abs() const {
    double m = 0.0;
    for (const auto& c : coeff) m = std::max(m, c.abs());
    return m;
}

MotionPoly MotionPoly::trimmed(double rel_eps) const {
    const double scale = abs();
    std::vector<DualQuaternion> c = coeff;
    while (c.size() > 1 && c.back().abs() <= rel_eps * scale) c.pop_back();
    return MotionPoly(std::move(c));
}

MotionPoly MotionPoly::operator+(const MotionPoly& o) const {
    std::vector<DualQuaternion> c(std::max(coeff.size(), o.coeff.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i < coeff.size()) c[i] = c[i] + coeff[i];
        if (i < o.coeff.size()) c[i] = c[i] + o.coeff[i];
    }
    return MotionPoly(std::move(c));
}

MotionPoly MotionPoly::operator-(const MotionPoly& o) const {
    std::vector<DualQuaternion> c(std::max(coeff.size(), o.coeff.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i < coeff.size()) c[i] = c[i] + coeff[i];
        if (i < o.coeff.size()) c[i] = c[i] - o.coeff[i];
    }
    return MotionPoly(std::move(c));
}

MotionPoly MotionPoly::operator*(const MotionPoly& o) const {
    std::vector<DualQuaternion> c(coeff.size() + o.coeff.size() - 1);
    for (std::size_t i = 0; i < coeff.size(); ++i)
        for (std::size_t j = 0; j < o.coeff.size(); ++j) c[i + j] = c[i + j] + coeff[i] * o.coeff[j];
    return MotionPoly(std::move(c));
}

MotionPoly MotionPoly::operator*(const Scalar& s) const {
    std::vector<DualQuaternion> c = coeff;
    for (auto& q : c) q = q * s;
    return MotionPoly(std::move(c));
}

MotionPoly MotionPoly::operator*(double s) const { return (*this) * Scalar(s); }

DualQuaternion MotionPoly::eval(const Scalar& t) const {
    DualQuaternion acc = coeff.back();
    for (auto it = coeff.rbegin() + 1; it != coeff.rend(); ++it) acc = acc * t + *it;
    return acc;
}

DualQuaternion MotionPoly::eval(const Param& p) const { return p.inf ? coeff.back() : eval(p.t); }

double mp_distance(const MotionPoly& a, const MotionPoly& b) {
    const MotionPoly at = a.trimmed(), bt = b.trimmed();
    const std::size_t n = std::max(at.coeff.size(), bt.coeff.size());
    Eigen::VectorXcd va = Eigen::VectorXcd::Zero(8 * n), vb = Eigen::VectorXcd::Zero(8 * n);
    for (std::size_t i = 0; i < at.coeff.size(); ++i) va.segment<8>(8 * i) = at.coeff[i].vec();
    for (std::size_t i = 0; i < bt.coeff.size(); ++i) vb.segment<8>(8 * i) = bt.coeff[i].vec();
    const double na = va.norm(), nb = vb.norm();
    if (na == 0.0 || nb == 0.0) return 1.0;
    const double c = std::abs(va.dot(vb)) / (na * nb);
    return std::sqrt(1.0 - std::min(1.0, c * c));
}

double RealPoly::eval(double t) const {
    double acc = coeff.back();
    for (auto it = coeff.rbegin() + 1; it != coeff.rend(); ++it) acc = acc * t + *it;
    return acc;
}

Scalar RealPoly::eval(const Scalar& t) const {
    Scalar acc(coeff.back());
    for (auto it = coeff.rbegin() + 1; it != coeff.rend(); ++it) acc = acc * t + Scalar(*it);
    return acc;
}

RealPoly RealPoly::operator*(const RealPoly& o) const {
    std::vector<double> c(coeff.size() + o.coeff.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeff.size(); ++i)
        for (std::size_t j = 0; j < o.coeff.size(); ++j) c[i + j] += coeff[i] * o.coeff[j];
    return RealPoly(std::move(c));
}

RealPoly RealPoly::trimmed(double rel_eps) const {
    double scale = 0.0;
    for (double c : coeff) scale = std::max(scale, std::abs(c));
    std::vector<double> c = coeff;
    while (c.size() > 1 && std::abs(c.back()) <= rel_eps * scale) c.pop_back();
    return RealPoly(std::move(c));
}

RealPoly norm_poly(const MotionPoly& c, const Context& ctx) {
    MotionPoly conj_poly;
    conj_poly.coeff.reserve(c.coeff.size());
    for (const auto& q : c.coeff) conj_poly.coeff.push_back(q.conj());
    const MotionPoly nu = c * conj_poly;
    const double scale = std::max(1e-300, nu.abs());
    std::vector<double> out(nu.coeff.size());
    for (std::size_t i = 0; i < nu.coeff.size(); ++i) {
        const DualQuaternion& q = nu.coeff[i];
        const double residue =
            std::sqrt(std::norm(q.p.x) + std::norm(q.p.y) + std::norm(q.p.z) + std::norm(q.d.w) +
                      std::norm(q.d.x) + std::norm(q.d.y) + std::norm(q.d.z)) +
            std::abs(q.p.w.imag());
        if (residue > 1e-8 * scale)
            fail(Errc::not_a_motion_polynomial,
                 "norm coefficient " + std::to_string(i) + " has residue " + std::to_string(residue));
        out[i] = q.p.w.real();
    }
    return RealPoly(std::move(out)).trimmed();
}

std::vector<std::complex<double>> real_poly_roots(const RealPoly& p) {
    const RealPoly q = p.trimmed();
    const int n = q.degree();
    if (n < 1) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) comp(i + 1, i) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -q.coeff[i] / q.coeff[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<std::complex<double>> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()[i];
    return roots;
}

QuadraticFactors quadratic_factors(const RealPoly& nu_in, const Context& ctx) {
    const RealPoly nu = nu_in.trimmed();
    if (nu.degree() < 2 || nu.degree() % 2 != 0)
        fail(Errc::bad_input, "norm polynomial must have positive even degree");
    if (nu.coeff.back() <= 0.0) fail(Errc::bad_input, "norm polynomial must have positive leading coefficient");

    auto roots = real_poly_roots(nu);
    std::vector<std::complex<double>> upper;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r)))
            fail(Errc::real_root_present, "real root near t = " + std::to_string(r.real()));
        if (r.imag() > 0) upper.push_back(r);
    }
    if (static_cast<int>(upper.size()) * 2 != nu.degree())
        fail(Errc::numerical_failure, "conjugate pairing of norm roots failed");
    std::sort(upper.begin(), upper.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    QuadraticFactors out;
    for (const auto& r : upper)
        out.quads.push_back(RealPoly({std::norm(r), -2.0 * r.real(), 1.0}));
    for (std::size_t i = 0; i < out.quads.size(); ++i)
        for (std::size_t j = i + 1; j < out.quads.size(); ++j) {
            const double d = std::abs(out.quads[i].coeff[0] - out.quads[j].coeff[0]) +
                             std::abs(out.quads[i].coeff[1] - out.quads[j].coeff[1]);
            const double s = 1.0 + std::abs(out.quads[i].coeff[0]) + std::abs(out.quads[i].coeff[1]);
            if (d <= 1e-7 * s) out.repeated = true;
        }
    return out;
}

std::pair<MotionPoly, MotionPoly> div_rem_quadratic(const MotionPoly& c, const RealPoly& m) {
    if (m.degree() != 2 || std::abs(m.coeff[2] - 1.0) > 1e-12)
        fail(Errc::bad_input, "divisor must be a monic real quadratic");
    std::vector<DualQuaternion> rem = c.coeff;
    const int n = static_cast<int>(rem.size()) - 1;
    if (n < 2) return {MotionPoly::constant(DualQuaternion(0.0)), MotionPoly(rem)};
    std::vector<DualQuaternion> quot(n - 1);
    for (int i = n; i >= 2; --i) {
        const DualQuaternion q = rem[i];
        quot[i - 2] = q;
        rem[i - 1] = rem[i - 1] - q * m.coeff[1];
        rem[i - 2] = rem[i - 2] - q * m.coeff[0];
        rem[i] = DualQuaternion(0.0);
    }
    rem.resize(2);
    return {MotionPoly(std::move(quot)), MotionPoly(std::move(rem))};
}

namespace {

// Inverse of a dual quaternion with invertible (nonzero-norm) primal part.
DualQuaternion dq_inverse(const DualQuaternion& q, const Context& ctx) {
    const DualNumber n = norm_unchecked(q);
    if (std::abs(n.p) <= 1e-12 * q.abs() * q.abs())
        fail(Errc::non_invertible_lead, "dual quaternion has vanishing primal norm");
    const DualQuaternion qc = q.conj();
    const Scalar inv_p = 1.0 / n.p;
    const Scalar inv_d = -n.d / (n.p * n.p);
    // conj(q) * (inv_p + eps*inv_d)
    return {qc.p * inv_p, qc.p * inv_d + qc.d * inv_p};
}

}  // namespace

DualQuaternion right_factor(const MotionPoly& c, const RealPoly& m, const Context& ctx) {
    const auto [quot, rem] = div_rem_quadratic(c, m);
    (void)quot;
    if (rem.coeff.size() < 2 || rem.coeff[1].abs() <= 1e-10 * std::max(1.0, c.abs()))
        fail(Errc::non_invertible_lead, "remainder is constant; no unique right factor");
    const DualQuaternion a = rem.coeff[1];
    const DualQuaternion b = rem.coeff[0];
    return -(dq_inverse(a, ctx) * b);
}

MotionPoly divide_linear_right(const MotionPoly& c, const DualQuaternion& h) {
    const int n = c.degree();
    if (n < 1) fail(Errc::bad_input, "cannot divide a constant by a linear factor");
    std::vector<DualQuaternion> q(n);
    q[n - 1] = c.coeff[n];
    for (int i = n - 1; i >= 1; --i) q[i - 1] = c.coeff[i] + q[i] * h;
    return MotionPoly(std::move(q));
}

MotionPoly Factorization::remultiply() const {
    MotionPoly p = MotionPoly::constant(lead);
    for (const auto& h : factors) p = p * MotionPoly::linear(h);
    return p;
}

std::vector<Factorization> factorize_motion_poly(const MotionPoly& c_in, const Context& ctx) {
    MotionPoly c = c_in.trimmed();
    const int deg = c.degree();
    if (deg != 2 && deg != 3) fail(Errc::bad_input, "factorization implemented for degrees 2 and 3");

    // Make the leading coefficient invertible (generic reparametrizations
    // succeed with probability 1), then scale out a scalar lead when possible.
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int attempt = 0; attempt < 6; ++attempt) {
        const DualQuaternion lead = c.coeff.back();
        if (std::abs(norm_unchecked(lead).p) > 1e-10 * lead.abs() * lead.abs()) break;
        if (attempt == 5) fail(Errc::non_generic, "leading coefficient not invertible after reparametrization");
        double a, b, cc, d;
        do {
            a = uni(rng), b = uni(rng), cc = uni(rng), d = uni(rng);
        } while (std::abs(a * d - b * cc) < 0.1);
        c = mobius_reparam(c, a, b, cc, d).trimmed();
        if (c.degree() != deg) fail(Errc::non_generic, "degree dropped under reparametrization");
    }
    {
        const DualQuaternion lead = c.coeff.back();
        const DualQuaternion non_scalar = lead - DualQuaternion(lead.p.w);
        if (non_scalar.abs() <= 1e-10 * lead.abs()) c = c * (1.0 / lead.p.w);
    }

    const RealPoly nu = norm_poly(c, ctx);
    const QuadraticFactors qf = quadratic_factors(nu, ctx);
    const int k = static_cast<int>(qf.quads.size());
    if (k != deg) fail(Errc::non_generic, "norm polynomial does not split into degree-many quadratics");

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Factorization> out;
    const double scale = std::max(1.0, c.abs());
    do {
        try {
            MotionPoly rest = c;
            std::vector<DualQuaternion> factors(k);
            for (int pos = k - 1; pos >= 1; --pos) {
                const DualQuaternion h = right_factor(rest, qf.quads[perm[pos]], ctx);
                factors[pos] = h;
                rest = divide_linear_right(rest, h);
            }
            const DualQuaternion a = rest.coeff[1];
            factors[0] = -(dq_inverse(a, ctx) * rest.coeff[0]);
            Factorization f;
            f.factors = std::move(factors);
            f.lead = a;
            f.permutation = perm;
            const MotionPoly product = f.remultiply();
            const MotionPoly diff = product - c;
            if (diff.abs() > 1e-8 * scale) continue;
            bool dup = false;
            for (const auto& g : out) {
                double d = 0.0;
                for (int i = 0; i < k; ++i) d = std::max(d, (g.factors[i] - f.factors[i]).abs());
                if (d <= 1e-8 * scale) {
                    dup = true;
                    break;
                }
            }
            if (!dup) out.push_back(std::move(f));
        } catch (const Error&) {
            // non-generic permutation; skip
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (out.empty()) fail(Errc::non_generic, "no permutation produced a valid factorization");
    std::sort(out.begin(), out.end(),
              [](const Factorization& a, const Factorization& b) { return a.permutation < b.permutation; });
    return out;
}

std::vector<Factorization> factorize_cubic(const MotionPoly& c, const Context& ctx) {
    if (c.trimmed().degree() != 3) fail(Errc::bad_input, "factorize_cubic needs a degree-3 polynomial");
    return factorize_motion_poly(c, ctx);
}

MotionPoly mobius_reparam(const MotionPoly& c, double a, double b, double cc, double d) {
    if (std::abs(a * d - b * cc) == 0.0) fail(Errc::bad_input, "reparametrization matrix is singular");
    const int n = c.degree();
    // powers of (a t + b) and (c t + d) as real polynomials
    std::vector<std::vector<double>> p1(n + 1), p2(n + 1);
    p1[0] = {1.0};
    p2[0] = {1.0};
    for (int k = 1; k <= n; ++k) {
        p1[k].assign(k + 1, 0.0);
        p2[k].assign(k + 1, 0.0);
        for (int i = 0; i < k; ++i) {
            p1[k][i] += b * p1[k - 1][i];
            p1[k][i + 1] += a * p1[k - 1][i];
            p2[k][i] += d * p2[k - 1][i];
            p2[k][i + 1] += cc * p2[k - 1][i];
        }
    }
    std::vector<DualQuaternion> out(n + 1);
    for (int k = 0; k <= n; ++k) {
        // c_k * (a t + b)^k (c t + d)^(n-k)
        std::vector<double> w(n + 1, 0.0);
        for (std::size_t i = 0; i < p1[k].size(); ++i)
            for (std::size_t j = 0; j < p2[n - k].size(); ++j) w[i + j] += p1[k][i] * p2[n - k][j];
        for (int i = 0; i <= n; ++i) out[i] = out[i] + c.coeff[k] * w[i];
    }
    return MotionPoly(std::move(out));
}

}  // namespace studylink
