#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msls/gfield.hpp"
#include "msls/linalg.hpp"
#include "msls/linpoly.hpp"
#include "msls/projgeom.hpp"

namespace msls {

class ConfigError : public std::runtime_error {
public:
    enum class Kind { VertexMeetsSigma, DegenerateFrame, DegenerateBasis, RankNotFive, RankNotFour, InconsistentSystem, MZero };
    ConfigError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

enum class ConfigClass { InvalidVertex, NonScattered, Pseudoregulus, LP_ConfigI, LP_ConfigII, NewCandidate };

inline std::string class_name(ConfigClass c) {
    switch (c) {
        case ConfigClass::InvalidVertex: return "InvalidVertex";
        case ConfigClass::NonScattered: return "NonScattered";
        case ConfigClass::Pseudoregulus: return "Pseudoregulus";
        case ConfigClass::LP_ConfigI: return "LP_ConfigI";
        case ConfigClass::LP_ConfigII: return "LP_ConfigII";
        case ConfigClass::NewCandidate: return "NewCandidate";
    }
    return "?";
}

inline bool is_lp(ConfigClass c) { return c == ConfigClass::LP_ConfigI || c == ConfigClass::LP_ConfigII; }

struct LambdaMu {
    Vec u, v;
    Fe lambda, mu;
    bool renormalized = false;
    std::array<Fe, 5> a, b;  // coefficient lists of the two norm identities
    bool lincomb_ok = false, eq1_ok = false, eq2_ok = false;
};

struct U4Coords {
    std::array<Fe, 5> abcde;  // u4 in the basis u, u1, u2, u3, v4
    Mat basis_inv;            // rows give coordinates in that basis
    Fe howe_residual;
    Fe factor_I, factor_II;   // the two factors of the LP product
    bool eqB_agrees = false;
    std::optional<bool> closed_form_ok;
};

struct Rk5Form {
    enum class Branch { MuOne, NormNotOne } branch = Branch::MuOne;
    Fe e, alpha, beta;
    std::optional<Fe> rho;
    bool eq23b_ok = false, coord_e_ok = false, e_one_is_lp = true, lambda_one = true;
    bool e_in_fq = false, rho_in_fq = true, howe3case3_ok = true, e23c_ok = true, a3b1_ok = true;
    LinearizedPoly g, h;  // emitted normal form (g(x), h(x))
    bool set_equal = false;
};

struct Rk44Form {
    bool lambda_one = true;
    Fe lambda, w, eta, k;
    bool abcdw_ok = false, rkabcd_ok = false, trace_ok = true, norm_ok = true, w_is_lambda_minus_one = true;
    bool set_equal = false;
};

struct ConfigReport {
    Subspace gamma;
    Model model;
    ConfigClass cls = ConfigClass::InvalidVertex;
    bool scattered = false;
    std::optional<Vec> witness;  // point of Gamma of rank <= 2
    int witness_rank = 0;
    std::optional<Vec> A, B;
    int rkA = 0, rkB = 0;
    bool lineI = false, lineII = false;
    bool summary_consistent = true;
    std::optional<LambdaMu> lm;
    std::optional<U4Coords> u4;
    std::optional<Rk5Form> rk5;
    std::optional<Rk44Form> rk44;
};

namespace detail {

inline Fe fr(const Fe& x, int k, int s) { return x.frob(k * s); }

// Coefficients expressing b in the given vectors; nullopt unless unique.
inline std::optional<Vec> coords_in(const Field& F, const std::vector<Vec>& vs, const Vec& b) {
    const std::size_t n = b.size(), k = vs.size();
    Mat m(n, Vec(k + 1));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < k; ++c) m[r][c] = vs[c][r];
        m[r][k] = b[r];
    }
    Echelon e = rref(std::move(m));
    if (e.pivots.size() != k) return std::nullopt;
    for (int p : e.pivots)
        if (p == static_cast<int>(k)) return std::nullopt;
    Vec x = zero_vec(F, k);
    for (std::size_t r = 0; r < k; ++r) x[static_cast<std::size_t>(e.pivots[r])] = e.rows[r][k];
    return x;
}

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    std::int64_t g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
    while (a1) {
        std::int64_t t = g / a1;
        std::swap(g, a1);
        a1 -= t * g;
        std::swap(x, x1);
        x1 -= t * x;
    }
    if (g != 1) throw std::logic_error("not invertible");
    return ((x % m) + m) % m;
}

inline Mat columns(const std::vector<Vec>& cols) {
    Mat m(cols[0].size(), Vec(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < cols[c].size(); ++r) m[r][c] = cols[c][r];
    return m;
}

inline Vec unit(const Field& F, int i) {
    Vec v = zero_vec(F, 5);
    v[static_cast<std::size_t>(i)] = Fe::one(F);
    return v;
}

}  // namespace detail

// Smallest-log z with z^{q^k - 1} = target (k = 1..4), if any.
inline std::optional<Fe> frob_ratio_root(const Field& F, int k, const Fe& target) {
    if (target.is_zero()) return std::nullopt;
    const std::int64_t d = F.q() - 1, N = F.cosets();
    std::int64_t m = target.raw().v;
    if (m % d) return std::nullopt;
    std::int64_t A = ((static_cast<std::int64_t>(F.qpow(k)) - 1) / d) % N;
    std::int64_t r = (m / d) % N * detail::mod_inverse(A, N) % N;
    return Fe(F, F.gen_pow(static_cast<std::uint64_t>(r)));
}

// A point of Gamma of rank <= 2, found through a collision of the projection of Sigma.
inline std::optional<Vec> low_rank_point(const Field& F, const Subspace& gamma, const Model& m) {
    Projector p = make_projector(F, gamma);
    auto pts = sigma_points(F, m);
    std::unordered_map<std::uint64_t, std::size_t> seen;
    seen.reserve(pts.size() * 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto [a, b] = p.coords(pts[i]);
        if (a.is_zero() && b.is_zero()) throw ConfigError(ConfigError::Kind::VertexMeetsSigma, "VertexMeetsSigma");
        auto [it, fresh] = seen.emplace(pg1_key(F, a.raw(), b.raw()), i);
        if (fresh) continue;
        Subspace w = meet(gamma, span(point_of(pts[it->second]), point_of(pts[i])), F);
        return w.point();
    }
    return std::nullopt;
}

struct ABPoints {
    Subspace A, B;
    bool pseudoregulus() const { return A.vdim() >= 2 || B.vdim() >= 2; }
};

inline ABPoints extract_AB(const Field& F, const Subspace& gamma, const Model& m) {
    return {meet(gamma, sigma(m, gamma, 4), F), meet(gamma, sigma(m, gamma, 3), F)};
}

inline ConfigReport classify(const Field& F, const Subspace& gamma, const Model& m, bool known_scattered = false) {
    ConfigReport r;
    r.gamma = gamma;
    r.model = m;
    if (gamma.vdim() != 3) return r;
    r.scattered = true;
    if (!known_scattered) {
        if (auto w = low_rank_point(F, gamma, m)) {
            r.scattered = false;
            r.cls = ConfigClass::NonScattered;
            r.witness = *w;
            r.witness_rank = point_rank(m, *w);
        }
    }
    ABPoints ab = extract_AB(F, gamma, m);
    if (ab.pseudoregulus()) {
        if (r.scattered) r.cls = ConfigClass::Pseudoregulus;
        return r;
    }
    if (ab.A.empty() || ab.B.empty()) {
        if (r.scattered) throw ConfigError(ConfigError::Kind::InconsistentSystem, "A or B missing on a scattered plane");
        return r;
    }
    r.A = ab.A.point();
    r.B = ab.B.point();
    r.rkA = point_rank(m, *r.A);
    r.rkB = point_rank(m, *r.B);
    auto line = [&](const Vec& x, int i, int j) { return span(point_of(sigma(m, x, i)), point_of(sigma(m, x, j))); };
    r.lineI = !meet(line(*r.A, 2, 4), gamma, F).empty();
    r.lineII = !meet(line(*r.B, 3, 4), gamma, F).empty();
    if (r.scattered) {
        r.cls = r.lineI ? ConfigClass::LP_ConfigI : r.lineII ? ConfigClass::LP_ConfigII : ConfigClass::NewCandidate;
        if ((r.rkA == 5 || r.rkB == 5) && r.cls == ConfigClass::NewCandidate) r.summary_consistent = false;
    }
    return r;
}

struct Finding {
    std::string name;
    bool pass;
};

inline std::vector<Finding> invariant_battery(const Field& F, const ConfigReport& r) {
    std::vector<Finding> out;
    if (!r.A || !r.B) return {{"points A and B exist", false}};
    const Model& m = r.model;
    std::vector<Vec> As, Bs;
    for (int i = 0; i < 5; ++i) {
        As.push_back(normalized(sigma(m, *r.A, i)));
        Bs.push_back(normalized(sigma(m, *r.B, i)));
    }
    std::vector<Vec> ten = As;
    ten.insert(ten.end(), Bs.begin(), Bs.end());
    bool distinct = true;
    for (std::size_t i = 0; i < ten.size(); ++i)
        for (std::size_t j = i + 1; j < ten.size(); ++j) distinct = distinct && ten[i] != ten[j];
    out.push_back({"ten points distinct", distinct});

    std::vector<Vec> frame{As[0], As[1], Bs[0], Bs[2]};
    out.push_back({"A A1 B B2 not collinear", rank(Mat(frame.begin(), frame.end())) == 3});
    bool frame_ok = true;
    for (int skip = 0; skip < 4; ++skip) {
        Mat t;
        for (int i = 0; i < 4; ++i)
            if (i != skip) t.push_back(frame[i]);
        frame_ok = frame_ok && rank(t) == 3;
    }
    for (const Vec& x : frame) frame_ok = frame_ok && r.gamma.contains(x);
    out.push_back({"A A1 B B2 frame of gamma", frame_ok});

    auto four_indep = [](const std::vector<Vec>& pts) {
        for (int skip = 0; skip < 5; ++skip) {
            Mat t;
            for (int i = 0; i < 5; ++i)
                if (i != skip) t.push_back(pts[i]);
            if (rank(t) != 4) return false;
        }
        return true;
    };
    out.push_back({"any four A_i independent", four_indep(As)});
    out.push_back({"any four B_i independent", four_indep(Bs)});
    out.push_back({"rank A at least 4", r.rkA >= 4});
    out.push_back({"rank B at least 4", r.rkB >= 4});

    auto P = [](const Vec& x) { return point_of(x); };
    Subspace E = meet(span(P(As[0]), P(Bs[0])), span(P(As[1]), P(Bs[2])), F);
    Subspace Fp = meet(span(P(As[0]), P(Bs[2])), span(P(As[1]), P(Bs[0])), F);
    bool ef_ok = E.vdim() == 1 && Fp.vdim() == 1;
    if (ef_ok) {
        bool ef_lp = span(P(As[2]), P(As[4])).contains(E.point()) || span(P(Bs[3]), P(Bs[4])).contains(Fp.point());
        ef_ok = ef_lp == (r.lineI || r.lineII);
    }
    out.push_back({"E/F test agrees with LP lines", ef_ok});
    return out;
}

inline LambdaMu lambda_mu_extract(const Field& F, const ConfigReport& r) {
    if (!r.A || !r.B) throw ConfigError(ConfigError::Kind::DegenerateFrame, "DegenerateFrame");
    const Model& m = r.model;
    const int s = m.s;
    using detail::fr;
    Vec u = normalized(*r.A), v0 = normalized(*r.B);
    auto c = detail::coords_in(F, {u, sigma(m, u, 1), sigma(m, v0, 2)}, v0);
    if (!c || (*c)[0].is_zero() || (*c)[1].is_zero() || (*c)[2].is_zero())
        throw ConfigError(ConfigError::Kind::DegenerateFrame, "DegenerateFrame");
    Fe l = (*c)[0];
    LambdaMu out;
    out.u = u;
    out.v = l.inv() * v0;
    out.lambda = -(*c)[1] / l;
    out.mu = (*c)[2] * fr(l, 2, s) / l;
    if (out.mu.norm().is_one() && !out.mu.is_one()) {
        Fe rho = *frob_ratio_root(F, (2 * s) % 5, out.mu);
        out.u = rho * out.u;
        out.v = rho * out.v;
        out.lambda = out.lambda * rho / fr(rho, 1, s);
        out.mu = Fe::one(F);
        out.renormalized = true;
    }
    const Fe one = Fe::one(F), L = out.lambda, M = out.mu;
    auto f = [&](const Fe& x, int k) { return fr(x, k, s); };
    out.lincomb_ok = out.v == out.u - L * sigma(m, out.u, 1) + M * sigma(m, out.v, 2);

    out.a = {one - f(L, 4) * f(M, 2) * M, f(M, 4) * f(M, 2) * M - L, M * (one - f(L, 1) * f(M, 4) * f(M, 2)),
             M * (f(M, 4) * f(M, 2) * f(M, 1) - f(L, 2)), f(M, 2) * M * (one - f(L, 3) * f(M, 4) * f(M, 1))};
    out.b = {one - f(L, 2) * f(L, 1) * L * f(M, 3), L * (one - f(L, 3) * f(L, 2) * f(L, 1) * f(M, 4)),
             f(L, 1) * L - M, L * (f(L, 2) * f(L, 1) - f(M, 1)), f(L, 1) * L * (f(L, 3) * f(L, 2) - f(M, 2))};
    Vec lhs1 = (one - M.norm()) * out.v, lhs2 = (one - L.norm()) * out.u;
    Vec rhs1 = zero_vec(F, 5), rhs2 = zero_vec(F, 5);
    for (int i = 0; i < 5; ++i) {
        rhs1 = rhs1 + out.a[i] * sigma(m, out.u, i);
        rhs2 = rhs2 + out.b[i] * sigma(m, out.v, i);
    }
    out.eq1_ok = lhs1 == rhs1;
    out.eq2_ok = lhs2 == rhs2;
    return out;
}

inline U4Coords u4_coordinates(const Field& F, const ConfigReport& r, const LambdaMu& lm) {
    const Model& m = r.model;
    const int s = m.s;
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    std::vector<Vec> basis{lm.u, sigma(m, lm.u, 1), sigma(m, lm.u, 2), sigma(m, lm.u, 3), sigma(m, lm.v, 4)};
    auto inv = inverse(detail::columns(basis), F);
    if (!inv) throw ConfigError(ConfigError::Kind::DegenerateBasis, "DegenerateBasis");
    U4Coords out;
    out.basis_inv = *inv;
    Vec x = mat_vec(*inv, sigma(m, lm.u, 4));
    for (int i = 0; i < 5; ++i) out.abcde[i] = x[i];
    const Fe one = Fe::one(F), L = lm.lambda, M = lm.mu;
    const Fe &c = x[2], &d = x[3], &e = x[4];
    out.howe_residual = (one - f(M, 4) * f(M, 1) * f(L, 3)) * e - (one - M.norm());
    out.factor_I = f(L, 2) * e + f(M, 2) * d;
    out.factor_II = one - f(L, 3) * d - f(L, 3) * f(L, 2) * c;
    bool lp = r.lineI || r.lineII;
    out.eqB_agrees = (out.factor_I.is_zero() == r.lineI) && (out.factor_II.is_zero() == r.lineII) &&
                     ((out.factor_I * out.factor_II).is_zero() == lp);
    if (!(L * f(M, 3) * f(M, 1)).is_one()) {
        Fe mi = (f(M, 4) * f(M, 1)).inv();  // mu^{-q^{4s}-q^s}
        Fe m1 = f(M, 1).inv();
        Fe k = f(L, 3) - mi;
        std::array<Fe, 5> rhs{f(M, 3) - f(L, 4) * mi, -L * f(M, 3) + m1, f(M, 3) * M - f(L, 1) * m1,
                              one - f(L, 2) * f(M, 3) * M, f(M, 3) * f(M, 2) * M - mi};
        bool ok = true;
        for (int i = 0; i < 5; ++i) ok = ok && k * x[i] == rhs[i];
        out.closed_form_ok = ok;
    }
    return out;
}

// Functionals of the projection onto x0 = x1 = x4 = 0 in the basis u, u1, u2, u3, v4.
inline std::pair<Vec, Vec> basis_projection(const Field& F, const ConfigReport& r, const LambdaMu& lm,
                                            const U4Coords& c) {
    (void)F;
    const int s = r.model.s;
    Fe m2 = detail::fr(lm.mu, 2, s), l2 = detail::fr(lm.lambda, 2, s);
    const Mat& bi = c.basis_inv;
    return {m2 * bi[2] - bi[4], m2 * bi[3] + l2 * bi[4]};
}

inline LinearSet basis_projection_set(const Field& F, const ConfigReport& r, const LambdaMu& lm, const U4Coords& c) {
    auto [l0, l1] = basis_projection(F, r, lm, c);
    return project_sigma(F, r.model, l0, l1);
}

inline LinearizedPoly poly2(int s, std::initializer_list<std::pair<int, Elem>> terms, const Field& F) {
    LinearizedPoly p;
    for (auto [k, a] : terms) {
        auto i = static_cast<std::size_t>(((k * s) % 5 + 5) % 5);
        p.c[i] = F.add(p.c[i], a);
    }
    return p;
}

// L_{alpha,beta,s} = {(x - alpha x^{q^{2s}}, x^{q^s} - beta x^{q^{2s}})}
inline std::pair<LinearizedPoly, LinearizedPoly> alpha_beta_pair(const Field& F, Elem alpha, Elem beta, int s) {
    return {poly2(s, {{0, F.one()}, {2, F.neg(alpha)}}, F), poly2(s, {{1, F.one()}, {2, F.neg(beta)}}, F)};
}

inline Rk5Form canonical_rk5(const Field& F, const ConfigReport& r, const LambdaMu& lm, const U4Coords& c) {
    if (r.rkA != 5) throw ConfigError(ConfigError::Kind::RankNotFive, "RankNotFive");
    const int s = r.model.s;
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    const Fe one = Fe::one(F), L = lm.lambda, M = lm.mu;
    const auto& [a, b, cc, d, e] = c.abcde;
    if (e.is_zero()) throw ConfigError(ConfigError::Kind::RankNotFive, "RankNotFive");
    Rk5Form out;
    out.e = e;
    Fe mq4i = f(M, 4).inv();
    std::array<Fe, 5> eq23a{a * (f(cc, 2) - mq4i * f(e, 2)) + f(d, 2) + f(L, 4) * mq4i * f(e, 2),
                            b * (f(cc, 2) - mq4i * f(e, 2)) - one, cc * (f(cc, 2) - mq4i * f(e, 2)) + f(a, 2),
                            d * (f(cc, 2) - mq4i * f(e, 2)) + f(b, 2), e * (f(cc, 2) - mq4i * f(e, 2)) + mq4i * f(e, 2)};
    bool sys_a = true;
    for (const Fe& x : eq23a) sys_a = sys_a && x.is_zero();
    out.eq23b_ok = sys_a && a == (f(M, 2) * M).inv() * e / f(e, 1) * (f(e, 1) - one) &&
                   b == -f(M, 4) * e / f(e, 2) && cc == f(M, 2).inv() * e / f(e, 3) * (f(e, 3) - one) &&
                   d == -f(M, 4) * f(M, 1) * e / f(e, 4);
    out.coord_e_ok = (a * f(b, 3) + f(cc, 3)).is_zero() && (f(b, 3) * b + f(d, 3)).is_zero() &&
                     f(b, 3) * cc + f(e, 3) == one && (f(a, 3) + f(b, 3) * d - f(L, 2) * f(e, 3)).is_zero() &&
                     (f(b, 3) * e + f(M, 2) * f(e, 3)).is_zero();
    if (!out.eq23b_ok || !out.coord_e_ok)
        throw ConfigError(ConfigError::Kind::InconsistentSystem, "InconsistentSystem");
    if (e.is_one()) out.e_one_is_lp = is_lp(r.cls) || !r.scattered;
    out.e_in_fq = e.in_base();
    LinearSet P = basis_projection_set(F, r, lm, c);
    if (M.is_one()) {
        out.branch = Rk5Form::Branch::MuOne;
        out.lambda_one = L.is_one();
        out.alpha = one;
        out.beta = one - f(e, 4);
        std::tie(out.g, out.h) = alpha_beta_pair(F, out.alpha.raw(), out.beta.raw(), s);
        LinearSet T = transform(F, P, {{{f(e, 3).raw(), F.zero()}, {F.zero(), f(e, 4).raw()}}});
        out.set_equal = T == linear_set_of_pair(F, out.g, out.h);
        return out;
    }
    out.branch = Rk5Form::Branch::NormNotOne;
    Fe rho = M / (f(L, 1) * L);
    out.rho = rho;
    out.rho_in_fq = rho.in_base();
    Fe NL = L.norm();
    Fe den = one - rho.pow(2) * NL;
    out.howe3case3_ok = !den.is_zero() && e == (one - rho.pow(5) * NL * NL) / den;
    out.e23c_ok = a == (f(M, 2) * M).inv() * (e - one) && b == -f(M, 4) && cc == f(M, 2).inv() * (e - one) &&
                  d == -f(M, 4) * f(M, 1);
    const Model& m = r.model;
    Subspace a3b1 = span(point_of(sigma(m, lm.u, 3)), point_of(sigma(m, lm.v, 1)));
    out.a3b1_ok = meet(a3b1, r.gamma, F).vdim() == 1;
    out.alpha = f(M, 2).inv();
    out.beta = (f(L, 2) - f(M, 4) * f(M, 2) * f(M, 1)) / (f(M, 2) * (f(L, 2) * f(M, 3) * M - one));
    std::tie(out.g, out.h) = alpha_beta_pair(F, out.alpha.raw(), out.beta.raw(), s);
    Fe k = one - M.norm();
    Fe d1 = k / ((one - f(L, 1) * f(M, 4) * f(M, 2)) * f(M, 2));
    Fe d2 = k / (f(M, 2) * (one - f(L, 2) * f(M, 3) * M));
    LinearSet T = transform(F, P, {{{d1.raw(), F.zero()}, {F.zero(), d2.raw()}}});
    out.set_equal = T == linear_set_of_pair(F, out.g, out.h);
    return out;
}

// F_q-basis of the trace-zero hyperplane.
inline std::vector<Elem> trace_zero_basis(const Field& F) {
    std::array<Elem, 5> ones;
    ones.fill(F.one());
    return fq_linear_solve(F, ones).basis;
}

// {(eta y + theta, y + y^{q^{4s}}) : theta in F_q, Tr(y) = 0}
inline LinearSet lambda_one_set(const Field& F, Elem eta, int s) {
    std::array<std::pair<Elem, Elem>, 5> basis;
    basis[0] = {F.one(), F.zero()};
    auto tz = trace_zero_basis(F);
    for (int i = 0; i < 4; ++i) {
        Elem y = tz[i];
        basis[i + 1] = {F.mul(eta, y), F.add(y, F.frob(y, 4 * s))};
    }
    return linear_set_of_span(F, basis);
}

// F(x) = k(x^{q^s} + x^{q^{3s}}) + x^{q^{2s}} + x^{q^{4s}}
inline LinearizedPoly c4_poly(const Field& F, Elem k, int s) {
    return poly2(s, {{1, k}, {3, k}, {2, F.one()}, {4, F.one()}}, F);
}

inline Rk44Form rk44_extract(const Field& F, const ConfigReport& r, const LambdaMu& lm, const U4Coords& c) {
    if (r.rkA != 4 || r.rkB != 4) throw ConfigError(ConfigError::Kind::RankNotFour, "RankNotFour");
    const int s = r.model.s;
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    const Fe one = Fe::one(F), L = lm.lambda;
    const auto& [a, b, cc, d, e] = c.abcde;
    if (!e.is_zero() || !lm.mu.is_one()) throw ConfigError(ConfigError::Kind::InconsistentSystem, "InconsistentSystem");
    Rk44Form out;
    out.lambda = L;
    out.lambda_one = L.is_one();
    // b = -w^{1-q^{3s}}  <=>  (1/w)^{q^{3s}-1} = -b
    auto z = frob_ratio_root(F, (3 * s) % 5, -b);
    if (!z) throw ConfigError(ConfigError::Kind::InconsistentSystem, "InconsistentSystem");
    Fe w = z->inv();
    if (!out.lambda_one) {
        Fe w1 = L - one;
        out.w_is_lambda_minus_one = -w1 / f(w1, 3) == b;
        if (out.w_is_lambda_minus_one) w = w1;
    }
    out.w = w;
    Fe w3 = f(w, 3);
    out.abcdw_ok = a == -f(w, 4) / w3 && b == -w / w3 && cc == -f(w, 1) / w3 && d == -f(w, 2) / w3;
    out.rkabcd_ok = (f(L, 3) * f(L, 2) * f(L, 1) * L * a + f(L, 3) * f(L, 2) * f(L, 1) * b + f(L, 3) * f(L, 2) * cc +
                     f(L, 3) * d - one)
                        .is_zero();
    out.eta = f(w, 2);
    LinearSet P = basis_projection_set(F, r, lm, c);
    Fe ei = f(out.eta, 4).inv();
    if (out.lambda_one) {
        out.trace_ok = w.trace().is_zero();
        LinearSet T = transform(F, P, {{{F.zero(), F.one()}, {ei.raw(), F.zero()}}});
        out.set_equal = T == lambda_one_set(F, out.eta.raw(), s);
        return out;
    }
    out.norm_ok = L.norm().is_one();
    out.k = f(L, 2);
    // (P2, P1) followed by [[0, eta^{-q^{4s}}], [1, -eta^{-q^{4s}+1} - eta^{-q^{4s}}]]
    Fe m10 = -(ei * out.eta) - ei;
    LinearSet T = transform(F, P, {{{ei.raw(), F.zero()}, {m10.raw(), F.one()}}});
    out.set_equal = T == linear_set_of_poly(F, c4_poly(F, out.k.raw(), s));
    return out;
}

// Fills the derived data; canonical forms follow the ranks of A and B.
inline void analyze(const Field& F, ConfigReport& r) {
    if (!r.A || !r.B) return;
    r.lm = lambda_mu_extract(F, r);
    r.u4 = u4_coordinates(F, r, *r.lm);
    if (r.rkA == 5) r.rk5 = canonical_rk5(F, r, *r.lm, *r.u4);
    if (r.rkA == 4 && r.rkB == 4) r.rk44 = rk44_extract(F, r, *r.lm, *r.u4);
}

// Semilinear map X -> M X^{q^t}.
struct Semilinear {
    Mat M;
    int t;
};

inline Vec apply_semilinear(const Semilinear& g, const Vec& x) { return mat_vec(g.M, frob(x, g.t)); }

inline Semilinear compose(const Semilinear& g, const Semilinear& h) {
    return {mat_mul(g.M, frob(h.M, g.t)), (g.t + h.t) % 5};
}

// A configuration given by its frame data, realized in the rational model.
struct SyntheticConfig {
    Subspace gamma;
    Model model;
    Fe lambda, mu;
    std::array<Fe, 5> abcde;
};

inline std::optional<SyntheticConfig> synth_from_frame(const Field& F, int s, const Fe& lambda, const Fe& mu,
                                                       const std::array<Fe, 5>& abcde, std::uint64_t seed = 1) {
    s = reduce_s(s);
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    Vec u4(abcde.begin(), abcde.end());
    Vec v2 = zero_vec(F, 5);
    v2[2] = Fe::one(F);
    v2[3] = -f(lambda, 2);
    v2[4] = f(mu, 2);
    Semilinear s3{detail::columns({detail::unit(F, 3), u4, detail::unit(F, 0), detail::unit(F, 1), v2}), (3 * s) % 5};
    Semilinear p = s3;
    for (int i = 1; i < 5; ++i) p = compose(s3, p);
    if (p.M != identity(F, 5)) return std::nullopt;
    Semilinear s1 = compose(s3, s3);
    Mat fixed;
    std::uint64_t x = seed;
    for (int tries = 0; tries < 200 && fixed.size() < 5; ++tries) {
        Vec y(5);
        for (auto& c : y) {
            x = x * 6364136223846793005ULL + 1442695040888963407ULL;
            c = Fe(F, F.element_at((x >> 20) % F.size()));
        }
        Vec t = y, acc = y;
        for (int i = 1; i < 5; ++i) {
            t = apply_semilinear(s1, t);
            acc = acc + t;
        }
        Mat cand = fixed;
        cand.push_back(acc);
        if (rank(cand) > static_cast<int>(fixed.size())) fixed = cand;
    }
    if (fixed.size() < 5) return std::nullopt;
    auto Pinv = inverse(detail::columns(std::vector<Vec>(fixed.begin(), fixed.end())), F);
    Subspace gB(Mat{detail::unit(F, 0), detail::unit(F, 1), v2});
    Mat rows;
    for (const Vec& g : gB.rows()) rows.push_back(mat_vec(*Pinv, g));
    SyntheticConfig out{Subspace(std::move(rows)), Model::rational(s), lambda, mu, abcde};
    Projector pr = make_projector(F, out.gamma);
    for (const Vec& y : sigma_points(F, out.model)) {
        auto [c0, c1] = pr.coords(y);
        if (c0.is_zero() && c1.is_zero()) return std::nullopt;
    }
    return out;
}

// Rank-5 frame with mu = lambda = 1.
inline std::optional<SyntheticConfig> synth_rank5_mu_one(const Field& F, int s, const Fe& e, std::uint64_t seed = 1) {
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    Fe one = Fe::one(F);
    std::array<Fe, 5> abcde{e - e / f(e, 1), -e / f(e, 2), e - e / f(e, 3), -e / f(e, 4), e};
    return synth_from_frame(F, s, one, one, abcde, seed);
}

// Rank-5 frame with N(mu) != 1 and e given by the norm identity.
inline std::optional<SyntheticConfig> synth_rank5_general(const Field& F, int s, const Fe& lambda, const Fe& mu,
                                                          std::uint64_t seed = 1) {
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    Fe one = Fe::one(F);
    Fe den = one - f(lambda, 3) * f(mu, 4) * f(mu, 1);
    if (den.is_zero() || mu.norm().is_one()) return std::nullopt;
    Fe e = (one - mu.norm()) / den;
    if (e.is_zero()) return std::nullopt;
    std::array<Fe, 5> abcde{(f(mu, 2) * mu).inv() * e / f(e, 1) * (f(e, 1) - one), -f(mu, 4) * e / f(e, 2),
                            f(mu, 2).inv() * e / f(e, 3) * (f(e, 3) - one), -f(mu, 4) * f(mu, 1) * e / f(e, 4), e};
    return synth_from_frame(F, s, lambda, mu, abcde, seed);
}

// Rank-4/4 frame: mu = 1, e = 0, coordinates from w.
inline std::optional<SyntheticConfig> synth_rk44(const Field& F, int s, const Fe& lambda, const Fe& w,
                                                 std::uint64_t seed = 1) {
    auto f = [&](const Fe& x, int k) { return detail::fr(x, k, s); };
    if (w.is_zero()) return std::nullopt;
    Fe w3 = f(w, 3);
    std::array<Fe, 5> abcde{-f(w, 4) / w3, -w / w3, -f(w, 1) / w3, -f(w, 2) / w3, Fe::zero(F)};
    return synth_from_frame(F, s, lambda, Fe::one(F), abcde, seed);
}

struct UabResult {
    Vec M;
    bool m_rank_three = false;
    bool cpln = false;
    LinearSet set;
    Subspace gamma;  // <A, B, G> in the rational model, when M is nonzero
};

inline UabResult uab_projection(const Field& F, const std::array<Elem, 3>& a, const std::array<Elem, 3>& b) {
    UabResult out;
    out.M = Vec(3);
    Vec mb(3);
    for (int i = 0; i < 3; ++i) {
        out.M[i] = Fe(F, F.sub(F.frob(a[i], 1), a[i]));
        mb[i] = Fe(F, F.sub(F.frob(b[i], 2), b[i]));
    }
    if (is_zero(out.M)) throw ConfigError(ConfigError::Kind::MZero, "MZero");
    Mat orbit;
    for (int i = 0; i < 5; ++i) orbit.push_back(frob(out.M, i));
    out.m_rank_three = rank(orbit) == 3;
    out.cpln = rank(Mat{out.M, mb}) == 1;
    const Fe &m1 = out.M[0], &m2 = out.M[1], &m3 = out.M[2];
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t kernel = 0;
    for (const Vec& x : sigma_points(F, Model::rational())) {
        Vec z(3);
        for (int i = 0; i < 3; ++i) z[i] = x[0] * Fe(F, b[i]) + x[4] * Fe(F, a[i]) + x[i + 1];
        Fe p0 = m3 * z[0] - m1 * z[2], p1 = m2 * z[0] - m1 * z[1];
        if (p0.is_zero() && p1.is_zero())
            ++kernel;
        else
            ++counts[pg1_key(F, p0.raw(), p1.raw())];
    }
    out.set = linear_set_from_counts(F, std::move(counts), kernel);
    Vec A = zero_vec(F, 5), B = zero_vec(F, 5), G = zero_vec(F, 5);
    A[4] = Fe::one(F);
    B[0] = Fe::one(F);
    for (int i = 0; i < 3; ++i) {
        A[i + 1] = Fe(F, a[i]);
        B[i + 1] = Fe(F, b[i]);
        G[i + 1] = out.M[i];
    }
    out.gamma = Subspace(Mat{A, B, G});
    return out;
}

}  // namespace msls
