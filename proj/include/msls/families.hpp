#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "msls/config.hpp"
#include "msls/gfield.hpp"
#include "msls/linpoly.hpp"

namespace msls {

class FamilyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FamilySpec {
    enum class Kind { Pseudoregulus, LP, AlphaBeta, FormaE, FormaK, C3, C4, F1, Gb };
    Kind kind = Kind::Pseudoregulus;
    int s = 1;
    Elem delta, alpha, beta, e, k, eta, rho, b;

    static FamilySpec make(Kind k, int s) {
        FamilySpec f;
        f.kind = k;
        f.s = s;
        return f;
    }
    static FamilySpec pseudoregulus(int s) { return make(Kind::Pseudoregulus, s); }
    static FamilySpec lp(Elem delta, int s) {
        FamilySpec f = make(Kind::LP, s);
        f.delta = delta;
        return f;
    }
    static FamilySpec alpha_beta(Elem alpha, Elem beta, int s) {
        FamilySpec f = make(Kind::AlphaBeta, s);
        f.alpha = alpha;
        f.beta = beta;
        return f;
    }
    static FamilySpec forma_e(Elem e, int s) {
        FamilySpec f = make(Kind::FormaE, s);
        f.e = e;
        return f;
    }
    static FamilySpec forma_k(Elem k, Elem delta, int s) {
        FamilySpec f = make(Kind::FormaK, s);
        f.k = k;
        f.delta = delta;
        return f;
    }
    static FamilySpec c3(Elem eta, Elem rho) {
        FamilySpec f = make(Kind::C3, 1);
        f.eta = eta;
        f.rho = rho;
        return f;
    }
    static FamilySpec c4(Elem k) {
        FamilySpec f = make(Kind::C4, 1);
        f.k = k;
        return f;
    }
    static FamilySpec f1(Elem eta) {
        FamilySpec f = make(Kind::F1, 1);
        f.eta = eta;
        return f;
    }
    static FamilySpec gb(Elem b) {
        FamilySpec f = make(Kind::Gb, 1);
        f.b = b;
        return f;
    }
};

inline std::string kind_name(FamilySpec::Kind k) {
    using K = FamilySpec::Kind;
    switch (k) {
        case K::Pseudoregulus: return "Pseudoregulus";
        case K::LP: return "LP";
        case K::AlphaBeta: return "AlphaBeta";
        case K::FormaE: return "FormaE";
        case K::FormaK: return "FormaK";
        case K::C3: return "C3";
        case K::C4: return "C4";
        case K::F1: return "F1";
        case K::Gb: return "Gb";
    }
    return "?";
}

// x -> Tr(c x)
inline LinearizedPoly trace_poly(const Field& F, Elem c) {
    LinearizedPoly p;
    for (int i = 0; i < 5; ++i) p.c[i] = F.frob(c, i);
    return p;
}

// F_1(x) = Tr(1/eta) x^{q^4} - (eta^{-q^4} + eta^{-1}) Tr(x)
inline LinearizedPoly f1_poly(const Field& F, Elem eta) {
    Elem ei = F.inv(eta);
    LinearizedPoly p = scale(F, F.neg(F.add(F.frob(ei, 4), ei)), trace_poly(F, F.one()));
    p.c[4] = F.add(p.c[4], F.trace(ei));
    return p;
}

// Validates the parameters and returns the defining pair (g(x), h(x)).
inline std::pair<LinearizedPoly, LinearizedPoly> family_pair(const Field& F, const FamilySpec& f) {
    using K = FamilySpec::Kind;
    auto bad = [](const std::string& why) { return FamilyError("BadParameters: " + why); };
    int s = 1;
    try {
        s = reduce_s(f.s);
    } catch (const std::invalid_argument&) {
        throw bad("gcd(s,5) != 1");
    }
    const LinearizedPoly x = identity_poly();
    switch (f.kind) {
        case K::Pseudoregulus: return {x, LinearizedPoly::monomial(s)};
        case K::LP: {
            Elem n = F.norm(f.delta);
            if (n.is_zero() || n == F.one()) throw bad("N(delta) in {0,1}");
            LinearizedPoly h = LinearizedPoly::monomial(s);
            h.c[(5 - s) % 5] = f.delta;
            return {x, h};
        }
        case K::AlphaBeta:
            if (f.alpha.is_zero() && f.beta.is_zero()) throw bad("(alpha,beta) = (0,0)");
            return alpha_beta_pair(F, f.alpha, f.beta, s);
        case K::FormaE:
            if (!F.in_base(f.e)) throw bad("e not in F_q");
            return alpha_beta_pair(F, F.one(), F.sub(F.one(), f.e), s);
        case K::FormaK: {
            if (f.k.is_zero()) throw bad("k = 0");
            if (f.delta.is_zero() || !F.in_base(f.delta)) throw bad("delta not in F_q*");
            Elem beta = F.mul(f.delta, F.mul(F.frob(f.k, 4 * s), F.frob(f.k, 2 * s)));
            return alpha_beta_pair(F, F.inv(f.k), beta, s);
        }
        case K::C3: {
            if (f.eta.is_zero()) throw bad("eta = 0");
            if (!F.trace(f.eta).is_zero()) throw bad("Tr(eta) != 0");
            if (F.trace(f.rho).is_zero()) throw bad("Tr(rho) = 0");
            LinearizedPoly g = trace_poly(F, f.rho);
            g.c[1] = F.add(g.c[1], f.eta);
            g.c[0] = F.sub(g.c[0], f.eta);
            LinearizedPoly h = LinearizedPoly::monomial(1);
            h.c[4] = F.minus_one();
            return {g, h};
        }
        case K::C4:
            if (F.norm(f.k) != F.one()) throw bad("N(k) != 1");
            return {x, c4_poly(F, f.k, 1)};
        case K::F1:
            if (f.eta.is_zero()) throw bad("eta = 0");
            if (!F.trace(f.eta).is_zero()) throw bad("Tr(eta) != 0");
            if (F.trace(F.inv(f.eta)).is_zero()) throw bad("Tr(1/eta) = 0");
            return {x, f1_poly(F, f.eta)};
        case K::Gb: {
            if (f.b.is_zero()) throw bad("ZeroB");
            LinearizedPoly h = LinearizedPoly::monomial(2);
            h.c[4] = f.b;
            return {x, h};
        }
    }
    throw bad("unknown kind");
}

inline LinearSet construct(const Field& F, const FamilySpec& f) {
    auto [g, h] = family_pair(F, f);
    return linear_set_of_pair(F, g, h);
}

// Elements u with N(u) = c, in increasing log order.
template <class Fn>
bool for_norm_fiber(const Field& F, Elem c, Fn&& fn) {
    if (c.is_zero()) return false;
    const std::uint32_t d = F.q() - 1, N = F.cosets();
    std::uint32_t r = (c.v / N) % d;  // log(c) = r' N with r' = log u mod (q-1)
    for (std::uint32_t k = 0; k < N; ++k)
        if (fn(Elem{r + k * d})) return true;
    return false;
}

struct AlphaBetaVerdict {
    bool rank_lt5 = false;
    bool pseudoregulus = false;
    bool scattered_by_criterion = false;
    std::optional<Elem> u;       // solution of the criterion system
    bool generale_ok = true;     // necessary condition when beta != 0
};

inline AlphaBetaVerdict alpha_beta_predicates(const Field& F, Elem alpha, Elem beta, int s) {
    s = reduce_s(s);
    AlphaBetaVerdict v;
    Fe a(F, alpha), b(F, beta), one = Fe::one(F);
    auto f = [&](const Fe& x, int k) { return x.frob(k * s); };
    bool eq = f(a, 1) == f(b, 1) * b;
    bool norms_one = a.norm().is_one() && b.norm().is_one();
    v.rank_lt5 = eq && norms_one;
    v.pseudoregulus = eq && !norms_one;
    Fe c1 = f(b, 3) * f(b, 1) * b, c2 = f(b, 1) * b, c3 = f(b, 3);
    for_norm_fiber(F, F.minus_one(), [&](Elem ue) {
        Fe u(F, ue);
        Fe t = one - a * u;
        Fe val = c1 * f(u, 1) - c2 * f(u, 2) * f(u, 1) * u * f(t, 3) + c3 * f(t, 1) * t;
        if (!val.is_zero()) return false;
        v.u = ue;
        return true;
    });
    v.scattered_by_criterion = !v.u.has_value();
    if (!b.is_zero() && v.scattered_by_criterion) v.generale_ok = (f(a, 1) / (f(b, 1) * b)).in_base();
    return v;
}

class SctnessError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline Fe sctness_value(const Field& F, Elem delta, Elem eps, int s, Elem xe) {
    Fe d(F, delta), e(F, eps), x(F, xe), one = Fe::one(F);
    auto f = [&](const Fe& y, int k) { return y.frob(k * s); };
    Fe t = one - x;
    return d * d * e * f(x, 1) - d * e * f(x, 2) * f(x, 1) * x * f(t, 3) + f(t, 1) * t;
}

// Witness x with eps N(x) = -1 solving the degree equation, or nullopt (NoSolution).
inline std::optional<Elem> sctness_solve(const Field& F, Elem delta, Elem eps, int s) {
    s = reduce_s(s);
    if (delta.is_zero() || eps.is_zero() || !F.in_base(delta) || !F.in_base(eps))
        throw SctnessError("InvalidPair: parameters must lie in F_q*");
    if (F.mul(F.mul(delta, delta), eps) == F.one()) throw SctnessError("InvalidPair: delta^2 eps = 1");
    std::optional<Elem> out;
    for_norm_fiber(F, F.neg(F.inv(eps)), [&](Elem x) {
        if (!sctness_value(F, delta, eps, s, x).is_zero()) return false;
        out = x;
        return true;
    });
    return out;
}

inline bool sctness_verify(const Field& F, Elem delta, Elem eps, int s, Elem x) {
    return F.mul(eps, F.norm(x)) == F.minus_one() && sctness_value(F, delta, eps, s, x).is_zero();
}

// delta^3 eps^2 + (1 - 3 delta) eps + 1
inline Elem conj_discriminant(const Field& F, Elem delta, Elem eps) {
    Elem d3 = F.pow(delta, 3), e2 = F.mul(eps, eps);
    Elem mid = F.mul(F.sub(F.one(), F.mul(F.from_int(3), delta)), eps);
    return F.add(F.add(F.mul(d3, e2), mid), F.one());
}

struct GbResult {
    bool scattered;
    std::optional<std::pair<Elem, Elem>> witness;
    bool witness_ok = false;
};

inline GbResult gb_check(const Field& F, Elem b, ScatterScratch& scratch) {
    if (b.is_zero()) throw FamilyError("ZeroB");
    auto [g, h] = family_pair(F, FamilySpec::gb(b));
    ScatterResult r = is_scattered(F, h, scratch, true);
    GbResult out{r.scattered, r.witness};
    if (r.witness) out.witness_ok = verify_witness(F, g, h, *r.witness);
    return out;
}

}  // namespace msls
