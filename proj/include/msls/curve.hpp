#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msls/families.hpp"
#include "msls/gfield.hpp"

namespace msls {

class CurveError : public std::runtime_error {
public:
    enum class Kind { InvalidPair, Degenerate, NoDeltaRoot, BadExtension };
    CurveError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

// f(X,Y) = f0 X^2Y^2 + f1 XY(X+Y) + f2 (X^2+Y^2) + f3 XY + f4 (X+Y) + f5
struct CurveQ {
    Elem delta, epsilon;
    std::array<Elem, 6> f;
    int degree = 4;

    Elem eval(const Field& F, Elem X, Elem Y) const {
        Elem xy = F.mul(X, Y), s = F.add(X, Y);
        Elem r = F.mul(f[0], F.mul(xy, xy));
        r = F.add(r, F.mul(f[1], F.mul(xy, s)));
        r = F.add(r, F.mul(f[2], F.add(F.mul(X, X), F.mul(Y, Y))));
        r = F.add(r, F.mul(f[3], xy));
        r = F.add(r, F.mul(f[4], s));
        return F.add(r, f[5]);
    }
    // Coefficients of Y^2, Y, 1 at a fixed X.
    std::array<Elem, 3> in_y(const Field& F, Elem X) const {
        Elem X2 = F.mul(X, X);
        return {F.add(F.add(F.mul(f[0], X2), F.mul(f[1], X)), f[2]),
                F.add(F.add(F.mul(f[1], X2), F.mul(f[3], X)), f[4]),
                F.add(F.add(F.mul(f[2], X2), F.mul(f[4], X)), f[5])};
    }
};

inline void check_pair(const Field& F, Elem d, Elem e) {
    auto bad = [](const std::string& why) { return CurveError(CurveError::Kind::InvalidPair, "InvalidPair: " + why); };
    if (d.is_zero() || e.is_zero() || !F.in_base(d) || !F.in_base(e)) throw bad("parameters must lie in F_q*");
    if (F.mul(F.mul(d, d), e) == F.one()) throw bad("delta^2 eps = 1");
    if (conj_discriminant(F, d, e).is_zero()) throw bad("delta^3 eps^2 + (1 - 3 delta) eps + 1 = 0");
}

inline CurveQ make_curve(const Field& F, Elem delta, Elem eps) {
    check_pair(F, delta, eps);
    Fe d(F, delta), e(F, eps), one = Fe::one(F);
    auto n = [&](int k) { return Fe(F, F.from_int(k)); };
    Fe d2e = d * d * e, de = d * e;
    std::array<Fe, 6> c{(one - d2e) * (de - one),
                        (d2e + de - n(2)) * (d2e - one),
                        -((d2e - one) * (d2e - one)),
                        d2e * d2e * d2e - n(5) * d2e * d2e + n(6) * d2e + de + d - n(4),
                        (d2e - one) * (d2e + d - n(2)),
                        (d - one) * (one - d2e)};
    CurveQ Q{delta, eps, {}, 4};
    for (int i = 0; i < 6; ++i) Q.f[i] = c[i].raw();
    if (Q.f[0].is_zero()) Q.degree = Q.f[1].is_zero() ? 2 : 3;
    return Q;
}

namespace detail {

inline Elem abs_trace(const Field& F, Elem t) {
    Elem s = F.zero();
    for (unsigned i = 0; i < 5 * F.h(); ++i) s = F.add(s, F.frob_p(t, static_cast<int>(i)));
    return s;
}

// A root of Z^2 + Z = t in characteristic 2, if Tr(t) = 0.
inline std::optional<Elem> artin_schreier(const Field& F, Elem t) {
    if (!abs_trace(F, t).is_zero()) return std::nullopt;
    const int m = static_cast<int>(5 * F.h());
    Elem z = F.zero();
    if (m % 2) {
        for (int i = 0; i <= (m - 1) / 2; ++i) z = F.add(z, F.frob_p(t, 2 * i));
        return z;
    }
    Elem theta = F.zero();
    for (std::uint64_t i = 1; i < F.size(); ++i)
        if (abs_trace(F, F.element_at(i)) == F.one()) {
            theta = F.element_at(i);
            break;
        }
    for (int i = 0; i + 1 < m; ++i) {
        Elem inner = F.zero();
        for (int j = i + 1; j < m; ++j) inner = F.add(inner, F.frob_p(theta, j));
        z = F.add(z, F.mul(inner, F.frob_p(t, i)));
    }
    return z;
}

}  // namespace detail

// Roots in F_{q^5} of a Y^2 + b Y + c; nullopt when the polynomial vanishes identically.
inline std::optional<std::vector<Elem>> quadratic_roots(const Field& F, Elem a, Elem b, Elem c) {
    std::vector<Elem> out;
    if (a.is_zero()) {
        if (b.is_zero()) {
            if (c.is_zero()) return std::nullopt;
            return out;
        }
        out.push_back(F.neg(F.div(c, b)));
        return out;
    }
    if (F.p() == 2) {
        if (b.is_zero()) {
            out.push_back(F.frob_p(F.div(c, a), static_cast<int>(5 * F.h()) - 1));
            return out;
        }
        Elem t = F.div(F.mul(a, c), F.mul(b, b));
        if (auto z = detail::artin_schreier(F, t)) {
            Elem r = F.div(b, a);
            out.push_back(F.mul(r, *z));
            out.push_back(F.mul(r, F.add(*z, F.one())));
        }
        return out;
    }
    Elem disc = F.sub(F.mul(b, b), F.mul(F.from_int(4), F.mul(a, c)));
    Elem two_a = F.add(a, a);
    if (disc.is_zero()) {
        out.push_back(F.neg(F.div(b, two_a)));
        return out;
    }
    if (disc.v % 2) return out;
    Elem r = Elem{disc.v / 2};
    out.push_back(F.div(F.sub(r, b), two_a));
    out.push_back(F.div(F.sub(F.neg(r), b), two_a));
    return out;
}

struct CurveCount {
    CurveQ curve;
    int extension = 1;
    std::uint64_t affine_points = 0;
};

// Affine points of Q over F_{q^k}, k in {1, 5}.
inline CurveCount build_and_count(const Field& F, Elem delta, Elem eps, int k) {
    if (k != 1 && k != 5) throw CurveError(CurveError::Kind::BadExtension, "extension degree must be 1 or 5");
    CurveCount out{make_curve(F, delta, eps), k, 0};
    std::vector<Elem> xs;
    if (k == 1) {
        xs = F.base_elements();
    } else {
        xs.reserve(F.size());
        for (std::uint64_t i = 0; i < F.size(); ++i) xs.push_back(F.element_at(i));
    }
    const std::uint64_t line = k == 1 ? F.q() : F.size();
    for (Elem X : xs) {
        auto c = out.curve.in_y(F, X);
        auto r = quadratic_roots(F, c[0], c[1], c[2]);
        out.affine_points += r ? r->size() : line;
    }
    return out;
}

using Quintuple = std::array<Elem, 5>;

// G followed by F_0..F_4.
inline std::array<Elem, 6> system_residuals(const Field& F, Elem delta, Elem eps, const Quintuple& v) {
    Fe d(F, delta), e(F, eps), one = Fe::one(F);
    auto x = [&](int i) { return Fe(F, v[static_cast<std::size_t>(i % 5)]); };
    std::array<Elem, 6> r;
    r[0] = (x(0) * x(1) * x(2) * x(3) * x(4) * e + one).raw();
    for (int i = 0; i < 5; ++i) {
        Fe A = x(i), B = x(i + 1), C = x(i + 2), D = x(i + 3);
        r[static_cast<std::size_t>(i + 1)] = (d * d * e * B - d * e * A * B * C * (one - D) + (one - A) * (one - B)).raw();
    }
    return r;
}

inline bool on_system(const Field& F, Elem delta, Elem eps, const Quintuple& v) {
    for (Elem x : system_residuals(F, delta, eps, v))
        if (!x.is_zero()) return false;
    return true;
}

struct Lift {
    Quintuple point;
    std::array<Elem, 6> residuals;
    bool ok = false;
};

// (A, B) on Q lifted through C = Q(A,B), D = P(A,B,C), E = -1/(eps ABCD).
inline Lift lift_and_verify(const Field& F, Elem delta, Elem eps, Elem A, Elem B) {
    check_pair(F, delta, eps);
    auto degenerate = [](const std::string& why) {
        return CurveError(CurveError::Kind::Degenerate, "Degenerate: " + why);
    };
    Fe d(F, delta), e(F, eps), one = Fe::one(F), a(F, A), b(F, B);
    if (a.is_zero() || b.is_zero()) throw degenerate("A or B is zero");
    Fe qden = b * d * e - b - d * d * e + one;
    if (qden.is_zero()) throw degenerate("B delta eps - B - delta^2 eps + 1 = 0");
    Fe c = (b * d * d * e - b - d + one) / (a * qden);
    if (c.is_zero()) throw degenerate("C = 0");
    Fe abc = a * b * c;
    Fe dd = (abc * d * e - a * b + a - b * d * d * e + b - one) / (abc * d * e);
    if (dd.is_zero()) throw degenerate("D = 0");
    Fe ee = -(e * abc * dd).inv();
    Lift out;
    out.point = {A, B, c.raw(), dd.raw(), ee.raw()};
    out.residuals = system_residuals(F, delta, eps, out.point);
    out.ok = true;
    for (Elem x : out.residuals) out.ok = out.ok && x.is_zero();
    return out;
}

inline Quintuple frobenius_orbit(const Field& F, Elem x, int s) {
    Quintuple v;
    for (int i = 0; i < 5; ++i) v[static_cast<std::size_t>(i)] = F.frob(x, i * s);
    return v;
}

struct OrbitCount {
    std::uint64_t points = 0;      // x with (x, x^{q^s}) on Q lifting to the orbit of x
    std::uint64_t degenerate = 0;  // curve points of that shape whose lift hit a zero denominator
    std::optional<Elem> first;
};

// Points (x, x^{q^s}) of Q whose lift is (x, x^{q^s}, ..., x^{q^{4s}}); x runs over eps N(x) = -1.
inline OrbitCount orbit_points(const Field& F, Elem delta, Elem eps, int s) {
    s = reduce_s(s);
    CurveQ Q = make_curve(F, delta, eps);
    OrbitCount out;
    for_norm_fiber(F, F.neg(F.inv(eps)), [&](Elem x) {
        Elem y = F.frob(x, s);
        if (!Q.eval(F, x, y).is_zero()) return false;
        try {
            Lift l = lift_and_verify(F, delta, eps, x, y);
            if (l.ok && l.point == frobenius_orbit(F, x, s)) {
                ++out.points;
                if (!out.first) out.first = x;
            }
        } catch (const CurveError&) {
            ++out.degenerate;
        }
        return false;
    });
    return out;
}

struct ConicWitness {
    Elem delta, xi, ell;
    int s = 1;
    bool on_conic = false, lqs_ok = false, lq2s_ok = false, barc_ok = false;
    bool cbar_ok = false, dbar_ok = false, ebar_ok = false, system_ok = false;
    std::optional<bool> matrix_criterion;  // root existence predicted by M = [[0,d],[1,d]]^5
};

inline std::vector<Elem> conic_deltas(const Field& F) {
    std::vector<Elem> out;
    for (Elem d : F.base_elements()) {
        Elem v = F.add(F.add(F.mul(d, d), F.mul(F.from_int(3), d)), F.one());
        if (!v.is_zero()) continue;
        try {
            check_pair(F, d, F.one());
        } catch (const CurveError&) {
            continue;
        }
        out.push_back(d);
    }
    return out;
}

// epsilon = 1 with delta^2 + 3 delta + 1 = 0: the conic component yields a point (l, l^{q^s}).
inline ConicWitness conic_case(const Field& F, int s) {
    s = reduce_s(s);
    auto ds = conic_deltas(F);
    if (ds.empty())
        throw CurveError(CurveError::Kind::NoDeltaRoot, "NoDeltaRoot: delta^2 + 3 delta + 1 has no admissible root in F_q");
    ConicWitness w;
    w.delta = ds.front();
    w.s = s;
    Fe d(F, w.delta), one = Fe::one(F);

    Fe m00 = Fe::zero(F), m01 = d, m10 = one, m11 = d;
    Fe p00 = one, p01 = Fe::zero(F), p10 = Fe::zero(F), p11 = one;
    for (int i = 0; i < 5; ++i) {
        Fe a = p00 * m00 + p01 * m10, b = p00 * m01 + p01 * m11;
        Fe c = p10 * m00 + p11 * m10, e = p10 * m01 + p11 * m11;
        p00 = a, p01 = b, p10 = c, p11 = e;
    }
    if (F.p() == 2) {
        w.matrix_criterion = p11.in_base() && p11 == d.pow(3) * (d + one) * (d + Fe(F, F.from_int(3)));
    } else {
        Fe tr = p00 + p11, det = p00 * p11 - p01 * p10;
        Fe disc = tr * tr - Fe(F, F.from_int(4)) * det;
        w.matrix_criterion = disc.is_zero() || (disc.raw().v % (2 * F.cosets()) == 0);
    }

    std::optional<Elem> xi;
    for (std::uint64_t i = 0; i < F.size() && !xi; ++i) {
        Fe x(F, F.element_at(i));
        if ((x.frob(s) * x - d * x - d).is_zero()) xi = x.raw();
    }
    if (!xi) return w;
    w.xi = *xi;
    Fe l = Fe(F, *xi) + one;
    w.ell = l.raw();
    Fe l1 = l.frob(s), l2 = l.frob(2 * s), l3 = l.frob(3 * s), l4 = l.frob(4 * s);
    w.on_conic = (l * l1 - (d + one) * l - l1 + one).is_zero();
    w.lqs_ok = !(l - one).is_zero() && l1 == ((d + one) * l - one) / (l - one);
    w.lq2s_ok = l2 == ((d + Fe(F, F.from_int(2))) * l - one) / l;
    try {
        Lift lift = lift_and_verify(F, w.delta, F.one(), l.raw(), l1.raw());
        Fe cbar(F, lift.point[2]);
        w.barc_ok = cbar == ((d + Fe(F, F.from_int(2))) * l - one) / l;
        w.cbar_ok = cbar == l2;
        w.dbar_ok = Fe(F, lift.point[3]) == l3;
        w.ebar_ok = Fe(F, lift.point[4]) == l4;
        w.system_ok = lift.ok;
    } catch (const CurveError&) {
    }
    return w;
}

}  // namespace msls
