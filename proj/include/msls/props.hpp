#pragma once

#include <random>
#include <string>
#include <vector>

#include "msls/config.hpp"
#include "msls/curve.hpp"
#include "msls/families.hpp"
#include "msls/serialize.hpp"

namespace msls {

struct PropResult {
    std::string name;
    std::uint64_t checked = 0, failures = 0, wanted = 0;
    json detail = json::object();

    bool pass() const { return failures == 0 && checked >= wanted; }
    json to_json(const Field& F) const {
        json out{{"type", "property"}, {"name", name}, {"q", F.q()}, {"checked", checked},
                 {"failures", failures},  {"pass", pass()}};
        if (!detail.empty()) out["detail"] = detail;
        return out;
    }
};

namespace detail {

inline Fe random_unit(const Field& F, std::mt19937_64& rng) {
    return Fe(F, F.element_at(1 + rng() % (F.size() - 1)));
}

inline std::vector<std::pair<Elem, Elem>> valid_pairs(const Field& F) {
    std::vector<std::pair<Elem, Elem>> out;
    for (Elem d : F.base_units())
        for (Elem e : F.base_units()) {
            if (F.mul(F.mul(d, d), e) == F.one() || conj_discriminant(F, d, e).is_zero()) continue;
            out.push_back({d, e});
        }
    return out;
}

}  // namespace detail

// x^{q^s} for every s: scattered with (q^5-1)/(q-1) points.
inline PropResult monomial_oracle(const Field& F) {
    PropResult r{"monomial scattered", 0, 0, 4};
    const std::uint64_t n = F.cosets();
    for (int s = 1; s <= 4; ++s) {
        LinearSet L = construct(F, FamilySpec::pseudoregulus(s));
        ++r.checked;
        if (!L.scattered() || L.size() != n) ++r.failures;
    }
    return r;
}

// x^q + d x^{q^4} scattered exactly when N(d) is not 0 or 1.
inline PropResult lp_oracle(const Field& F) {
    PropResult r{"x^q + d x^(q^4) scattered iff d = 0 or N(d) != 1"};
    ScatterScratch sc;
    for (std::uint64_t i = 0; i < F.size(); ++i) {
        Elem d = F.element_at(i);
        LinearizedPoly f = LinearizedPoly::monomial(1);
        f.c[4] = d;
        bool expect = d.is_zero() || F.norm(d) != F.one();
        ++r.checked;
        if (is_scattered(F, f, sc, false).scattered != expect) ++r.failures;
    }
    r.wanted = F.size();
    return r;
}

inline PropResult gb_oracle(const Field& F) {
    PropResult r{"g_b not scattered with verified witness"};
    ScatterScratch sc;
    for (std::uint64_t i = 1; i < F.size(); ++i) {
        GbResult g = gb_check(F, F.element_at(i), sc);
        ++r.checked;
        if (g.scattered || !g.witness || !g.witness_ok) ++r.failures;
    }
    r.wanted = F.size() - 1;
    return r;
}

inline PropResult criterion_exhaustive(const Field& F) {
    PropResult r{"alpha-beta criterion equals direct test, exhaustive"};
    ScatterScratch sc;
    for (int s = 1; s <= 4; ++s)
        for (std::uint64_t i = 0; i < F.size(); ++i)
            for (std::uint64_t j = 0; j < F.size(); ++j) {
                Elem a = F.element_at(i), b = F.element_at(j);
                if (a.is_zero() && b.is_zero()) continue;
                auto v = alpha_beta_predicates(F, a, b, s);
                auto [g, h] = alpha_beta_pair(F, a, b, s);
                ++r.checked;
                if (v.scattered_by_criterion != is_scattered_pair(F, g, h, sc, false).scattered) ++r.failures;
            }
    return r;
}

inline PropResult criterion_random(const Field& F, std::uint64_t draws, std::uint64_t seed) {
    PropResult r{"alpha-beta criterion equals direct test, random draws", 0, 0, draws};
    std::mt19937_64 rng(seed);
    ScatterScratch sc;
    json bad = json::array();
    while (r.checked < draws) {
        Elem a = F.element_at(rng() % F.size()), b = F.element_at(rng() % F.size());
        int s = 1 + static_cast<int>(rng() % 4);
        if (a.is_zero() && b.is_zero()) continue;
        auto v = alpha_beta_predicates(F, a, b, s);
        auto [g, h] = alpha_beta_pair(F, a, b, s);
        ++r.checked;
        if (v.scattered_by_criterion != is_scattered_pair(F, g, h, sc, false).scattered) {
            ++r.failures;
            if (bad.size() < 5) bad.push_back({{"alpha", F.format(a)}, {"beta", F.format(b)}, {"s", s}});
        }
    }
    if (!bad.empty()) r.detail["disagreements"] = bad;
    return r;
}

inline PropResult forma_k_is_alpha_beta(const Field& F, std::uint64_t n, std::uint64_t seed) {
    PropResult r{"FormaK equals AlphaBeta point set", 0, 0, n};
    std::mt19937_64 rng(seed);
    for (; r.checked < n; ++r.checked) {
        int s = 1 + static_cast<int>(rng() % 4);
        Fe k = detail::random_unit(F, rng);
        Fe delta(F, F.base_units()[rng() % (F.q() - 1)]);
        Fe beta = delta * k.frob(4 * s) * k.frob(2 * s);
        if (construct(F, FamilySpec::forma_k(k.raw(), delta.raw(), s)) !=
            construct(F, FamilySpec::alpha_beta(k.inv().raw(), beta.raw(), s)))
            ++r.failures;
    }
    return r;
}

inline PropResult rank5_roundtrip(const Field& F, bool mu_one, std::uint64_t n, std::uint64_t seed) {
    PropResult r{mu_one ? "rank-5 normal form, mu = 1" : "rank-5 normal form, N(mu) != 1", 0, 0, n};
    std::mt19937_64 rng(seed);
    auto base = F.base_units();
    for (std::uint64_t it = 0; it < 40 * n && r.checked < n; ++it) {
        int s = 1 + static_cast<int>(rng() % 4);
        std::optional<SyntheticConfig> sc;
        if (mu_one) {
            sc = synth_rank5_mu_one(F, s, Fe(F, base[rng() % base.size()]), rng());
        } else {
            Fe lam = detail::random_unit(F, rng);
            Fe mu = Fe(F, base[rng() % base.size()]) * lam.frob(s) * lam;
            sc = synth_rank5_general(F, s, lam, mu, rng());
        }
        if (!sc) continue;
        ConfigReport rep = classify(F, sc->gamma, sc->model, true);
        if (rep.cls == ConfigClass::Pseudoregulus || rep.rkA != 5) continue;
        try {
            analyze(F, rep);
        } catch (const ConfigError&) {
            ++r.checked;
            ++r.failures;
            continue;
        }
        if (!rep.rk5) continue;
        const Rk5Form& k = *rep.rk5;
        bool branch = (k.branch == Rk5Form::Branch::MuOne) == mu_one;
        if (!branch) continue;
        ++r.checked;
        bool ok = k.set_equal && k.e_in_fq;
        if (mu_one) ok = ok && k.eq23b_ok && k.coord_e_ok;
        else ok = ok && k.rho_in_fq && k.howe3case3_ok && k.e23c_ok && k.a3b1_ok;
        if (!ok) ++r.failures;
    }
    return r;
}

inline PropResult rank44_roundtrip(const Field& F, bool lambda_one, std::uint64_t n, std::uint64_t seed) {
    PropResult r{lambda_one ? "rank-4/4 normal form, lambda = 1" : "rank-4/4 normal form, N(lambda) = 1", 0, 0, n};
    std::mt19937_64 rng(seed);
    for (std::uint64_t it = 0; it < 40 * n && r.checked < n; ++it) {
        int s = 1 + static_cast<int>(rng() % 4);
        std::optional<SyntheticConfig> sc;
        if (lambda_one) {
            Fe w;
            do w = detail::random_unit(F, rng);
            while (!w.trace().is_zero());
            sc = synth_rk44(F, s, Fe::one(F), w, rng());
        } else {
            Fe lam;
            do lam = detail::random_unit(F, rng);
            while (!lam.norm().is_one() || lam.is_one());
            sc = synth_rk44(F, s, lam, lam - Fe::one(F), rng());
        }
        if (!sc) continue;
        ConfigReport rep = classify(F, sc->gamma, sc->model, true);
        ++r.checked;
        try {
            analyze(F, rep);
        } catch (const ConfigError&) {
            ++r.failures;
            continue;
        }
        if (!rep.rk44) {
            ++r.failures;
            continue;
        }
        const Rk44Form& k = *rep.rk44;
        bool ok = k.set_equal && k.abcdw_ok && k.rkabcd_ok && k.lambda_one == lambda_one;
        ok = ok && (lambda_one ? k.trace_ok : k.norm_ok && k.w_is_lambda_minus_one);
        if (!ok) ++r.failures;
    }
    return r;
}

// Lifts `per_pair` non-degenerate points of Q over F_{q^5} for every valid pair.
inline PropResult curve_lifts(const Field& F, std::uint64_t per_pair, std::uint64_t seed) {
    PropResult r{"curve points lift to solutions of the system"};
    std::mt19937_64 rng(seed);
    std::uint64_t degenerate = 0, pairs = 0;
    for (auto [d, e] : detail::valid_pairs(F)) {
        ++pairs;
        CurveQ Q = make_curve(F, d, e);
        std::uint64_t lifted = 0;
        for (std::uint64_t tries = 0; lifted < per_pair && tries < 1000 * per_pair; ++tries) {
            Elem X = F.element_at(rng() % F.size());
            auto c = Q.in_y(F, X);
            auto ys = quadratic_roots(F, c[0], c[1], c[2]);
            if (!ys || ys->empty()) continue;
            Elem Y = (*ys)[rng() % ys->size()];
            try {
                Lift l = lift_and_verify(F, d, e, X, Y);
                ++lifted;
                if (!l.ok) ++r.failures;
            } catch (const CurveError&) {
                ++degenerate;
            }
        }
        r.checked += lifted;
        if (lifted < per_pair) ++r.failures;
    }
    r.wanted = pairs * per_pair;
    r.detail = {{"pairs", pairs}, {"degenerateSkipped", degenerate}};
    return r;
}

inline PropResult degree_law(const Field& F) {
    PropResult r{"degree 3 exactly when delta eps = 1"};
    for (auto [d, e] : detail::valid_pairs(F)) {
        CurveQ Q = make_curve(F, d, e);
        ++r.checked;
        if ((Q.degree == 3) != (F.mul(d, e) == F.one())) ++r.failures;
    }
    return r;
}

// The conic chain for every s, or a skip note when no admissible delta exists.
inline PropResult conic_chain(const Field& F) {
    PropResult r{"conic special case chain"};
    if (conic_deltas(F).empty()) {
        r.detail["skipped"] = "no admissible root of delta^2 + 3 delta + 1";
        return r;
    }
    for (int s = 1; s <= 4; ++s) {
        ConicWitness w = conic_case(F, s);
        ++r.checked;
        bool ok = w.on_conic && w.lqs_ok && w.lq2s_ok && w.barc_ok && w.cbar_ok && w.dbar_ok && w.ebar_ok &&
                  w.system_ok && (!w.matrix_criterion || *w.matrix_criterion);
        if (!ok) ++r.failures;
    }
    r.wanted = 4;
    return r;
}

}  // namespace msls
