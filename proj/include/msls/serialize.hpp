#pragma once

#include <string>

#include <json.hpp>

#include "msls/config.hpp"
#include "msls/families.hpp"
#include "msls/gfield.hpp"
#include "msls/linpoly.hpp"

namespace msls {

using json = nlohmann::ordered_json;

inline std::string fmt(const Field& F, Elem a) { return F.format(a); }
inline std::string fmt(const Fe& a) { return a.str(); }

inline json vec_json(const Vec& v) {
    json out = json::array();
    for (const Fe& x : v) out.push_back(x.str());
    return out;
}

inline json poly_json(const Field& F, const LinearizedPoly& f) {
    json out = json::array();
    for (Elem c : f.c) out.push_back(F.format(c));
    return out;
}

inline json field_json(const Field& F) {
    json poly = json::array();
    for (unsigned c : F.defining_poly()) poly.push_back(c);
    return {{"p", F.p()},
            {"h", F.h()},
            {"q", F.q()},
            {"order", F.size()},
            {"conway", poly},
            {"normal", F.format(F.normal_element())}};
}

inline json witness_json(const Field& F, const std::optional<std::pair<Elem, Elem>>& w) {
    if (!w) return nullptr;
    return json::array({F.format(w->first), F.format(w->second)});
}

inline json spec_json(const Field& F, const FamilySpec& f) {
    using K = FamilySpec::Kind;
    json out{{"kind", kind_name(f.kind)}};
    switch (f.kind) {
        case K::Pseudoregulus: out["s"] = f.s; break;
        case K::LP: out["delta"] = F.format(f.delta), out["s"] = f.s; break;
        case K::AlphaBeta: out["alpha"] = F.format(f.alpha), out["beta"] = F.format(f.beta), out["s"] = f.s; break;
        case K::FormaE: out["e"] = F.format(f.e), out["s"] = f.s; break;
        case K::FormaK: out["k"] = F.format(f.k), out["delta"] = F.format(f.delta), out["s"] = f.s; break;
        case K::C3: out["eta"] = F.format(f.eta), out["rho"] = F.format(f.rho); break;
        case K::C4: out["k"] = F.format(f.k); break;
        case K::F1: out["eta"] = F.format(f.eta); break;
        case K::Gb: out["b"] = F.format(f.b); break;
    }
    return out;
}

inline json report_json(const ConfigReport& r) {
    json out{{"class", class_name(r.cls)}, {"model", r.model.name()}, {"s", r.model.s}, {"scattered", r.scattered}};
    if (r.witness) out["witness"] = {{"point", vec_json(*r.witness)}, {"rank", r.witness_rank}};
    if (r.A) out["A"] = vec_json(*r.A);
    if (r.B) out["B"] = vec_json(*r.B);
    if (r.A || r.B) {
        out["rkA"] = r.rkA;
        out["rkB"] = r.rkB;
        out["lineI"] = r.lineI;
        out["lineII"] = r.lineII;
        out["summaryConsistent"] = r.summary_consistent;
    }
    if (r.lm) {
        out["lambda"] = r.lm->lambda.str();
        out["mu"] = r.lm->mu.str();
        out["identities"] = {{"lincomb", r.lm->lincomb_ok}, {"equation1", r.lm->eq1_ok}, {"equation2", r.lm->eq2_ok}};
    }
    if (r.u4) {
        json c = json::array();
        for (const Fe& x : r.u4->abcde) c.push_back(x.str());
        out["u4coords"] = c;
        out["howe"] = r.u4->howe_residual.is_zero();
        out["eqB"] = {{"factorI", r.u4->factor_I.str()}, {"factorII", r.u4->factor_II.str()}, {"agrees", r.u4->eqB_agrees}};
        if (r.u4->closed_form_ok) out["coordU4"] = *r.u4->closed_form_ok;
    }
    if (r.rk5) {
        const Rk5Form& k = *r.rk5;
        out["rank5"] = {{"branch", k.branch == Rk5Form::Branch::MuOne ? "mu=1" : "N(mu)!=1"},
                        {"e", k.e.str()},
                        {"alpha", k.alpha.str()},
                        {"beta", k.beta.str()},
                        {"s", r.model.s},
                        {"eInFq", k.e_in_fq},
                        {"setEqual", k.set_equal}};
        if (k.rho) out["rank5"]["rho"] = k.rho->str();
    }
    if (r.rk44) {
        const Rk44Form& k = *r.rk44;
        out["rank44"] = {{"lambdaOne", k.lambda_one},
                         {"w", k.w.str()},
                         {"eta", k.eta.str()},
                         {"setEqual", k.set_equal}};
        if (!k.lambda_one) out["rank44"]["k"] = k.k.str();
    }
    return out;
}

}  // namespace msls
