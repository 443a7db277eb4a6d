#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msls/curve.hpp"
#include "msls/props.hpp"
#include "msls/search.hpp"

namespace msls {

constexpr int kExitUsage = 64;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parses sums of terms c*x^{q^k}: "x^q", "g^3*x^q^2", "x^{q^4}", "x + 2*x^(q^3)", "x^9".
inline LinearizedPoly parse_linearized(const Field& F, const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw UsageError("empty polynomial");
    std::vector<std::string> terms;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '{' || c == '(') ++depth;
        if (c == '}' || c == ')') --depth;
        bool split = (c == '+' || c == '-') && depth == 0 && !cur.empty() && cur.back() != '^' && cur.back() != '*';
        if (split) {
            terms.push_back(cur);
            cur.clear();
            if (c == '+') continue;
        }
        cur += c;
    }
    terms.push_back(cur);

    auto exponent = [&](std::string e) -> int {
        while (e.size() >= 2 && ((e.front() == '{' && e.back() == '}') || (e.front() == '(' && e.back() == ')')))
            e = e.substr(1, e.size() - 2);
        if (e == "q") return 1;
        if (e.rfind("q^", 0) == 0) {
            int k = std::stoi(e.substr(2));
            if (k < 0 || k > 4) throw UsageError("exponent q^" + e.substr(2) + " out of range");
            return k;
        }
        unsigned long long v = std::stoull(e);
        unsigned long long p = 1;
        for (int k = 0; k < 5; ++k, p *= F.q())
            if (p == v) return k;
        throw UsageError("x^" + e + " is not a q-power");
    };

    LinearizedPoly f;
    for (std::string t : terms) {
        bool neg = false;
        if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
            neg = t[0] == '-';
            t = t.substr(1);
        }
        Elem coef = F.one();
        std::string mono = t;
        auto star = t.rfind('*');
        if (star != std::string::npos) {
            coef = F.parse(t.substr(0, star));
            mono = t.substr(star + 1);
        }
        if (mono.empty() || mono[0] != 'x') throw UsageError("term '" + t + "' is not of the form c*x^(q^k)");
        int k = 0;
        try {
            if (mono.size() > 1) {
                if (mono[1] != '^') throw UsageError("bad monomial '" + mono + "'");
                k = exponent(mono.substr(2));
            }
        } catch (const std::logic_error& e) {
            throw UsageError("bad monomial '" + mono + "'");
        }
        if (neg) coef = F.neg(coef);
        f.c[k] = F.add(f.c[k], coef);
    }
    return f;
}

inline std::vector<Elem> parse_elements(const Field& F, const std::string& text, std::size_t n) {
    std::vector<Elem> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            out.push_back(F.parse(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.size() != n) throw UsageError("expected " + std::to_string(n) + " comma separated elements");
    return out;
}

class LineWriter {
public:
    LineWriter(std::ostream& fallback, const std::string& path) : out_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file_) throw UsageError("cannot open output file " + path);
            out_ = file_.get();
        }
    }
    void operator()(const json& j) { *out_ << j.dump() << '\n'; }
    void flush() { out_->flush(); }

private:
    std::ostream* out_;
    std::unique_ptr<std::ofstream> file_;
};

struct CliState {
    std::string q = "2";
    std::string out;
    std::uint64_t seed = 1;
    std::vector<int> s;
};

inline json cli_header(const std::string& cmd, const Field& F, json config, std::uint64_t seed) {
    return {{"schema", 1}, {"type", "header"}, {"command", cmd}, {"field", field_json(F)}, {"config", std::move(config)}, {"seed", seed}};
}

inline std::vector<int> default_s(const std::vector<int>& s) { return s.empty() ? std::vector<int>{1, 2, 3, 4} : s; }

struct CampaignFlags {
    unsigned jobs = 1, threads = 0;
    std::string resume;
    std::uint64_t max_units = 0, every = std::uint64_t{1} << 18;
    int reduce = -1;
    bool battery = false;
    bool c4_only = false;
};

inline int run_campaign_cli(const Campaign& c, const CliState& st, const CampaignFlags& cf, std::ostream& out,
                            std::ostream& err) {
    RunOptions o;
    o.shards = cf.jobs;
    o.threads = cf.threads;
    o.checkpoint = cf.resume;
    o.checkpoint_every = cf.every;
    o.max_units = cf.max_units;
    o.seed = st.seed;
    o.log = [&err](const std::string& m) { err << m << '\n'; };
    auto t0 = std::chrono::steady_clock::now();
    RunResult r = run_campaign(c, o);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << c.name() << ": q=" << c.field().q() << " shards=" << cf.jobs << " units=" << c.units()
        << " processed=" << r.processed << " elapsed=" << secs << "s\n";
    if (!r.complete) return r.exit_code;
    LineWriter w(out, st.out);
    for (const json& j : r.lines) w(j);
    w.flush();
    return r.exit_code;
}

inline int cmd_field_info(const Field& F, const CliState& st, LineWriter& w) {
    w(cli_header("field-info", F, json::object(), st.seed));
    w({{"type", "field"},
       {"q", F.q()},
       {"order", F.size()},
       {"cosets", F.cosets()},
       {"conway", field_json(F)["conway"]},
       {"normal", F.format(F.normal_element())},
       {"baseGenerator", F.format(F.gen_pow(F.cosets()))},
       {"traceOfOne", F.format(F.trace(F.one()))},
       {"normOfGenerator", F.format(F.norm(F.gen_pow(1)))}});
    return 0;
}

inline int cmd_scattered_check(const Field& F, const CliState& st, const std::string& poly, const std::string& g_text,
                               const std::string& h_text, LineWriter& w) {
    LinearizedPoly g = identity_poly(), h;
    json cfg;
    if (!poly.empty()) {
        if (!g_text.empty() || !h_text.empty()) throw UsageError("--poly excludes --g-poly/--h-poly");
        h = parse_linearized(F, poly);
        cfg = {{"poly", poly}};
    } else {
        if (g_text.empty() || h_text.empty()) throw UsageError("give --poly or both --g-poly and --h-poly");
        g = parse_linearized(F, g_text);
        h = parse_linearized(F, h_text);
        cfg = {{"g", g_text}, {"h", h_text}};
    }
    w(cli_header("scattered-check", F, cfg, st.seed));
    ScatterScratch sc;
    ScatterResult r = is_scattered_pair(F, g, h, sc, true);
    LinearSet L = linear_set_of_pair(F, g, h);
    json res{{"type", "result"},
             {"g", poly_json(F, g)},
             {"h", poly_json(F, h)},
             {"scattered", r.scattered},
             {"size", L.size()},
             {"rank", L.rank}};
    if (r.witness) {
        res["witness"] = witness_json(F, r.witness);
        res["witnessVerified"] = verify_witness(F, g, h, *r.witness);
    }
    w(res);
    if (r.scattered != L.scattered()) return 1;
    if (r.witness && !verify_witness(F, g, h, *r.witness)) return 1;
    return 0;
}

inline int cmd_classify(const Field& F, const CliState& st, const std::string& a_text, const std::string& g_text,
                        const std::string& h_text, bool deep, LineWriter& w) {
    Subspace gamma;
    json cfg;
    if (!a_text.empty()) {
        auto a = parse_elements(F, a_text, 3);
        gamma = gamma_from_poly(F, a[0], a[1], a[2]);
        cfg = {{"a", a_text}};
    } else {
        if (g_text.empty() || h_text.empty()) throw UsageError("give --a or both --g-poly and --h-poly");
        gamma = gamma_from_pair(F, parse_linearized(F, g_text), parse_linearized(F, h_text));
        cfg = {{"g", g_text}, {"h", h_text}};
    }
    cfg["analyze"] = deep;
    w(cli_header("classify-plane", F, cfg, st.seed));
    ConfigReport r = classify(F, gamma, Model::moore());
    json extra = json::object();
    if (deep && r.scattered && r.cls != ConfigClass::Pseudoregulus) {
        json battery = json::array();
        for (const Finding& f : invariant_battery(F, r)) battery.push_back({{"name", f.name}, {"pass", f.pass}});
        extra["battery"] = battery;
        try {
            analyze(F, r);
        } catch (const ConfigError& e) {
            extra["analysisError"] = e.what();
        }
    }
    json res = report_json(r);
    res["type"] = "classification";
    res.update(extra);
    w(res);
    if (!r.summary_consistent) return 1;
    return r.cls == ConfigClass::NewCandidate ? 2 : 0;
}

inline int cmd_curve_verify(const Field& F, const CliState& st, const std::string& d_text, const std::string& e_text,
                            std::uint64_t lifts, LineWriter& w) {
    auto s_set = normalize_s_set(default_s(st.s));
    std::vector<std::pair<Elem, Elem>> pairs;
    if (!d_text.empty() || !e_text.empty()) {
        if (d_text.empty() || e_text.empty()) throw UsageError("--delta and --eps go together");
        Elem d = F.parse(d_text), e = F.parse(e_text);
        check_pair(F, d, e);
        pairs.push_back({d, e});
    } else {
        pairs = detail::valid_pairs(F);
    }
    w(cli_header("curve-verify", F, {{"s", s_set}, {"lifts", lifts}, {"pairs", pairs.size()}}, st.seed));
    std::mt19937_64 rng(st.seed);
    std::uint64_t bad = 0, counter = 0;
    for (auto [d, e] : pairs) {
        CurveCount cc = build_and_count(F, d, e, 1);
        json rec{{"type", "curve"},
                 {"delta", F.format(d)},
                 {"epsilon", F.format(e)},
                 {"degree", cc.curve.degree},
                 {"pointsOverFq", cc.affine_points}};
        std::uint64_t lifted = 0, failed = 0, degenerate = 0;
        for (std::uint64_t t = 0; lifted < lifts && t < 1000 * lifts; ++t) {
            Elem X = F.element_at(rng() % F.size());
            auto c = cc.curve.in_y(F, X);
            auto ys = quadratic_roots(F, c[0], c[1], c[2]);
            if (!ys || ys->empty()) continue;
            try {
                if (!lift_and_verify(F, d, e, X, (*ys)[rng() % ys->size()]).ok) ++failed;
                ++lifted;
            } catch (const CurveError&) {
                ++degenerate;
            }
        }
        rec["lifted"] = lifted;
        rec["liftFailures"] = failed;
        rec["degenerate"] = degenerate;
        json orbits = json::array();
        for (int s : s_set) {
            OrbitCount oc = orbit_points(F, d, e, s);
            json o{{"s", s}, {"orbitPoints", oc.points}};
            if (oc.first) {
                o["x"] = F.format(*oc.first);
                o["systemHolds"] = on_system(F, d, e, frobenius_orbit(F, *oc.first, s));
                if (!o["systemHolds"].get<bool>()) ++failed;
            }
            if (!oc.points) ++counter;
            orbits.push_back(o);
        }
        rec["orbits"] = orbits;
        if (failed || lifted < lifts) ++bad;
        w(rec);
    }
    json conic{{"type", "conic"}};
    if (conic_deltas(F).empty()) {
        conic["applies"] = false;
    } else {
        conic["applies"] = true;
        json per = json::array();
        for (int s : s_set) {
            ConicWitness cw = conic_case(F, s);
            bool ok = cw.on_conic && cw.lqs_ok && cw.lq2s_ok && cw.barc_ok && cw.cbar_ok && cw.dbar_ok && cw.ebar_ok &&
                      cw.system_ok;
            json x{{"s", s}, {"delta", F.format(cw.delta)}, {"xi", F.format(cw.xi)}, {"ell", F.format(cw.ell)}, {"chain", ok}};
            if (cw.matrix_criterion) x["matrixCriterion"] = *cw.matrix_criterion;
            if (!ok) ++bad;
            per.push_back(x);
        }
        conic["cases"] = per;
    }
    w(conic);
    w({{"type", "summary"}, {"pairs", pairs.size()}, {"failures", bad}, {"pairsWithoutOrbitPoint", counter}});
    if (bad) return 1;
    return counter ? 2 : 0;
}

inline int cmd_prop_suite(const Field& F, const CliState& st, std::uint64_t n, LineWriter& w) {
    w(cli_header("prop-suite", F, {{"n", n}}, st.seed));
    std::vector<PropResult> rs;
    rs.push_back(monomial_oracle(F));
    rs.push_back(criterion_random(F, n, st.seed));
    rs.push_back(forma_k_is_alpha_beta(F, std::max<std::uint64_t>(1, n / 10), st.seed + 1));
    rs.push_back(rank5_roundtrip(F, true, std::max<std::uint64_t>(1, n / 10), st.seed + 2));
    rs.push_back(rank5_roundtrip(F, false, std::max<std::uint64_t>(1, n / 10), st.seed + 3));
    rs.push_back(rank44_roundtrip(F, true, std::max<std::uint64_t>(1, n / 10), st.seed + 4));
    rs.push_back(rank44_roundtrip(F, false, std::max<std::uint64_t>(1, n / 10), st.seed + 5));
    if (F.q() > 2) {
        rs.push_back(degree_law(F));
        rs.push_back(curve_lifts(F, std::max<std::uint64_t>(1, n / 10), st.seed + 6));
    }
    std::uint64_t failing = 0;
    for (const PropResult& r : rs) {
        w(r.to_json(F));
        if (!r.pass()) ++failing;
    }
    w({{"type", "summary"}, {"properties", rs.size()}, {"failing", failing}});
    return failing ? 2 : 0;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scattered linear sets of PG(1,q^5): checks, classification and exhaustive campaigns", "msls"};
    app.require_subcommand(1, 1);
    CliState st;
    CampaignFlags cf;
    std::string poly, g_text, h_text, a_text, d_text, e_text;
    bool deep = false;
    std::uint64_t n = 100, lifts = 100;

    auto common = [&](CLI::App* c) {
        c->add_option("--q", st.q, "field order q as p^h or q")->required();
        c->add_option("--out", st.out, "write JSON lines to FILE");
        c->add_option("--seed", st.seed, "seed for randomized checks");
    };
    auto campaign = [&](CLI::App* c) {
        common(c);
        c->add_option("--jobs", cf.jobs, "number of shards")->check(CLI::PositiveNumber);
        c->add_option("--threads", cf.threads, "worker threads (default: min(jobs, cores))");
        c->add_option("--resume", cf.resume, "checkpoint file, created or resumed");
        c->add_option("--max-units", cf.max_units, "stop after this many units (resumable)");
        c->add_option("--checkpoint-every", cf.every, "units between partial checkpoints")->check(CLI::PositiveNumber);
    };

    auto* fi = app.add_subcommand("field-info", "field construction");
    common(fi);
    auto* sc = app.add_subcommand("scattered-check", "scatteredness of x -> (x, f(x)) or (g(x), h(x))");
    common(sc);
    sc->add_option("--poly", poly, "f(x), e.g. \"x^q + g^3*x^(q^4)\"");
    sc->add_option("--g-poly", g_text, "first component g(x)");
    sc->add_option("--h-poly", h_text, "second component h(x)");
    auto* cp = app.add_subcommand("classify-plane", "classify the vertex plane of a linear set");
    common(cp);
    cp->add_option("--a", a_text, "a2,a3,a4 of x^q + a2 x^(q^2) + a3 x^(q^3) + a4 x^(q^4)");
    cp->add_option("--g-poly", g_text, "first component g(x)");
    cp->add_option("--h-poly", h_text, "second component h(x)");
    cp->add_flag("--analyze", deep, "run the invariant battery and canonical forms");
    auto* ce = app.add_subcommand("census", "all planes of the form x^q + a2 x^(q^2) + a3 x^(q^3) + a4 x^(q^4)");
    campaign(ce);
    ce->add_flag_callback("--reduce", [&] { cf.reduce = 1; }, "orbit reduction (default: on for q >= 4)");
    ce->add_flag_callback("--no-reduce", [&] { cf.reduce = 0; }, "full unreduced sweep");
    ce->add_flag("--battery", cf.battery, "invariant battery on every non-pseudoregulus plane");
    auto* tc = app.add_subcommand("tconj", "witness table for the degree equation");
    campaign(tc);
    tc->add_option("--s", st.s, "generator exponents (default 1,2,3,4)")->delimiter(',');
    auto* cc = app.add_subcommand("c3c4", "scatteredness sweep of the C3 and C4 families");
    campaign(cc);
    cc->add_flag_callback("--reduce", [&] { cf.reduce = 1; }, "Frobenius and scaling reductions (default: on for q >= 4)");
    cc->add_flag_callback("--no-reduce", [&] { cf.reduce = 0; }, "full unreduced sweep");
    cc->add_flag("--c4-only", cf.c4_only, "skip the C3 branches");
    auto* fk = app.add_subcommand("formak", "scan of the k, delta family");
    campaign(fk);
    fk->add_option("--s", st.s, "generator exponents (default 1,2,3,4)")->delimiter(',');
    auto* cv = app.add_subcommand("curve-verify", "curve counts, lifts and the conic case");
    common(cv);
    cv->add_option("--s", st.s)->delimiter(',');
    cv->add_option("--delta", d_text);
    cv->add_option("--eps", e_text);
    cv->add_option("--lifts", lifts, "lifted points per pair");
    auto* ps = app.add_subcommand("prop-suite", "randomized property checks");
    common(ps);
    ps->add_option("--n", n, "draws per property");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        auto [p, h] = parse_q(st.q);
        Field F(p, h);
        bool reduce = cf.reduce < 0 ? F.q() >= 4 : cf.reduce == 1;
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "census") return run_campaign_cli(CensusCampaign(F, reduce, cf.battery), st, cf, out, err);
        if (name == "tconj") return run_campaign_cli(TConjCampaign(F, default_s(st.s)), st, cf, out, err);
        if (name == "c3c4") return run_campaign_cli(C3C4Campaign(F, reduce, !cf.c4_only), st, cf, out, err);
        if (name == "formak") return run_campaign_cli(FormaKCampaign(F, default_s(st.s)), st, cf, out, err);
        LineWriter w(out, st.out);
        int code = 0;
        if (name == "field-info") code = cmd_field_info(F, st, w);
        else if (name == "scattered-check") code = cmd_scattered_check(F, st, poly, g_text, h_text, w);
        else if (name == "classify-plane") code = cmd_classify(F, st, a_text, g_text, h_text, deep, w);
        else if (name == "curve-verify") code = cmd_curve_verify(F, st, d_text, e_text, lifts, w);
        else if (name == "prop-suite") code = cmd_prop_suite(F, st, n, w);
        w.flush();
        return code;
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FieldError& e) {
        err << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PolyError& e) {
        err << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FamilyError& e) {
        err << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CurveError& e) {
        err << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SearchError& e) {
        err << "error: " << e.what() << '\n';
        return e.kind == SearchError::Kind::BadJob ? kExitUsage : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace msls
