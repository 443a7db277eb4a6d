#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "msls/config.hpp"
#include "msls/families.hpp"
#include "msls/serialize.hpp"

namespace msls {

class SearchError : public std::runtime_error {
public:
    enum class Kind { BadJob, ValidationFailed, Checkpoint };
    SearchError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Shard {
    std::uint64_t begin = 0, end = 0;
};

inline std::vector<Shard> partition(std::uint64_t total, unsigned count) {
    if (count == 0) throw SearchError(SearchError::Kind::BadJob, "shard count must be positive");
    std::vector<Shard> out(count);
    for (unsigned i = 0; i < count; ++i) {
        out[i].begin = static_cast<std::uint64_t>(static_cast<unsigned __int128>(total) * i / count);
        out[i].end = static_cast<std::uint64_t>(static_cast<unsigned __int128>(total) * (i + 1) / count);
    }
    return out;
}

// Index arithmetic check: shards cover [0, total) with no gap and no overlap.
inline bool partition_self_test(std::uint64_t total, unsigned count) {
    auto s = partition(total, count);
    if (s.front().begin != 0 || s.back().end != total) return false;
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].begin > s[i].end) return false;
        if (i + 1 < s.size() && s[i].end != s[i + 1].begin) return false;
        covered += s[i].end - s[i].begin;
    }
    return covered == total;
}

struct Tally {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t checksum = 0;
    std::map<std::uint64_t, json> records;

    void add(const std::string& key, std::uint64_t n = 1) { counts[key] += n; }
    std::uint64_t get(const std::string& key) const {
        auto it = counts.find(key);
        return it == counts.end() ? 0 : it->second;
    }
    void merge(const Tally& o) {
        for (const auto& [k, v] : o.counts) counts[k] += v;
        checksum += o.checksum;
        for (const auto& [u, r] : o.records) records[u] = r;
    }
    json to_json() const {
        json c = json::object();
        for (const auto& [k, v] : counts) c[k] = v;
        json r = json::array();
        for (const auto& [u, rec] : records) r.push_back(json::array({u, rec}));
        return {{"counts", c}, {"checksum", checksum}, {"records", r}};
    }
    static Tally from_json(const json& j) {
        Tally t;
        for (const auto& [k, v] : j.at("counts").items()) t.counts[k] = v.get<std::uint64_t>();
        t.checksum = j.at("checksum").get<std::uint64_t>();
        for (const auto& e : j.at("records")) t.records[e.at(0).get<std::uint64_t>()] = e.at(1);
        return t;
    }
};

struct Worker {
    ScatterScratch scatter;
};

class Campaign {
public:
    explicit Campaign(const Field& F) : F_(F) {}
    virtual ~Campaign() = default;
    const Field& field() const { return F_; }
    virtual std::string name() const = 0;
    virtual json config() const = 0;
    virtual std::uint64_t units() const = 0;
    // Validates reductions; throws SearchError(ValidationFailed) on mismatch.
    virtual json validate(std::uint64_t) const { return nullptr; }
    virtual void process(std::uint64_t unit, Tally& t, Worker& w) const = 0;
    virtual json summary(const Tally& t) const = 0;
    // 0 consistent, 1 internal inconsistency, 2 counterexample.
    virtual int verdict(const Tally& t) const = 0;

protected:
    const Field& F_;
};

struct RunOptions {
    unsigned shards = 1;
    unsigned threads = 0;  // 0: min(shards, hardware)
    std::string checkpoint;
    std::uint64_t checkpoint_every = std::uint64_t{1} << 18;
    std::uint64_t max_units = 0;  // 0: unlimited
    std::uint64_t seed = 1;
    std::function<void(const std::string&)> log;
};

struct RunResult {
    bool complete = false;
    int exit_code = 0;
    std::vector<json> lines;
    Tally total;
    std::uint64_t processed = 0;
};

constexpr int kExitBudget = 3;

namespace detail {

inline void write_atomic(const std::string& path, const std::string& data) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SearchError(SearchError::Kind::Checkpoint, "cannot write " + tmp);
        out << data;
        out.flush();
        if (!out) throw SearchError(SearchError::Kind::Checkpoint, "short write on " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SearchError(SearchError::Kind::Checkpoint, "cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SearchError(SearchError::Kind::Checkpoint, "corrupt checkpoint " + path + ": " + e.what());
    }
}

}  // namespace detail

inline json job_descriptor(const Campaign& c, const RunOptions& o) {
    return {{"campaign", c.name()}, {"field", field_json(c.field())}, {"config", c.config()},
            {"seed", o.seed},       {"units", c.units()},            {"shards", o.shards}};
}

inline json header_line(const Campaign& c, const RunOptions& o) {
    return {{"schema", 1},   {"type", "header"},        {"campaign", c.name()}, {"field", field_json(c.field())},
            {"config", c.config()}, {"seed", o.seed}, {"units", c.units()}};
}

inline RunResult run_campaign(const Campaign& c, const RunOptions& o) {
    auto log = [&](const std::string& m) {
        if (o.log) o.log(m);
    };
    const std::uint64_t total = c.units();
    if (!partition_self_test(total, o.shards))
        throw SearchError(SearchError::Kind::BadJob, "shard partition self-test failed");
    const std::vector<Shard> shards = partition(total, o.shards);
    const json job = job_descriptor(c, o);

    json validation = c.validate(o.seed);

    std::vector<std::optional<Tally>> done(o.shards);
    std::map<unsigned, std::pair<std::uint64_t, Tally>> progress;
    if (!o.checkpoint.empty() && std::filesystem::exists(o.checkpoint)) {
        json ck = detail::read_json_file(o.checkpoint);
        if (ck.value("schema", 0) != 1 || ck.at("job") != job)
            throw SearchError(SearchError::Kind::BadJob, "checkpoint " + o.checkpoint + " belongs to a different job");
        for (const auto& e : ck.at("completed")) done.at(e.at("shard").get<unsigned>()) = Tally::from_json(e.at("tally"));
        for (const auto& e : ck.at("progress"))
            progress[e.at("shard").get<unsigned>()] = {e.at("next").get<std::uint64_t>(), Tally::from_json(e.at("tally"))};
        std::size_t n = std::count_if(done.begin(), done.end(), [](const auto& t) { return t.has_value(); });
        log("resuming: " + std::to_string(n) + "/" + std::to_string(o.shards) + " shards complete");
    }

    std::mutex mu;
    auto save = [&]() {
        if (o.checkpoint.empty()) return;
        json completed = json::array(), partial = json::array();
        for (unsigned i = 0; i < o.shards; ++i)
            if (done[i]) completed.push_back({{"shard", i}, {"tally", done[i]->to_json()}});
        for (const auto& [i, p] : progress) partial.push_back({{"shard", i}, {"next", p.first}, {"tally", p.second.to_json()}});
        json ck{{"schema", 1}, {"job", job}, {"completed", completed}, {"progress", partial}};
        detail::write_atomic(o.checkpoint, ck.dump());
    };

    std::atomic<unsigned> next_shard{0};
    std::atomic<std::uint64_t> used{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    const std::uint64_t budget = o.max_units ? o.max_units : ~std::uint64_t{0};

    auto worker = [&]() {
        Worker w;
        try {
            for (;;) {
                unsigned i = next_shard.fetch_add(1);
                if (i >= o.shards || stop.load()) return;
                std::uint64_t u;
                Tally t;
                {
                    std::lock_guard<std::mutex> g(mu);
                    if (done[i]) continue;
                    auto it = progress.find(i);
                    if (it != progress.end()) {
                        u = it->second.first;
                        t = it->second.second;
                    } else {
                        u = shards[i].begin;
                    }
                }
                std::uint64_t since = 0;
                bool interrupted = false;
                for (; u < shards[i].end; ++u) {
                    if (stop.load() || used.fetch_add(1) >= budget) {
                        stop = true;
                        interrupted = true;
                        break;
                    }
                    c.process(u, t, w);
                    if (++since == o.checkpoint_every && u + 1 < shards[i].end) {
                        since = 0;
                        std::lock_guard<std::mutex> g(mu);
                        progress[i] = {u + 1, t};
                        save();
                    }
                }
                std::lock_guard<std::mutex> g(mu);
                if (interrupted) {
                    progress[i] = {u, std::move(t)};
                } else {
                    progress.erase(i);
                    done[i] = std::move(t);
                }
                save();
                if (interrupted) return;
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(mu);
            if (!failure) failure = std::current_exception();
            stop = true;
        }
    };

    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned nthreads = std::max(1u, std::min(o.threads ? o.threads : hw, o.shards));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < nthreads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    RunResult res;
    res.processed = std::min(used.load(), budget);
    res.complete = std::all_of(done.begin(), done.end(), [](const auto& t) { return t.has_value(); });
    if (!res.complete) {
        res.exit_code = kExitBudget;
        log("BudgetExceeded: unit budget exhausted; resume from " +
            (o.checkpoint.empty() ? std::string("(no checkpoint)") : o.checkpoint));
        return res;
    }
    for (const auto& t : done) res.total.merge(*t);
    res.lines.push_back(header_line(c, o));
    if (!validation.is_null()) res.lines.push_back(validation);
    for (const auto& [u, rec] : res.total.records) res.lines.push_back(rec);
    json s = c.summary(res.total);
    res.exit_code = c.verdict(res.total);
    s["checksum"] = res.total.checksum;
    s["exit"] = res.exit_code;
    res.lines.push_back(s);
    return res;
}

// Triples (a2, a3, a4) up to a -> (a2 u, a3 u^{q+1}, a4 u^{q^2+q+1}), N(u) = 1.
class TripleSpace {
public:
    explicit TripleSpace(const Field& F) : F_(F), Q_(F.size()), d_(F.q() - 1), N_(F.cosets()), ord_(F.order()) {
        e3_ = F.q() + 1;
        e4_ = F.q() * F.q() + F.q() + 1;
        inv3_ = static_cast<std::uint64_t>(detail::mod_inverse(static_cast<std::int64_t>(e3_ % N_), N_));
        inv4_ = static_cast<std::uint64_t>(detail::mod_inverse(static_cast<std::int64_t>(e4_ % N_), N_));
    }

    std::uint64_t plain_units() const { return Q_ * Q_ * Q_; }
    std::uint64_t rep_units() const { return d_ * (Q_ * Q_ + Q_ + 1) + 1; }

    std::array<Elem, 3> plain(std::uint64_t u) const {
        return {F_.element_at(u / (Q_ * Q_)), F_.element_at((u / Q_) % Q_), F_.element_at(u % Q_)};
    }
    std::uint64_t plain_index(const std::array<Elem, 3>& a) const {
        return (F_.index_of(a[0]) * Q_ + F_.index_of(a[1])) * Q_ + F_.index_of(a[2]);
    }

    std::array<Elem, 3> rep(std::uint64_t u) const {
        const std::uint64_t b1 = d_ * Q_ * Q_, b2 = b1 + d_ * Q_, b3 = b2 + d_;
        Elem z = F_.zero();
        if (u < b1) return {Elem{static_cast<std::uint32_t>(u / (Q_ * Q_))}, F_.element_at((u / Q_) % Q_), F_.element_at(u % Q_)};
        if (u < b2) {
            u -= b1;
            return {z, Elem{static_cast<std::uint32_t>(u / Q_)}, F_.element_at(u % Q_)};
        }
        if (u < b3) return {z, z, Elem{static_cast<std::uint32_t>(u - b2)}};
        return {z, z, z};
    }

    // Multiplication by u = g^L, L a multiple of q - 1.
    std::array<Elem, 3> act(const std::array<Elem, 3>& a, std::uint64_t L) const {
        auto m = [&](Elem x, std::uint64_t e) { return x.is_zero() ? x : F_.mul(x, F_.gen_pow(L * e % ord_)); };
        return {m(a[0], 1), m(a[1], e3_), m(a[2], e4_)};
    }

    std::array<Elem, 3> canonical(const std::array<Elem, 3>& a) const {
        if (!a[0].is_zero()) {
            std::uint64_t L = (ord_ + a[0].v % d_ - a[0].v) % ord_;
            return act(a, L);
        }
        if (!a[1].is_zero()) {
            std::uint64_t m = ((ord_ + a[1].v % d_ - a[1].v) % ord_) / d_ % N_;
            return act(a, d_ * (m * inv3_ % N_));
        }
        if (!a[2].is_zero()) {
            std::uint64_t m = ((ord_ + a[2].v % d_ - a[2].v) % ord_) / d_ % N_;
            return act(a, d_ * (m * inv4_ % N_));
        }
        return a;
    }

    // Index of a canonical triple.
    std::uint64_t rep_index(const std::array<Elem, 3>& a) const {
        const std::uint64_t b1 = d_ * Q_ * Q_, b2 = b1 + d_ * Q_, b3 = b2 + d_;
        if (!a[0].is_zero()) return (a[0].v * Q_ + F_.index_of(a[1])) * Q_ + F_.index_of(a[2]);
        if (!a[1].is_zero()) return b1 + a[1].v * Q_ + F_.index_of(a[2]);
        if (!a[2].is_zero()) return b2 + a[2].v;
        return b3;
    }

    std::uint64_t class_index(const std::array<Elem, 3>& a) const { return rep_index(canonical(a)); }

    std::array<Elem, 3> frob(const std::array<Elem, 3>& a, int j) const {
        return {F_.frob(a[0], j), F_.frob(a[1], j), F_.frob(a[2], j)};
    }

    struct FrobClass {
        bool minimal = true;
        std::uint64_t weight = 1;  // number of triples represented
        std::uint64_t min_index = 0;
    };

    FrobClass frobenius_class(std::uint64_t u, const std::array<Elem, 3>& a) const {
        std::set<std::uint64_t> seen{u};
        for (int j = 1; j < 5; ++j) seen.insert(class_index(frob(a, j)));
        FrobClass c;
        c.min_index = *seen.begin();
        c.minimal = c.min_index == u;
        bool zero = a[0].is_zero() && a[1].is_zero() && a[2].is_zero();
        c.weight = zero ? 1 : N_ * seen.size();
        return c;
    }

    std::uint64_t orbit_min(const std::array<Elem, 3>& a) const {
        std::uint64_t u = class_index(a);
        return frobenius_class(u, rep(u)).min_index;
    }

    std::uint64_t cosets() const { return N_; }

private:
    const Field& F_;
    std::uint64_t Q_, d_, N_, ord_, e3_, e4_, inv3_, inv4_;
};

class CensusCampaign : public Campaign {
public:
    CensusCampaign(const Field& F, bool reduce, bool battery) : Campaign(F), reduce_(reduce), battery_(battery), space_(F) {}

    std::string name() const override { return "census"; }
    json config() const override { return {{"reduce", reduce_}, {"battery", battery_}}; }
    std::uint64_t units() const override { return reduce_ ? space_.rep_units() : space_.plain_units(); }

    struct Verdict {
        bool scattered = false;
        ConfigClass cls = ConfigClass::NonScattered;
        int rkA = 0, rkB = 0;
        bool operator==(const Verdict&) const = default;
    };

    Verdict judge(const std::array<Elem, 3>& a, ScatterScratch& sc) const {
        Verdict v;
        v.scattered = is_scattered(F_, f0_poly(a[0], a[1], a[2]), sc, false).scattered;
        if (!v.scattered) return v;
        ConfigReport r = classify(F_, gamma_from_poly(F_, a[0], a[1], a[2]), Model::moore(), true);
        v.cls = r.cls;
        v.rkA = r.rkA;
        v.rkB = r.rkB;
        return v;
    }

    json validate(std::uint64_t seed) const override {
        if (!reduce_) return nullptr;
        std::mt19937_64 rng(seed);
        const std::uint64_t Q = F_.size();
        ScatterScratch sc;
        std::uint64_t index_checks = 0, pairs = 0, scattered_pairs = 0, mismatches = 0;
        for (int it = 0; it < 1000; ++it, ++index_checks) {
            std::uint64_t u = rng() % units();
            if (space_.rep_index(space_.rep(u)) != u || space_.class_index(space_.rep(u)) != u) ++mismatches;
        }
        for (int it = 0; it < 1000; ++it, ++pairs) {
            std::array<Elem, 3> x{F_.element_at(rng() % Q), F_.element_at(rng() % Q), F_.element_at(rng() % Q)};
            if (it % 3 >= 1) x[0] = F_.zero();
            if (it % 3 == 2) x[1] = F_.zero();
            std::uint64_t L = (F_.q() - 1) * (rng() % space_.cosets());
            int j = static_cast<int>(rng() % 5);
            std::array<Elem, 3> y = space_.frob(space_.act(x, L), j);
            Verdict vx = judge(x, sc), vy = judge(y, sc);
            if (vx.scattered) ++scattered_pairs;
            if (!(vx == vy) || space_.orbit_min(x) != space_.orbit_min(y)) ++mismatches;
        }
        json out{{"type", "validation"},
                 {"reduction", "norm-one scaling and coefficient Frobenius"},
                 {"indexChecks", index_checks},
                 {"orbitPairs", pairs},
                 {"scatteredPairs", scattered_pairs},
                 {"mismatches", mismatches}};
        if (mismatches) throw SearchError(SearchError::Kind::ValidationFailed, "census reduction validation: " + out.dump());
        return out;
    }

    void process(std::uint64_t u, Tally& t, Worker& w) const override {
        std::array<Elem, 3> a;
        std::uint64_t weight = 1;
        if (reduce_) {
            a = space_.rep(u);
            auto fc = space_.frobenius_class(u, a);
            if (!fc.minimal) return;
            weight = fc.weight;
            t.add("representatives");
        } else {
            a = space_.plain(u);
        }
        t.add("triples", weight);
        if (!is_scattered(F_, f0_poly(a[0], a[1], a[2]), w.scatter, false).scattered) {
            t.add("nonScattered", weight);
            t.checksum += mix64(u << 1);
            return;
        }
        t.checksum += mix64((u << 1) | 1);
        ConfigReport r = classify(F_, gamma_from_poly(F_, a[0], a[1], a[2]), Model::moore(), true);
        t.add(class_name(r.cls), weight);
        json rec{{"type", "msls"},
                 {"unit", u},
                 {"a", json::array({F_.format(a[0]), F_.format(a[1]), F_.format(a[2])})},
                 {"class", class_name(r.cls)},
                 {"weight", weight}};
        if (r.A) rec["rkA"] = r.rkA, rec["rkB"] = r.rkB;
        if (!r.summary_consistent) {
            t.add("summaryInconsistent");
            rec["summaryConsistent"] = false;
        }
        if (battery_ && r.cls != ConfigClass::Pseudoregulus) {
            t.add("batteryPlanes");
            std::vector<std::string> bad = battery_failures(r);
            if (!bad.empty()) {
                t.add("batteryViolations");
                rec["violations"] = bad;
            }
        }
        t.records[u] = std::move(rec);
    }

    std::vector<std::string> battery_failures(ConfigReport& r) const {
        std::vector<std::string> bad;
        for (const Finding& f : invariant_battery(F_, r))
            if (!f.pass) bad.push_back(f.name);
        try {
            analyze(F_, r);
        } catch (const ConfigError& e) {
            bad.push_back(std::string("analysis: ") + e.what());
            return bad;
        }
        if (r.lm) {
            if (!r.lm->lincomb_ok) bad.push_back("lambda mu linear combination");
            if (!r.lm->eq1_ok) bad.push_back("first norm identity");
            if (!r.lm->eq2_ok) bad.push_back("second norm identity");
        }
        if (r.u4) {
            if (!r.u4->howe_residual.is_zero()) bad.push_back("u4 residual");
            if (!r.u4->eqB_agrees) bad.push_back("product test disagrees with LP lines");
            if (r.u4->closed_form_ok && !*r.u4->closed_form_ok) bad.push_back("u4 closed form");
        }
        return bad;
    }

    json summary(const Tally& t) const override {
        json counts = json::object();
        for (const auto& [k, v] : t.counts) counts[k] = v;
        const std::uint64_t Q = F_.size();
        return {{"type", "summary"},
                {"campaign", name()},
                {"counts", counts},
                {"pseudoregulus", t.get("Pseudoregulus")},
                {"configI", t.get("LP_ConfigI")},
                {"configII", t.get("LP_ConfigII")},
                {"newCandidate", t.get("NewCandidate")},
                {"nonScattered", t.get("nonScattered")},
                {"expectedTriples", Q * Q * Q}};
    }

    int verdict(const Tally& t) const override {
        const std::uint64_t Q = F_.size();
        if (t.get("triples") != Q * Q * Q || t.get("summaryInconsistent")) return 1;
        if (t.get("NewCandidate") || t.get("batteryViolations")) return 2;
        return 0;
    }

    const TripleSpace& space() const { return space_; }

private:
    bool reduce_, battery_;
    TripleSpace space_;
};

inline std::vector<int> normalize_s_set(std::vector<int> s) {
    for (int& x : s) x = reduce_s(x);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

inline json s_json(const std::vector<int>& s) { return json(s); }

class TConjCampaign : public Campaign {
public:
    TConjCampaign(const Field& F, std::vector<int> s) : Campaign(F), s_(normalize_s_set(std::move(s))) {}

    std::string name() const override { return "tconj"; }
    json config() const override { return {{"s", s_json(s_)}}; }
    std::uint64_t units() const override {
        std::uint64_t d = F_.q() - 1;
        return s_.size() * d * d;
    }

    void process(std::uint64_t u, Tally& t, Worker&) const override {
        const std::uint64_t d = F_.q() - 1;
        int s = s_[u / (d * d)];
        Elem delta = F_.base_units()[(u / d) % d], eps = F_.base_units()[u % d];
        if (F_.mul(F_.mul(delta, delta), eps) == F_.one()) {
            t.add("excludedDelta2Eps");
            return;
        }
        if (conj_discriminant(F_, delta, eps).is_zero()) {
            t.add("excludedDiscriminant");
            return;
        }
        t.add("validPairs");
        json rec{{"type", "witness"}, {"s", s}, {"delta", F_.format(delta)}, {"epsilon", F_.format(eps)}};
        auto x = sctness_solve(F_, delta, eps, s);
        if (!x) {
            t.add("noSolution");
            rec["type"] = "noSolution";
        } else if (!sctness_verify(F_, delta, eps, s, *x)) {
            t.add("verifyFailures");
            rec["x"] = F_.format(*x);
            rec["verified"] = false;
        } else {
            t.add("witnessed");
            rec["x"] = F_.format(*x);
            rec["verified"] = true;
            t.checksum += mix64(u ^ (std::uint64_t{x->v} << 32));
        }
        t.records[u] = std::move(rec);
    }

    json summary(const Tally& t) const override {
        return {{"type", "summary"},
                {"campaign", name()},
                {"validPairs", t.get("validPairs")},
                {"witnessed", t.get("witnessed")},
                {"noSolution", t.get("noSolution")},
                {"verifyFailures", t.get("verifyFailures")},
                {"excludedDelta2Eps", t.get("excludedDelta2Eps")},
                {"excludedDiscriminant", t.get("excludedDiscriminant")}};
    }
    int verdict(const Tally& t) const override {
        if (t.get("verifyFailures")) return 1;
        return t.get("noSolution") ? 2 : 0;
    }

private:
    std::vector<int> s_;
};

// C4 over norm-one k; C3 split into the F1 branch (Tr(1/eta) != 0) and the residual (eta, rho) branch.
class C3C4Campaign : public Campaign {
public:
    C3C4Campaign(const Field& F, bool reduce, bool with_c3 = true) : Campaign(F), reduce_(reduce), c3_(with_c3) {
        N_ = F.cosets();
        c4_ = N_;
        f1_ = c3_ ? F.size() - 1 : 0;
        eta_ = !c3_ ? 0 : reduce_ ? N_ : F.size() - 1;
    }

    std::string name() const override { return "c3c4"; }
    json config() const override { return {{"reduce", reduce_}, {"c3", c3_}}; }
    std::uint64_t units() const override { return c4_ + f1_ + eta_ * F_.size(); }

    bool c4_scattered(Elem k, ScatterScratch& sc, std::optional<std::pair<Elem, Elem>>* w = nullptr) const {
        LinearizedPoly f = c4_poly(F_, k, 1);
        ScatterResult r = is_scattered(F_, f, sc, w != nullptr);
        if (w) *w = r.witness;
        return r.scattered;
    }
    bool c3_scattered(Elem eta, Elem rho, ScatterScratch& sc, std::optional<std::pair<Elem, Elem>>* w = nullptr) const {
        auto [g, h] = family_pair(F_, FamilySpec::c3(eta, rho));
        ScatterResult r = is_scattered_pair(F_, g, h, sc, w != nullptr);
        if (w) *w = r.witness;
        return r.scattered;
    }
    bool f1_scattered(Elem eta, ScatterScratch& sc, std::optional<std::pair<Elem, Elem>>* w = nullptr) const {
        ScatterResult r = is_scattered(F_, f1_poly(F_, eta), sc, w != nullptr);
        if (w) *w = r.witness;
        return r.scattered;
    }

    json validate(std::uint64_t seed) const override {
        std::mt19937_64 rng(seed);
        ScatterScratch sc;
        const std::uint64_t Q = F_.size();
        auto random_unit = [&] { return F_.element_at(1 + rng() % (Q - 1)); };
        auto random_rho = [&] {
            Elem r;
            do r = F_.element_at(rng() % Q);
            while (F_.trace(r).is_zero());
            return r;
        };
        std::uint64_t mismatches = 0, c4 = 0, c3 = 0, f1 = 0;
        json out{{"type", "validation"}};
        if (reduce_) {
            for (int it = 0; it < 100; ++it, ++c4) {
                Elem k = F_.gen_pow((F_.q() - 1) * (rng() % N_));
                if (c4_scattered(k, sc) != c4_scattered(F_.frob(k, 1), sc)) ++mismatches;
            }
            for (int it = 0; c3_ && it < 100; ++it, ++c3) {
                Elem eta;
                do eta = random_unit();
                while (!F_.trace(eta).is_zero());
                Elem rho = random_rho(), c = F_.base_units()[rng() % (F_.q() - 1)];
                if (c3_scattered(eta, rho, sc) != c3_scattered(F_.mul(c, eta), F_.mul(c, rho), sc)) ++mismatches;
            }
            out["c4Frobenius"] = c4;
            out["c3Scaling"] = c3;
        }
        for (int it = 0; c3_ && it < 100; ++it, ++f1) {
            Elem eta;
            do eta = random_unit();
            while (!F_.trace(eta).is_zero() || F_.trace(F_.inv(eta)).is_zero());
            if (f1_scattered(eta, sc) != c3_scattered(eta, random_rho(), sc)) ++mismatches;
        }
        out["f1VersusC3"] = f1;
        out["mismatches"] = mismatches;
        if (mismatches) throw SearchError(SearchError::Kind::ValidationFailed, "c3c4 reduction validation: " + out.dump());
        return out;
    }

    void process(std::uint64_t u, Tally& t, Worker& w) const override {
        std::optional<std::pair<Elem, Elem>> wit;
        json rec;
        std::string branch;
        std::uint64_t weight = 1;
        LinearizedPoly g = identity_poly(), h;
        bool scattered;
        if (u < c4_) {
            branch = "C4";
            std::uint64_t j = u;
            if (reduce_) {
                std::set<std::uint64_t> orbit{j};
                for (int i = 1; i < 5; ++i) orbit.insert(j * F_.qpow(i) % N_);
                if (*orbit.begin() != j) return;
                weight = orbit.size();
            }
            Elem k = F_.gen_pow((F_.q() - 1) * j);
            h = c4_poly(F_, k, 1);
            scattered = c4_scattered(k, w.scatter, &wit);
            rec = spec_json(F_, FamilySpec::c4(k));
        } else if (u < c4_ + f1_) {
            Elem eta = F_.element_at(1 + (u - c4_));
            if (!F_.trace(eta).is_zero() || F_.trace(F_.inv(eta)).is_zero()) return;
            branch = "F1";
            h = f1_poly(F_, eta);
            scattered = f1_scattered(eta, w.scatter, &wit);
            rec = spec_json(F_, FamilySpec::f1(eta));
        } else {
            std::uint64_t v = u - c4_ - f1_;
            std::uint64_t ei = v / F_.size();
            Elem eta = reduce_ ? Elem{static_cast<std::uint32_t>(ei)} : F_.element_at(1 + ei);
            Elem rho = F_.element_at(v % F_.size());
            if (!F_.trace(eta).is_zero() || !F_.trace(F_.inv(eta)).is_zero() || F_.trace(rho).is_zero()) return;
            branch = "C3";
            if (reduce_) weight = F_.q() - 1;
            std::tie(g, h) = family_pair(F_, FamilySpec::c3(eta, rho));
            scattered = c3_scattered(eta, rho, w.scatter, &wit);
            rec = spec_json(F_, FamilySpec::c3(eta, rho));
        }
        t.add(branch + ".instances", weight);
        t.add(branch + ".tested");
        if (!scattered) {
            if (!wit || !verify_witness(F_, g, h, *wit)) {
                t.add("witnessFailures");
                rec["type"] = "witnessFailure";
                rec["unit"] = u;
                t.records[u] = std::move(rec);
                return;
            }
            t.checksum += mix64(u ^ (std::uint64_t{wit->first.v} << 20) ^ (std::uint64_t{wit->second.v} << 42));
            return;
        }
        t.add(branch + ".scattered", weight);
        rec["type"] = "scattered";
        rec["unit"] = u;
        t.records[u] = std::move(rec);
    }

    json summary(const Tally& t) const override {
        json out{{"type", "summary"}, {"campaign", name()}};
        for (const char* b : {"C4", "F1", "C3"}) {
            std::string s(b);
            out[s] = {{"instances", t.get(s + ".instances")}, {"tested", t.get(s + ".tested")}, {"scattered", t.get(s + ".scattered")}};
        }
        out["witnessFailures"] = t.get("witnessFailures");
        return out;
    }
    int verdict(const Tally& t) const override {
        if (t.get("witnessFailures") || t.get("C4.instances") != N_) return 1;
        return t.get("C4.scattered") || t.get("F1.scattered") || t.get("C3.scattered") ? 2 : 0;
    }

private:
    bool reduce_, c3_;
    std::uint64_t N_, c4_, f1_, eta_;
};

class FormaKCampaign : public Campaign {
public:
    FormaKCampaign(const Field& F, std::vector<int> s) : Campaign(F), s_(normalize_s_set(std::move(s))) {}

    std::string name() const override { return "formak"; }
    json config() const override { return {{"s", s_json(s_)}}; }
    std::uint64_t units() const override { return s_.size() * (F_.size() - 1) * (F_.q() - 1); }

    struct Instance {
        int s;
        Elem k, delta, alpha, beta;
    };
    Instance instance(std::uint64_t u) const {
        const std::uint64_t d = F_.q() - 1, K = F_.size() - 1;
        Instance in;
        in.s = s_[u / (K * d)];
        in.k = F_.element_at(1 + (u / d) % K);
        in.delta = F_.base_units()[u % d];
        in.alpha = F_.inv(in.k);
        in.beta = F_.mul(in.delta, F_.mul(F_.frob(in.k, 4 * in.s), F_.frob(in.k, 2 * in.s)));
        return in;
    }

    json validate(std::uint64_t seed) const override {
        std::mt19937_64 rng(seed);
        ScatterScratch sc;
        std::uint64_t mismatches = 0, n = 0;
        for (; n < 100; ++n) {
            Instance in = instance(rng() % units());
            auto v = alpha_beta_predicates(F_, in.alpha, in.beta, in.s);
            auto [g, h] = alpha_beta_pair(F_, in.alpha, in.beta, in.s);
            if (v.scattered_by_criterion != is_scattered_pair(F_, g, h, sc, false).scattered) ++mismatches;
        }
        json out{{"type", "validation"}, {"criterionVersusDirect", n}, {"mismatches", mismatches}};
        if (mismatches) throw SearchError(SearchError::Kind::ValidationFailed, "formak criterion validation: " + out.dump());
        return out;
    }

    void process(std::uint64_t u, Tally& t, Worker&) const override {
        Instance in = instance(u);
        auto v = alpha_beta_predicates(F_, in.alpha, in.beta, in.s);
        if (v.rank_lt5) {
            t.add("rankLT5");
            return;
        }
        if (!v.scattered_by_criterion) {
            t.add("nonScattered");
            t.checksum += mix64(u ^ (std::uint64_t{v.u->v} << 32));
            return;
        }
        t.add("scattered");
        auto [g, h] = alpha_beta_pair(F_, in.alpha, in.beta, in.s);
        ConfigReport r = classify(F_, gamma_from_pair(F_, g, h), Model::moore(), true);
        t.add(class_name(r.cls));
        json rec{{"type", "scattered"}, {"unit", u}};
        rec.update(spec_json(F_, FamilySpec::forma_k(in.k, in.delta, in.s)));
        rec["class"] = class_name(r.cls);
        if (r.A) rec["rkA"] = r.rkA, rec["rkB"] = r.rkB;
        if (!v.generale_ok) {
            t.add("necessaryConditionViolations");
            rec["necessaryCondition"] = false;
        }
        if (r.cls != ConfigClass::Pseudoregulus && !is_lp(r.cls)) {
            Elem eps = F_.norm(in.k);
            bool off_boundary = F_.mul(F_.mul(in.delta, in.delta), eps) != F_.one();
            bool disc = !conj_discriminant(F_, in.delta, eps).is_zero();
            rec["epsilon"] = F_.format(eps);
            rec["delta2EpsNotOne"] = off_boundary;
            rec["discriminantNonzero"] = disc;
            if (off_boundary && disc) {
                auto x = sctness_solve(F_, in.delta, eps, in.s);
                rec["sctness"] = x ? json(F_.format(*x)) : json("NoSolution");
            }
            t.add("counterexamples");
        }
        t.records[u] = std::move(rec);
    }

    json summary(const Tally& t) const override {
        json counts = json::object();
        for (const auto& [k, v] : t.counts) counts[k] = v;
        return {{"type", "summary"},
                {"campaign", name()},
                {"counts", counts},
                {"scattered", t.get("scattered")},
                {"counterexamples", t.get("counterexamples")}};
    }
    int verdict(const Tally& t) const override {
        return t.get("counterexamples") || t.get("necessaryConditionViolations") ? 2 : 0;
    }

private:
    std::vector<int> s_;
};

}  // namespace msls
