#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "msls/cli.hpp"

using namespace msls;

namespace {

std::vector<std::string> dump(const RunResult& r) {
    std::vector<std::string> out;
    for (const json& j : r.lines) out.push_back(j.dump());
    return out;
}

RunResult run(const Campaign& c, unsigned shards, const std::string& ck = "", std::uint64_t budget = 0,
              std::uint64_t every = 1 << 18) {
    RunOptions o;
    o.shards = shards;
    o.threads = 2;
    o.checkpoint = ck;
    o.max_units = budget;
    o.checkpoint_every = every;
    return run_campaign(c, o);
}

std::string temp_path(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("msls_test_" + name);
    std::filesystem::remove(p);
    return p.string();
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    std::vector<const char*> argv{"msls"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    return code;
}

}  // namespace

TEST(Partition, CoversExactly) {
    for (std::uint64_t total : {0ull, 1ull, 7ull, 1000ull, 14348907ull, 39075005ull})
        for (unsigned n : {1u, 2u, 3u, 4u, 16u, 33u}) {
            EXPECT_TRUE(partition_self_test(total, n));
            auto s = partition(total, n);
            ASSERT_EQ(s.size(), n);
            EXPECT_EQ(s.front().begin, 0u);
            EXPECT_EQ(s.back().end, total);
        }
    EXPECT_THROW(partition(10, 0), SearchError);
}

TEST(TripleSpace, RepresentativesRoundTrip) {
    Field F(2, 1);
    TripleSpace T(F);
    std::uint64_t weight = 0;
    for (std::uint64_t u = 0; u < T.rep_units(); ++u) {
        auto a = T.rep(u);
        EXPECT_EQ(T.rep_index(a), u);
        EXPECT_EQ(T.class_index(a), u);
        auto c = T.frobenius_class(u, a);
        if (c.minimal) weight += c.weight;
    }
    EXPECT_EQ(weight, F.size() * F.size() * F.size());
}

TEST(TripleSpace, CanonicalIsOrbitInvariant) {
    Field F(3, 1);
    TripleSpace T(F);
    std::mt19937_64 rng(3);
    for (int it = 0; it < 500; ++it) {
        std::array<Elem, 3> a{F.element_at(rng() % F.size()), F.element_at(rng() % F.size()), F.element_at(rng() % F.size())};
        if (it % 3 >= 1) a[0] = F.zero();
        if (it % 3 == 2) a[1] = F.zero();
        std::uint64_t L = (F.q() - 1) * (rng() % F.cosets());
        EXPECT_EQ(T.class_index(a), T.class_index(T.act(a, L)));
        EXPECT_EQ(T.orbit_min(a), T.orbit_min(T.frob(a, 1 + static_cast<int>(rng() % 4))));
    }
}

TEST(Census, ReducedMatchesUnreducedAtQ2) {
    Field F(2, 1);
    RunResult full = run(CensusCampaign(F, false, false), 1), red = run(CensusCampaign(F, true, false), 1);
    for (const char* k : {"Pseudoregulus", "LP_ConfigI", "LP_ConfigII", "NewCandidate", "nonScattered", "triples"})
        EXPECT_EQ(full.total.get(k), red.total.get(k)) << k;
    EXPECT_EQ(full.exit_code, 0);
    EXPECT_EQ(red.exit_code, 0);
}

TEST(Census, ReducedMatchesUnreducedAtQ3) {
    Field F(3, 1);
    RunResult red = run(CensusCampaign(F, true, false), 4);
    EXPECT_EQ(red.total.get("triples"), 14348907u);
    EXPECT_EQ(red.total.get("Pseudoregulus"), 243u);
    EXPECT_EQ(red.total.get("LP_ConfigI"), 14883u);
    EXPECT_EQ(red.total.get("LP_ConfigII"), 14641u);
    EXPECT_EQ(red.total.get("NewCandidate"), 0u);
}

TEST(Sharding, OutputIndependentOfShardCount) {
    Field F2(2, 1), F3(3, 1);
    std::vector<std::unique_ptr<Campaign>> cs;
    cs.push_back(std::make_unique<CensusCampaign>(F2, false, true));
    cs.push_back(std::make_unique<CensusCampaign>(F3, true, false));
    cs.push_back(std::make_unique<TConjCampaign>(F3, std::vector<int>{1, 2, 3, 4}));
    cs.push_back(std::make_unique<C3C4Campaign>(F3, false));
    cs.push_back(std::make_unique<FormaKCampaign>(F3, std::vector<int>{1, 3}));
    for (const auto& c : cs) {
        auto ref = dump(run(*c, 1));
        EXPECT_EQ(dump(run(*c, 4)), ref) << c->name();
        EXPECT_EQ(dump(run(*c, 16)), ref) << c->name();
    }
}

TEST(Checkpoint, BudgetInterruptAndResume) {
    Field F(3, 1);
    CensusCampaign c(F, true, false);
    auto ref = dump(run(c, 4));
    std::string ck = temp_path("resume.json");
    int rounds = 0;
    RunResult r;
    do {
        r = run(c, 4, ck, 5000, 1000);
        ++rounds;
    } while (!r.complete && rounds < 100);
    EXPECT_GT(rounds, 2);
    ASSERT_TRUE(r.complete);
    EXPECT_EQ(dump(r), ref);
    std::filesystem::remove(ck);
}

TEST(Checkpoint, IncompleteRunReportsBudget) {
    Field F(2, 1);
    CensusCampaign c(F, false, false);
    std::string ck = temp_path("budget.json");
    RunResult r = run(c, 4, ck, 100);
    EXPECT_FALSE(r.complete);
    EXPECT_EQ(r.exit_code, kExitBudget);
    EXPECT_TRUE(r.lines.empty());
    EXPECT_TRUE(std::filesystem::exists(ck));
    std::filesystem::remove(ck);
}

TEST(Checkpoint, RejectsForeignJob) {
    Field F(2, 1);
    std::string ck = temp_path("foreign.json");
    run(CensusCampaign(F, false, false), 4, ck, 100);
    EXPECT_THROW(run(CensusCampaign(F, false, false), 2, ck), SearchError);
    EXPECT_THROW(run(CensusCampaign(F, true, false), 4, ck), SearchError);
    std::filesystem::remove(ck);
}

TEST(Campaigns, SmallFieldVerdicts) {
    Field F2(2, 1), F3(3, 1);
    RunResult t = run(TConjCampaign(F2, {1}), 1);
    EXPECT_EQ(t.total.get("validPairs"), 0u);
    EXPECT_EQ(t.exit_code, 0);
    RunResult c = run(C3C4Campaign(F2, false), 2);
    EXPECT_EQ(c.total.get("C4.instances"), 31u);
    EXPECT_EQ(c.total.get("C4.scattered"), 0u);
    EXPECT_EQ(c.exit_code, 0);
    RunResult k = run(FormaKCampaign(F3, {1, 2, 3, 4}), 2);
    EXPECT_EQ(k.total.get("counterexamples"), 0u);
    EXPECT_GT(k.total.get("scattered"), 0u);
    EXPECT_EQ(k.exit_code, 0);
}

TEST(Cli, ParsesLinearizedPolynomials) {
    Field F(3, 1);
    LinearizedPoly f = parse_linearized(F, "x^q + g^3*x^{q^4} - x^(q^2) + 2*x + x^27");
    EXPECT_EQ(f.c[0], F.from_int(2));
    EXPECT_EQ(f.c[1], F.one());
    EXPECT_EQ(f.c[2], F.minus_one());
    EXPECT_EQ(f.c[3], F.one());
    EXPECT_EQ(f.c[4], F.gen_pow(3));
    EXPECT_EQ(parse_linearized(F, "x^q^2").c[2], F.one());
    EXPECT_EQ(parse_linearized(F, "g^-1*x").c[0], F.inv(F.gen_pow(1)));
    EXPECT_THROW(parse_linearized(F, "x^5"), UsageError);
    EXPECT_THROW(parse_linearized(F, "y^q"), UsageError);
    EXPECT_THROW(parse_linearized(F, ""), UsageError);
}

TEST(Cli, ScatteredCheck) {
    std::string out;
    EXPECT_EQ(cli({"scattered-check", "--q", "2", "--poly", "x^q"}, &out), 0);
    std::istringstream in(out);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    json h = json::parse(header), r = json::parse(line);
    EXPECT_EQ(h["schema"], 1);
    EXPECT_EQ(r["scattered"], true);
    EXPECT_EQ(r["size"], 31);
    EXPECT_EQ(cli({"scattered-check", "--q", "3", "--poly", "x^q^2 + g*x^q^4"}, &out), 0);
    EXPECT_NE(out.find("\"witnessVerified\":true"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli({"tconj", "--q", "3", "--s", "1"}), 0);
    EXPECT_EQ(cli({"census", "--q", "2"}), 0);
    EXPECT_EQ(cli({"bogus"}), kExitUsage);
    EXPECT_EQ(cli({"census"}), kExitUsage);
    EXPECT_EQ(cli({"census", "--q", "6"}), kExitUsage);
    EXPECT_EQ(cli({"scattered-check", "--q", "2", "--poly", "x^3"}), kExitUsage);
    EXPECT_EQ(cli({"census", "--q", "2", "--max-units", "10"}), kExitBudget);
    EXPECT_EQ(cli({"field-info", "--q", "2^2"}), 0);
    EXPECT_EQ(cli({"classify-plane", "--q", "3", "--a", "0,0,0"}), 0);
}

TEST(Cli, RerunIsByteIdentical) {
    std::string a, b;
    int first = cli({"prop-suite", "--q", "3", "--n", "50", "--seed", "7"}, &a);
    EXPECT_EQ(cli({"prop-suite", "--q", "3", "--n", "50", "--seed", "7"}, &b), first);
    EXPECT_EQ(a, b);
    EXPECT_EQ(cli({"curve-verify", "--q", "4", "--lifts", "20"}, &a), 0);
    EXPECT_EQ(cli({"curve-verify", "--q", "4", "--lifts", "20"}, &b), 0);
    EXPECT_EQ(a, b);
}
