#include <gtest/gtest.h>

#include <random>
#include <set>

#include "msls/linpoly.hpp"

using namespace msls;

namespace {

constexpr int kRandomPolys = 10000;

LinearizedPoly random_poly(const Field& F, std::mt19937_64& rng) {
    LinearizedPoly f;
    for (auto& c : f.c) c = F.element_at(rng() % F.size());
    return f;
}

// x^{q^i} by repeated multiplication.
Elem slow_power(const Field& F, Elem x, int i) {
    Elem y = x;
    for (int k = 0; k < i; ++k) {
        Elem z = F.one();
        for (unsigned t = 0; t < F.q(); ++t) z = F.mul(z, y);
        y = z;
    }
    return y;
}

std::uint64_t weight_sum(const Field& F, const LinearSet& L) {
    std::uint64_t s = 0;
    for (auto [k, w] : L.points) s += ipow(F.q(), w) - 1;
    return s;
}

}  // namespace

TEST(LinPoly, EvalAgreesWithDirectPowering) {
    Field F(3, 1);
    std::mt19937_64 rng(1);
    for (int it = 0; it < 200; ++it) {
        auto f = random_poly(F, rng);
        Elem x = F.element_at(rng() % F.size());
        Elem y = F.zero();
        for (int i = 0; i < 5; ++i) y = F.add(y, F.mul(f.c[i], slow_power(F, x, i)));
        EXPECT_EQ(eval(F, f, x), y);
    }
}

TEST(LinPoly, EvalIsFqLinear) {
    Field F(2, 2);
    std::mt19937_64 rng(2);
    for (int it = 0; it < 500; ++it) {
        auto f = random_poly(F, rng);
        Elem x = F.element_at(rng() % F.size()), y = F.element_at(rng() % F.size());
        Elem c = F.base_elements()[rng() % F.q()];
        EXPECT_EQ(eval(F, f, F.add(x, y)), F.add(eval(F, f, x), eval(F, f, y)));
        EXPECT_EQ(eval(F, f, F.mul(c, x)), F.mul(c, eval(F, f, x)));
    }
}

TEST(LinPoly, Compose) {
    Field F(3, 1);
    auto xq = LinearizedPoly::monomial(1);
    EXPECT_EQ(compose(F, xq, xq), LinearizedPoly::monomial(2));
    std::mt19937_64 rng(3);
    for (int it = 0; it < 200; ++it) {
        auto f = random_poly(F, rng), g = random_poly(F, rng);
        auto fg = compose(F, f, g);
        Elem x = F.element_at(rng() % F.size());
        EXPECT_EQ(eval(F, fg, x), eval(F, f, eval(F, g, x)));
    }
}

TEST(LinPoly, AdjointOfTwoTermPoly) {
    Field F(3, 1);
    std::mt19937_64 rng(4);
    for (int it = 0; it < 20; ++it) {
        Elem a = F.element_at(1 + rng() % F.order());
        LinearizedPoly f;
        f.c[1] = F.one();
        f.c[4] = a;
        LinearizedPoly expect;
        expect.c[1] = F.frob(a, 1);
        expect.c[4] = F.one();
        EXPECT_EQ(adjoint(F, f), expect);
        EXPECT_EQ(linear_set_of_poly(F, f), linear_set_of_poly(F, adjoint(F, f)));
    }
}

TEST(LinPoly, AdjointIsInvolutionAndPreservesLinearSet) {
    std::mt19937_64 rng(5);
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}}) {
        Field F(p, h);
        for (int it = 0; it < 100; ++it) {
            auto f = random_poly(F, rng);
            EXPECT_EQ(adjoint(F, adjoint(F, f)), f);
            EXPECT_EQ(linear_set_of_poly(F, f), linear_set_of_poly(F, adjoint(F, f)));
        }
    }
}

TEST(LinPoly, DicksonRankExamples) {
    Field F(5, 1);
    EXPECT_EQ(dickson_rank(F, identity_poly()), 5);
    LinearizedPoly fm;
    fm.c[0] = F.minus_one();
    fm.c[1] = F.one();
    EXPECT_EQ(dickson_rank(F, fm), 4);
    LinearizedPoly tr;
    tr.c.fill(F.one());
    EXPECT_EQ(dickson_rank(F, tr), 1);
    EXPECT_EQ(dickson_rank(F, LinearizedPoly{}), 0);
    EXPECT_EQ(dickson_rank(F, fm), rank(dickson_matrix(F, fm)));
}

// Kernel dimension by brute force over all of F_{q^5}.
int brute_kernel_dim(const Field& F, const LinearizedPoly& f) {
    std::uint64_t zeros = 0;
    for (std::uint64_t i = 0; i < F.size(); ++i)
        if (eval(F, f, F.element_at(i)).is_zero()) ++zeros;
    int d = 0;
    while (ipow(F.q(), d) < zeros) ++d;
    return d;
}

// Every f over F_32 (32^5 polynomials): Dickson rank against the counted kernel, and the
// scatteredness test against the number of distinct points <(x, f(x))>.
TEST(LinPoly, ExhaustiveQ2RankAndScatteredness) {
    Field F(2, 1);
    ScatterScratch scratch;
    std::array<std::array<Elem, 5>, 31> pw;
    for (std::uint32_t x = 0; x < 31; ++x)
        for (int i = 0; i < 5; ++i) pw[x][i] = F.frob(Elem{x}, i);
    std::uint64_t checked = 0, n_scattered = 0, bad_rank = 0, bad_scattered = 0;
    for (std::uint64_t idx = 0; idx < (1u << 25); ++idx) {
        LinearizedPoly f;
        std::uint64_t t = idx;
        for (int i = 0; i < 5; ++i) {
            f.c[i] = F.element_at(t & 31);
            t >>= 5;
        }
        std::uint64_t seen = 0;
        int distinct = 0, zeros = 1;
        for (std::uint32_t x = 0; x < 31; ++x) {
            Elem y = F.zero();
            for (int i = 0; i < 5; ++i) y = F.add(y, F.mul(f.c[i], pw[x][i]));
            if (y.is_zero()) ++zeros;
            std::uint64_t bit = std::uint64_t{1} << F.index_of(F.div(y, Elem{x}));
            if (!(seen & bit)) ++distinct;
            seen |= bit;
        }
        int d = 0;
        while ((1 << d) < zeros) ++d;
        if ((1 << d) != zeros || dickson_rank(F, f) + d != 5) ++bad_rank;
        if (idx != 0) {
            bool sc = is_scattered(F, f, scratch, false).scattered;
            if (sc != (distinct == 31)) ++bad_scattered;
            n_scattered += sc;
        }
        ++checked;
    }
    EXPECT_EQ(checked, 33554432u);
    EXPECT_EQ(bad_rank, 0u);
    EXPECT_EQ(bad_scattered, 0u);
    EXPECT_GT(n_scattered, 0u);
}

TEST(LinPoly, DicksonRankMatchesFqKernelRandom) {
    std::mt19937_64 rng(6);
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{3, 1}, {2, 2}, {5, 1}}) {
        Field F(p, h);
        for (int it = 0; it < kRandomPolys; ++it) {
            auto f = random_poly(F, rng);
            // bias a quarter of the draws towards singular maps
            if (it % 4 == 0) f = compose(F, f, LinearizedPoly{{F.minus_one(), F.one()}});
            auto k = fq_linear_solve(F, f);
            ASSERT_EQ(dickson_rank(F, f) + static_cast<int>(k.basis.size()), 5);
            EXPECT_EQ(k.rank, dickson_rank(F, f));
            for (Elem x : k.basis) EXPECT_TRUE(eval(F, f, x).is_zero());
        }
        for (int it = 0; it < 50; ++it) {
            auto f = random_poly(F, rng);
            EXPECT_EQ(brute_kernel_dim(F, f), 5 - dickson_rank(F, f));
        }
    }
}

TEST(LinPoly, ScatteredMatchesLinearSetSizeRandom) {
    std::mt19937_64 rng(7);
    ScatterScratch scratch;
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{3, 1}, {2, 2}, {5, 1}}) {
        Field F(p, h);
        int agree_true = 0;
        for (int it = 0; it < kRandomPolys; ++it) {
            LinearizedPoly f = random_poly(F, rng);
            if (f.is_zero()) continue;
            // mix in sparse polynomials so scattered ones occur
            if (it % 2 == 0) {
                f.c[0] = F.zero();
                f.c[2] = F.zero();
                f.c[3] = F.zero();
                if (f.is_zero()) continue;
            }
            auto r = is_scattered(F, f, scratch);
            auto L = linear_set_of_poly(F, f);
            ASSERT_EQ(r.scattered, L.size() == F.cosets());
            ASSERT_EQ(weight_sum(F, L), F.order());
            if (!r.scattered) {
                ASSERT_TRUE(r.witness);
                EXPECT_TRUE(verify_witness(F, identity_poly(), f, *r.witness));
            }
            agree_true += r.scattered;
        }
        EXPECT_GT(agree_true, 0);
    }
}

TEST(LinPoly, PseudoregulusAndLPScattered) {
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}}) {
        Field F(p, h);
        for (int s = 1; s <= 4; ++s) EXPECT_TRUE(is_scattered(F, LinearizedPoly::monomial(s)).scattered);
        for (std::uint32_t k = 0; k < F.order(); ++k) {
            LinearizedPoly f;
            f.c[1] = F.one();
            f.c[4] = Elem{k};
            Elem n = F.norm(Elem{k});
            EXPECT_EQ(is_scattered(F, f).scattered, n != F.one());
        }
    }
}

TEST(LinPoly, GbNotScattered) {
    Field F(3, 1);
    for (std::uint32_t k = 0; k < F.order(); ++k) {
        LinearizedPoly f;
        f.c[2] = F.one();
        f.c[4] = Elem{k};
        auto r = is_scattered(F, f);
        EXPECT_FALSE(r.scattered);
        ASSERT_TRUE(r.witness);
        EXPECT_TRUE(verify_witness(F, identity_poly(), f, *r.witness));
    }
}

TEST(LinPoly, ZeroPolynomialRejected) {
    Field F(2, 1);
    EXPECT_THROW(is_scattered(F, LinearizedPoly{}), PolyError);
    EXPECT_THROW(linear_set_of_pair(F, LinearizedPoly{}, LinearizedPoly{}), PolyError);
}

TEST(LinearSet, Examples) {
    Field F(2, 1);
    auto L = linear_set_of_poly(F, LinearizedPoly::monomial(1));
    EXPECT_EQ(L.size(), 31u);
    EXPECT_TRUE(L.scattered());
    EXPECT_EQ(L.rank, 5);

    auto Z = linear_set_of_poly(F, LinearizedPoly{});
    ASSERT_EQ(Z.size(), 1u);
    EXPECT_EQ(Z.points[0], std::make_pair(pg1_key(F, F.one(), F.zero()), 5));

    auto I = linear_set_of_poly(F, identity_poly());
    ASSERT_EQ(I.size(), 1u);
    EXPECT_EQ(I.points[0], std::make_pair(pg1_key(F, F.one(), F.one()), 5));
}

TEST(LinearSet, PairForms) {
    Field F(3, 1);
    EXPECT_EQ(linear_set_of_pair(F, identity_poly(), LinearizedPoly::monomial(1)),
              linear_set_of_poly(F, LinearizedPoly::monomial(1)));
    auto g = LinearizedPoly::monomial(2, F.gen_pow(5));
    auto L = linear_set_of_pair(F, g, g);
    ASSERT_EQ(L.size(), 1u);
    EXPECT_EQ(L.points[0].second, 5);
    // (x^q - x, x^q - x): kernel F_q, rank 4, one point of weight 4
    LinearizedPoly fm{{F.minus_one(), F.one()}};
    auto K = linear_set_of_pair(F, fm, fm);
    EXPECT_EQ(K.rank, 4);
    ASSERT_EQ(K.size(), 1u);
    EXPECT_EQ(K.points[0].second, 4);
    // (x^q - x, x): rank 5 with weights from the kernel of the first map
    auto M = linear_set_of_pair(F, fm, identity_poly());
    EXPECT_EQ(weight_sum(F, M), F.order());
}

TEST(LinearSet, WeightSumOnRandomPairs) {
    Field F(2, 2);
    std::mt19937_64 rng(8);
    for (int it = 0; it < 300; ++it) {
        auto g = random_poly(F, rng), h = random_poly(F, rng);
        if (it % 3 == 0) h = compose(F, h, LinearizedPoly{{F.minus_one(), F.one()}});
        if (it % 3 == 0) g = compose(F, g, LinearizedPoly{{F.minus_one(), F.one()}});
        if (g.is_zero() && h.is_zero()) continue;
        auto L = linear_set_of_pair(F, g, h);
        EXPECT_EQ(weight_sum(F, L), ipow(F.q(), L.rank) - 1);
        ScatterScratch sc;
        auto r = is_scattered_pair(F, g, h, sc);
        EXPECT_EQ(r.scattered, L.rank == 5 && L.scattered());
        if (!r.scattered) {
            EXPECT_TRUE(verify_witness(F, g, h, *r.witness));
        }
    }
}

TEST(LinearSet, TransformAndDigest) {
    Field F(3, 1);
    LinearizedPoly lp;
    lp.c[1] = F.one();
    lp.c[4] = F.gen_pow(1);
    auto L = linear_set_of_poly(F, lp);
    std::array<std::array<Elem, 2>, 2> swap{{{F.zero(), F.one()}, {F.one(), F.zero()}}};
    auto S = transform(F, L, swap);
    EXPECT_EQ(transform(F, S, swap), L);
    EXPECT_EQ(S, linear_set_of_pair(F, lp, identity_poly()));
    auto d1 = digest(F, L), d2 = digest(F, linear_set_of_poly(F, lp));
    EXPECT_EQ(d1.sha256, d2.sha256);
    EXPECT_EQ(d1.size, 121u);
    EXPECT_NE(d1.sha256, digest(F, S).sha256);
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
