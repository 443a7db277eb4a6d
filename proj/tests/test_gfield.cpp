#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "msls/gfield.hpp"
#include "msls/linalg.hpp"

using namespace msls;

namespace {

// Dense polynomial arithmetic over F_p, low degree first.
using Poly = std::vector<long>;

Poly trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& f, long p) {
    Poly r(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    const std::size_t n = f.size() - 1;
    for (std::size_t k = r.size(); k-- > n;) {
        long c = r[k];
        if (!c) continue;
        for (std::size_t i = 0; i <= n; ++i) r[k - n + i] = ((r[k - n + i] - c * f[i]) % p + p) % p;
    }
    r.resize(std::min(r.size(), n));
    return trim(r);
}

Poly powmod(Poly b, unsigned long long e, const Poly& f, long p) {
    Poly r{1};
    while (e) {
        if (e & 1) r = mulmod(r, b, f, p);
        b = mulmod(b, b, f, p);
        e >>= 1;
    }
    return r;
}

std::vector<unsigned long long> prime_factors(unsigned long long n) {
    std::vector<unsigned long long> out;
    for (unsigned long long d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    if (n > 1) out.push_back(n);
    return out;
}

// Evaluates c(y) mod f for y a polynomial.
Poly compose_mod(const std::vector<unsigned>& c, const Poly& y, const Poly& f, long p) {
    Poly r;
    for (std::size_t k = c.size(); k-- > 0;) {
        r = mulmod(r, y, f, p);
        if (r.empty()) r = {0};
        r[0] = (r[0] + c[k]) % p;
        r = trim(r);
    }
    return r;
}

std::map<std::pair<unsigned, unsigned>, std::vector<unsigned>> g_conway_memo;

// Conway polynomial from its definition: least primitive, compatible polynomial in the alternating order.
std::vector<unsigned> conway_by_definition(unsigned p, unsigned n) {
    auto key = std::make_pair(p, n);
    if (auto it = g_conway_memo.find(key); it != g_conway_memo.end()) return it->second;
    unsigned long long pn = 1;
    for (unsigned i = 0; i < n; ++i) pn *= p;
    const unsigned long long ord = pn - 1;
    auto primes = prime_factors(ord);
    std::vector<std::pair<unsigned, std::vector<unsigned>>> subs;
    for (unsigned d = 1; d < n; ++d)
        if (n % d == 0) subs.emplace_back(d, conway_by_definition(p, d));
    std::vector<unsigned> b(n, 0);  // b[0] is the x^{n-1} slot
    for (unsigned long long idx = 0; idx < pn; ++idx) {
        unsigned long long t = idx;
        for (unsigned k = n; k-- > 0;) {
            b[k] = static_cast<unsigned>(t % p);
            t /= p;
        }
        Poly f(n + 1, 0);
        f[n] = 1;
        for (unsigned k = 0; k < n; ++k) {
            unsigned i = n - 1 - k;  // degree
            long sign = ((n - i) % 2) ? -1 : 1;
            f[i] = ((sign * static_cast<long>(b[k])) % static_cast<long>(p) + p) % p;
        }
        if (f[0] == 0) continue;
        Poly x{0, 1};
        if (powmod(x, ord, f, p) != Poly{1}) continue;
        bool primitive = true;
        for (auto r : primes)
            if (powmod(x, ord / r, f, p) == Poly{1}) {
                primitive = false;
                break;
            }
        if (!primitive) continue;
        bool compatible = true;
        for (auto& [d, c] : subs) {
            unsigned long long pd = 1;
            for (unsigned i = 0; i < d; ++i) pd *= p;
            Poly y = powmod(x, ord / (pd - 1), f, p);
            if (!compose_mod(c, y, f, p).empty()) {
                compatible = false;
                break;
            }
        }
        if (!compatible) continue;
        std::vector<unsigned> out(f.begin(), f.end());
        g_conway_memo[key] = out;
        return out;
    }
    return {};
}

// Reference polynomial-basis value of g^k.
Poly antilog(const Field& F, std::uint32_t k) {
    Poly f(F.defining_poly().begin(), F.defining_poly().end());
    return powmod(Poly{0, 1}, k, f, F.p());
}

}  // namespace

TEST(Conway, TableMatchesDefinitionForSmallSizes) {
    for (auto [p, n] : std::vector<std::pair<unsigned, unsigned>>{
             {2, 5}, {3, 5}, {5, 5}, {7, 5}, {2, 10}, {3, 10}, {2, 15}, {11, 5}}) {
        auto expected = conway_by_definition(p, n);
        ASSERT_FALSE(expected.empty());
        EXPECT_EQ(*conway_polynomial(p, n), expected) << p << "," << n;
    }
}

TEST(Field, ConstructsQ2WithConwayPoly) {
    Field F(2, 1);
    EXPECT_EQ(F.q(), 2u);
    EXPECT_EQ(F.size(), 32u);
    EXPECT_EQ(F.defining_poly(), (std::vector<unsigned>{1, 0, 1, 0, 0, 1}));
}

TEST(Field, Sizes) {
    Field F3(3, 1);
    EXPECT_EQ(F3.size(), 243u);
    Field F25(5, 2);
    EXPECT_EQ(F25.size(), 9765625u);
    EXPECT_EQ(F25.q(), 25u);
}

TEST(Field, Errors) {
    EXPECT_THROW(Field(4, 1), FieldError);
    EXPECT_THROW(Field(37, 1), FieldError);
    EXPECT_THROW(Field(2, 6), FieldError);
    try {
        Field(6, 1);
    } catch (const FieldError& e) {
        EXPECT_EQ(e.kind, FieldError::Kind::NotPrime);
    }
}

TEST(Field, ArithmeticAgreesWithPolynomialBasis) {
    std::mt19937_64 rng(11);
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {3, 2}}) {
        Field F(p, h);
        Poly f(F.defining_poly().begin(), F.defining_poly().end());
        std::map<Poly, std::uint32_t> logs;
        Poly x{1};
        for (std::uint32_t k = 0; k < F.order(); ++k) {
            logs[x] = k;
            x = mulmod(x, Poly{0, 1}, f, p);
        }
        ASSERT_EQ(logs.size(), F.order());
        for (int it = 0; it < 2000; ++it) {
            Elem a = F.element_at(rng() % F.size()), b = F.element_at(rng() % F.size());
            Poly pa = a.is_zero() ? Poly{} : antilog(F, a.v);
            Poly pb = b.is_zero() ? Poly{} : antilog(F, b.v);
            Poly sum(std::max(pa.size(), pb.size()), 0);
            for (std::size_t i = 0; i < sum.size(); ++i)
                sum[i] = ((i < pa.size() ? pa[i] : 0) + (i < pb.size() ? pb[i] : 0)) % p;
            sum = trim(sum);
            Elem s = F.add(a, b);
            if (sum.empty())
                EXPECT_TRUE(s.is_zero());
            else
                EXPECT_EQ(s.v, logs.at(sum));
        }
    }
}

TEST(Field, FrobeniusBasics) {
    Field F(2, 1);
    EXPECT_EQ(F.frob(F.gen_pow(1), 1), F.gen_pow(2));
    Field G(3, 1);
    for (std::uint32_t k = 0; k < G.order(); ++k) {
        Elem x{k};
        Elem y = x;
        for (int i = 0; i < 5; ++i) y = G.frob(y, 1);
        EXPECT_EQ(x, y);
        EXPECT_EQ(G.frob(x, 0), x);
    }
    for (Elem a : G.base_elements()) EXPECT_EQ(G.frob(a, 3), a);
}

TEST(Field, FrobeniusIsAdditiveAndMultiplicative) {
    std::mt19937_64 rng(3);
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 2}, {3, 1}, {7, 1}}) {
        Field F(p, h);
        for (int it = 0; it < 1000; ++it) {
            Elem a = F.element_at(rng() % F.size()), b = F.element_at(rng() % F.size());
            int i = static_cast<int>(rng() % 7) - 2;
            EXPECT_EQ(F.frob(F.add(a, b), i), F.add(F.frob(a, i), F.frob(b, i)));
            EXPECT_EQ(F.frob(F.mul(a, b), i), F.mul(F.frob(a, i), F.frob(b, i)));
        }
    }
}

TEST(Field, TraceAndNorm) {
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        Field F(p, h);
        EXPECT_TRUE(F.trace(F.zero()).is_zero());
        EXPECT_TRUE(F.norm(F.zero()).is_zero());
        for (Elem a : F.base_elements()) {
            Elem five = F.zero();
            for (int i = 0; i < 5; ++i) five = F.add(five, a);
            EXPECT_EQ(F.trace(a), five);
            EXPECT_EQ(F.norm(a), F.pow(a, 5));
        }
        for (std::uint32_t k = 0; k < F.order(); ++k) {
            Elem x{k};
            Elem t = F.zero(), n = F.one();
            for (int i = 0; i < 5; ++i) {
                t = F.add(t, F.frob(x, i));
                n = F.mul(n, F.frob(x, i));
            }
            EXPECT_EQ(F.trace(x), t);
            EXPECT_EQ(F.norm(x), n);
            EXPECT_TRUE(F.in_base(t));
            EXPECT_TRUE(F.in_base(n));
            if (p == 2 && h == 1) {
                EXPECT_EQ(n, F.one());
            }
        }
    }
}

TEST(Field, NormFibersHaveEqualSize) {
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
        Field F(p, h);
        std::map<std::uint32_t, std::uint64_t> count;
        for (std::uint32_t k = 0; k < F.order(); ++k) ++count[F.norm(Elem{k}).v];
        EXPECT_EQ(count.size(), F.q() - 1);
        for (auto [c, n] : count) {
            EXPECT_TRUE(F.in_base(Elem{c}));
            EXPECT_EQ(n, F.cosets());
        }
    }
}

TEST(Field, NormalElementAndMoore) {
    for (auto [p, h] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        Field F(p, h);
        Mat M(5, Vec(5));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) M[i][j] = Fe(F, F.frob(F.normal_element(), i + j));
        EXPECT_FALSE(det(M, F).is_zero());
        // first normal element in generator-power order
        for (std::uint32_t j = 0; j < F.normal_element().v; ++j) {
            Mat N(5, Vec(5));
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) N[r][c] = Fe(F, F.frob(Elem{j}, r + c));
            EXPECT_TRUE(det(N, F).is_zero());
        }
        for (std::uint32_t k = 0; k < F.order(); k += 7) {
            auto c = F.normal_coords(Elem{k});
            for (Elem x : c) EXPECT_TRUE(F.in_base(x));
            EXPECT_EQ(F.from_normal_coords(c), Elem{k});
        }
    }
}

TEST(Field, FqLinearSolve) {
    Field F(3, 1);
    std::array<Elem, 5> frob_minus_id{F.minus_one(), F.one(), F.zero(), F.zero(), F.zero()};
    auto k1 = fq_linear_solve(F, frob_minus_id);
    EXPECT_EQ(k1.basis.size(), 1u);
    EXPECT_EQ(k1.rank, 4);
    EXPECT_TRUE(F.in_base(k1.basis[0]));
    std::array<Elem, 5> tr{F.one(), F.one(), F.one(), F.one(), F.one()};
    auto k2 = fq_linear_solve(F, tr);
    EXPECT_EQ(k2.basis.size(), 4u);
    for (Elem x : k2.basis) EXPECT_TRUE(F.trace(x).is_zero());
    std::array<Elem, 5> id{F.one(), F.zero(), F.zero(), F.zero(), F.zero()};
    EXPECT_EQ(fq_linear_solve(F, id).basis.size(), 0u);
    EXPECT_EQ(fq_linear_solve(F, identity(F, 5)).rank, 5);
}

TEST(Field, ParseAndFormat) {
    Field F(5, 1);
    EXPECT_EQ(F.format(F.zero()), "0");
    EXPECT_EQ(F.parse("g^17"), F.gen_pow(17));
    EXPECT_EQ(F.parse("g"), F.gen_pow(1));
    EXPECT_EQ(F.parse("3"), F.add(F.add(F.one(), F.one()), F.one()));
    EXPECT_EQ(F.parse("-1"), F.minus_one());
    EXPECT_EQ(F.parse("g^-1"), F.inv(F.gen_pow(1)));
    EXPECT_THROW(F.parse("h^2"), FieldError);
    EXPECT_EQ(parse_q("16"), std::make_pair(2u, 4u));
    EXPECT_EQ(parse_q("5^2"), std::make_pair(5u, 2u));
    EXPECT_THROW(parse_q("12"), FieldError);
}

TEST(Fe, OperatorsMatchRawOps) {
    Field F(7, 1);
    std::mt19937_64 rng(5);
    for (int it = 0; it < 500; ++it) {
        Fe a(F, F.element_at(rng() % F.size())), b(F, F.element_at(rng() % F.size()));
        EXPECT_EQ((a + b).raw(), F.add(a.raw(), b.raw()));
        EXPECT_EQ((a * b).raw(), F.mul(a.raw(), b.raw()));
        EXPECT_EQ((a - b + b), a);
        if (!b.is_zero()) {
            EXPECT_EQ((a / b) * b, a);
        }
        EXPECT_EQ(Fe() + a, a);
        EXPECT_TRUE((Fe() * a).is_zero());
    }
}
