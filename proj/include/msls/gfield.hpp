#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "msls/conway.hpp"

namespace msls {

class FieldError : public std::runtime_error {
public:
    enum class Kind { NotPrime, UnsupportedSize, Parse };
    FieldError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

// Discrete-log representation: v is log_g(x) in [0, q^5-1), or kZeroLog for x = 0.
struct Elem {
    static constexpr std::uint32_t kZeroLog = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t v = kZeroLog;

    constexpr bool is_zero() const { return v == kZeroLog; }
    friend constexpr bool operator==(Elem a, Elem b) { return a.v == b.v; }
    friend constexpr auto operator<=>(Elem a, Elem b) { return a.v <=> b.v; }
};

inline bool is_prime(unsigned n) {
    if (n < 2) return false;
    for (unsigned d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// F_p < F_q < F_{q^5} with q = p^h, built from the Conway polynomial of degree 5h.
class Field {
public:
    static constexpr unsigned kMaxQ = 32;

    Field(unsigned p, unsigned h) : p_(p), h_(h) {
        if (!is_prime(p)) throw FieldError(FieldError::Kind::NotPrime, std::to_string(p) + " is not prime");
        if (h == 0) throw FieldError(FieldError::Kind::UnsupportedSize, "h must be positive");
        std::uint64_t q = 1;
        for (unsigned i = 0; i < h; ++i) {
            q *= p;
            if (q > kMaxQ) throw FieldError(FieldError::Kind::UnsupportedSize, "q > 32 is not supported");
        }
        q_ = static_cast<unsigned>(q);
        m_ = 5 * h;
        Q_ = q * q * q * q * q;
        ord_ = static_cast<std::uint32_t>(Q_ - 1);
        cosets_ = static_cast<std::uint32_t>((Q_ - 1) / (q - 1));
        auto cp = conway_polynomial(p, m_);
        if (!cp) throw FieldError(FieldError::Kind::UnsupportedSize, "no Conway polynomial for this size");
        poly_ = *cp;
        build_tables();
        for (unsigned i = 0; i < 5; ++i) qpow_[i] = powmod(q_, i, ord_);
        for (unsigned i = 0; i < m_; ++i) ppow_.push_back(powmod(p_, i, ord_));
        find_normal_element();
    }

    Field(const Field&) = delete;
    Field& operator=(const Field&) = delete;

    unsigned p() const { return p_; }
    unsigned h() const { return h_; }
    unsigned q() const { return q_; }
    unsigned big_degree() const { return m_; }
    std::uint64_t size() const { return Q_; }
    std::uint32_t order() const { return ord_; }
    // (q^5-1)/(q-1): number of F_q^* cosets, also the exponent of the norm.
    std::uint32_t cosets() const { return cosets_; }
    const std::vector<unsigned>& defining_poly() const { return poly_; }

    static constexpr Elem zero() { return Elem{}; }
    static constexpr Elem one() { return Elem{0}; }
    Elem gen_pow(std::uint64_t k) const { return Elem{static_cast<std::uint32_t>(k % ord_)}; }
    Elem from_int(long long k) const {
        long long r = k % static_cast<long long>(p_);
        if (r < 0) r += p_;
        return ints_[static_cast<std::size_t>(r)];
    }
    Elem minus_one() const { return Elem{p_ == 2 ? 0u : ord_ / 2}; }

    Elem mul(Elem a, Elem b) const {
        if (a.is_zero() || b.is_zero()) return zero();
        std::uint32_t s = a.v + b.v;
        if (s >= ord_ || s < a.v) s -= ord_;
        return Elem{s};
    }
    Elem add(Elem a, Elem b) const {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::uint32_t d = b.v >= a.v ? b.v - a.v : b.v + ord_ - a.v;
        std::uint32_t z = zech_[d];
        if (z == Elem::kZeroLog) return zero();
        std::uint32_t s = a.v + z;
        if (s >= ord_) s -= ord_;
        return Elem{s};
    }
    Elem neg(Elem a) const {
        if (a.is_zero() || p_ == 2) return a;
        std::uint32_t s = a.v + ord_ / 2;
        if (s >= ord_) s -= ord_;
        return Elem{s};
    }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem inv(Elem a) const {
        if (a.is_zero()) throw std::domain_error("inverse of zero");
        return Elem{a.v == 0 ? 0 : ord_ - a.v};
    }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, long long n) const {
        if (a.is_zero()) {
            if (n < 0) throw std::domain_error("negative power of zero");
            return n == 0 ? one() : zero();
        }
        long long r = static_cast<long long>((static_cast<unsigned __int128>(a.v) *
                                              static_cast<unsigned __int128>(n < 0 ? -n : n)) %
                                             ord_);
        if (n < 0 && r != 0) r = ord_ - r;
        return Elem{static_cast<std::uint32_t>(r)};
    }
    // x^{q^i}, i taken mod 5.
    Elem frob(Elem a, int i) const {
        if (a.is_zero()) return a;
        int k = ((i % 5) + 5) % 5;
        return Elem{static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.v) * qpow_[k] % ord_)};
    }
    // x^{p^i}, i taken mod 5h.
    Elem frob_p(Elem a, int i) const {
        if (a.is_zero()) return a;
        int k = ((i % static_cast<int>(m_)) + static_cast<int>(m_)) % static_cast<int>(m_);
        return Elem{static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.v) * ppow_[k] % ord_)};
    }
    std::uint32_t qpow(int i) const { return qpow_[((i % 5) + 5) % 5]; }

    Elem trace(Elem a) const {
        Elem t = zero();
        for (int i = 0; i < 5; ++i) t = add(t, frob(a, i));
        return t;
    }
    Elem norm(Elem a) const {
        if (a.is_zero()) return a;
        return Elem{static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.v) * cosets_ % ord_)};
    }
    bool in_base(Elem a) const { return a.is_zero() || a.v % cosets_ == 0; }

    // F_q as {0} ∪ {g^{jN}}.
    std::vector<Elem> base_elements() const {
        std::vector<Elem> out{zero()};
        for (std::uint32_t j = 0; j + 1 < q_; ++j) out.push_back(Elem{j * cosets_});
        return out;
    }
    std::vector<Elem> base_units() const {
        std::vector<Elem> out;
        for (std::uint32_t j = 0; j + 1 < q_; ++j) out.push_back(Elem{j * cosets_});
        return out;
    }
    // Elements of F_{q^5} in index order: 0, g^0, g^1, ...
    Elem element_at(std::uint64_t idx) const {
        return idx == 0 ? zero() : Elem{static_cast<std::uint32_t>(idx - 1)};
    }
    std::uint64_t index_of(Elem a) const { return a.is_zero() ? 0 : std::uint64_t{a.v} + 1; }

    Elem normal_element() const { return gamma_; }
    // M[i][j] = gamma^{q^{i+j}}
    const std::array<std::array<Elem, 5>, 5>& moore_matrix() const { return moore_; }
    const std::array<std::array<Elem, 5>, 5>& moore_inverse() const { return moore_inv_; }

    // F_q-coordinates of x in the normal basis gamma^{q^j}.
    std::array<Elem, 5> normal_coords(Elem x) const {
        std::array<Elem, 5> y;
        for (int i = 0; i < 5; ++i) y[i] = frob(x, i);
        std::array<Elem, 5> c;
        for (int j = 0; j < 5; ++j) {
            Elem s = zero();
            for (int i = 0; i < 5; ++i) s = add(s, mul(moore_inv_[j][i], y[i]));
            c[j] = s;
        }
        return c;
    }
    Elem from_normal_coords(const std::array<Elem, 5>& c) const {
        Elem s = zero();
        for (int j = 0; j < 5; ++j) s = add(s, mul(c[j], moore_[0][j]));
        return s;
    }

    std::string format(Elem a) const {
        if (a.is_zero()) return "0";
        return "g^" + std::to_string(a.v);
    }
    // Accepts "0", "g", "g^k", "-g^k", and integers (read in the prime field).
    Elem parse(const std::string& s) const {
        std::string t;
        for (char c : s)
            if (c != ' ') t += c;
        if (t.empty()) throw FieldError(FieldError::Kind::Parse, "empty element");
        bool negate = false;
        if (t[0] == '-') {
            negate = true;
            t = t.substr(1);
        }
        Elem r;
        try {
            if (t == "g") {
                r = gen_pow(1);
            } else if (t.rfind("g^", 0) == 0) {
                long long k = std::stoll(t.substr(2));
                r = k >= 0 ? gen_pow(static_cast<std::uint64_t>(k)) : inv(gen_pow(static_cast<std::uint64_t>(-k)));
            } else {
                std::size_t used = 0;
                long long k = std::stoll(t, &used);
                if (used != t.size()) throw std::invalid_argument(t);
                r = from_int(k);
            }
        } catch (const std::logic_error&) {
            throw FieldError(FieldError::Kind::Parse, "cannot parse element '" + s + "'");
        }
        return negate ? neg(r) : r;
    }

private:
    static std::uint32_t powmod(std::uint64_t b, unsigned e, std::uint32_t m) {
        std::uint64_t r = 1 % m;
        for (unsigned i = 0; i < e; ++i) r = r * b % m;
        return static_cast<std::uint32_t>(r);
    }

    void build_tables() {
        const std::uint32_t Q = static_cast<std::uint32_t>(Q_);
        std::vector<std::uint32_t> antilog(ord_);
        std::vector<std::uint32_t> logs(Q, Elem::kZeroLog);
        if (p_ == 2) {
            std::uint32_t mask = Q - 1, low = 0;
            for (unsigned i = 0; i < m_; ++i)
                if (poly_[i]) low |= 1u << i;
            std::uint32_t x = 1;
            for (std::uint32_t n = 0; n < ord_; ++n) {
                antilog[n] = x;
                logs[x] = n;
                std::uint32_t top = (x >> (m_ - 1)) & 1u;
                x = (x << 1) & mask;
                if (top) x ^= low;
            }
            if (x != 1) throw std::logic_error("defining polynomial is not primitive");
        } else {
            std::vector<unsigned> d(m_, 0), pw(m_);
            d[0] = 1;
            pw[0] = 1;
            for (unsigned i = 1; i < m_; ++i) pw[i] = pw[i - 1] * p_;
            for (std::uint32_t n = 0; n < ord_; ++n) {
                std::uint32_t idx = 0;
                for (unsigned i = 0; i < m_; ++i) idx += d[i] * pw[i];
                antilog[n] = idx;
                logs[idx] = n;
                unsigned top = d[m_ - 1];
                for (unsigned i = m_ - 1; i > 0; --i) d[i] = (d[i - 1] + (p_ - top) * poly_[i]) % p_;
                d[0] = ((p_ - top) * poly_[0]) % p_;
            }
            bool back = d[0] == 1;
            for (unsigned i = 1; i < m_; ++i) back = back && d[i] == 0;
            if (!back) throw std::logic_error("defining polynomial is not primitive");
        }
        for (std::uint32_t idx = 1; idx < Q; ++idx)
            if (logs[idx] == Elem::kZeroLog) throw std::logic_error("generator is not primitive");
        zech_.assign(ord_, Elem::kZeroLog);
        for (std::uint32_t n = 0; n < ord_; ++n) {
            std::uint32_t idx = antilog[n];
            std::uint32_t d0 = idx % p_;
            std::uint32_t up = idx - d0 + (d0 + 1) % p_;
            zech_[n] = up == 0 ? Elem::kZeroLog : logs[up];
        }
        ints_.assign(p_, zero());
        Elem acc = zero();
        for (unsigned k = 0; k < p_; ++k) {
            ints_[k] = acc;
            acc = add(acc, one());
        }
    }

    static bool singular5(std::array<std::array<Elem, 5>, 5> a, const Field& F,
                          std::array<std::array<Elem, 5>, 5>* inverse) {
        std::array<std::array<Elem, 5>, 5> b{};
        for (int i = 0; i < 5; ++i) b[i][i] = one();
        for (int c = 0; c < 5; ++c) {
            int piv = -1;
            for (int r = c; r < 5; ++r)
                if (!a[r][c].is_zero()) {
                    piv = r;
                    break;
                }
            if (piv < 0) return true;
            std::swap(a[c], a[piv]);
            std::swap(b[c], b[piv]);
            Elem iv = F.inv(a[c][c]);
            for (int k = 0; k < 5; ++k) {
                a[c][k] = F.mul(a[c][k], iv);
                b[c][k] = F.mul(b[c][k], iv);
            }
            for (int r = 0; r < 5; ++r) {
                if (r == c || a[r][c].is_zero()) continue;
                Elem f = a[r][c];
                for (int k = 0; k < 5; ++k) {
                    a[r][k] = F.sub(a[r][k], F.mul(f, a[c][k]));
                    b[r][k] = F.sub(b[r][k], F.mul(f, b[c][k]));
                }
            }
        }
        if (inverse) *inverse = b;
        return false;
    }

    void find_normal_element() {
        for (std::uint32_t j = 0; j < ord_; ++j) {
            Elem g{j};
            std::array<std::array<Elem, 5>, 5> M;
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) M[r][c] = frob(g, r + c);
            if (!singular5(M, *this, &moore_inv_)) {
                gamma_ = g;
                moore_ = M;
                return;
            }
        }
        throw std::logic_error("no normal element");
    }

    unsigned p_, h_, q_, m_;
    std::uint64_t Q_;
    std::uint32_t ord_, cosets_;
    std::vector<unsigned> poly_;
    std::vector<std::uint32_t> zech_;
    std::vector<Elem> ints_;
    std::array<std::uint32_t, 5> qpow_{};
    std::vector<std::uint32_t> ppow_;
    Elem gamma_;
    std::array<std::array<Elem, 5>, 5> moore_{}, moore_inv_{};
};

// Parses "p^h", "q" as a prime power, or "p".
inline std::pair<unsigned, unsigned> parse_q(const std::string& s) {
    auto caret = s.find('^');
    try {
        if (caret != std::string::npos) {
            return {static_cast<unsigned>(std::stoul(s.substr(0, caret))),
                    static_cast<unsigned>(std::stoul(s.substr(caret + 1)))};
        }
        unsigned q = static_cast<unsigned>(std::stoul(s));
        for (unsigned p = 2; p <= q; ++p) {
            if (q % p) continue;
            unsigned h = 0, r = q;
            while (r % p == 0) {
                r /= p;
                ++h;
            }
            if (r != 1) break;
            return {p, h};
        }
    } catch (const std::logic_error&) {
    }
    throw FieldError(FieldError::Kind::Parse, "q must be a prime power, got '" + s + "'");
}

// Element bound to its field, for formula-heavy code.
class Fe {
public:
    Fe() = default;
    Fe(const Field& f, Elem e) : f_(&f), e_(e) {}

    static Fe zero(const Field& f) { return Fe(f, Field::zero()); }
    static Fe one(const Field& f) { return Fe(f, Field::one()); }

    const Field* field() const { return f_; }
    Elem raw() const { return e_; }
    bool is_zero() const { return e_.is_zero(); }
    bool is_one() const { return e_ == Field::one(); }

    Fe frob(int i) const { return f_ ? Fe(*f_, f_->frob(e_, i)) : *this; }
    Fe pow(long long n) const {
        if (!f_) {
            if (n < 0) throw std::domain_error("negative power of zero");
            return *this;
        }
        return Fe(*f_, f_->pow(e_, n));
    }
    Fe inv() const {
        if (!f_) throw std::domain_error("inverse of zero");
        return Fe(*f_, f_->inv(e_));
    }
    Fe trace() const { return f_ ? Fe(*f_, f_->trace(e_)) : *this; }
    Fe norm() const { return f_ ? Fe(*f_, f_->norm(e_)) : *this; }
    bool in_base() const { return !f_ || f_->in_base(e_); }
    std::string str() const { return f_ ? f_->format(e_) : "0"; }

    friend Fe operator+(Fe a, Fe b) {
        const Field* f = a.f_ ? a.f_ : b.f_;
        return f ? Fe(*f, f->add(a.e_, b.e_)) : Fe();
    }
    friend Fe operator-(Fe a) { return a.f_ ? Fe(*a.f_, a.f_->neg(a.e_)) : a; }
    friend Fe operator-(Fe a, Fe b) { return a + (-b); }
    friend Fe operator*(Fe a, Fe b) {
        const Field* f = a.f_ ? a.f_ : b.f_;
        return f ? Fe(*f, f->mul(a.e_, b.e_)) : Fe();
    }
    friend Fe operator/(Fe a, Fe b) { return a * b.inv(); }
    Fe& operator+=(Fe b) { return *this = *this + b; }
    Fe& operator-=(Fe b) { return *this = *this - b; }
    Fe& operator*=(Fe b) { return *this = *this * b; }
    friend bool operator==(Fe a, Fe b) { return a.e_ == b.e_; }
    friend auto operator<=>(Fe a, Fe b) { return a.e_ <=> b.e_; }

private:
    const Field* f_ = nullptr;
    Elem e_;
};

}  // namespace msls
