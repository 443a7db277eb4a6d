#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msls/gfield.hpp"
#include "msls/linalg.hpp"

namespace msls {

class PolyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// f(x) = sum_i c[i] x^{q^i}
struct LinearizedPoly {
    std::array<Elem, 5> c{};

    static LinearizedPoly monomial(int i, Elem a = Field::one()) {
        LinearizedPoly f;
        f.c[static_cast<std::size_t>(((i % 5) + 5) % 5)] = a;
        return f;
    }
    bool is_zero() const {
        return std::all_of(c.begin(), c.end(), [](Elem e) { return e.is_zero(); });
    }
    friend bool operator==(const LinearizedPoly&, const LinearizedPoly&) = default;
};

inline Elem eval(const Field& F, const LinearizedPoly& f, Elem x) {
    Elem y = F.zero();
    for (int i = 0; i < 5; ++i)
        if (!f.c[i].is_zero()) y = F.add(y, F.mul(f.c[i], F.frob(x, i)));
    return y;
}

inline LinearizedPoly add(const Field& F, const LinearizedPoly& f, const LinearizedPoly& g) {
    LinearizedPoly r;
    for (int i = 0; i < 5; ++i) r.c[i] = F.add(f.c[i], g.c[i]);
    return r;
}

inline LinearizedPoly scale(const Field& F, Elem a, const LinearizedPoly& f) {
    LinearizedPoly r;
    for (int i = 0; i < 5; ++i) r.c[i] = F.mul(a, f.c[i]);
    return r;
}

// (f o g)(x) = f(g(x)), reduced mod x^{q^5} - x.
inline LinearizedPoly compose(const Field& F, const LinearizedPoly& f, const LinearizedPoly& g) {
    LinearizedPoly r;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r.c[(i + j) % 5] = F.add(r.c[(i + j) % 5], F.mul(f.c[i], F.frob(g.c[j], i)));
    return r;
}

inline LinearizedPoly adjoint(const Field& F, const LinearizedPoly& f) {
    LinearizedPoly r;
    for (int j = 0; j < 5; ++j) r.c[j] = F.frob(f.c[(5 - j) % 5], j);
    return r;
}

inline Mat dickson_matrix(const Field& F, const LinearizedPoly& f) {
    Mat d(5, Vec(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) d[i][j] = Fe(F, F.frob(f.c[((j - i) % 5 + 5) % 5], i));
    return d;
}

inline int dickson_rank(const Field& F, const LinearizedPoly& f) {
    std::array<std::array<Elem, 5>, 5> d;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) d[i][j] = F.frob(f.c[((j - i) % 5 + 5) % 5], i);
    int r = 0;
    for (int c = 0; c < 5 && r < 5; ++c) {
        int piv = r;
        while (piv < 5 && d[piv][c].is_zero()) ++piv;
        if (piv == 5) continue;
        std::swap(d[r], d[piv]);
        Elem iv = F.inv(d[r][c]);
        for (int i = r + 1; i < 5; ++i) {
            if (d[i][c].is_zero()) continue;
            Elem m = F.mul(d[i][c], iv);
            for (int k = c; k < 5; ++k) d[i][k] = F.sub(d[i][k], F.mul(m, d[r][k]));
        }
        ++r;
    }
    return r;
}

inline FqKernel fq_linear_solve(const Field& F, const LinearizedPoly& f) { return fq_linear_solve(F, f.c); }

// Reusable buffers for the scatteredness test; one per worker.
class ScatterScratch {
public:
    void reset(std::uint64_t keys) {
        if (bits_.size() * 64 < keys) bits_.assign(keys / 64 + 1, 0);
        for (std::uint64_t k : touched_) bits_[k >> 6] &= ~(std::uint64_t{1} << (k & 63));
        touched_.clear();
    }
    // Returns true if key was already present.
    bool insert(std::uint64_t k) {
        std::uint64_t& w = bits_[k >> 6];
        std::uint64_t m = std::uint64_t{1} << (k & 63);
        if (w & m) return true;
        w |= m;
        touched_.push_back(k);
        return false;
    }

private:
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint64_t> touched_;
};

struct ScatterResult {
    bool scattered = false;
    // On failure: y, z in distinct F_q^* cosets with the same point. z = 0 marks a kernel element y.
    std::optional<std::pair<Elem, Elem>> witness;
};

namespace detail {

// Key of the projective point <(a, b)> of PG(1,q^5): index of b/a, or q^5 for the point at infinity.
inline std::uint64_t pg1_key(const Field& F, Elem a, Elem b) {
    if (a.is_zero()) return F.size();
    return F.index_of(F.div(b, a));
}

struct Term {
    std::uint32_t step;
};

// Evaluates sum c_i x^{q^i} along x = g^j, j = 0,1,..., incrementally.
class CosetWalker {
public:
    CosetWalker(const Field& F, const LinearizedPoly& f) : F_(F) {
        for (int i = 0; i < 5; ++i)
            if (!f.c[i].is_zero()) {
                terms_.push_back({F.qpow(i)});
                logs_.push_back(f.c[i].v);
            }
    }
    Elem value() const {
        Elem y = F_.zero();
        for (std::uint32_t l : logs_) y = F_.add(y, Elem{l});
        return y;
    }
    void step() {
        const std::uint32_t ord = F_.order();
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            std::uint32_t s = logs_[k] + terms_[k].step;
            if (s >= ord) s -= ord;
            logs_[k] = s;
        }
    }

private:
    const Field& F_;
    std::vector<Term> terms_;
    std::vector<std::uint32_t> logs_;
};

}  // namespace detail

inline std::uint64_t pg1_key(const Field& F, Elem a, Elem b) { return detail::pg1_key(F, a, b); }

// Scatteredness of the F_q-linear pair x -> (g(x), h(x)): all weights 1 and trivial kernel.
inline ScatterResult is_scattered_pair(const Field& F, const LinearizedPoly& g, const LinearizedPoly& h,
                                       ScatterScratch& scratch, bool want_witness = true) {
    if (g.is_zero() && h.is_zero()) throw PolyError("ZeroPolynomial");
    scratch.reset(F.size() + 1);
    detail::CosetWalker wg(F, g), wh(F, h);
    const std::uint32_t N = F.cosets();
    std::uint32_t hit = N;
    std::uint64_t hit_key = 0;
    for (std::uint32_t j = 0; j < N; ++j) {
        Elem a = wg.value(), b = wh.value();
        if (a.is_zero() && b.is_zero()) {
            ScatterResult r;
            if (want_witness) r.witness = std::make_pair(Elem{j}, F.zero());
            return r;
        }
        std::uint64_t k = detail::pg1_key(F, a, b);
        if (scratch.insert(k)) {
            hit = j;
            hit_key = k;
            break;
        }
        wg.step();
        wh.step();
    }
    ScatterResult r;
    if (hit == N) {
        r.scattered = true;
        return r;
    }
    if (want_witness) {
        for (std::uint32_t j = 0; j < hit; ++j) {
            Elem x{j};
            if (detail::pg1_key(F, eval(F, g, x), eval(F, h, x)) == hit_key) {
                r.witness = std::make_pair(x, Elem{hit});
                break;
            }
        }
    }
    return r;
}

inline LinearizedPoly identity_poly() { return LinearizedPoly::monomial(0); }

inline ScatterResult is_scattered(const Field& F, const LinearizedPoly& f, ScatterScratch& scratch,
                                  bool want_witness = true) {
    if (f.is_zero()) throw PolyError("ZeroPolynomial");
    scratch.reset(F.size());
    // Walk f(x)/x = sum c_i x^{q^i - 1} along x = g^j.
    const std::uint32_t ord = F.order();
    std::array<std::uint32_t, 5> logs{}, steps{};
    int n = 0;
    for (int i = 0; i < 5; ++i)
        if (!f.c[i].is_zero()) {
            logs[n] = f.c[i].v;
            steps[n] = (F.qpow(i) + ord - 1) % ord;
            ++n;
        }
    const std::uint32_t N = F.cosets();
    for (std::uint32_t j = 0; j < N; ++j) {
        Elem y{logs[0]};
        for (int k = 1; k < n; ++k) y = F.add(y, Elem{logs[k]});
        std::uint64_t key = F.index_of(y);
        if (scratch.insert(key)) {
            ScatterResult r;
            if (want_witness) {
                for (std::uint32_t i = 0; i < j; ++i) {
                    Elem x{i};
                    if (F.index_of(F.div(eval(F, f, x), x)) == key) {
                        r.witness = std::make_pair(x, Elem{j});
                        break;
                    }
                }
            }
            return r;
        }
        for (int k = 0; k < n; ++k) {
            std::uint32_t t = logs[k] + steps[k];
            if (t >= ord) t -= ord;
            logs[k] = t;
        }
    }
    return ScatterResult{true, std::nullopt};
}

inline ScatterResult is_scattered(const Field& F, const LinearizedPoly& f) {
    ScatterScratch s;
    return is_scattered(F, f, s);
}

// Checks a non-scatteredness witness for the pair (g, h) independently of the search.
inline bool verify_witness(const Field& F, const LinearizedPoly& g, const LinearizedPoly& h,
                           std::pair<Elem, Elem> w) {
    auto [y, z] = w;
    if (y.is_zero()) return false;
    Elem gy = eval(F, g, y), hy = eval(F, h, y);
    if (z.is_zero()) return gy.is_zero() && hy.is_zero();
    Elem gz = eval(F, g, z), hz = eval(F, h, z);
    if ((gy.is_zero() && hy.is_zero()) || (gz.is_zero() && hz.is_zero())) return false;
    bool collinear = F.sub(F.mul(gy, hz), F.mul(hy, gz)).is_zero();
    return collinear && !F.in_base(F.div(y, z));
}

// Weighted point set of PG(1,q^5). Points are pg1 keys; weight is the F_q-dimension.
struct LinearSet {
    int rank = 0;
    std::vector<std::pair<std::uint64_t, int>> points;  // sorted by key

    std::size_t size() const { return points.size(); }
    bool scattered() const {
        return std::all_of(points.begin(), points.end(), [](const auto& p) { return p.second == 1; });
    }
    std::map<int, std::size_t> weight_histogram() const {
        std::map<int, std::size_t> h;
        for (const auto& p : points) ++h[p.second];
        return h;
    }
    friend bool operator==(const LinearSet&, const LinearSet&) = default;
};

inline std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Builds a linear set from per-coset point keys. kernel_cosets counts cosets mapped to zero.
inline LinearSet linear_set_from_counts(const Field& F, std::map<std::uint64_t, std::uint64_t> counts,
                                        std::uint64_t kernel_cosets) {
    const std::uint64_t q = F.q();
    int d = 0;
    while ((ipow(q, d) - 1) / (q - 1) < kernel_cosets) ++d;
    if ((ipow(q, d) - 1) / (q - 1) != kernel_cosets) throw std::logic_error("kernel size is not a subspace size");
    const std::uint64_t qd = ipow(q, d);
    LinearSet L;
    L.rank = 5 - d;
    for (auto [key, cnt] : counts) {
        // cnt (q-1) = (q^w - 1) q^d
        std::uint64_t vecs = cnt * (q - 1);
        if (vecs % qd) throw std::logic_error("inconsistent weight count");
        vecs = vecs / qd + 1;
        int w = 0;
        while (ipow(q, w) < vecs) ++w;
        if (ipow(q, w) != vecs) throw std::logic_error("weight is not a prime-power dimension");
        L.points.emplace_back(key, w);
    }
    return L;
}

inline LinearSet linear_set_of_pair(const Field& F, const LinearizedPoly& g, const LinearizedPoly& h) {
    if (g.is_zero() && h.is_zero()) throw PolyError("ZeroPolynomial");
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t kernel = 0;
    detail::CosetWalker wg(F, g), wh(F, h);
    for (std::uint32_t j = 0; j < F.cosets(); ++j) {
        Elem a = wg.value(), b = wh.value();
        if (a.is_zero() && b.is_zero())
            ++kernel;
        else
            ++counts[detail::pg1_key(F, a, b)];
        wg.step();
        wh.step();
    }
    return linear_set_from_counts(F, std::move(counts), kernel);
}

inline LinearSet linear_set_of_poly(const Field& F, const LinearizedPoly& f) {
    return linear_set_of_pair(F, identity_poly(), f);
}

// Linear set of the F_q-span of five vectors of F_{q^5}^2, one representative per F_q-line.
inline LinearSet linear_set_of_span(const Field& F, const std::array<std::pair<Elem, Elem>, 5>& basis) {
    auto fq = F.base_elements();
    const unsigned q = F.q();
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t kernel = 0;
    for (int lead = 0; lead < 5; ++lead) {
        std::uint64_t tail = ipow(q, 4 - lead);
        for (std::uint64_t t = 0; t < tail; ++t) {
            Elem a = basis[lead].first, b = basis[lead].second;
            std::uint64_t r = t;
            for (int k = 4; k > lead; --k) {
                Elem c = fq[r % q];
                r /= q;
                a = F.add(a, F.mul(c, basis[k].first));
                b = F.add(b, F.mul(c, basis[k].second));
            }
            if (a.is_zero() && b.is_zero())
                ++kernel;
            else
                ++counts[detail::pg1_key(F, a, b)];
        }
    }
    return linear_set_from_counts(F, std::move(counts), kernel);
}

// Image of a point set under (X:Y) -> (m00 X + m01 Y : m10 X + m11 Y).
inline LinearSet transform(const Field& F, const LinearSet& L, const std::array<std::array<Elem, 2>, 2>& m) {
    Elem det = F.sub(F.mul(m[0][0], m[1][1]), F.mul(m[0][1], m[1][0]));
    if (det.is_zero()) throw std::invalid_argument("singular transformation");
    LinearSet out;
    out.rank = L.rank;
    for (auto [key, w] : L.points) {
        Elem X, Y;
        if (key == F.size()) {
            X = F.zero();
            Y = F.one();
        } else {
            X = F.one();
            Y = F.element_at(key);
        }
        Elem X2 = F.add(F.mul(m[0][0], X), F.mul(m[0][1], Y));
        Elem Y2 = F.add(F.mul(m[1][0], X), F.mul(m[1][1], Y));
        out.points.emplace_back(detail::pg1_key(F, X2, Y2), w);
    }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// Point keys rendered as "g^k", "0" or "inf", one per line with weight, in key order.
inline std::string canonical_text(const Field& F, const LinearSet& L) {
    std::string s;
    for (auto [key, w] : L.points) {
        s += key == F.size() ? std::string("inf") : F.format(F.element_at(key));
        s += ' ';
        s += std::to_string(w);
        s += '\n';
    }
    return s;
}

struct LinearSetDigest {
    std::size_t size;
    int rank;
    std::map<int, std::size_t> weight_histogram;
    std::string sha256;
};

inline LinearSetDigest digest(const Field& F, const LinearSet& L) {
    return {L.size(), L.rank, L.weight_histogram(), sha256_hex(canonical_text(F, L))};
}

}  // namespace msls
