#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "msls/gfield.hpp"

namespace msls {

using Vec = std::vector<Fe>;
using Mat = std::vector<Vec>;  // row-major

inline Vec zero_vec(const Field& F, std::size_t n) { return Vec(n, Fe::zero(F)); }

inline Mat identity(const Field& F, std::size_t n) {
    Mat m(n, zero_vec(F, n));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Fe::one(F);
    return m;
}

inline bool is_zero(const Vec& v) {
    for (const Fe& x : v)
        if (!x.is_zero()) return false;
    return true;
}

inline Vec operator+(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline Vec operator-(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
inline Vec operator*(Fe c, Vec a) {
    for (Fe& x : a) x = c * x;
    return a;
}

inline Fe dot(const Vec& a, const Vec& b) {
    Fe s;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vec frob(Vec v, int i) {
    for (Fe& x : v) x = x.frob(i);
    return v;
}
inline Mat frob(Mat m, int i) {
    for (Vec& r : m) r = frob(std::move(r), i);
    return m;
}

inline Mat transpose(const Mat& a) {
    if (a.empty()) return {};
    Mat t(a[0].size(), Vec(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    Mat c(a.size(), Vec(b.empty() ? 0 : b[0].size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < b[k].size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

inline Vec mat_vec(const Mat& a, const Vec& x) {
    Vec y(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
    return y;
}

// Normalizes so the first nonzero entry is 1. Zero vectors are returned unchanged.
inline Vec normalized(Vec v) {
    for (const Fe& x : v)
        if (!x.is_zero()) return x.inv() * std::move(v);
    return v;
}

struct Echelon {
    Mat rows;                 // nonzero rows, reduced, leading entries 1
    std::vector<int> pivots;  // pivot column per row
};

inline Echelon rref(Mat a) {
    Echelon out;
    if (a.empty()) return out;
    const std::size_t n = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < a.size(); ++c) {
        std::size_t piv = r;
        while (piv < a.size() && a[piv][c].is_zero()) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[r], a[piv]);
        Fe iv = a[r][c].inv();
        for (Fe& x : a[r]) x = x * iv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            Fe f = a[i][c];
            for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[r][k];
        }
        out.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    a.resize(r);
    out.rows = std::move(a);
    return out;
}

inline int rank(const Mat& a) { return static_cast<int>(rref(a).rows.size()); }

// Basis of {x : a x = 0}, with n columns.
inline Mat null_space(const Mat& a, std::size_t n, const Field& F) {
    Echelon e = rref(a);
    std::vector<bool> is_piv(n, false);
    for (int c : e.pivots) is_piv[static_cast<std::size_t>(c)] = true;
    Mat basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_piv[f]) continue;
        Vec x = zero_vec(F, n);
        x[f] = Fe::one(F);
        for (std::size_t r = 0; r < e.rows.size(); ++r) x[static_cast<std::size_t>(e.pivots[r])] = -e.rows[r][f];
        basis.push_back(std::move(x));
    }
    return basis;
}

inline std::optional<Mat> inverse(const Mat& a, const Field& F) {
    const std::size_t n = a.size();
    Mat aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        aug[i] = a[i];
        for (std::size_t j = 0; j < n; ++j) aug[i].push_back(i == j ? Fe::one(F) : Fe::zero(F));
    }
    Echelon e = rref(std::move(aug));
    if (e.rows.size() < n || e.pivots[n - 1] != static_cast<int>(n - 1)) return std::nullopt;
    Mat inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[i] = Vec(e.rows[i].begin() + static_cast<long>(n), e.rows[i].end());
    return inv;
}

// Unique solution of a x = b for square nonsingular a.
inline std::optional<Vec> solve(const Mat& a, const Vec& b, const Field& F) {
    const std::size_t n = a.size();
    Mat aug = a;
    for (std::size_t i = 0; i < n; ++i) aug[i].push_back(b[i]);
    Echelon e = rref(std::move(aug));
    if (e.rows.size() != n) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i)
        if (e.pivots[i] != static_cast<int>(i)) return std::nullopt;
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = e.rows[i][n];
    (void)F;
    return x;
}

inline Fe det(Mat a, const Field& F) {
    const std::size_t n = a.size();
    Fe d = Fe::one(F);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c].is_zero()) ++piv;
        if (piv == n) return Fe::zero(F);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            d = -d;
        }
        d *= a[c][c];
        Fe iv = a[c][c].inv();
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c].is_zero()) continue;
            Fe f = a[r][c] * iv;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return d;
}

struct FqKernel {
    std::vector<Elem> basis;  // F_q-basis of the kernel, as elements of F_{q^5}
    int rank = 0;
};

// Matrix over F_q of x -> sum a_i x^{q^i}, in the normal basis of the field.
inline Mat fq_matrix(const Field& F, const std::array<Elem, 5>& coeffs) {
    Mat m(5, zero_vec(F, 5));
    for (int j = 0; j < 5; ++j) {
        Elem b = F.frob(F.normal_element(), j);
        Elem y = F.zero();
        for (int i = 0; i < 5; ++i) y = F.add(y, F.mul(coeffs[i], F.frob(b, i)));
        auto c = F.normal_coords(y);
        for (int i = 0; i < 5; ++i) m[i][j] = Fe(F, c[i]);
    }
    return m;
}

// Kernel of an F_q-linear map given as a 5x5 F_q-matrix acting on normal-basis coordinates.
inline FqKernel fq_linear_solve(const Field& F, const Mat& m) {
    FqKernel out;
    out.rank = rank(m);
    for (const Vec& v : null_space(m, 5, F)) {
        std::array<Elem, 5> c;
        for (int i = 0; i < 5; ++i) c[i] = v[i].raw();
        out.basis.push_back(F.from_normal_coords(c));
    }
    return out;
}

inline FqKernel fq_linear_solve(const Field& F, const std::array<Elem, 5>& coeffs) {
    return fq_linear_solve(F, fq_matrix(F, coeffs));
}

}  // namespace msls
