#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msls/gfield.hpp"
#include "msls/linalg.hpp"
#include "msls/linpoly.hpp"

namespace msls {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Subspace of PG(4,q^5) kept in reduced row echelon form.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(Mat rows) : rows_(rref(std::move(rows)).rows) {}

    const Mat& rows() const { return rows_; }
    int vdim() const { return static_cast<int>(rows_.size()); }
    int dim() const { return vdim() - 1; }
    bool empty() const { return rows_.empty(); }
    bool contains(const Vec& x) const {
        Mat m = rows_;
        m.push_back(x);
        return rank(m) == vdim();
    }
    // Normalized point, valid when dim() == 0.
    Vec point() const {
        if (vdim() != 1) throw GeometryError("subspace is not a point");
        return rows_[0];
    }
    friend bool operator==(const Subspace&, const Subspace&) = default;

private:
    Mat rows_;
};

inline Subspace point_of(const Vec& x) { return Subspace(Mat{x}); }

inline Subspace span(const Subspace& a, const Subspace& b) {
    Mat m = a.rows();
    m.insert(m.end(), b.rows().begin(), b.rows().end());
    return Subspace(std::move(m));
}

inline Subspace span(const std::vector<Vec>& pts) { return Subspace(Mat(pts.begin(), pts.end())); }

inline Mat annihilator(const Subspace& s, const Field& F) { return null_space(s.rows(), 5, F); }

inline Subspace meet(const Subspace& a, const Subspace& b, const Field& F) {
    Mat m = annihilator(a, F);
    Mat n = annihilator(b, F);
    m.insert(m.end(), n.begin(), n.end());
    if (m.empty()) return a;
    return Subspace(null_space(m, 5, F));
}

struct Model {
    enum class Kind { Rational, Moore };
    Kind kind = Kind::Moore;
    int s = 1;  // generator exponent, gcd(s,5) = 1

    static Model rational(int s = 1) { return {Kind::Rational, s}; }
    static Model moore(int s = 1) { return {Kind::Moore, s}; }
    std::string name() const { return kind == Kind::Rational ? "rational" : "moore"; }
};

inline int reduce_s(int s) {
    int r = ((s % 5) + 5) % 5;
    if (r == 0) throw std::invalid_argument("generator exponent must be coprime to 5");
    return r;
}

// Applies sigma^i, where sigma is the model's generator (exponent s).
inline Vec sigma(const Model& m, const Vec& x, int i) {
    int t = (((m.s * i) % 5) + 5) % 5;
    if (m.kind == Model::Kind::Rational) return frob(x, t);
    Vec y(5);
    for (int k = 0; k < 5; ++k) y[k] = x[static_cast<std::size_t>(((k - t) % 5 + 5) % 5)].frob(t);
    return y;
}

inline Subspace sigma(const Model& m, const Subspace& S, int i) {
    Mat rows;
    for (const Vec& r : S.rows()) rows.push_back(sigma(m, r, i));
    return Subspace(std::move(rows));
}

inline int point_rank(const Model& m, const Vec& x) {
    Mat orbit;
    for (int i = 0; i < 5; ++i) orbit.push_back(sigma(m, x, i));
    return rank(orbit);
}

// Intersection of the sigma-orbit of S, i.e. the largest sigma-invariant subspace inside S.
inline Subspace sigma_core(const Model& m, const Subspace& S, const Field& F) {
    Subspace T = S;
    for (int i = 1; i < 5; ++i) T = meet(T, sigma(m, S, i), F);
    return T;
}

// Representative vectors of the points of Sigma, one per point.
inline std::vector<Vec> sigma_points(const Field& F, const Model& m) {
    std::vector<Vec> out;
    out.reserve(F.cosets());
    if (m.kind == Model::Kind::Moore) {
        for (std::uint32_t j = 0; j < F.cosets(); ++j) {
            Vec v(5);
            for (int i = 0; i < 5; ++i) v[i] = Fe(F, F.frob(Elem{j}, i));
            out.push_back(std::move(v));
        }
        return out;
    }
    auto fq = F.base_elements();
    const unsigned q = F.q();
    for (int lead = 0; lead < 5; ++lead) {
        std::uint64_t tail = ipow(q, 4 - lead);
        for (std::uint64_t t = 0; t < tail; ++t) {
            Vec v = zero_vec(F, 5);
            v[lead] = Fe::one(F);
            std::uint64_t r = t;
            for (int k = 4; k > lead; --k) {
                v[k] = Fe(F, fq[r % q]);
                r /= q;
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

// Moore matrix of the normal element: rational coordinates -> Moore coordinates.
inline Mat moore_mat(const Field& F) {
    Mat m(5, Vec(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m[i][j] = Fe(F, F.moore_matrix()[i][j]);
    return m;
}

inline Vec model_convert(const Field& F, const Model& from, const Model& to, const Vec& x) {
    if (from.kind == to.kind) return x;
    if (from.kind == Model::Kind::Rational) return mat_vec(moore_mat(F), x);
    Mat inv(5, Vec(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) inv[i][j] = Fe(F, F.moore_inverse()[i][j]);
    return mat_vec(inv, x);
}

inline Subspace model_convert(const Field& F, const Model& from, const Model& to, const Subspace& S) {
    Mat rows;
    for (const Vec& r : S.rows()) rows.push_back(model_convert(F, from, to, r));
    return Subspace(std::move(rows));
}

// Coefficient vector of the F_q-linear functional u -> sum c_i u^{q^i} on Moore coordinates.
inline Vec functional_of(const Field& F, const LinearizedPoly& f) {
    Vec v(5);
    for (int i = 0; i < 5; ++i) v[i] = Fe(F, f.c[i]);
    return v;
}

// Gamma_{g,h}: the common kernel in the Moore model; projecting Sigma from it reads (g(u), h(u)).
inline Subspace gamma_from_pair(const Field& F, const LinearizedPoly& g, const LinearizedPoly& h) {
    Mat m{functional_of(F, g), functional_of(F, h)};
    if (rank(m) != 2) throw GeometryError("pair does not define a plane");
    return Subspace(null_space(m, 5, F));
}

inline LinearizedPoly f0_poly(Elem a2, Elem a3, Elem a4) {
    LinearizedPoly f;
    f.c = {Field::zero(), Field::one(), a2, a3, a4};
    return f;
}

inline Subspace gamma_from_poly(const Field& F, Elem a2, Elem a3, Elem a4) {
    return gamma_from_pair(F, identity_poly(), f0_poly(a2, a3, a4));
}

// Two functionals vanishing exactly on a plane; projection from the plane onto a line.
struct Projector {
    Vec l0, l1;
    Subspace target;  // line the images live on

    std::pair<Fe, Fe> coords(const Vec& x) const { return {dot(l0, x), dot(l1, x)}; }
};

// Projection from Gamma onto the line Lambda (Gamma ∩ Lambda = ∅).
inline Projector make_projector(const Field& F, const Subspace& gamma, const Subspace& lambda) {
    if (gamma.vdim() != 3 || lambda.vdim() != 2) throw GeometryError("projector needs a plane and a line");
    Mat b = gamma.rows();
    b.insert(b.end(), lambda.rows().begin(), lambda.rows().end());
    auto inv = inverse(b, F);
    if (!inv) throw GeometryError("vertex meets target line");
    // x = c B  =>  c = x B^{-1}; the last two entries are the target coordinates.
    Projector p;
    p.l0 = Vec(5);
    p.l1 = Vec(5);
    for (int i = 0; i < 5; ++i) {
        p.l0[i] = (*inv)[i][3];
        p.l1[i] = (*inv)[i][4];
    }
    p.target = lambda;
    return p;
}

// First coordinate line <e_i, e_j> disjoint from Gamma.
inline Subspace complementary_line(const Field& F, const Subspace& gamma) {
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            Vec a = zero_vec(F, 5), b = zero_vec(F, 5);
            a[i] = Fe::one(F);
            b[j] = Fe::one(F);
            Subspace line(Mat{a, b});
            if (meet(gamma, line, F).empty()) return line;
        }
    throw GeometryError("no complementary coordinate line");
}

inline Projector make_projector(const Field& F, const Subspace& gamma) {
    return make_projector(F, gamma, complementary_line(F, gamma));
}

inline Vec project_from_plane(const Field& F, const Subspace& gamma, const Subspace& lambda, const Vec& x) {
    if (gamma.contains(x)) throw GeometryError("VertexContainsPoint");
    Projector p = make_projector(F, gamma, lambda);
    auto [c0, c1] = p.coords(x);
    return normalized(c0 * lambda.rows()[0] + c1 * lambda.rows()[1]);
}

// Weighted linear set obtained by projecting Sigma with the functionals (l0, l1).
inline LinearSet project_sigma(const Field& F, const Model& m, const Vec& l0, const Vec& l1) {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t kernel = 0;
    for (const Vec& x : sigma_points(F, m)) {
        Fe a = dot(l0, x), b = dot(l1, x);
        if (a.is_zero() && b.is_zero())
            ++kernel;
        else
            ++counts[pg1_key(F, a.raw(), b.raw())];
    }
    return linear_set_from_counts(F, std::move(counts), kernel);
}

inline LinearSet project_sigma(const Field& F, const Model& m, const Projector& p) {
    return project_sigma(F, m, p.l0, p.l1);
}

}  // namespace msls
