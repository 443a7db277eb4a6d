#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace msls {

// Conway polynomials C(p,n), coefficients from x^0 upward, monic.
struct ConwayEntry {
    unsigned p;
    unsigned n;
    std::vector<unsigned> coeffs;
};

inline const std::vector<ConwayEntry>& conway_table() {
    static const std::vector<ConwayEntry> table = {
        {2, 1, {1, 1}},
        {3, 1, {1, 1}},
        {5, 1, {3, 1}},
        {7, 1, {4, 1}},
        {11, 1, {9, 1}},
        {13, 1, {11, 1}},
        {17, 1, {14, 1}},
        {19, 1, {17, 1}},
        {23, 1, {18, 1}},
        {29, 1, {27, 1}},
        {31, 1, {28, 1}},
        {2, 2, {1, 1, 1}},
        {3, 2, {2, 2, 1}},
        {5, 2, {2, 4, 1}},
        {2, 3, {1, 1, 0, 1}},
        {3, 3, {1, 2, 0, 1}},
        {2, 4, {1, 1, 0, 0, 1}},
        {2, 5, {1, 0, 1, 0, 0, 1}},
        {3, 5, {1, 2, 0, 0, 0, 1}},
        {5, 5, {3, 4, 0, 0, 0, 1}},
        {7, 5, {4, 1, 0, 0, 0, 1}},
        {11, 5, {9, 0, 10, 0, 0, 1}},
        {13, 5, {11, 4, 0, 0, 0, 1}},
        {17, 5, {14, 1, 0, 0, 0, 1}},
        {19, 5, {17, 5, 0, 0, 0, 1}},
        {23, 5, {18, 3, 0, 0, 0, 1}},
        {29, 5, {27, 3, 0, 0, 0, 1}},
        {31, 5, {28, 7, 0, 0, 0, 1}},
        {2, 10, {1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1}},
        {3, 10, {2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1}},
        {5, 10, {2, 1, 4, 2, 3, 3, 0, 0, 0, 0, 1}},
        {2, 15, {1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {3, 15, {1, 1, 2, 0, 0, 1, 0, 0, 2, 0, 0, 0, 0, 0, 0, 1}},
        {2, 20, {1, 1, 0, 0, 1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {2, 25, {1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
    };
    return table;
}

inline std::optional<std::vector<unsigned>> conway_polynomial(unsigned p, unsigned n) {
    for (const auto& e : conway_table())
        if (e.p == p && e.n == n) return e.coeffs;
    return std::nullopt;
}

}  // namespace msls
