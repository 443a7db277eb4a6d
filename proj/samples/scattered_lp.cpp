#include <iostream>

#include "msls/linpoly.hpp"

int main() {
    msls::Field F(3, 1);
    msls::ScatterScratch sc;
    int scattered = 0, total = 0;
    for (std::uint64_t i = 1; i < F.size(); ++i) {
        msls::Elem d = F.element_at(i);
        msls::LinearizedPoly f = msls::LinearizedPoly::monomial(1);
        f.c[4] = d;
        auto r = msls::is_scattered(F, f, sc, false);
        ++total;
        if (r.scattered) ++scattered;
        else if (F.norm(d) != F.one()) std::cout << "unexpected: " << F.format(d) << "\n";
    }
    std::cout << "x^q + d*x^(q^4) over F_3^5: " << scattered << " of " << total << " nonzero d scattered\n";
}
