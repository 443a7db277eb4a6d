#include <iostream>

#include "msls/gfield.hpp"

int main() {
    msls::Field F(2, 2);
    std::cout << "q = " << F.q() << ", |F_{q^5}| = " << F.size() << ", cosets = " << F.cosets() << "\n";
    msls::Elem a = F.gen_pow(7);
    std::cout << "a = " << F.format(a) << ", N(a) = " << F.format(F.norm(a)) << ", a^-1 = " << F.format(F.inv(a)) << "\n";
}
