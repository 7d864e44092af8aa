#include "fixtures.hpp"

namespace spectra {

const std::vector<Fixture>& fixture_catalogue() {
    static const std::vector<Fixture> fixtures = {
        {"fibonacci", "name: fibonacci\na -> ab ; b -> a\n"},
        {"pisa2", "name: pisa2\na -> ab ; b -> a\n"},
        {"pisa3", "name: pisa3\na -> ab ; b -> ac ; c -> a\n"},
        {"pisa4", "name: pisa4\na -> ab ; b -> ac ; c -> ad ; d -> a\n"},
        {"pisa5", "name: pisa5\na -> ab ; b -> ac ; c -> ad ; d -> ae ; e -> a\n"},
        {"pisa6", "name: pisa6\na -> ab ; b -> ac ; c -> ad ; d -> ae ; e -> af ; f -> a\n"},
        {"tribonacci", "name: tribonacci\na -> ab ; b -> ac ; c -> a\n"},
        {"twisted_tribonacci", "name: twisted_tribonacci\na -> ba ; b -> ac ; c -> a\n"},
        // Bar-swap extension of the Fibonacci rule; A, B stand for the barred
        // letters.
        {"twisted_fib_ext", "name: twisted_fib_ext\na -> ab ; A -> AB ; b -> A ; B -> a\n"},
        {"rho_prime", "name: rho_prime\nA -> AB ; B -> D ; C -> CA ; D -> C\n"},
        {"rho_tilde", "name: rho_tilde\n0 -> 12 ; 1 -> 13 ; 2 -> 1 ; 3 -> 0\n"},
    };
    return fixtures;
}

const Fixture* find_fixture(const std::string& name) {
    for (const auto& f : fixture_catalogue())
        if (f.name == name) return &f;
    return nullptr;
}

} // namespace spectra
