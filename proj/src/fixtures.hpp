#pragma once

#include <string>
#include <vector>

namespace spectra {

struct Fixture {
    std::string name;
    std::string rule_text;
};

// Built-in catalogue of the example systems.
const std::vector<Fixture>& fixture_catalogue();
const Fixture* find_fixture(const std::string& name);

} // namespace spectra
