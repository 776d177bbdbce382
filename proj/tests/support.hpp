#pragma once

#include "selfsim/pipeline.hpp"

#include <fstream>
#include <iterator>
#include <string>

namespace testing_support {

inline std::string fixture_path(const std::string& name) {
    return std::string(SELFSIM_FIXTURES) + "/" + name + ".json";
}

inline selfsim::Substitution fixture(const std::string& name) {
    return selfsim::load_substitution(fixture_path(name));
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const char* kSubstitutionFixtures[] = {"cantor", "cantor1001", "sigma2", "sigma_k0", "sigma_k1",
                                              "sigma_k2", "sigma_k3", "carpet", "openq1"};

}  // namespace testing_support
