#pragma once

#include "selfsim/ergodic.hpp"
#include "selfsim/gdifs.hpp"
#include "selfsim/spectral.hpp"
#include "selfsim/subcore.hpp"
#include "selfsim/tiling.hpp"

#include <vector>

namespace selfsim {

// Everything derived from an admissible substitution.
struct Analysis {
    Substitution sub;
    CountMatrix matrix;
    BlockStructure blocks;
    AdmissibilityReport report;
    double rho_A = 0;
    double rho_B = 0;
    double lambda = 0;
    double alpha = 0;
    std::vector<std::size_t> b_letters;
    std::vector<bool> is_b;
    LengthVector xi_len;
    TransverseWeights xi_tr;
    MeasureNormalization norm;
    MassVector mass;
    GdifsGraph graph;

    std::vector<double> xi_len_b() const;
    // ℋ-weight cell observable: h on B-letters divided by the tile size.
    std::vector<double> h_weight_per_letter() const;
};

// Throws AdmissibilityError when the report has failures.
Analysis analyze(const Substitution& sub);

}  // namespace selfsim
