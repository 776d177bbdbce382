#pragma once

#include "selfsim/matrix.hpp"
#include "selfsim/subcore.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selfsim {

enum class BlockKind { zero, primitive, imprimitive };

struct BlockStructure {
    std::vector<std::size_t> permutation;             // normal-form position -> original index
    std::vector<std::vector<std::size_t>> blocks;      // original indices, normal-form order
    std::vector<BlockKind> kind;
    std::vector<double> radius;
    bool reduced = false;                              // last block primitive and at least two blocks
    std::vector<std::size_t> a_part;
    std::vector<std::size_t> b_part;
};

// SCC condensation of b -> a iff M[a,b] > 0, ordered so the permuted matrix is
// block upper-triangular; ties go to the block with the smallest original index.
BlockStructure normal_form(const CountMatrix& m);

bool is_primitive(const CountMatrix& block);
bool is_irreducible(const CountMatrix& block);

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double lo_, double hi_);
    double lo, hi;
};

inline constexpr double kPowerTol = 1e-12;
inline constexpr int kPowerMaxIter = 100000;

double block_radius(const CountMatrix& block, double tol = kPowerTol);
double spectral_radius(const CountMatrix& m, double tol = kPowerTol);

enum class Normalization { sum_one, first_one, min_one };

struct PerronData {
    double rho = 0;
    std::vector<double> left_vec;
    std::vector<double> right_vec;
    double residual = 0;
    Normalization normalization = Normalization::sum_one;
};

// Both PF vectors of a primitive block.
PerronData perron_vectors(const CountMatrix& block, Normalization norm = Normalization::sum_one,
                          double tol = kPowerTol);

// Dominant left eigenvector of a reducible matrix, for use with rho = ρ(A).
// Throws if it is not strictly positive.
std::vector<double> dominant_left_vector(const CountMatrix& m, Normalization norm,
                                         double tol = kPowerTol, double* rho_out = nullptr,
                                         double* residual_out = nullptr);

void normalize(std::vector<double>& v, Normalization norm);

struct ShapeCheck {
    bool shape_ok = false;
    bool rho_order_ok = false;
    bool positive_left_eigenvector = false;
    double rho_A = 0;
    double rho_B = 0;
    std::vector<std::string> failures;
};

ShapeCheck check_shape(const CountMatrix& m, const BlockStructure& bs);

struct AdmissibilityReport {
    ShapeCheck shape;
    bool border_ok = false;     // tec1
    bool interior_ok = false;   // tec2
    int witness_k = -1;
    std::optional<double> alpha;
    std::vector<std::string> failures;

    bool admissible() const { return alpha.has_value(); }
};

AdmissibilityReport admissibility_report(const Substitution& sub, int tec2_bound = 8);

class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double alpha_exponent(const Substitution& sub);

struct LengthRatioRow {
    int k = 0;
    std::vector<double> ratio;  // |σ^k(i)| / (ξ_i ρ(A)^k)
};
std::vector<LengthRatioRow> length_asymptotics_check(const Substitution& sub, int k_max);

// Matrix-only inputs: {"kind":"matrix","labels":[..],"matrix":[[..]],"lambda":x,"dim":d}
struct MatrixFixture {
    std::vector<std::string> labels;
    CountMatrix matrix;
    double lambda = 0;
    int dim = 1;
};

bool is_matrix_fixture(std::string_view text);
MatrixFixture parse_matrix_fixture(std::string_view text);

struct MatrixReport {
    BlockStructure blocks;
    ShapeCheck shape;
    double lambda = 0;
    std::optional<double> alpha;
    double lambda_dim_mismatch = 0;  // |λ^d - ρ(A)| / ρ(A)
};

MatrixReport matrix_report(const MatrixFixture& fx);

}  // namespace selfsim
