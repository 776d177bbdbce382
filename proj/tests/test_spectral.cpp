#include "support.hpp"

#include "selfsim/rng.hpp"
#include "selfsim/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace selfsim;
using testing_support::fixture;

namespace {

// Boolean power search up to Wielandt's bound (n-1)^2 + 1, done naively.
bool primitive_oracle(const CountMatrix& m) {
    std::size_t n = m.n;
    std::vector<int> p(n * n), b(n * n);
    for (std::size_t i = 0; i < n * n; ++i) p[i] = b[i] = m.a[i] > 0;
    std::size_t bound = (n - 1) * (n - 1) + 1;
    for (std::size_t k = 1; k <= bound; ++k) {
        if (std::all_of(p.begin(), p.end(), [](int x) { return x != 0; })) return true;
        std::vector<int> q(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (p[i * n + l])
                    for (std::size_t j = 0; j < n; ++j) q[i * n + j] |= b[l * n + j];
        p = q;
    }
    return false;
}

MatrixFixture matrix_fixture(const std::string& name) {
    return parse_matrix_fixture(testing_support::read_text(testing_support::fixture_path(name)));
}

bool block_upper_triangular(const CountMatrix& m, const BlockStructure& bs) {
    CountMatrix p = permuted(m, bs.permutation);
    std::vector<std::size_t> block_of(m.n);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < bs.blocks.size(); ++k)
        for (std::size_t i = 0; i < bs.blocks[k].size(); ++i) block_of[pos++] = k;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            if (block_of[i] > block_of[j] && p(i, j) != 0) return false;
    return true;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("normal form of the fixtures") {
    auto bs = normal_form(CountMatrix::from_rows({{3, 1}, {0, 2}}));
    REQUIRE(bs.blocks.size() == 2);
    CHECK(bs.blocks[0] == std::vector<std::size_t>{0});
    CHECK(bs.blocks[1] == std::vector<std::size_t>{1});
    CHECK(bs.a_part == std::vector<std::size_t>{0});
    CHECK(bs.b_part == std::vector<std::size_t>{1});
    CHECK(bs.reduced);

    auto single = normal_form(CountMatrix::from_rows({{1, 2}, {3, 1}}));
    CHECK(single.blocks.size() == 1);
    CHECK(single.kind[0] == BlockKind::primitive);

    auto r = normal_form(matrix_fixture("rauzy_ext_matrix").matrix);
    CHECK(r.a_part == std::vector<std::size_t>{0, 1, 2});
    CHECK(r.b_part == std::vector<std::size_t>{3, 4});
}

TEST_CASE("normal form is block upper triangular and stable under relabelling") {
    Stream rng(1, StreamTag::test, 10);
    std::vector<CountMatrix> ms;
    for (const char* name : testing_support::kSubstitutionFixtures) ms.push_back(substitution_matrix(fixture(name)));
    ms.push_back(matrix_fixture("rauzy_ext_matrix").matrix);
    ms.push_back(matrix_fixture("fractal73_matrix").matrix);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + rng.below(6);
        CountMatrix m(n);
        for (auto& x : m.a) x = rng.below(4) == 0 ? rng.below(3) : 0;
        ms.push_back(m);
    }
    for (const auto& m : ms) {
        auto bs = normal_form(m);
        CHECK(block_upper_triangular(m, bs));
        std::vector<std::size_t> perm(m.n);
        for (std::size_t i = 0; i < m.n; ++i) perm[i] = i;
        for (std::size_t i = m.n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        CountMatrix p = permuted(m, perm);
        auto bp = normal_form(p);
        // Incomparable blocks may swap places; the block multiset may not change.
        auto signature = [](const BlockStructure& x, const std::vector<std::size_t>& relabel) {
            std::vector<std::pair<std::vector<std::size_t>, int>> out;
            for (std::size_t k = 0; k < x.blocks.size(); ++k) {
                std::vector<std::size_t> members;
                for (auto i : x.blocks[k]) members.push_back(relabel[i]);
                std::sort(members.begin(), members.end());
                out.emplace_back(members, static_cast<int>(x.kind[k]));
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        std::vector<std::size_t> ident(m.n);
        for (std::size_t i = 0; i < m.n; ++i) ident[i] = i;
        CHECK(signature(bp, perm) == signature(bs, ident));
        // Normal form of the normal form keeps blocks contiguous.
        auto again = normal_form(permuted(m, bs.permutation));
        std::size_t pos = 0;
        for (const auto& blk : again.blocks) {
            auto sorted = blk;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == pos + i);
            pos += blk.size();
        }
    }
}

TEST_CASE("primitivity against boolean powers") {
    CHECK(is_primitive(CountMatrix::from_rows({{8}})));
    CHECK_FALSE(is_primitive(CountMatrix::from_rows({{0}})));
    CHECK_FALSE(is_primitive(CountMatrix::from_rows({{0, 1}, {1, 0}})));
    CHECK(is_irreducible(CountMatrix::from_rows({{0, 1}, {1, 0}})));
    CHECK(is_primitive(CountMatrix::from_rows({{0, 1, 1}, {1, 1, 0}, {0, 1, 1}})));
    Stream rng(2, StreamTag::test, 11);
    for (std::size_t n = 1; n <= 4; ++n) {
        std::uint64_t patterns = std::uint64_t{1} << (n * n);
        std::uint64_t step = n == 4 ? 7 : 1;
        for (std::uint64_t bits = 0; bits < patterns; bits += step) {
            CountMatrix m(n);
            for (std::size_t i = 0; i < n * n; ++i)
                m.a[i] = (bits >> i) & 1 ? 1 + rng.below(2) : 0;
            CHECK(is_primitive(m) == primitive_oracle(m));
        }
    }
}

TEST_CASE("spectral radius") {
    CHECK(spectral_radius(CountMatrix::from_rows({{3, 1}, {0, 2}})) == doctest::Approx(3).epsilon(1e-10));
    double phi = (1 + std::sqrt(5.0)) / 2;
    CHECK(spectral_radius(CountMatrix::from_rows({{1, 1}, {1, 0}})) == doctest::Approx(phi).epsilon(1e-10));
    CHECK(spectral_radius(CountMatrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}})) ==
          doctest::Approx(2).epsilon(1e-10));
    CHECK(spectral_radius(CountMatrix::from_rows({{0, 1}, {1, 0}})) == doctest::Approx(1).epsilon(1e-10));
    CHECK(spectral_radius(CountMatrix::from_rows({{2, 5, 1}, {0, 7, 3}, {0, 0, 4}})) ==
          doctest::Approx(7).epsilon(1e-10));
    for (const char* name : testing_support::kSubstitutionFixtures) {
        auto m = substitution_matrix(fixture(name));
        double r = spectral_radius(m);
        for (unsigned k = 2; k <= 4; ++k)
            CHECK(spectral_radius(power(m, k)) == doctest::Approx(std::pow(r, k)).epsilon(1e-9));
    }
}

TEST_CASE("Perron vectors") {
    auto m = substitution_matrix(fixture("cantor"));
    auto xi = dominant_left_vector(m, Normalization::min_one);
    CHECK(xi[0] == doctest::Approx(1).epsilon(1e-10));
    CHECK(xi[1] == doctest::Approx(1).epsilon(1e-10));
    auto x2 = dominant_left_vector(substitution_matrix(fixture("cantor1001")), Normalization::min_one);
    CHECK(x2[0] == doctest::Approx(1).epsilon(1e-10));
    CHECK(x2[1] == doctest::Approx(2).epsilon(1e-10));

    auto one = perron_vectors(CountMatrix::from_rows({{2}}));
    CHECK(one.rho == doctest::Approx(2));
    CHECK(one.left_vec == std::vector<double>{1.0});

    std::vector<CountMatrix> blocks;
    for (const char* name : {"cantor", "cantor1001", "sigma2", "sigma_k1", "carpet"}) {
        auto mm = substitution_matrix(fixture(name));
        blocks.push_back(principal_submatrix(mm, normal_form(mm).b_part));
    }
    auto f = matrix_fixture("fractal73_matrix").matrix;
    blocks.push_back(principal_submatrix(f, normal_form(f).b_part));
    blocks.push_back(CountMatrix::from_rows({{0, 1, 1}, {1, 1, 0}, {0, 1, 1}}));
    for (const auto& b : blocks) {
        auto p = perron_vectors(b);
        CHECK(p.residual <= 1e-10);
        for (double v : p.left_vec) CHECK(v > 0);
        for (double v : p.right_vec) CHECK(v > 0);
        for (std::size_t i = 0; i < b.n; ++i) {
            double lhs = 0;
            for (std::size_t j = 0; j < b.n; ++j) lhs += b(i, j) * p.right_vec[j];
            CHECK(lhs == doctest::Approx(p.rho * p.right_vec[i]).epsilon(1e-10));
        }
    }
    CHECK_THROWS(perron_vectors(CountMatrix::from_rows({{0, 1}, {0, 0}})));
}

TEST_CASE("alpha on exact fixtures") {
    CHECK(alpha_exponent(fixture("cantor")) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
    CHECK(alpha_exponent(fixture("carpet")) == doctest::Approx(std::log(8.0) / std::log(3.0)).epsilon(1e-10));
    CHECK(alpha_exponent(fixture("sigma2")) == doctest::Approx(std::log(8.0) / std::log(9.0)).epsilon(1e-10));
    for (int k = 0; k <= 3; ++k)
        CHECK(alpha_exponent(fixture("sigma_k" + std::to_string(k))) == doctest::Approx(0.5).epsilon(1e-10));
    for (const char* name : {"cantor", "cantor1001", "sigma2", "sigma_k0", "carpet"}) {
        auto rep = admissibility_report(fixture(name));
        REQUIRE(rep.admissible());
        double lambda = fixture(name).dim == 2 ? 3.0 : rep.shape.rho_A;
        CHECK(std::pow(lambda, *rep.alpha) == doctest::Approx(rep.shape.rho_B).epsilon(1e-10));
    }
}

TEST_CASE("matrix-only fixtures") {
    auto f = matrix_report(matrix_fixture("fractal73_matrix"));
    REQUIRE(f.alpha);
    CHECK(std::abs(*f.alpha - 1.258) < 1e-3);
    CHECK(std::abs(f.shape.rho_B - 1.618) < 1e-3);
    auto r = matrix_report(matrix_fixture("rauzy_ext_matrix"));
    REQUIRE(r.alpha);
    CHECK(std::abs(*r.alpha - 1.57935) < 5e-5);
    CHECK(r.lambda_dim_mismatch < 1e-3);
    CHECK(is_matrix_fixture(testing_support::read_text(testing_support::fixture_path("fractal73_matrix"))));
    CHECK_FALSE(is_matrix_fixture(testing_support::read_text(testing_support::fixture_path("cantor"))));
}

TEST_CASE("admissibility") {
    auto c = admissibility_report(fixture("cantor"));
    CHECK(c.admissible());
    CHECK(c.border_ok);
    CHECK(c.interior_ok);
    CHECK(c.witness_k == 2);
    CHECK(admissibility_report(fixture("cantor1001")).witness_k == 2);
    CHECK(admissibility_report(fixture("carpet")).admissible());

    auto o = admissibility_report(fixture("openq1"));
    CHECK_FALSE(o.admissible());
    CHECK_FALSE(o.shape.rho_order_ok);
    bool mentions = false;
    for (const auto& s : o.failures) mentions |= s.find("rho_order") != std::string::npos;
    CHECK(mentions);

    auto single = parse_substitution(R"({"alphabet":["a"],"dim":1,"rules":{"a":"aa"}})");
    CHECK_FALSE(admissibility_report(single).admissible());
    CHECK_THROWS_AS(analyze(single), AdmissibilityError);

    // B-rule image not bordered by B-letters.
    auto border = parse_substitution(R"({"alphabet":["0","1"],"dim":1,"rules":{"0":"000","1":"110"}})");
    auto br = admissibility_report(border);
    CHECK_FALSE(br.border_ok);
    CHECK_FALSE(br.admissible());
}

TEST_CASE("length asymptotics") {
    auto rows = length_asymptotics_check(fixture("cantor"), 12);
    for (const auto& r : rows) CHECK(r.ratio[1] == doctest::Approx(1).epsilon(1e-10));
    // cantor1001: |σ^k(1)| = 2·3^k - 2^k, so the ratio is 1 - (2/3)^k / 2.
    auto r2 = length_asymptotics_check(fixture("cantor1001"), 16);
    CHECK(r2[0].ratio[1] == doctest::Approx(0.5).epsilon(1e-10));
    for (const auto& r : r2) {
        CHECK(r.ratio[1] == doctest::Approx(1 - std::pow(2.0 / 3.0, r.k) / 2).epsilon(1e-10));
        CHECK(r.ratio[0] == doctest::Approx(1).epsilon(1e-10));
    }
    CHECK(std::abs(r2[16].ratio[1] - 1) < 1e-3);
}

}  // TEST_SUITE
