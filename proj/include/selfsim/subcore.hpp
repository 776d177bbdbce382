#pragma once

#include "selfsim/matrix.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace selfsim {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

inline constexpr std::uint64_t kDefaultLengthCap = 100'000'000;
inline constexpr std::uint64_t kSaturated = ~std::uint64_t{0};

// dim 1: rules[a] is the image word.
// dim 2: rules[a] holds the q x q label grid row-major, top row first.
struct Substitution {
    std::vector<std::string> alphabet;
    int dim = 1;
    int q = 0;
    std::vector<Word> rules;

    std::size_t size() const { return alphabet.size(); }
    std::size_t max_image_length() const;
    Letter letter(std::string_view label) const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LengthCapError : public std::runtime_error {
public:
    LengthCapError(std::uint64_t predicted_length, std::uint64_t cap);
    std::uint64_t predicted;  // kSaturated when the count itself overflows
};

// UTF-8 text split into single-codepoint strings.
std::vector<std::string> split_codepoints(std::string_view text);

Substitution parse_substitution(std::string_view text);
Substitution load_substitution(const std::string& path);
std::string dump_substitution(const Substitution& sub);

Word word_from_string(const Substitution& sub, std::string_view text);
std::string word_to_string(const Substitution& sub, const Word& w);

Word apply(const Substitution& sub, const Word& w);
Word iterate(const Substitution& sub, Letter a, int n, std::uint64_t cap = kDefaultLengthCap);
std::vector<std::uint64_t> population_vector(const Word& w, std::size_t letters);
CountMatrix substitution_matrix(const Substitution& sub);

// lengths[j][c] = |σ^j(c)|, saturating at kSaturated.
using LengthTable = std::vector<std::vector<std::uint64_t>>;
LengthTable level_lengths(const Substitution& sub, int levels);

// Letters [start, start + len) of σ^level(a) without building σ^level(a).
Word extract(const Substitution& sub, const LengthTable& lengths, Letter a, int level,
             std::uint64_t start, std::uint64_t len);

// Breadth-first over (n, a); not finding w is not a proof that w is outside L(σ).
struct LanguageWitness {
    bool found = false;
    Letter letter = 0;
    int depth = 0;
    std::size_t position = 0;
};
LanguageWitness in_language(const Substitution& sub, const Word& w, int max_depth,
                            std::uint64_t cap = kDefaultLengthCap);

std::vector<std::pair<Letter, Letter>> fixed_point_seeds(const Substitution& sub, int depth = 8);

// left = σⁿ(a), read right to left from x(-1); right = σⁿ(b) starting at x(0).
struct OrbitBlocks {
    Word left;
    Word right;
};
OrbitBlocks orbit_generate(const Substitution& sub, std::pair<Letter, Letter> seed, int n,
                           std::uint64_t cap = kDefaultLengthCap);

// window = u0 σ(u1) ... σ^m(u_m) σ^m(v_m) ... σ(v1) v0
struct AccordionForm {
    int m = 0;
    std::vector<Word> u;
    std::vector<Word> v;
};

// The window is σ^level(top)[offset, offset + |window|).
struct SupertileHint {
    Letter top = 0;
    int level = 0;
    std::uint64_t offset = 0;
};

class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AccordionForm accordion_decompose(const Substitution& sub, const Word& window,
                                  std::optional<SupertileHint> hint = std::nullopt,
                                  int max_depth = 12);
Word accordion_reconstruct(const Substitution& sub, const AccordionForm& form);
bool is_rule_subword(const Substitution& sub, const Word& piece);

}  // namespace selfsim
