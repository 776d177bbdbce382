#include "selfsim/subcore.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace selfsim {

namespace {

std::uint64_t sat_add(std::uint64_t x, std::uint64_t y) {
    std::uint64_t s;
    return __builtin_add_overflow(x, y, &s) ? kSaturated : s;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Word decode_image(const std::vector<std::string>& labels,
                  const std::vector<std::string>& alphabet, const std::string& owner) {
    Word w;
    w.reserve(labels.size());
    for (const auto& s : labels) {
        auto it = std::find(alphabet.begin(), alphabet.end(), s);
        if (it == alphabet.end())
            throw ConfigError("unknown letter '" + s + "' in rule for '" + owner + "'");
        w.push_back(static_cast<Letter>(it - alphabet.begin()));
    }
    return w;
}

}  // namespace

std::size_t Substitution::max_image_length() const {
    std::size_t m = 0;
    for (const auto& r : rules) m = std::max(m, r.size());
    return m;
}

Letter Substitution::letter(std::string_view label) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        if (alphabet[i] == label) return static_cast<Letter>(i);
    throw ConfigError("unknown letter '" + std::string(label) + "'");
}

LengthCapError::LengthCapError(std::uint64_t predicted_length, std::uint64_t cap)
    : std::runtime_error(predicted_length == kSaturated
                             ? "predicted length exceeds 2^64 (cap " + std::to_string(cap) + ")"
                             : "predicted length " + std::to_string(predicted_length) +
                                   " exceeds cap " + std::to_string(cap)),
      predicted(predicted_length) {}

std::vector<std::string> split_codepoints(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > text.size()) throw ConfigError("invalid UTF-8 in letter data");
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

Substitution parse_substitution(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte);
        throw ConfigError("syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (!doc.contains("alphabet") || !doc["alphabet"].is_array())
        throw ConfigError("missing 'alphabet' array");
    if (!doc.contains("rules") || !doc["rules"].is_object())
        throw ConfigError("missing 'rules' object");

    Substitution sub;
    for (const auto& a : doc["alphabet"]) {
        if (!a.is_string()) throw ConfigError("alphabet entries must be strings");
        auto s = a.get<std::string>();
        if (split_codepoints(s).size() != 1)
            throw ConfigError("letter '" + s + "' is not a single codepoint");
        if (std::find(sub.alphabet.begin(), sub.alphabet.end(), s) != sub.alphabet.end())
            throw ConfigError("duplicate letter '" + s + "'");
        sub.alphabet.push_back(s);
    }
    if (sub.alphabet.empty()) throw ConfigError("empty alphabet");
    if (sub.alphabet.size() > 255) throw ConfigError("alphabet larger than 255 letters");

    sub.dim = doc.value("dim", 1);
    if (sub.dim != 1 && sub.dim != 2) throw ConfigError("dim must be 1 or 2");

    const auto& rules = doc["rules"];
    for (auto it = rules.begin(); it != rules.end(); ++it)
        if (std::find(sub.alphabet.begin(), sub.alphabet.end(), it.key()) == sub.alphabet.end())
            throw ConfigError("rule for unknown letter '" + it.key() + "'");

    sub.rules.resize(sub.alphabet.size());
    for (std::size_t i = 0; i < sub.alphabet.size(); ++i) {
        const auto& name = sub.alphabet[i];
        if (!rules.contains(name)) throw ConfigError("no rule for letter '" + name + "'");
        const auto& r = rules[name];
        if (sub.dim == 1) {
            if (!r.is_string()) throw ConfigError("rule for '" + name + "' must be a string");
            auto labels = split_codepoints(r.get<std::string>());
            if (labels.empty()) throw ConfigError("empty rule for '" + name + "'");
            sub.rules[i] = decode_image(labels, sub.alphabet, name);
        } else {
            if (!r.is_array() || r.empty())
                throw ConfigError("rule for '" + name + "' must be a nonempty array of rows");
            int q = static_cast<int>(r.size());
            if (sub.q == 0) sub.q = q;
            if (q != sub.q)
                throw ConfigError("inconsistent inflation factor: rule for '" + name + "' has " +
                                  std::to_string(q) + " rows, expected " + std::to_string(sub.q));
            Word grid;
            for (const auto& row : r) {
                if (!row.is_string()) throw ConfigError("grid rows must be strings");
                auto labels = split_codepoints(row.get<std::string>());
                if (static_cast<int>(labels.size()) != q)
                    throw ConfigError("non-square image for '" + name + "'");
                auto w = decode_image(labels, sub.alphabet, name);
                grid.insert(grid.end(), w.begin(), w.end());
            }
            sub.rules[i] = std::move(grid);
        }
    }
    return sub;
}

Substitution load_substitution(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_substitution(ss.str());
}

std::string dump_substitution(const Substitution& sub) {
    nlohmann::ordered_json doc;
    doc["alphabet"] = sub.alphabet;
    doc["dim"] = sub.dim;
    nlohmann::ordered_json rules = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (sub.dim == 1) {
            rules[sub.alphabet[i]] = word_to_string(sub, sub.rules[i]);
        } else {
            std::vector<std::string> rows;
            for (int r = 0; r < sub.q; ++r) {
                Word row(sub.rules[i].begin() + r * sub.q, sub.rules[i].begin() + (r + 1) * sub.q);
                rows.push_back(word_to_string(sub, row));
            }
            rules[sub.alphabet[i]] = rows;
        }
    }
    doc["rules"] = rules;
    return doc.dump(2);
}

Word word_from_string(const Substitution& sub, std::string_view text) {
    Word w;
    for (const auto& s : split_codepoints(text)) w.push_back(sub.letter(s));
    return w;
}

std::string word_to_string(const Substitution& sub, const Word& w) {
    std::string s;
    for (Letter c : w) s += sub.alphabet.at(c);
    return s;
}

Word apply(const Substitution& sub, const Word& w) {
    std::size_t total = 0;
    for (Letter c : w) {
        if (c >= sub.size()) throw std::out_of_range("letter out of range");
        total += sub.rules[c].size();
    }
    Word out;
    out.reserve(total);
    for (Letter c : w) out.insert(out.end(), sub.rules[c].begin(), sub.rules[c].end());
    return out;
}

LengthTable level_lengths(const Substitution& sub, int levels) {
    LengthTable L(static_cast<std::size_t>(levels) + 1, std::vector<std::uint64_t>(sub.size(), 1));
    for (int j = 1; j <= levels; ++j)
        for (std::size_t c = 0; c < sub.size(); ++c) {
            std::uint64_t s = 0;
            for (Letter d : sub.rules[c]) s = sat_add(s, L[j - 1][d]);
            L[j][c] = s;
        }
    return L;
}

Word iterate(const Substitution& sub, Letter a, int n, std::uint64_t cap) {
    if (a >= sub.size()) throw std::out_of_range("letter out of range");
    if (n < 0) throw std::invalid_argument("negative depth");
    auto L = level_lengths(sub, n);
    if (L[n][a] > cap) throw LengthCapError(L[n][a], cap);
    Word w{a};
    for (int i = 0; i < n; ++i) w = selfsim::apply(sub, w);
    return w;
}

std::vector<std::uint64_t> population_vector(const Word& w, std::size_t letters) {
    std::vector<std::uint64_t> counts(letters, 0);
    for (Letter c : w) counts.at(c) += 1;
    return counts;
}

CountMatrix substitution_matrix(const Substitution& sub) {
    CountMatrix m(sub.size());
    for (std::size_t b = 0; b < sub.size(); ++b)
        for (Letter a : sub.rules[b]) m(a, b) += 1;
    return m;
}

namespace {

void emit(const Substitution& sub, const LengthTable& L, Letter c, int level, std::uint64_t lo,
          std::uint64_t hi, Word& out) {
    if (level == 0) {
        out.push_back(c);
        return;
    }
    std::uint64_t pos = 0;
    for (Letter d : sub.rules[c]) {
        std::uint64_t end = pos + L[level - 1][d];
        if (end > lo && pos < hi)
            emit(sub, L, d, level - 1, std::max(lo, pos) - pos, std::min(hi, end) - pos, out);
        if (end >= hi) break;
        pos = end;
    }
}

}  // namespace

Word extract(const Substitution& sub, const LengthTable& lengths, Letter a, int level,
             std::uint64_t start, std::uint64_t len) {
    if (level < 0 || static_cast<std::size_t>(level) >= lengths.size())
        throw std::out_of_range("level outside length table");
    std::uint64_t total = lengths[level][a];
    if (total == kSaturated) throw LengthCapError(kSaturated, kSaturated);
    if (start > total || len > total - start) throw std::out_of_range("window outside supertile");
    Word out;
    out.reserve(len);
    if (len > 0) emit(sub, lengths, a, level, start, start + len, out);
    return out;
}

LanguageWitness in_language(const Substitution& sub, const Word& w, int max_depth,
                            std::uint64_t cap) {
    LanguageWitness res;
    if (w.empty()) {
        res.found = true;
        return res;
    }
    std::vector<Word> cur(sub.size());
    std::vector<bool> alive(sub.size(), true);
    for (std::size_t a = 0; a < sub.size(); ++a) cur[a] = Word{static_cast<Letter>(a)};
    for (int n = 0; n <= max_depth; ++n) {
        for (std::size_t a = 0; a < sub.size(); ++a) {
            if (!alive[a]) continue;
            auto it = std::search(cur[a].begin(), cur[a].end(),
                                  std::boyer_moore_horspool_searcher(w.begin(), w.end()));
            if (it != cur[a].end()) {
                res.found = true;
                res.letter = static_cast<Letter>(a);
                res.depth = n;
                res.position = static_cast<std::size_t>(it - cur[a].begin());
                return res;
            }
        }
        if (n == max_depth) break;
        for (std::size_t a = 0; a < sub.size(); ++a) {
            if (!alive[a]) continue;
            std::uint64_t next = 0;
            for (Letter c : cur[a]) next = sat_add(next, sub.rules[c].size());
            if (next > cap) {
                alive[a] = false;
                cur[a].clear();
                continue;
            }
            cur[a] = selfsim::apply(sub, cur[a]);
        }
    }
    return res;
}

std::vector<std::pair<Letter, Letter>> fixed_point_seeds(const Substitution& sub, int depth) {
    if (sub.dim != 1) throw std::invalid_argument("fixed points require dim 1");
    std::vector<std::pair<Letter, Letter>> seeds;
    for (std::size_t a = 0; a < sub.size(); ++a) {
        if (sub.rules[a].back() != a) continue;
        for (std::size_t b = 0; b < sub.size(); ++b) {
            if (sub.rules[b].front() != b) continue;
            Word ab{static_cast<Letter>(a), static_cast<Letter>(b)};
            if (in_language(sub, ab, depth).found)
                seeds.emplace_back(static_cast<Letter>(a), static_cast<Letter>(b));
        }
    }
    return seeds;
}

OrbitBlocks orbit_generate(const Substitution& sub, std::pair<Letter, Letter> seed, int n,
                           std::uint64_t cap) {
    auto [a, b] = seed;
    if (a >= sub.size() || b >= sub.size()) throw std::out_of_range("seed letter out of range");
    if (sub.rules[a].back() != a || sub.rules[b].front() != b)
        throw std::invalid_argument("seed is not a fixed-point seed");
    return {iterate(sub, a, n, cap), iterate(sub, b, n, cap)};
}

namespace {

struct ParentRef {
    Letter parent;
    std::uint64_t parent_index;
    std::size_t slot;
};

// Position idx of X_k = σ^{n-k}(top): its parent in X_{k+1} and its slot in σ(parent).
ParentRef locate(const Substitution& sub, const LengthTable& L, Letter top, int n, int k,
                 std::uint64_t idx) {
    Letter c = top;
    std::uint64_t before_k = 0, before_k1 = 0;
    for (int level = n; level > k + 1; --level) {
        for (Letter d : sub.rules[c]) {
            std::uint64_t sk = L[level - 1 - k][d];
            if (idx < before_k + sk) {
                c = d;
                break;
            }
            before_k += sk;
            before_k1 += L[level - 2 - k][d];
        }
    }
    return {c, before_k1, static_cast<std::size_t>(idx - before_k)};
}

AccordionForm decompose_at(const Substitution& sub, const LengthTable& L, Letter top, int n,
                           std::uint64_t start, std::uint64_t end) {
    AccordionForm f;
    std::uint64_t a = start, b = end;
    for (int j = 0;; ++j) {
        if (j == n) {
            f.u.push_back(Word{top});
            f.v.emplace_back();
            f.m = j;
            return f;
        }
        ParentRef la = locate(sub, L, top, n, j, a);
        ParentRef lb = locate(sub, L, top, n, j, b - 1);
        const Word& ia = sub.rules[la.parent];
        const Word& ib = sub.rules[lb.parent];
        std::uint64_t first = la.slot == 0 ? la.parent_index : la.parent_index + 1;
        std::uint64_t last = lb.slot + 1 == ib.size() ? lb.parent_index + 1 : lb.parent_index;
        if (first < last) {
            f.u.push_back(la.slot == 0 ? Word{} : Word(ia.begin() + la.slot, ia.end()));
            f.v.push_back(lb.slot + 1 == ib.size() ? Word{} : Word(ib.begin(), ib.begin() + lb.slot + 1));
            a = first;
            b = last;
            continue;
        }
        if (la.parent_index == lb.parent_index) {
            f.u.emplace_back(ia.begin() + la.slot, ia.begin() + lb.slot + 1);
            f.v.emplace_back();
        } else {
            f.u.emplace_back(ia.begin() + la.slot, ia.end());
            f.v.emplace_back(ib.begin(), ib.begin() + lb.slot + 1);
        }
        f.m = j;
        return f;
    }
}

bool better(const AccordionForm& x, const AccordionForm& y) {
    if (x.m != y.m) return x.m > y.m;
    return x.u[x.m].size() > y.u[y.m].size();
}

}  // namespace

AccordionForm accordion_decompose(const Substitution& sub, const Word& window,
                                  std::optional<SupertileHint> hint, int max_depth) {
    if (sub.dim != 1) throw std::invalid_argument("accordion decomposition requires dim 1");
    if (window.empty()) {
        AccordionForm f;
        f.u.emplace_back();
        f.v.emplace_back();
        return f;
    }
    if (hint) {
        auto L = level_lengths(sub, hint->level);
        if (extract(sub, L, hint->top, hint->level, hint->offset, window.size()) != window)
            throw DecompositionError("window does not match the supertile hint");
        return decompose_at(sub, L, hint->top, hint->level, hint->offset,
                            hint->offset + window.size());
    }
    auto wit = in_language(sub, window, max_depth);
    if (!wit.found)
        throw DecompositionError("window not found in σⁿ(a) for n <= " + std::to_string(max_depth));
    auto L = level_lengths(sub, wit.depth);
    Word host = iterate(sub, wit.letter, wit.depth);
    std::optional<AccordionForm> best;
    auto it = host.begin();
    std::boyer_moore_horspool_searcher searcher(window.begin(), window.end());
    while ((it = std::search(it, host.end(), searcher)) != host.end()) {
        std::uint64_t pos = static_cast<std::uint64_t>(it - host.begin());
        auto f = decompose_at(sub, L, wit.letter, wit.depth, pos, pos + window.size());
        if (!best || better(f, *best)) best = std::move(f);
        ++it;
    }
    return *best;
}

Word accordion_reconstruct(const Substitution& sub, const AccordionForm& form) {
    auto power_image = [&](Word w, int k) {
        for (int i = 0; i < k; ++i) w = selfsim::apply(sub, w);
        return w;
    };
    Word out;
    for (int j = 0; j <= form.m; ++j) {
        Word p = power_image(form.u[j], j);
        out.insert(out.end(), p.begin(), p.end());
    }
    for (int j = form.m; j >= 0; --j) {
        Word p = power_image(form.v[j], j);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

bool is_rule_subword(const Substitution& sub, const Word& piece) {
    if (piece.empty()) return true;
    for (const auto& img : sub.rules)
        if (std::search(img.begin(), img.end(), piece.begin(), piece.end()) != img.end())
            return true;
    return false;
}

}  // namespace selfsim
