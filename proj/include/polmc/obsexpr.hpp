#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polmc/errors.hpp"

namespace polmc {

/// Finite, ordered action alphabet. The declaration order is the canonical
/// iteration order everywhere (automata transitions, witness tie-breaking,
/// search expansion).
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const { return symbols_.size(); }
    const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
    const std::vector<std::string>& symbols() const { return symbols_; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    bool contains(std::string_view name) const { return index_of(name).has_value(); }

    /// Index lookup that throws UnknownSymbolError instead of returning nullopt.
    std::size_t require(std::string_view name) const;

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, std::size_t> index_;
};

using AlphabetRef = std::shared_ptr<const Alphabet>;

/// A word is a finite sequence of action names.
using Word = std::vector<std::string>;

std::string word_to_string(const Word& w);

/// Observation expression: a regular expression over an action alphabet.
/// Immutable value type; copying is cheap (shared structure).
///
/// Empty denotes the empty language. It doubles as the residue symbol for
/// "no continuation": the two are never distinguished by the language
/// semantics, so one constructor houses both.
class ObsExpr {
public:
    enum class Kind { Empty, Eps, Letter, Concat, Union, Star };

    static ObsExpr empty();
    static ObsExpr eps();
    static ObsExpr letter(std::string symbol);
    static ObsExpr concat(ObsExpr left, ObsExpr right);
    static ObsExpr alt(ObsExpr left, ObsExpr right);  // union
    static ObsExpr star(ObsExpr inner);

    Kind kind() const;
    const std::string& symbol() const;  // Letter
    const ObsExpr& left() const;        // Concat/Union
    const ObsExpr& right() const;       // Concat/Union
    const ObsExpr& inner() const;       // Star

    /// Stable identity of the underlying node (shared subtrees compare equal).
    const void* id() const;

private:
    struct Node;
    explicit ObsExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

/// Structural equality (not language equality).
bool structurally_equal(const ObsExpr& a, const ObsExpr& b);

/// Language-preserving smart constructors: empty·x → empty, eps·x → x,
/// empty+x → x, (empty)* → eps, (eps)* → eps. Residuation and the instance
/// generators build through these; the plain constructors never rewrite.
ObsExpr simplified_concat(ObsExpr l, ObsExpr r);
ObsExpr simplified_union(ObsExpr l, ObsExpr r);
ObsExpr simplified_star(ObsExpr inner);

/// Size of an observation expression: 0 for eps/empty, 1 per letter,
/// +1 per union and per star; concatenation adds nothing, matching the
/// worked value of 6 for (g*ar*)*.
std::size_t size(const ObsExpr& e);

/// True iff the empty word belongs to L(e). This is the output function o:
/// o(e) = eps when nullable, empty otherwise.
bool nullable(const ObsExpr& e);

/// True iff L(e) is empty, decided structurally.
bool language_empty(const ObsExpr& e);

/// Syntactic residue e\a (Brzozowski derivative with the output function o).
/// Applies local, language-preserving simplifications (empty·x → empty,
/// empty+x → x, eps·x → x) to keep residues from blowing up syntactically.
ObsExpr residue_letter(const ObsExpr& e, const std::string& a, const Alphabet& alphabet);

/// Left fold of residue_letter: L(result) = { v | wv in L(e) }.
ObsExpr residue_word(const ObsExpr& e, const Word& w, const Alphabet& alphabet);

/// Fragment predicates on the expression shape.
bool is_star_free(const ObsExpr& e);  // no Star node anywhere
bool is_word(const ObsExpr& e);       // only Letter/Eps/Concat nodes

/// For a word expression, the single word it denotes.
/// Precondition: is_word(e).
Word word_of(const ObsExpr& e);

/// Maximum word length of a star-free expression, or nullopt when L(e) = {}.
/// Precondition: is_star_free(e).
std::optional<std::size_t> max_word_length(const ObsExpr& e);

/// Parses the textual regex syntax: union infix `+`, concatenation infix `.`
/// or juxtaposition, postfix `*`, `^+`, `^k`; `eps` and `empty` constants;
/// parentheses. Precedence: postfix > concatenation > union. `e^k` and `e^+`
/// are parser-level sugar and desugar before the AST.
/// Every letter must belong to `alphabet`.
ObsExpr parse_obs(std::string_view text, const Alphabet& alphabet);

/// Canonical printer; parse_obs(print_obs(e)) is structurally equal to e.
std::string print_obs(const ObsExpr& e);

}  // namespace polmc
