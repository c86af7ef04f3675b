#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "polmc/obsexpr.hpp"

namespace polmc {

/// POL formula AST. Or/Imp/KHat/Dia are first class; they obey the usual
/// dualities under evaluation. Immutable, cheap to copy.
class Formula {
public:
    enum class Kind { Top, Bot, Prop, Not, And, Or, Imp, K, KHat, Box, Dia };

    static Formula top();
    static Formula bot();
    static Formula prop(std::string name);
    static Formula negation(Formula f);
    static Formula conj(Formula l, Formula r);
    static Formula disj(Formula l, Formula r);
    static Formula implies(Formula l, Formula r);
    static Formula knows(std::string agent, Formula f);      // K_i
    static Formula considers(std::string agent, Formula f);  // K-hat_i
    static Formula box(ObsExpr re, Formula f);
    static Formula dia(ObsExpr re, Formula f);

    Kind kind() const;
    const std::string& prop_name() const;
    const std::string& agent() const;
    const ObsExpr& regex() const;    // Box/Dia
    const Formula& child() const;    // Not/K/KHat/Box/Dia
    const Formula& left() const;     // And/Or/Imp
    const Formula& right() const;

    /// Stable node identity (used for memo/encoding keys).
    const void* id() const;

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

bool structurally_equal(const Formula& a, const Formula& b);

/// Fragment classification flags. Inclusions hold by construction:
/// word implies star_free, star_free_existential = star_free and existential.
///
/// `word`/`star_free` look only at the modality regexes (negation and both
/// knowledge operators are definable in those grammars, so every logical
/// connective is admitted). `existential` demands the surface shape: no box,
/// no implication, negation on atoms only; knowledge modalities may be K or
/// K-hat but the observation modalities must all be diamonds.
/// `existential_after_nnf` reports whether the NNF of the formula qualifies.
struct Fragment {
    bool word = false;
    bool star_free = false;
    bool existential = false;
    bool star_free_existential = false;
    bool full = true;
    bool existential_after_nnf = false;
};

Fragment classify(const Formula& f);

/// Negation normal form: negations pushed to atoms via the K/K-hat and
/// box/diamond dualities, implications rewritten. Semantically equivalent.
Formula to_nnf(const Formula& f);

/// Parses the formula grammar: atoms `true|false|ident`; prefix `~`,
/// `K_agent`, `Kh_agent`, `[regex]`, `<regex>`; infix `&` over `|` over `->`
/// (right associative); parentheses. Regexes use the observation-expression
/// grammar; their letters are validated against `alphabet`.
Formula parse_formula(std::string_view text, const Alphabet& alphabet);

/// Canonical printer; parse_formula(print_formula(f)) is structurally equal
/// to f.
std::string print_formula(const Formula& f);

}  // namespace polmc
