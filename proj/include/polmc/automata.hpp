#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "polmc/obsexpr.hpp"

namespace polmc {

/// Nondeterministic finite automaton with epsilon transitions, immutable
/// after construction. `productive` (the backward-reachable set from the
/// accepting states) is computed once so residual emptiness is a cheap
/// intersection test.
class Nfa {
public:
    using State = std::size_t;

    Nfa(AlphabetRef alphabet, std::size_t num_states,
        std::vector<std::vector<std::vector<State>>> trans,  // [state][symbol] -> targets
        std::vector<std::vector<State>> eps,                 // [state] -> targets
        std::vector<State> initial, std::vector<bool> accepting);

    std::size_t num_states() const { return num_states_; }
    const Alphabet& alphabet() const { return *alphabet_; }
    const AlphabetRef& alphabet_ref() const { return alphabet_; }

    const std::vector<State>& targets(State s, std::size_t symbol) const {
        return trans_[s][symbol];
    }
    const std::vector<State>& eps_targets(State s) const { return eps_[s]; }
    const std::vector<State>& initial() const { return initial_; }
    bool is_accepting(State s) const { return accepting_[s]; }
    bool is_productive(State s) const { return productive_[s]; }

    /// Epsilon closure of a state set; result is sorted and duplicate-free.
    std::vector<State> epsilon_closure(const std::vector<State>& states) const;

    /// Line-oriented debug dump (state count, initial, accepting, transitions).
    std::string dump() const;

private:
    void compute_productive();

    AlphabetRef alphabet_;
    std::size_t num_states_;
    std::vector<std::vector<std::vector<State>>> trans_;
    std::vector<std::vector<State>> eps_;
    std::vector<State> initial_;
    std::vector<bool> accepting_;
    std::vector<bool> productive_;
};

using NfaRef = std::shared_ptr<const Nfa>;

/// Thompson-style construction: L(result) = L(e). Concatenation shares the
/// junction state and union shares both endpoints, so the automaton stays
/// linear in the expression size.
NfaRef thompson(const ObsExpr& e, AlphabetRef alphabet);

/// A residual language: a base NFA plus the epsilon-closed set of states
/// reached after reading some word. Small, copyable, pure.
class ResidualLang {
public:
    static ResidualLang initial(NfaRef base);

    /// Reads one letter: move + epsilon closure.
    ResidualLang step(const std::string& symbol) const;
    ResidualLang step_index(std::size_t symbol) const;

    /// True iff the residual language is empty (no productive state left).
    bool empty_language() const;

    /// True iff the empty word is in the residual language.
    bool accepts_epsilon() const;

    const NfaRef& base() const { return base_; }
    const std::vector<Nfa::State>& current() const { return current_; }
    const Alphabet& alphabet() const { return base_->alphabet(); }

    /// Deterministic serialization of the current state set, for config keys.
    void append_key(std::string& out) const;

private:
    ResidualLang(NfaRef base, std::vector<Nfa::State> current)
        : base_(std::move(base)), current_(std::move(current)) {}

    NfaRef base_;
    std::vector<Nfa::State> current_;  // sorted, epsilon-closed
};

/// Free-function spellings for the residual operations.
inline ResidualLang step(const ResidualLang& r, const std::string& symbol) { return r.step(symbol); }
inline bool is_empty(const ResidualLang& r) { return r.empty_language(); }
inline bool accepts_eps(const ResidualLang& r) { return r.accepts_epsilon(); }

/// Word acceptance by simulation from the initial states.
bool accepts(const Nfa& n, const Word& w);

/// Deterministic finite automaton with a total transition function.
struct Dfa {
    AlphabetRef alphabet;
    std::size_t num_states = 0;
    std::size_t initial = 0;
    std::vector<std::vector<std::size_t>> trans;  // [state][symbol]
    std::vector<bool> accepting;

    bool accepts(const Word& w) const;
    std::string dump() const;

    bool operator==(const Dfa& other) const;
};

/// Subset construction from the residual's current set (or the NFA's initial
/// set). The result is total; a dead sink appears only if reachable.
Dfa determinize(const Nfa& n);
Dfa determinize(const ResidualLang& r);

/// Subset construction that accepts the *prefix closure*: a subset is
/// accepting iff it contains a productive state. Used by the SAT encoding's
/// survival automata.
Dfa prefix_language_dfa(const ResidualLang& r);

/// Canonical minimal DFA: partition refinement followed by BFS renumbering
/// from the initial state (symbols in alphabet order), so two minimized DFAs
/// are language-equal iff structurally equal.
Dfa minimize(const Dfa& d);

bool lang_equal(const Dfa& a, const Dfa& b);
bool lang_equal(const ResidualLang& a, const ResidualLang& b);
bool lang_equal(const ResidualLang& a, const Dfa& b);
bool lang_equal(const Dfa& a, const ResidualLang& b);
bool lang_equal(const ObsExpr& a, const ObsExpr& b, const AlphabetRef& alphabet);

}  // namespace polmc
