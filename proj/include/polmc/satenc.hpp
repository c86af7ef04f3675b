#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polmc/engines.hpp"
#include "polmc/logic.hpp"
#include "polmc/model.hpp"

namespace polmc {

/// Tagged identity of a CNF variable.
struct VarKey {
    enum class Tag { Letter, Truth, AutState, Surv, Aux };
    Tag tag;
    std::size_t t = 0;      // Letter: 1..k; AutState: 0..k
    std::size_t index = 0;  // Letter: symbol; AutState: automaton id; Truth/Surv: world
    std::size_t sub = 0;    // AutState: state; Truth: subformula id
};

using Clause = std::vector<int>;

struct Assignment {
    std::vector<bool> values;  // 1-based; values[0] unused
    bool value(int var) const { return values[static_cast<std::size_t>(var)]; }
};

/// Propositional encoding of one bounded query <pi>phi at a fixed word
/// length k. Automaton id 0 is the minimal DFA of pi; id 1+i is the minimal
/// prefix-language DFA of world i's expectation.
struct CnfInstance {
    int var_count = 0;
    std::vector<Clause> clauses;
    std::vector<VarKey> varmap;  // varmap[v-1] describes variable v

    AlphabetRef alphabet;
    std::size_t word_length = 0;
    std::vector<std::vector<int>> letter_vars;  // [t-1][symbol]
};

/// Builds the encoding: guessed-word uniqueness, a run of pi's DFA to a final
/// state, per-world prefix-automaton runs defining surv(v), survival of the
/// evaluation point, and truth rules for the epistemic formula (Tseitin-style
/// biconditionals, K and K-hat guarded by surv).
///
/// Preconditions: pi star-free; phi built from true/false, literals, ~, &, |,
/// K and Kh only; k at most the longest word of L(pi).
CnfInstance encode(const ExpectationModel& m, const std::string& world, const ObsExpr& pi,
                   const Formula& phi, std::size_t k);

/// Embedded DPLL with unit propagation; branching ascends variable indices,
/// true first, so runs are deterministic.
std::optional<Assignment> solve(const CnfInstance& c);

/// Standard DIMACS text: "p cnf <vars> <clauses>" then zero-terminated
/// clauses, one per line, trailing newline.
std::string emit_dimacs(const CnfInstance& c);

/// The guessed word read off the letter variables.
Word decode_plan(const Assignment& a, const CnfInstance& c);

using SolveFn = std::function<std::optional<Assignment>(const CnfInstance&)>;

/// Runs `command <dimacs-file>` and parses SAT/UNSAT plus v-lines.
std::optional<Assignment> solve_with_external(const std::string& command, const CnfInstance& c);

/// Full checking path: normalizes f, fuses a chain of diamonds into one
/// <pi1·…·pin>phi_ep query, and solves one encoding per word length
/// k = 0..maxlen(pi). FragmentMismatch when f cannot be brought into that
/// shape or some modality is starred.
Verdict check_via_sat(const ExpectationModel& m, const std::string& world, const Formula& f);
Verdict check_via_sat(const ExpectationModel& m, const std::string& world, const Formula& f,
                      const SolveFn& solver);

/// True when check_via_sat accepts f (after NNF it is a chain of star-free
/// diamonds over an epistemic core).
bool sat_encodable(const Formula& f);

}  // namespace polmc
