#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "polmc/logic.hpp"
#include "polmc/model.hpp"

namespace polmc {

struct SearchStats {
    std::uint64_t configs_explored = 0;  // visited-set insertions, summed over searches
    std::size_t max_frontier = 0;        // peak BFS queue length
    std::size_t depth = 0;               // longest word considered
    /// Largest visited set of any single modality search, with the exponent of
    /// its theoretical bound 2^(|Nfa(pi)| + sum over worlds of |Nfa(Exp(s))|).
    std::uint64_t max_visited_single_search = 0;
    std::size_t bound_exponent_at_max = 0;
    bool search_bound_ok = true;
};

struct Verdict {
    bool truth = false;
    std::optional<Word> witness;  // for outermost diamonds, when one exists
    SearchStats stats;
};

/// Reference oracle: a literal recursive reading of the truth definition that
/// enumerates, for each modality, all words up to `bound` letters. Model
/// updates run on syntactic expression residues only (no automata), so this
/// path is independent of the machinery the other engines use.
///
/// Exact for star-free modalities whenever bound covers their sizes. For
/// starred modalities the enumeration may be truncated; internally a
/// lower/upper pair is tracked and nullopt is returned unless both agree.
std::optional<bool> eval_brute(const ExpectationModel& m, const std::string& world,
                               const Formula& f, std::size_t bound);

/// Exact checker for the full language. Observation modalities run a BFS over
/// (modality state set, updated model) configurations with a visited set;
/// subformula results are memoized on (model key, world, subformula).
/// Diamond witnesses are shortest, ties broken by alphabet order.
Verdict mc_full(const ExpectationModel& m, const std::string& world, const Formula& f);

/// Bottom-up world labeling for the Word fragment (each modality performs one
/// model update). FragmentMismatch unless classify(f).word.
Verdict mc_word(const ExpectationModel& m, const std::string& world, const Formula& f);

/// Deterministic letter-by-letter search for the Star-Free-Existential
/// fragment (after NNF): diamonds explore words of length at most size(pi),
/// pruning branches with an empty modality residue or an empty updated model.
/// FragmentMismatch unless the NNF of f classifies star-free-existential.
Verdict mc_sfe(const ExpectationModel& m, const std::string& world, const Formula& f);

/// Set of worlds (by name, in model order) where f holds; engine chosen like
/// the CLI's auto mode.
std::vector<std::string> satisfying_worlds(const ExpectationModel& m, const Formula& f);

/// Asserts that <pi1><pi2>psi and <pi1·pi2>psi agree under mc_full and
/// returns the shared value; throws std::logic_error on disagreement.
bool diamond_fusion_check(const ExpectationModel& m, const std::string& world, const ObsExpr& pi1,
                          const ObsExpr& pi2, const Formula& psi);

/// Re-derives a diamond witness: w must be accepted by pi, the point must
/// survive it and the continuation must hold in the updated model.
bool recheck_witness(const ExpectationModel& m, const std::string& world, const ObsExpr& pi,
                     const Formula& continuation, const Word& w);

}  // namespace polmc
