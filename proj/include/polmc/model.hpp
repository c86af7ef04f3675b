#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polmc/automata.hpp"
#include "polmc/obsexpr.hpp"

namespace polmc {

/// One world of an epistemic expectation model. The expectation is carried
/// twice: as a residual over the world's immutable base NFA (used by updates,
/// survival and config keys) and as a syntactic expression residue (used by
/// the expression-level checkers). The two always denote the same language.
struct WorldData {
    std::string name;
    std::vector<std::string> props;  // sorted, unique
    ObsExpr exp_expr;
    ResidualLang exp;
    std::size_t orig_index;  // position in the model this world was loaded into

    bool has_prop(const std::string& p) const;
};

/// Epistemic expectation model: worlds, one equivalence relation per agent
/// (stored as a partition, so the equivalence laws hold by construction),
/// a valuation and a per-world expectation with nonempty language.
///
/// Models are immutable values; update produces new values that share the
/// base NFAs, so an updated model costs only new state sets.
class ExpectationModel {
public:
    /// Relations are given as arbitrary pair lists per agent and closed to
    /// equivalences (reflexive-symmetric-transitive); the paper's figures
    /// omit reflexive arrows, so the loader closes rather than rejects.
    ExpectationModel(AlphabetRef alphabet, std::vector<std::string> agents,
                     std::vector<std::string> props,
                     std::vector<std::pair<std::string, ObsExpr>> worlds_with_exp,
                     std::vector<std::vector<std::string>> world_props,
                     std::vector<std::vector<std::pair<std::string, std::string>>> relation_pairs);

    const Alphabet& alphabet() const { return *alphabet_; }
    const AlphabetRef& alphabet_ref() const { return alphabet_; }
    const std::vector<std::string>& agents() const { return agents_; }
    const std::vector<std::string>& props() const { return props_; }

    std::size_t num_worlds() const { return worlds_.size(); }
    const WorldData& world(std::size_t pos) const { return worlds_[pos]; }
    const std::vector<WorldData>& worlds() const { return worlds_; }

    std::optional<std::size_t> world_pos(const std::string& name) const;
    std::size_t require_world(const std::string& name) const;
    std::size_t require_agent(const std::string& name) const;
    bool has_declared_prop(const std::string& name) const;

    /// Positions of the worlds ~agent-equivalent to `pos` (includes pos).
    std::vector<std::size_t> neighbours(std::size_t agent, std::size_t pos) const;
    bool related(std::size_t agent, std::size_t a, std::size_t b) const {
        return class_of_[agent][a] == class_of_[agent][b];
    }

    /// Number of worlds of the model this one was originally derived from.
    std::size_t orig_world_count() const { return orig_world_count_; }

    /// Update by a single observed letter: worlds whose expectation residual
    /// becomes empty are deleted; relations and valuation restrict; surviving
    /// expectations step. The result may have zero worlds.
    ExpectationModel update_letter(const std::string& a) const;

    /// Update by a word, computed in one pass (survivors are decided by the
    /// full-word residual; the restriction happens once).
    ExpectationModel update(const Word& w) const;

    /// True iff world `name` survives the observation of w.
    bool survives(const std::string& name, const Word& w) const;

    /// Deterministic key: over the original world list, an alive flag plus the
    /// epsilon-closed state set of each surviving expectation. Equal keys
    /// imply language-equal expectations world-by-world and identical
    /// surviving-world sets.
    std::string config_key() const;

    /// Invariant violations (empty expectations, undeclared props, duplicate
    /// names); empty when the model is well-formed.
    std::vector<std::string> validate() const;

    bool structurally_equal_to(const ExpectationModel& other) const;

private:
    ExpectationModel() = default;
    ExpectationModel restrict_to(std::vector<WorldData> survivors,
                                 const std::vector<std::size_t>& positions) const;

    AlphabetRef alphabet_;
    std::vector<std::string> agents_;
    std::vector<std::string> props_;
    std::vector<WorldData> worlds_;
    std::vector<std::vector<std::size_t>> class_of_;  // [agent][world pos] -> class id
    std::size_t orig_world_count_ = 0;
};

struct PointedModel {
    ExpectationModel model;
    std::string point;
};

/// Free-function spellings matching the operation names.
inline ExpectationModel update(const ExpectationModel& m, const Word& w) { return m.update(w); }
inline ExpectationModel update_letter(const ExpectationModel& m, const std::string& a) {
    return m.update_letter(a);
}
inline bool survives(const ExpectationModel& m, const std::string& s, const Word& w) {
    return m.survives(s, w);
}
inline std::string config_key(const ExpectationModel& m) { return m.config_key(); }
inline std::vector<std::string> validate(const ExpectationModel& m) { return m.validate(); }

/// JSON model file support (format documented in the README):
/// {"alphabet":[...], "agents":[...], "props":[...],
///  "worlds":[{"name":"s","props":["f"],"exp":"(g*.a.r*)*"}, ...],
///  "relations":{"T":[["s","t"]], ...}}
ExpectationModel load_model_json(const std::string& text);
ExpectationModel load_model_file(const std::string& path);
std::string model_to_json(const ExpectationModel& m);

}  // namespace polmc
