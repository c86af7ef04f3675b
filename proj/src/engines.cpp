#include "polmc/engines.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace polmc {

namespace {

void validate_refs(const ExpectationModel& m, const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Prop:
            if (!m.has_declared_prop(f.prop_name()))
                throw UnknownPropError(f.prop_name());
            return;
        case Formula::Kind::K:
        case Formula::Kind::KHat:
            m.require_agent(f.agent());
            validate_refs(m, f.child());
            return;
        case Formula::Kind::Not:
        case Formula::Kind::Box:
        case Formula::Kind::Dia:
            validate_refs(m, f.child());
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Imp:
            validate_refs(m, f.left());
            validate_refs(m, f.right());
            return;
        default:
            return;
    }
}

std::optional<std::size_t> pos_by_orig(const ExpectationModel& m, std::size_t orig) {
    for (std::size_t i = 0; i < m.num_worlds(); ++i)
        if (m.world(i).orig_index == orig)
            return i;
    return std::nullopt;
}

std::string ptr_key(const void* p) { return std::to_string(reinterpret_cast<std::uintptr_t>(p)); }

// ---------------------------------------------------------------------------
// mc_full

class FullChecker {
public:
    explicit FullChecker(AlphabetRef alphabet) : alphabet_(std::move(alphabet)) {}

    SearchStats stats;

    bool eval(const ExpectationModel& m, std::size_t pos, const Formula& f, Word* witness_out) {
        std::string key = m.config_key();
        key += '#';
        key += std::to_string(m.world(pos).orig_index);
        key += '#';
        key += ptr_key(f.id());
        if (!witness_out) {
            auto it = memo_.find(key);
            if (it != memo_.end())
                return it->second;
        }
        bool value = eval_uncached(m, pos, f, witness_out);
        memo_.emplace(std::move(key), value);
        return value;
    }

private:
    bool eval_uncached(const ExpectationModel& m, std::size_t pos, const Formula& f,
                       Word* witness_out) {
        switch (f.kind()) {
            case Formula::Kind::Top:
                return true;
            case Formula::Kind::Bot:
                return false;
            case Formula::Kind::Prop:
                return m.world(pos).has_prop(f.prop_name());
            case Formula::Kind::Not:
                return !eval(m, pos, f.child(), nullptr);
            case Formula::Kind::And:
                return eval(m, pos, f.left(), nullptr) && eval(m, pos, f.right(), nullptr);
            case Formula::Kind::Or:
                return eval(m, pos, f.left(), nullptr) || eval(m, pos, f.right(), nullptr);
            case Formula::Kind::Imp:
                return !eval(m, pos, f.left(), nullptr) || eval(m, pos, f.right(), nullptr);
            case Formula::Kind::K: {
                std::size_t ag = m.require_agent(f.agent());
                for (std::size_t t : m.neighbours(ag, pos))
                    if (!eval(m, t, f.child(), nullptr))
                        return false;
                return true;
            }
            case Formula::Kind::KHat: {
                std::size_t ag = m.require_agent(f.agent());
                for (std::size_t t : m.neighbours(ag, pos))
                    if (eval(m, t, f.child(), nullptr))
                        return true;
                return false;
            }
            case Formula::Kind::Box:
                return eval_modality(m, pos, f, /*diamond=*/false, nullptr);
            case Formula::Kind::Dia:
                return eval_modality(m, pos, f, /*diamond=*/true, witness_out);
        }
        return false;
    }

    // BFS over (modality state set, updated model) configurations. Queue order
    // is (word length, alphabet order), so the first satisfying candidate of a
    // diamond yields a shortest witness with deterministic tie-breaking.
    bool eval_modality(const ExpectationModel& m, std::size_t pos, const Formula& f, bool diamond,
                       Word* witness_out) {
        const NfaRef& pi_nfa = nfa_for(f.regex());
        const std::size_t point_orig = m.world(pos).orig_index;

        std::size_t bound_exp = pi_nfa->num_states();
        for (const auto& w : m.worlds())
            bound_exp += w.exp.base()->num_states();

        struct Item {
            ResidualLang pi;
            ExpectationModel model;
            Word word;
        };
        std::deque<Item> queue;
        std::unordered_set<std::string> visited;
        std::uint64_t visited_count = 0;

        auto config_of = [](const ResidualLang& pi, const ExpectationModel& model) {
            std::string k;
            pi.append_key(k);
            k += '|';
            k += model.config_key();
            return k;
        };

        ResidualLang pi0 = ResidualLang::initial(pi_nfa);
        if (!pi0.empty_language()) {
            visited.insert(config_of(pi0, m));
            ++visited_count;
            queue.push_back(Item{std::move(pi0), m, {}});
        }

        bool result = !diamond;  // diamond: false until a witness; box: true until a counterexample
        while (!queue.empty()) {
            stats.max_frontier = std::max(stats.max_frontier, queue.size());
            Item item = std::move(queue.front());
            queue.pop_front();
            stats.depth = std::max(stats.depth, item.word.size());

            std::size_t cur_pos = *pos_by_orig(item.model, point_orig);
            if (item.pi.accepts_epsilon()) {
                bool sub = eval(item.model, cur_pos, f.child(), nullptr);
                if (diamond && sub) {
                    if (witness_out)
                        *witness_out = item.word;
                    result = true;
                    break;
                }
                if (!diamond && !sub) {
                    result = false;
                    break;
                }
            }

            for (std::size_t a = 0; a < m.alphabet().size(); ++a) {
                ResidualLang pi_next = item.pi.step_index(a);
                if (pi_next.empty_language())
                    continue;  // no accepted extension this way
                ExpectationModel next = item.model.update_letter(m.alphabet().symbol(a));
                if (!pos_by_orig(next, point_orig))
                    continue;  // the point died: extensions leave prefixes(Exp(point))
                std::string key = config_of(pi_next, next);
                if (!visited.insert(std::move(key)).second)
                    continue;
                ++visited_count;
                Word w = item.word;
                w.push_back(m.alphabet().symbol(a));
                queue.push_back(Item{std::move(pi_next), std::move(next), std::move(w)});
            }
        }

        stats.configs_explored += visited_count;
        if (visited_count > stats.max_visited_single_search) {
            stats.max_visited_single_search = visited_count;
            stats.bound_exponent_at_max = bound_exp;
        }
        if (bound_exp < 64 && visited_count > (std::uint64_t{1} << bound_exp))
            stats.search_bound_ok = false;
        return result;
    }

    const NfaRef& nfa_for(const ObsExpr& re) {
        auto it = nfa_cache_.find(re.id());
        if (it == nfa_cache_.end())
            it = nfa_cache_.emplace(re.id(), thompson(re, alphabet_)).first;
        return it->second;
    }

    AlphabetRef alphabet_;
    std::unordered_map<std::string, bool> memo_;
    std::unordered_map<const void*, NfaRef> nfa_cache_;
};

}  // namespace

Verdict mc_full(const ExpectationModel& m, const std::string& world, const Formula& f) {
    std::size_t pos = m.require_world(world);
    validate_refs(m, f);
    FullChecker checker(m.alphabet_ref());
    Verdict v;
    Word witness;
    bool want_witness = f.kind() == Formula::Kind::Dia;
    v.truth = checker.eval(m, pos, f, want_witness ? &witness : nullptr);
    if (want_witness && v.truth)
        v.witness = std::move(witness);
    v.stats = checker.stats;
    return v;
}

// ---------------------------------------------------------------------------
// mc_word

namespace {

using OrigSet = std::set<std::size_t>;

OrigSet all_origs(const ExpectationModel& m) {
    OrigSet out;
    for (const auto& w : m.worlds())
        out.insert(w.orig_index);
    return out;
}

OrigSet set_minus(const OrigSet& a, const OrigSet& b) {
    OrigSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
    return out;
}

OrigSet set_and(const OrigSet& a, const OrigSet& b) {
    OrigSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
    return out;
}

OrigSet set_or(const OrigSet& a, const OrigSet& b) {
    OrigSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

struct WordLabeler {
    SearchStats stats;

    OrigSet worlds_p(const ExpectationModel& m, const Formula& f) {
        switch (f.kind()) {
            case Formula::Kind::Top:
                return all_origs(m);
            case Formula::Kind::Bot:
                return {};
            case Formula::Kind::Prop: {
                OrigSet out;
                for (const auto& w : m.worlds())
                    if (w.has_prop(f.prop_name()))
                        out.insert(w.orig_index);
                return out;
            }
            case Formula::Kind::Not:
                return set_minus(all_origs(m), worlds_p(m, f.child()));
            case Formula::Kind::And:
                return set_and(worlds_p(m, f.left()), worlds_p(m, f.right()));
            case Formula::Kind::Or:
                return set_or(worlds_p(m, f.left()), worlds_p(m, f.right()));
            case Formula::Kind::Imp:
                return set_or(set_minus(all_origs(m), worlds_p(m, f.left())),
                              worlds_p(m, f.right()));
            case Formula::Kind::K: {
                std::size_t ag = m.require_agent(f.agent());
                OrigSet sat = worlds_p(m, f.child());
                OrigSet out;
                for (std::size_t i = 0; i < m.num_worlds(); ++i) {
                    bool ok = true;
                    for (std::size_t t : m.neighbours(ag, i))
                        if (!sat.count(m.world(t).orig_index)) {
                            ok = false;
                            break;
                        }
                    if (ok)
                        out.insert(m.world(i).orig_index);
                }
                return out;
            }
            case Formula::Kind::KHat: {
                std::size_t ag = m.require_agent(f.agent());
                OrigSet sat = worlds_p(m, f.child());
                OrigSet out;
                for (std::size_t i = 0; i < m.num_worlds(); ++i) {
                    for (std::size_t t : m.neighbours(ag, i)) {
                        if (sat.count(m.world(t).orig_index)) {
                            out.insert(m.world(i).orig_index);
                            break;
                        }
                    }
                }
                return out;
            }
            case Formula::Kind::Box:
            case Formula::Kind::Dia: {
                Word w = word_of(f.regex());
                stats.depth = std::max(stats.depth, w.size());
                ExpectationModel next = m.update(w);
                ++stats.configs_explored;
                OrigSet survivors = all_origs(next);
                OrigSet sat = set_and(worlds_p(next, f.child()), survivors);
                if (f.kind() == Formula::Kind::Dia)
                    return sat;
                return set_or(set_minus(all_origs(m), survivors), sat);
            }
        }
        return {};
    }
};

}  // namespace

Verdict mc_word(const ExpectationModel& m, const std::string& world, const Formula& f) {
    std::size_t pos = m.require_world(world);
    if (!classify(f).word)
        throw FragmentMismatchError("mc_word requires every modality regex to be a word");
    validate_refs(m, f);
    WordLabeler labeler;
    OrigSet sat = labeler.worlds_p(m, f);
    Verdict v;
    v.truth = sat.count(m.world(pos).orig_index) > 0;
    if (v.truth && f.kind() == Formula::Kind::Dia)
        v.witness = word_of(f.regex());
    v.stats = labeler.stats;
    return v;
}

// ---------------------------------------------------------------------------
// mc_sfe

namespace {

struct SfeChecker {
    const ExpectationModel& root;
    SearchStats stats;
    std::unordered_map<std::string, OrigSet> memo;

    explicit SfeChecker(const ExpectationModel& m) : root(m) {}

    OrigSet worlds_np(const ExpectationModel& m, const Formula& f) {
        std::string key = m.config_key();
        key += '#';
        key += ptr_key(f.id());
        auto it = memo.find(key);
        if (it != memo.end())
            return it->second;
        OrigSet out = compute(m, f);
        memo.emplace(std::move(key), out);
        return out;
    }

    OrigSet compute(const ExpectationModel& m, const Formula& f) {
        switch (f.kind()) {
            case Formula::Kind::Top:
                return all_origs(m);
            case Formula::Kind::Bot:
                return {};
            case Formula::Kind::Prop: {
                OrigSet out;
                for (const auto& w : m.worlds())
                    if (w.has_prop(f.prop_name()))
                        out.insert(w.orig_index);
                return out;
            }
            case Formula::Kind::Not:  // NNF: negation is on an atom
                return set_minus(all_origs(m), worlds_np(m, f.child()));
            case Formula::Kind::And:
                return set_and(worlds_np(m, f.left()), worlds_np(m, f.right()));
            case Formula::Kind::Or:
                return set_or(worlds_np(m, f.left()), worlds_np(m, f.right()));
            case Formula::Kind::K: {
                std::size_t ag = m.require_agent(f.agent());
                OrigSet sat = worlds_np(m, f.child());
                OrigSet out;
                for (std::size_t i = 0; i < m.num_worlds(); ++i) {
                    bool ok = true;
                    for (std::size_t t : m.neighbours(ag, i))
                        if (!sat.count(m.world(t).orig_index)) {
                            ok = false;
                            break;
                        }
                    if (ok)
                        out.insert(m.world(i).orig_index);
                }
                return out;
            }
            case Formula::Kind::KHat: {
                std::size_t ag = m.require_agent(f.agent());
                OrigSet sat = worlds_np(m, f.child());
                OrigSet out;
                for (std::size_t i = 0; i < m.num_worlds(); ++i)
                    for (std::size_t t : m.neighbours(ag, i))
                        if (sat.count(m.world(t).orig_index)) {
                            out.insert(m.world(i).orig_index);
                            break;
                        }
                return out;
            }
            case Formula::Kind::Dia: {
                OrigSet result;
                explore(f.regex(), m, 0, size(f.regex()), f.child(), result);
                return result;
            }
            default:
                throw FragmentMismatchError("unexpected connective in star-free-existential formula");
        }
    }

    // Letter-by-letter deterministic search: at each node, worlds that satisfy
    // the continuation in the current update are collected when the remaining
    // modality expression is nullable (the word read so far is in L(pi)).
    void explore(const ObsExpr& pi, const ExpectationModel& m, std::size_t depth,
                 std::size_t max_depth, const Formula& continuation, OrigSet& result) {
        ++stats.configs_explored;
        stats.depth = std::max(stats.depth, depth);
        if (nullable(pi)) {
            OrigSet sat = set_and(worlds_np(m, continuation), all_origs(m));
            result.insert(sat.begin(), sat.end());
        }
        if (depth >= max_depth)
            return;
        for (const auto& a : m.alphabet().symbols()) {
            ObsExpr next_pi = residue_letter(pi, a, m.alphabet());
            if (language_empty(next_pi))
                continue;
            ExpectationModel next = m.update_letter(a);
            if (next.num_worlds() == 0)
                continue;
            explore(next_pi, next, depth + 1, max_depth, continuation, result);
        }
    }

    // Point-directed witness search; explores in the same order, preferring to
    // stop as soon as the word is accepted.
    bool find_witness(const ObsExpr& pi, const ExpectationModel& m, std::size_t point_orig,
                      std::size_t depth, std::size_t max_depth, const Formula& continuation,
                      Word& word) {
        if (nullable(pi)) {
            auto pos = pos_by_orig(m, point_orig);
            if (pos && worlds_np(m, continuation).count(point_orig))
                return true;
        }
        if (depth >= max_depth)
            return false;
        for (const auto& a : m.alphabet().symbols()) {
            ObsExpr next_pi = residue_letter(pi, a, m.alphabet());
            if (language_empty(next_pi))
                continue;
            ExpectationModel next = m.update_letter(a);
            if (!pos_by_orig(next, point_orig))
                continue;
            word.push_back(a);
            if (find_witness(next_pi, next, point_orig, depth + 1, max_depth, continuation, word))
                return true;
            word.pop_back();
        }
        return false;
    }
};

}  // namespace

Verdict mc_sfe(const ExpectationModel& m, const std::string& world, const Formula& f) {
    std::size_t pos = m.require_world(world);
    Formula nnf = to_nnf(f);
    if (!classify(nnf).star_free_existential)
        throw FragmentMismatchError(
            "mc_sfe requires a star-free-existential formula (after negation normal form)");
    validate_refs(m, nnf);
    SfeChecker checker(m);
    OrigSet sat = checker.worlds_np(m, nnf);
    Verdict v;
    std::size_t point_orig = m.world(pos).orig_index;
    v.truth = sat.count(point_orig) > 0;
    if (v.truth && nnf.kind() == Formula::Kind::Dia) {
        Word w;
        if (checker.find_witness(nnf.regex(), m, point_orig, 0, size(nnf.regex()), nnf.child(), w))
            v.witness = std::move(w);
    }
    v.stats = checker.stats;
    return v;
}

// ---------------------------------------------------------------------------
// eval_brute: expression-level reference semantics

namespace {

enum class Tri : std::int8_t { False = 0, True = 1, Unknown = 2 };

Tri tri_not(Tri t) {
    if (t == Tri::Unknown)
        return Tri::Unknown;
    return t == Tri::True ? Tri::False : Tri::True;
}

struct BruteWorld {
    std::size_t pos;  // position in the base model (valuation/relations live there)
    ObsExpr exp;
};

struct BruteChecker {
    const ExpectationModel& base;
    std::size_t bound;

    Tri eval(const std::vector<BruteWorld>& worlds, std::size_t point, const Formula& f) {
        switch (f.kind()) {
            case Formula::Kind::Top:
                return Tri::True;
            case Formula::Kind::Bot:
                return Tri::False;
            case Formula::Kind::Prop:
                return base.world(worlds[point].pos).has_prop(f.prop_name()) ? Tri::True
                                                                             : Tri::False;
            case Formula::Kind::Not:
                return tri_not(eval(worlds, point, f.child()));
            case Formula::Kind::And: {
                Tri l = eval(worlds, point, f.left());
                if (l == Tri::False)
                    return Tri::False;
                Tri r = eval(worlds, point, f.right());
                if (r == Tri::False)
                    return Tri::False;
                return (l == Tri::True && r == Tri::True) ? Tri::True : Tri::Unknown;
            }
            case Formula::Kind::Or: {
                Tri l = eval(worlds, point, f.left());
                if (l == Tri::True)
                    return Tri::True;
                Tri r = eval(worlds, point, f.right());
                if (r == Tri::True)
                    return Tri::True;
                return (l == Tri::False && r == Tri::False) ? Tri::False : Tri::Unknown;
            }
            case Formula::Kind::Imp: {
                Tri l = eval(worlds, point, f.left());
                if (l == Tri::False)
                    return Tri::True;
                Tri r = eval(worlds, point, f.right());
                if (r == Tri::True)
                    return Tri::True;
                if (l == Tri::True && r == Tri::False)
                    return Tri::False;
                return Tri::Unknown;
            }
            case Formula::Kind::K: {
                std::size_t ag = base.require_agent(f.agent());
                Tri acc = Tri::True;
                for (std::size_t i = 0; i < worlds.size(); ++i) {
                    if (!base.related(ag, worlds[i].pos, worlds[point].pos))
                        continue;
                    Tri t = eval(worlds, i, f.child());
                    if (t == Tri::False)
                        return Tri::False;
                    if (t == Tri::Unknown)
                        acc = Tri::Unknown;
                }
                return acc;
            }
            case Formula::Kind::KHat: {
                std::size_t ag = base.require_agent(f.agent());
                Tri acc = Tri::False;
                for (std::size_t i = 0; i < worlds.size(); ++i) {
                    if (!base.related(ag, worlds[i].pos, worlds[point].pos))
                        continue;
                    Tri t = eval(worlds, i, f.child());
                    if (t == Tri::True)
                        return Tri::True;
                    if (t == Tri::Unknown)
                        acc = Tri::Unknown;
                }
                return acc;
            }
            case Formula::Kind::Box:
                return modality(worlds, point, f, /*diamond=*/false);
            case Formula::Kind::Dia:
                return modality(worlds, point, f, /*diamond=*/true);
        }
        return Tri::Unknown;
    }

private:
    struct ModalityScan {
        bool decided = false;
        bool uncertain = false;
    };

    Tri modality(const std::vector<BruteWorld>& worlds, std::size_t point, const Formula& f,
                 bool diamond) {
        ModalityScan scan;
        enumerate(f.regex(), worlds, point, 0, f.child(), diamond, scan);
        if (scan.decided)
            return diamond ? Tri::True : Tri::False;
        return scan.uncertain ? Tri::Unknown : (diamond ? Tri::False : Tri::True);
    }

    // Enumerates the words of L(pi) that keep the point alive, in length order
    // along each branch, cutting branches whose modality residue is empty.
    void enumerate(const ObsExpr& pi, const std::vector<BruteWorld>& worlds, std::size_t point,
                   std::size_t depth, const Formula& continuation, bool diamond,
                   ModalityScan& scan) {
        if (scan.decided)
            return;
        if (nullable(pi)) {
            Tri sub = eval(worlds, point, continuation);
            if (diamond && sub == Tri::True) {
                scan.decided = true;
                return;
            }
            if (!diamond && sub == Tri::False) {
                scan.decided = true;
                return;
            }
            if (sub == Tri::Unknown)
                scan.uncertain = true;
        }
        if (depth >= bound) {
            // Truncated: any longer word still inside L(pi) could flip the verdict.
            for (const auto& a : base.alphabet().symbols()) {
                if (!language_empty(residue_letter(pi, a, base.alphabet()))) {
                    scan.uncertain = true;
                    break;
                }
            }
            return;
        }
        for (const auto& a : base.alphabet().symbols()) {
            ObsExpr next_pi = residue_letter(pi, a, base.alphabet());
            if (language_empty(next_pi))
                continue;
            std::vector<BruteWorld> next;
            bool point_alive = false;
            std::size_t next_point = 0;
            for (const auto& w : worlds) {
                ObsExpr res = residue_letter(w.exp, a, base.alphabet());
                if (language_empty(res))
                    continue;
                if (w.pos == worlds[point].pos) {
                    point_alive = true;
                    next_point = next.size();
                }
                next.push_back(BruteWorld{w.pos, std::move(res)});
            }
            if (!point_alive)
                continue;  // extensions are no longer prefixes of the point's expectation
            enumerate(next_pi, next, next_point, depth + 1, continuation, diamond, scan);
            if (scan.decided)
                return;
        }
    }
};

}  // namespace

std::optional<bool> eval_brute(const ExpectationModel& m, const std::string& world,
                               const Formula& f, std::size_t bound) {
    std::size_t pos = m.require_world(world);
    validate_refs(m, f);
    std::vector<BruteWorld> worlds;
    std::size_t point = 0;
    for (std::size_t i = 0; i < m.num_worlds(); ++i) {
        if (i == pos)
            point = worlds.size();
        worlds.push_back(BruteWorld{i, m.world(i).exp_expr});
    }
    BruteChecker checker{m, bound};
    Tri t = checker.eval(worlds, point, f);
    if (t == Tri::Unknown)
        return std::nullopt;
    return t == Tri::True;
}

// ---------------------------------------------------------------------------
// helpers

std::vector<std::string> satisfying_worlds(const ExpectationModel& m, const Formula& f) {
    std::vector<std::string> out;
    Fragment frag = classify(f);
    if (frag.word) {
        WordLabeler labeler;
        OrigSet sat = labeler.worlds_p(m, f);
        for (const auto& w : m.worlds())
            if (sat.count(w.orig_index))
                out.push_back(w.name);
        return out;
    }
    Formula nnf = to_nnf(f);
    if (classify(nnf).star_free_existential) {
        SfeChecker checker(m);
        OrigSet sat = checker.worlds_np(m, nnf);
        for (const auto& w : m.worlds())
            if (sat.count(w.orig_index))
                out.push_back(w.name);
        return out;
    }
    for (const auto& w : m.worlds())
        if (mc_full(m, w.name, f).truth)
            out.push_back(w.name);
    return out;
}

bool diamond_fusion_check(const ExpectationModel& m, const std::string& world, const ObsExpr& pi1,
                          const ObsExpr& pi2, const Formula& psi) {
    bool nested = mc_full(m, world, Formula::dia(pi1, Formula::dia(pi2, psi))).truth;
    bool fused = mc_full(m, world, Formula::dia(ObsExpr::concat(pi1, pi2), psi)).truth;
    if (nested != fused)
        throw std::logic_error("diamond fusion mismatch: <pi1><pi2>psi != <pi1.pi2>psi");
    return nested;
}

bool recheck_witness(const ExpectationModel& m, const std::string& world, const ObsExpr& pi,
                     const Formula& continuation, const Word& w) {
    if (!accepts(*thompson(pi, m.alphabet_ref()), w))
        return false;
    if (!m.survives(world, w))
        return false;
    return mc_full(m.update(w), world, continuation).truth;
}

}  // namespace polmc
