#pragma once

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "polmc/engines.hpp"
#include "polmc/logic.hpp"
#include "polmc/model.hpp"
#include "polmc/obsexpr.hpp"
#include "polmc/reductions.hpp"

namespace polmc::testing {

inline Word w(const std::string& spaced) {
    Word out;
    std::istringstream in(spaced);
    std::string letter;
    while (in >> letter)
        out.push_back(letter);
    return out;
}

inline ExpectationModel load_fixture(const std::string& name) {
    return load_model_file(std::string(POLMC_FIXTURE_DIR) + "/" + name);
}

// ---------------------------------------------------------------------------
// Independent language oracle: the set-of-strings semantics computed by
// structural recursion, with everything longer than maxlen dropped. No
// automata, no residues.

inline std::set<Word> bounded_language(const ObsExpr& e, std::size_t maxlen) {
    using K = ObsExpr::Kind;
    switch (e.kind()) {
        case K::Empty:
            return {};
        case K::Eps:
            return {Word{}};
        case K::Letter:
            if (maxlen == 0)
                return {};
            return {Word{e.symbol()}};
        case K::Concat: {
            auto l = bounded_language(e.left(), maxlen);
            auto r = bounded_language(e.right(), maxlen);
            std::set<Word> out;
            for (const auto& a : l)
                for (const auto& b : r) {
                    if (a.size() + b.size() > maxlen)
                        continue;
                    Word ab = a;
                    ab.insert(ab.end(), b.begin(), b.end());
                    out.insert(std::move(ab));
                }
            return out;
        }
        case K::Union: {
            auto out = bounded_language(e.left(), maxlen);
            auto r = bounded_language(e.right(), maxlen);
            out.insert(r.begin(), r.end());
            return out;
        }
        case K::Star: {
            auto base = bounded_language(e.inner(), maxlen);
            std::set<Word> out{Word{}};
            bool grew = true;
            while (grew) {
                grew = false;
                std::set<Word> next;
                for (const auto& a : out)
                    for (const auto& b : base) {
                        if (b.empty() || a.size() + b.size() > maxlen)
                            continue;
                        Word ab = a;
                        ab.insert(ab.end(), b.begin(), b.end());
                        if (!out.count(ab))
                            next.insert(std::move(ab));
                    }
                if (!next.empty()) {
                    out.insert(next.begin(), next.end());
                    grew = true;
                }
            }
            return out;
        }
    }
    return {};
}

inline bool bounded_member(const ObsExpr& e, const Word& word) {
    return bounded_language(e, word.size()).count(word) > 0;
}

inline std::vector<Word> all_words(const std::vector<std::string>& symbols, std::size_t maxlen) {
    std::vector<Word> out{Word{}};
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= maxlen; ++len) {
        std::size_t level_end = out.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (const auto& s : symbols) {
                Word next = out[i];
                next.push_back(s);
                out.push_back(std::move(next));
            }
        level_begin = level_end;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random generators (all deterministic under the caller's seeded engine)

inline ObsExpr random_obsexpr(std::mt19937& rng, const std::vector<std::string>& symbols,
                              std::size_t budget, bool allow_star) {
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    if (budget <= 1) {
        switch (pick(6)) {
            case 0:
                return ObsExpr::eps();
            case 1:
                return ObsExpr::empty();
            default:
                return ObsExpr::letter(symbols[pick(symbols.size())]);
        }
    }
    switch (pick(allow_star ? 4 : 3)) {
        case 0:
            return ObsExpr::letter(symbols[pick(symbols.size())]);
        case 1: {
            std::size_t lb = 1 + pick(budget - 1);
            return ObsExpr::concat(random_obsexpr(rng, symbols, lb, allow_star),
                                   random_obsexpr(rng, symbols, budget - lb, allow_star));
        }
        case 2: {
            std::size_t lb = 1 + pick(budget - 1);
            return ObsExpr::alt(random_obsexpr(rng, symbols, lb, allow_star),
                                random_obsexpr(rng, symbols, budget - lb, allow_star));
        }
        default:
            return ObsExpr::star(random_obsexpr(rng, symbols, budget - 1, allow_star));
    }
}

inline ObsExpr random_nonempty_obsexpr(std::mt19937& rng, const std::vector<std::string>& symbols,
                                       std::size_t budget, bool allow_star) {
    for (int tries = 0; tries < 100; ++tries) {
        ObsExpr e = random_obsexpr(rng, symbols, budget, allow_star);
        if (!language_empty(e))
            return e;
    }
    return ObsExpr::eps();
}

inline Word random_word(std::mt19937& rng, const std::vector<std::string>& symbols,
                        std::size_t maxlen) {
    std::uniform_int_distribution<std::size_t> len_dist(0, maxlen);
    std::uniform_int_distribution<std::size_t> sym_dist(0, symbols.size() - 1);
    Word out;
    std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; ++i)
        out.push_back(symbols[sym_dist(rng)]);
    return out;
}

struct RandomModelConfig {
    std::size_t max_worlds = 5;
    std::size_t max_agents = 2;
    std::size_t alphabet_size = 3;
    std::size_t exp_size = 8;
    bool starred_exps = true;
};

inline ExpectationModel random_model(std::mt19937& rng, const RandomModelConfig& cfg = {}) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    static const std::vector<std::string> sym_pool{"a", "b", "c"};
    static const std::vector<std::string> agent_pool{"1", "2"};
    static const std::vector<std::string> prop_pool{"p", "q"};

    std::vector<std::string> symbols(sym_pool.begin(),
                                     sym_pool.begin() + pick(1, cfg.alphabet_size));
    auto alphabet = std::make_shared<const Alphabet>(symbols);
    std::vector<std::string> agents(agent_pool.begin(), agent_pool.begin() + pick(1, cfg.max_agents));
    std::vector<std::string> props(prop_pool.begin(), prop_pool.end());

    std::size_t n = pick(1, cfg.max_worlds);
    std::vector<std::pair<std::string, ObsExpr>> worlds;
    std::vector<std::vector<std::string>> world_props;
    for (std::size_t i = 0; i < n; ++i) {
        worlds.emplace_back("w" + std::to_string(i),
                            random_nonempty_obsexpr(rng, symbols, pick(1, cfg.exp_size),
                                                    cfg.starred_exps));
        std::vector<std::string> ps;
        for (const auto& p : props)
            if (pick(0, 1))
                ps.push_back(p);
        world_props.push_back(std::move(ps));
    }

    std::vector<std::vector<std::pair<std::string, std::string>>> rel(agents.size());
    for (std::size_t ag = 0; ag < agents.size(); ++ag) {
        std::size_t links = pick(0, n);
        for (std::size_t l = 0; l < links; ++l)
            rel[ag].emplace_back(worlds[pick(0, n - 1)].first, worlds[pick(0, n - 1)].first);
    }
    return ExpectationModel(alphabet, agents, props, worlds, world_props, rel);
}

enum class FormulaShape { Any, WordFragment, StarFree, StarFreeExistential };

inline Formula random_formula(std::mt19937& rng, const ExpectationModel& m, std::size_t depth,
                              FormulaShape shape) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    const auto& symbols = m.alphabet().symbols();

    auto random_regex = [&]() {
        switch (shape) {
            case FormulaShape::WordFragment: {
                Word word = random_word(rng, symbols, 3);
                ObsExpr e = ObsExpr::eps();
                for (const auto& a : word)
                    e = e.kind() == ObsExpr::Kind::Eps ? ObsExpr::letter(a)
                                                       : ObsExpr::concat(std::move(e), ObsExpr::letter(a));
                return e;
            }
            case FormulaShape::StarFree:
            case FormulaShape::StarFreeExistential:
                return random_nonempty_obsexpr(rng, symbols, pick(1, 5), false);
            case FormulaShape::Any:
                return random_nonempty_obsexpr(rng, symbols, pick(1, 5), true);
        }
        return ObsExpr::eps();
    };

    auto atom = [&]() -> Formula {
        switch (pick(0, 4)) {
            case 0:
                return Formula::top();
            case 1:
                return Formula::bot();
            default: {
                Formula p = Formula::prop(m.props()[pick(0, m.props().size() - 1)]);
                if (shape == FormulaShape::StarFreeExistential && pick(0, 1))
                    return Formula::negation(std::move(p));
                return p;
            }
        }
    };
    if (depth == 0)
        return atom();

    bool existential = shape == FormulaShape::StarFreeExistential;
    std::size_t choice = pick(0, existential ? 5 : 7);
    const std::string& agent = m.agents()[pick(0, m.agents().size() - 1)];
    switch (choice) {
        case 0:
            return atom();
        case 1:
            return Formula::conj(random_formula(rng, m, depth - 1, shape),
                                 random_formula(rng, m, depth - 1, shape));
        case 2:
            return Formula::disj(random_formula(rng, m, depth - 1, shape),
                                 random_formula(rng, m, depth - 1, shape));
        case 3:
            return Formula::considers(agent, random_formula(rng, m, depth - 1, shape));
        case 4:
            return pick(0, 1) == 0
                       ? Formula::knows(agent, random_formula(rng, m, depth - 1, shape))
                       : Formula::dia(random_regex(), random_formula(rng, m, depth - 1, shape));
        case 5:
            return Formula::dia(random_regex(), random_formula(rng, m, depth - 1, shape));
        case 6:
            return Formula::negation(random_formula(rng, m, depth - 1, shape));
        default:
            return Formula::box(random_regex(), random_formula(rng, m, depth - 1, shape));
    }
}

// ---------------------------------------------------------------------------
// Brute-force evaluators for the generated reduction instances

inline bool clause_satisfied(const std::vector<int>& clause, const std::vector<bool>& assignment) {
    for (int lit : clause) {
        bool v = assignment[static_cast<std::size_t>(std::abs(lit)) - 1];
        if ((lit > 0) == v)
            return true;
    }
    return false;
}

inline bool cnf_satisfied(const CnfFormula& cnf, const std::vector<bool>& assignment) {
    for (const auto& c : cnf.clauses)
        if (!clause_satisfied(c, assignment))
            return false;
    return true;
}

inline bool truth_table_sat(const CnfFormula& cnf) {
    std::size_t n = cnf.num_vars;
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        std::vector<bool> assignment(n);
        for (std::size_t i = 0; i < n; ++i)
            assignment[i] = (bits >> i) & 1;
        if (cnf_satisfied(cnf, assignment))
            return true;
    }
    return false;
}

inline bool qbf_eval_rec(const QbfInstance& qbf, std::size_t level, std::vector<bool>& assignment) {
    if (level == qbf.prefix.size())
        return cnf_satisfied(qbf.matrix, assignment);
    auto [quant, var] = qbf.prefix[level];
    bool results[2];
    for (int v = 0; v < 2; ++v) {
        assignment[var - 1] = v == 1;
        results[v] = qbf_eval_rec(qbf, level + 1, assignment);
    }
    return quant == Quant::Exists ? (results[0] || results[1]) : (results[0] && results[1]);
}

inline bool qbf_eval(const QbfInstance& qbf) {
    std::vector<bool> assignment(qbf.matrix.num_vars);
    return qbf_eval_rec(qbf, 0, assignment);
}

/// Product-automaton emptiness: BFS over state tuples.
inline bool dfa_intersection_nonempty(const DfaFamily& family) {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::vector<std::size_t>> queue;
    std::vector<std::size_t> start;
    for (const auto& d : family.dfas)
        start.push_back(d.initial);
    seen.insert(start);
    queue.push_back(start);
    while (!queue.empty()) {
        auto tuple = queue.back();
        queue.pop_back();
        bool all_accepting = true;
        for (std::size_t i = 0; i < family.dfas.size(); ++i)
            if (!family.dfas[i].accepting[tuple[i]]) {
                all_accepting = false;
                break;
            }
        if (all_accepting)
            return true;
        for (std::size_t a = 0; a < family.alphabet->size(); ++a) {
            std::vector<std::size_t> next;
            for (std::size_t i = 0; i < family.dfas.size(); ++i)
                next.push_back(family.dfas[i].trans[tuple[i]][a]);
            if (seen.insert(next).second)
                queue.push_back(next);
        }
    }
    return false;
}

inline CnfFormula random_cnf(std::mt19937& rng, std::size_t max_vars, std::size_t max_clauses) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    CnfFormula cnf;
    cnf.num_vars = pick(1, max_vars);
    std::size_t m = pick(1, max_clauses);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<int> clause;
        std::size_t len = pick(1, 3);
        for (std::size_t l = 0; l < len; ++l) {
            int var = static_cast<int>(pick(1, cnf.num_vars));
            clause.push_back(pick(0, 1) ? var : -var);
        }
        cnf.clauses.push_back(std::move(clause));
    }
    return cnf;
}

inline QbfInstance random_qbf(std::mt19937& rng, std::size_t max_vars, std::size_t max_clauses) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    QbfInstance qbf;
    qbf.matrix = random_cnf(rng, max_vars, max_clauses);
    for (std::size_t v = 1; v <= qbf.matrix.num_vars; ++v)
        qbf.prefix.emplace_back(pick(0, 1) ? Quant::Exists : Quant::ForAll, v);
    return qbf;
}

inline DfaFamily random_dfa_family(std::mt19937& rng, std::size_t max_dfas,
                                   std::size_t max_states) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    DfaFamily family;
    family.alphabet = std::make_shared<const Alphabet>(std::vector<std::string>{"a", "b"});
    std::size_t count = pick(1, max_dfas);
    for (std::size_t i = 0; i < count; ++i) {
        Dfa d;
        d.alphabet = family.alphabet;
        d.num_states = pick(1, max_states);
        d.initial = pick(0, d.num_states - 1);
        d.trans.assign(d.num_states, std::vector<std::size_t>(2));
        d.accepting.assign(d.num_states, false);
        for (std::size_t q = 0; q < d.num_states; ++q) {
            d.trans[q][0] = pick(0, d.num_states - 1);
            d.trans[q][1] = pick(0, d.num_states - 1);
            d.accepting[q] = pick(0, 2) == 0;
        }
        family.dfas.push_back(std::move(d));
    }
    return family;
}

}  // namespace polmc::testing
