#include "polmc/reductions.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polmc/errors.hpp"

namespace polmc {

namespace {

std::string pos_symbol(std::size_t var) { return "a" + std::to_string(var); }
std::string neg_symbol(std::size_t var) { return "a" + std::to_string(var) + "'"; }
std::string literal_symbol(int lit) {
    return lit > 0 ? pos_symbol(static_cast<std::size_t>(lit))
                   : neg_symbol(static_cast<std::size_t>(-lit));
}

void check_cnf(const CnfFormula& cnf) {
    if (cnf.num_vars == 0)
        throw std::invalid_argument("instance needs at least one variable");
    if (cnf.clauses.empty())
        throw std::invalid_argument("instance needs at least one clause");
    for (const auto& clause : cnf.clauses) {
        if (clause.empty())
            throw std::invalid_argument("clauses must be nonempty");
        for (int lit : clause)
            if (lit == 0 || static_cast<std::size_t>(std::abs(lit)) > cnf.num_vars)
                throw std::invalid_argument("literal out of range: " + std::to_string(lit));
    }
}

// (Sigma \ {a_i, a_i'})* tr(l) (Sigma \ {a_i, a_i'})* for one literal.
ObsExpr literal_branch(int lit, const std::vector<std::string>& symbols) {
    std::size_t var = static_cast<std::size_t>(std::abs(lit));
    ObsExpr others = ObsExpr::empty();
    for (const auto& s : symbols)
        if (s != pos_symbol(var) && s != neg_symbol(var))
            others = simplified_union(std::move(others), ObsExpr::letter(s));
    ObsExpr pad = simplified_star(others);
    return simplified_concat(simplified_concat(pad, ObsExpr::letter(literal_symbol(lit))), pad);
}

ObsExpr clause_expectation(const std::vector<int>& clause, const std::vector<std::string>& symbols) {
    std::vector<int> lits = clause;
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    ObsExpr sum = ObsExpr::empty();
    for (int lit : lits)
        sum = simplified_union(std::move(sum), literal_branch(lit, symbols));
    return sum;
}

Formula khat_conjunction(std::size_t num_clauses) {
    Formula core = Formula::considers("1", Formula::prop("p" + std::to_string(num_clauses)));
    for (std::size_t j = num_clauses - 1; j >= 1; --j)
        core = Formula::conj(Formula::considers("1", Formula::prop("p" + std::to_string(j))),
                             std::move(core));
    return core;
}

struct ClauseModelParts {
    AlphabetRef alphabet;
    std::vector<std::pair<std::string, ObsExpr>> worlds;
    std::vector<std::vector<std::string>> world_props;
    std::vector<std::string> props;
};

ClauseModelParts clause_model_parts(const CnfFormula& cnf) {
    ClauseModelParts parts;
    std::vector<std::string> symbols;
    for (std::size_t i = 1; i <= cnf.num_vars; ++i) {
        symbols.push_back(pos_symbol(i));
        symbols.push_back(neg_symbol(i));
    }
    parts.alphabet = std::make_shared<const Alphabet>(symbols);
    for (std::size_t j = 0; j < cnf.clauses.size(); ++j) {
        parts.worlds.emplace_back("c" + std::to_string(j + 1),
                                  clause_expectation(cnf.clauses[j], symbols));
        parts.world_props.push_back({"p" + std::to_string(j + 1)});
        parts.props.push_back("p" + std::to_string(j + 1));
    }
    return parts;
}

std::vector<std::pair<std::string, std::string>> universal_pairs(
    const std::vector<std::pair<std::string, ObsExpr>>& worlds) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t j = 1; j < worlds.size(); ++j)
        pairs.emplace_back(worlds[0].first, worlds[j].first);
    return pairs;
}

}  // namespace

ReductionInstance from_3sat(const CnfFormula& cnf) {
    check_cnf(cnf);
    ClauseModelParts parts = clause_model_parts(cnf);

    Formula formula = khat_conjunction(cnf.clauses.size());
    for (std::size_t i = cnf.num_vars; i >= 1; --i) {
        ObsExpr choice = ObsExpr::alt(ObsExpr::letter(pos_symbol(i)), ObsExpr::letter(neg_symbol(i)));
        formula = Formula::dia(std::move(choice), std::move(formula));
    }

    ExpectationModel model(parts.alphabet, {"1"}, parts.props, parts.worlds, parts.world_props,
                           {universal_pairs(parts.worlds)});
    return ReductionInstance{std::move(model), "c1", std::move(formula)};
}

ReductionInstance from_qbf(const QbfInstance& qbf) {
    check_cnf(qbf.matrix);
    if (qbf.prefix.size() != qbf.matrix.num_vars)
        throw std::invalid_argument("every matrix variable must be quantified exactly once");
    std::set<std::size_t> quantified;
    for (const auto& [q, var] : qbf.prefix) {
        if (var == 0 || var > qbf.matrix.num_vars || !quantified.insert(var).second)
            throw std::invalid_argument("every matrix variable must be quantified exactly once");
    }

    ClauseModelParts parts = clause_model_parts(qbf.matrix);

    // Sentinel starting world: universal-language expectation, never deleted,
    // so box modalities range over both letters of every quantifier step.
    ObsExpr sigma_star = ObsExpr::empty();
    for (const auto& s : parts.alphabet->symbols())
        sigma_star = simplified_union(std::move(sigma_star), ObsExpr::letter(s));
    sigma_star = simplified_star(std::move(sigma_star));
    parts.worlds.insert(parts.worlds.begin(), {"c0", std::move(sigma_star)});
    parts.world_props.insert(parts.world_props.begin(), std::vector<std::string>{});

    Formula formula = khat_conjunction(qbf.matrix.clauses.size());
    for (auto it = qbf.prefix.rbegin(); it != qbf.prefix.rend(); ++it) {
        ObsExpr choice =
            ObsExpr::alt(ObsExpr::letter(pos_symbol(it->second)), ObsExpr::letter(neg_symbol(it->second)));
        formula = it->first == Quant::Exists ? Formula::dia(std::move(choice), std::move(formula))
                                             : Formula::box(std::move(choice), std::move(formula));
    }

    ExpectationModel model(parts.alphabet, {"1"}, parts.props, parts.worlds, parts.world_props,
                           {universal_pairs(parts.worlds)});
    return ReductionInstance{std::move(model), "c0", std::move(formula)};
}

// ---------------------------------------------------------------------------
// DFA intersection

ObsExpr dfa_to_regex(const Dfa& d) {
    // State elimination over a generalized automaton with fresh start/accept.
    std::size_t n = d.num_states;
    std::size_t start = n, accept = n + 1;
    std::vector<std::vector<ObsExpr>> label(n + 2, std::vector<ObsExpr>(n + 2, ObsExpr::empty()));

    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t a = 0; a < d.alphabet->size(); ++a)
            label[q][d.trans[q][a]] =
                simplified_union(std::move(label[q][d.trans[q][a]]), ObsExpr::letter(d.alphabet->symbol(a)));
    label[start][d.initial] = ObsExpr::eps();
    for (std::size_t q = 0; q < n; ++q)
        if (d.accepting[q])
            label[q][accept] = ObsExpr::eps();

    std::vector<bool> gone(n + 2, false);
    for (std::size_t victim = 0; victim < n; ++victim) {
        gone[victim] = true;
        ObsExpr loop = simplified_star(label[victim][victim]);
        for (std::size_t i = 0; i < n + 2; ++i) {
            if (gone[i] || language_empty(label[i][victim]))
                continue;
            for (std::size_t j = 0; j < n + 2; ++j) {
                if (gone[j] || language_empty(label[victim][j]))
                    continue;
                ObsExpr path =
                    simplified_concat(simplified_concat(label[i][victim], loop), label[victim][j]);
                label[i][j] = simplified_union(std::move(label[i][j]), std::move(path));
            }
        }
    }
    return label[start][accept];
}

ReductionInstance from_dfa_intersection(const DfaFamily& family) {
    if (family.dfas.empty())
        throw std::invalid_argument("intersection instance needs at least one automaton");
    for (const auto& d : family.dfas)
        if (!(*d.alphabet == *family.alphabet))
            throw std::invalid_argument("all automata must share the family alphabet");
    std::size_t n = family.dfas.size();

    std::string end = "end";
    while (family.alphabet->contains(end))
        end += "_";
    std::vector<std::string> symbols = family.alphabet->symbols();
    symbols.push_back(end);
    auto alphabet = std::make_shared<const Alphabet>(symbols);

    ObsExpr sigma = ObsExpr::empty();
    for (const auto& s : family.alphabet->symbols())
        sigma = simplified_union(std::move(sigma), ObsExpr::letter(s));
    ObsExpr sigma_star_end = simplified_concat(simplified_star(sigma), ObsExpr::letter(end));

    std::vector<std::pair<std::string, ObsExpr>> worlds;
    std::vector<std::vector<std::string>> world_props;
    auto add_world = [&](const std::string& name, ObsExpr exp, bool with_p) {
        worlds.emplace_back(name, std::move(exp));
        world_props.push_back(with_p ? std::vector<std::string>{"p"} : std::vector<std::string>{});
    };

    add_world("0", sigma_star_end, false);
    add_world("0'", sigma_star_end, false);
    for (std::size_t i = 1; i < n; ++i) {
        ObsExpr exp =
            simplified_concat(dfa_to_regex(family.dfas[i - 1]), ObsExpr::letter(end));
        add_world(std::to_string(i), exp, false);
        add_world(std::to_string(i) + "'", exp, false);
    }
    add_world(std::to_string(n),
              simplified_concat(dfa_to_regex(family.dfas[n - 1]), ObsExpr::letter(end)), true);

    std::vector<std::pair<std::string, std::string>> rel1, rel2;
    for (std::size_t i = 0; i < n; ++i) {
        rel1.emplace_back(std::to_string(i), std::to_string(i) + "'");
        rel2.emplace_back(std::to_string(i) + "'", std::to_string(i + 1));
    }

    Formula chain = Formula::prop("p");
    for (std::size_t round = 0; round <= n; ++round)
        chain = Formula::considers("1", Formula::considers("2", std::move(chain)));
    Formula formula = Formula::dia(std::move(sigma_star_end), std::move(chain));

    ExpectationModel model(alphabet, {"1", "2"}, {"p"}, std::move(worlds), std::move(world_props),
                           {std::move(rel1), std::move(rel2)});
    return ReductionInstance{std::move(model), "0", std::move(formula)};
}

// ---------------------------------------------------------------------------
// Instance file parsers

CnfFormula parse_dimacs_cnf(const std::string& text) {
    CnfFormula cnf;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<int> current;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c')
            continue;
        if (line[0] == 'p') {
            std::istringstream hs(line);
            std::string p, fmt;
            std::size_t nv = 0, nc = 0;
            if (!(hs >> p >> fmt >> nv >> nc) || fmt != "cnf")
                throw std::invalid_argument("bad DIMACS header: " + line);
            cnf.num_vars = nv;
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        int lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                if (!current.empty()) {
                    cnf.clauses.push_back(current);
                    current.clear();
                }
            } else {
                current.push_back(lit);
            }
        }
    }
    if (!current.empty())
        cnf.clauses.push_back(current);
    if (!header_seen)
        throw std::invalid_argument("missing DIMACS 'p cnf' header");
    return cnf;
}

QbfInstance parse_qdimacs(const std::string& text) {
    QbfInstance qbf;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<int> current;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c')
            continue;
        if (line[0] == 'p') {
            std::istringstream hs(line);
            std::string p, fmt;
            std::size_t nv = 0, nc = 0;
            if (!(hs >> p >> fmt >> nv >> nc) || fmt != "cnf")
                throw std::invalid_argument("bad QDIMACS header: " + line);
            qbf.matrix.num_vars = nv;
            header_seen = true;
            continue;
        }
        if (line[0] == 'e' || line[0] == 'a') {
            std::istringstream qs(line.substr(1));
            long var = 0;
            while (qs >> var && var != 0)
                qbf.prefix.emplace_back(line[0] == 'e' ? Quant::Exists : Quant::ForAll,
                                        static_cast<std::size_t>(var));
            continue;
        }
        std::istringstream ls(line);
        int lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                if (!current.empty()) {
                    qbf.matrix.clauses.push_back(current);
                    current.clear();
                }
            } else {
                current.push_back(lit);
            }
        }
    }
    if (!current.empty())
        qbf.matrix.clauses.push_back(current);
    if (!header_seen)
        throw std::invalid_argument("missing QDIMACS 'p cnf' header");
    return qbf;
}

DfaFamily load_dfa_family_json(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid DFA family JSON: ") + e.what());
    }
    DfaFamily family;
    family.alphabet =
        std::make_shared<const Alphabet>(doc.at("alphabet").get<std::vector<std::string>>());
    for (const auto& jd : doc.at("dfas")) {
        Dfa d;
        d.alphabet = family.alphabet;
        auto trans = jd.at("transitions").get<std::vector<std::vector<std::size_t>>>();
        d.num_states = trans.size();
        d.trans = std::move(trans);
        d.initial = jd.value("initial", std::size_t{0});
        d.accepting.assign(d.num_states, false);
        for (std::size_t q : jd.at("accepting").get<std::vector<std::size_t>>())
            d.accepting.at(q) = true;
        for (const auto& row : d.trans) {
            if (row.size() != family.alphabet->size())
                throw std::invalid_argument("transition row arity must match the alphabet");
            for (std::size_t t : row)
                if (t >= d.num_states)
                    throw std::invalid_argument("transition target out of range");
        }
        if (d.initial >= d.num_states)
            throw std::invalid_argument("initial state out of range");
        family.dfas.push_back(std::move(d));
    }
    if (family.dfas.empty())
        throw std::invalid_argument("DFA family must be nonempty");
    return family;
}

}  // namespace polmc
