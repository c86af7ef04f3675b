#include "polmc/satenc.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "polmc/automata.hpp"

namespace polmc {

namespace {

bool epistemic_only(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bot:
        case Formula::Kind::Prop:
            return true;
        case Formula::Kind::Not:
            return epistemic_only(f.child());
        case Formula::Kind::And:
        case Formula::Kind::Or:
            return epistemic_only(f.left()) && epistemic_only(f.right());
        case Formula::Kind::K:
        case Formula::Kind::KHat:
            return epistemic_only(f.child());
        default:
            return false;
    }
}

void collect_subformulas(const Formula& f, std::vector<Formula>& order,
                         std::unordered_map<const void*, std::size_t>& ids) {
    if (ids.count(f.id()))
        return;
    switch (f.kind()) {
        case Formula::Kind::Not:
        case Formula::Kind::K:
        case Formula::Kind::KHat:
            collect_subformulas(f.child(), order, ids);
            break;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            collect_subformulas(f.left(), order, ids);
            collect_subformulas(f.right(), order, ids);
            break;
        default:
            break;
    }
    ids.emplace(f.id(), order.size());
    order.push_back(f);
}

struct Encoder {
    CnfInstance cnf;

    int fresh(VarKey key) {
        cnf.varmap.push_back(key);
        return ++cnf.var_count;
    }

    void clause(Clause c) { cnf.clauses.push_back(std::move(c)); }

    void exactly_one(const std::vector<int>& vars) {
        Clause at_least;
        at_least.reserve(vars.size());
        for (int v : vars)
            at_least.push_back(v);
        clause(std::move(at_least));
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t j = i + 1; j < vars.size(); ++j)
                clause({-vars[i], -vars[j]});
    }

    // State variables and run clauses for one DFA over the guessed word.
    // Returns the variable grid [t][state].
    std::vector<std::vector<int>> automaton_run(const Dfa& d, std::size_t aut_id, std::size_t k,
                                                const std::vector<std::vector<int>>& letters) {
        std::vector<std::vector<int>> at(k + 1, std::vector<int>(d.num_states));
        for (std::size_t t = 0; t <= k; ++t)
            for (std::size_t q = 0; q < d.num_states; ++q)
                at[t][q] = fresh(VarKey{VarKey::Tag::AutState, t, aut_id, q});

        clause({at[0][d.initial]});
        for (std::size_t t = 0; t <= k; ++t)
            exactly_one(at[t]);
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t q = 0; q < d.num_states; ++q)
                for (std::size_t a = 0; a < d.alphabet->size(); ++a)
                    clause({-at[t][q], -letters[t][a], at[t + 1][d.trans[q][a]]});
        return at;
    }
};

}  // namespace

CnfInstance encode(const ExpectationModel& m, const std::string& world, const ObsExpr& pi,
                   const Formula& phi, std::size_t k) {
    std::size_t point = m.require_world(world);
    if (!is_star_free(pi))
        throw FragmentMismatchError("encode requires a star-free observation expression");
    if (!epistemic_only(phi))
        throw FragmentMismatchError("encode requires an epistemic formula (no modalities)");
    auto maxlen = max_word_length(pi);
    if (k > maxlen.value_or(0))
        throw KTooLargeError("k=" + std::to_string(k) + " exceeds the longest word of the regex");

    Encoder enc;
    enc.cnf.alphabet = m.alphabet_ref();
    enc.cnf.word_length = k;
    const std::size_t nsym = m.alphabet().size();

    // guessedWord: the word is uniquely determined by the letter variables.
    enc.cnf.letter_vars.assign(k, std::vector<int>(nsym));
    for (std::size_t t = 1; t <= k; ++t) {
        for (std::size_t a = 0; a < nsym; ++a)
            enc.cnf.letter_vars[t - 1][a] = enc.fresh(VarKey{VarKey::Tag::Letter, t, a, 0});
        enc.exactly_one(enc.cnf.letter_vars[t - 1]);
    }

    // good: pi's automaton reaches a final state after k letters.
    Dfa dfa_pi = minimize(determinize(*thompson(pi, m.alphabet_ref())));
    auto pi_states = enc.automaton_run(dfa_pi, 0, k, enc.cnf.letter_vars);
    Clause pi_final;
    for (std::size_t q = 0; q < dfa_pi.num_states; ++q)
        if (dfa_pi.accepting[q])
            pi_final.push_back(pi_states[k][q]);
    enc.clause(std::move(pi_final));

    // surv(v): the guessed word is a prefix of some expected observation of v.
    std::vector<int> surv(m.num_worlds());
    for (std::size_t v = 0; v < m.num_worlds(); ++v) {
        Dfa dfa_v = prefix_language_dfa(m.world(v).exp);
        auto states = enc.automaton_run(dfa_v, 1 + v, k, enc.cnf.letter_vars);
        surv[v] = enc.fresh(VarKey{VarKey::Tag::Surv, 0, v, 0});
        Clause forward{-surv[v]};
        for (std::size_t q = 0; q < dfa_v.num_states; ++q) {
            if (dfa_v.accepting[q]) {
                forward.push_back(states[k][q]);
                enc.clause({-states[k][q], surv[v]});
            }
        }
        enc.clause(std::move(forward));
    }
    enc.clause({surv[point]});

    // rules: truth of each subformula at each world, Tseitin-style.
    std::vector<Formula> subs;
    std::unordered_map<const void*, std::size_t> sub_ids;
    collect_subformulas(phi, subs, sub_ids);

    std::vector<std::vector<int>> truth(subs.size(), std::vector<int>(m.num_worlds()));
    for (std::size_t s = 0; s < subs.size(); ++s)
        for (std::size_t u = 0; u < m.num_worlds(); ++u)
            truth[s][u] = enc.fresh(VarKey{VarKey::Tag::Truth, 0, u, s});

    for (std::size_t s = 0; s < subs.size(); ++s) {
        const Formula& f = subs[s];
        for (std::size_t u = 0; u < m.num_worlds(); ++u) {
            int t = truth[s][u];
            switch (f.kind()) {
                case Formula::Kind::Top:
                    enc.clause({t});
                    break;
                case Formula::Kind::Bot:
                    enc.clause({-t});
                    break;
                case Formula::Kind::Prop:
                    enc.clause({m.world(u).has_prop(f.prop_name()) ? t : -t});
                    break;
                case Formula::Kind::Not: {
                    int t1 = truth[sub_ids.at(f.child().id())][u];
                    enc.clause({-t, -t1});
                    enc.clause({t, t1});
                    break;
                }
                case Formula::Kind::And: {
                    int t1 = truth[sub_ids.at(f.left().id())][u];
                    int t2 = truth[sub_ids.at(f.right().id())][u];
                    enc.clause({-t, t1});
                    enc.clause({-t, t2});
                    enc.clause({t, -t1, -t2});
                    break;
                }
                case Formula::Kind::Or: {
                    int t1 = truth[sub_ids.at(f.left().id())][u];
                    int t2 = truth[sub_ids.at(f.right().id())][u];
                    enc.clause({-t, t1, t2});
                    enc.clause({t, -t1});
                    enc.clause({t, -t2});
                    break;
                }
                case Formula::Kind::K: {
                    // t <-> AND over v~u of (surv(v) -> t_v)
                    std::size_t ag = m.require_agent(f.agent());
                    std::size_t child = sub_ids.at(f.child().id());
                    Clause back{t};
                    for (std::size_t v : m.neighbours(ag, u)) {
                        int tv = truth[child][v];
                        enc.clause({-t, -surv[v], tv});
                        int h = enc.fresh(VarKey{VarKey::Tag::Aux, 0, v, s});
                        // h <-> surv(v) & ~t_v
                        enc.clause({-h, surv[v]});
                        enc.clause({-h, -tv});
                        enc.clause({h, -surv[v], tv});
                        back.push_back(h);
                    }
                    enc.clause(std::move(back));
                    break;
                }
                case Formula::Kind::KHat: {
                    // t <-> OR over v~u of (surv(v) & t_v)
                    std::size_t ag = m.require_agent(f.agent());
                    std::size_t child = sub_ids.at(f.child().id());
                    Clause fwd{-t};
                    for (std::size_t v : m.neighbours(ag, u)) {
                        int tv = truth[child][v];
                        enc.clause({t, -surv[v], -tv});
                        int g = enc.fresh(VarKey{VarKey::Tag::Aux, 0, v, s});
                        // g <-> surv(v) & t_v
                        enc.clause({-g, surv[v]});
                        enc.clause({-g, tv});
                        enc.clause({g, -surv[v], -tv});
                        fwd.push_back(g);
                    }
                    enc.clause(std::move(fwd));
                    break;
                }
                default:
                    throw FragmentMismatchError("unsupported connective in epistemic formula");
            }
        }
    }

    enc.clause({truth[sub_ids.at(phi.id())][point]});
    return enc.cnf;
}

// ---------------------------------------------------------------------------
// DPLL

namespace {

// -1 unassigned, 0 false, 1 true
bool dpll(const std::vector<Clause>& clauses, std::vector<std::int8_t>& val) {
    // Unit propagation to fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Clause& c : clauses) {
            int unassigned = 0;
            int unit = 0;
            bool satisfied = false;
            for (int lit : c) {
                std::int8_t v = val[static_cast<std::size_t>(std::abs(lit))];
                if (v == -1) {
                    ++unassigned;
                    unit = lit;
                    if (unassigned > 1)
                        break;
                } else if ((lit > 0) == (v == 1)) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied)
                continue;
            if (unassigned == 0)
                return false;  // conflict
            if (unassigned == 1) {
                val[static_cast<std::size_t>(std::abs(unit))] = unit > 0 ? 1 : 0;
                changed = true;
            }
        }
    }

    std::size_t pick = 0;
    for (std::size_t v = 1; v < val.size(); ++v) {
        if (val[v] == -1) {
            pick = v;
            break;
        }
    }
    if (pick == 0)
        return true;  // total assignment, no conflict

    std::vector<std::int8_t> snapshot = val;
    val[pick] = 1;
    if (dpll(clauses, val))
        return true;
    val = snapshot;
    val[pick] = 0;
    if (dpll(clauses, val))
        return true;
    val = std::move(snapshot);
    val[pick] = -1;
    return false;
}

}  // namespace

std::optional<Assignment> solve(const CnfInstance& c) {
    std::vector<std::int8_t> val(static_cast<std::size_t>(c.var_count) + 1, -1);
    if (!dpll(c.clauses, val))
        return std::nullopt;
    Assignment a;
    a.values.assign(static_cast<std::size_t>(c.var_count) + 1, false);
    for (std::size_t v = 1; v < val.size(); ++v)
        a.values[v] = val[v] == 1;
    return a;
}

std::string emit_dimacs(const CnfInstance& c) {
    std::ostringstream os;
    os << "p cnf " << c.var_count << ' ' << c.clauses.size() << '\n';
    for (const Clause& cl : c.clauses) {
        for (int lit : cl)
            os << lit << ' ';
        os << "0\n";
    }
    return os.str();
}

Word decode_plan(const Assignment& a, const CnfInstance& c) {
    Word w;
    for (std::size_t t = 0; t < c.word_length; ++t) {
        for (std::size_t sym = 0; sym < c.alphabet->size(); ++sym) {
            if (a.value(c.letter_vars[t][sym])) {
                w.push_back(c.alphabet->symbol(sym));
                break;
            }
        }
    }
    return w;
}

std::optional<Assignment> solve_with_external(const std::string& command, const CnfInstance& c) {
    char tmpl[] = "/tmp/polmc-cnf-XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0)
        throw std::runtime_error("cannot create temporary DIMACS file");
    {
        std::string text = emit_dimacs(c);
        std::ofstream out(tmpl);
        out << text;
    }
    close(fd);
    std::string cmd = command + " " + tmpl;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(tmpl);
        throw std::runtime_error("cannot run external solver: " + command);
    }
    std::string output;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe))
        output.append(buf, got);
    pclose(pipe);
    std::remove(tmpl);

    if (output.find("UNSAT") != std::string::npos)
        return std::nullopt;
    if (output.find("SAT") == std::string::npos)
        throw std::runtime_error("external solver produced neither SAT nor UNSAT");

    Assignment a;
    a.values.assign(static_cast<std::size_t>(c.var_count) + 1, false);
    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || (line[0] != 'v' && line[0] != 'V'))
            continue;
        std::istringstream vs(line.substr(1));
        long lit = 0;
        while (vs >> lit) {
            if (lit > 0 && lit <= c.var_count)
                a.values[static_cast<std::size_t>(lit)] = true;
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// check_via_sat

namespace {

bool fuse_query(const Formula& f, std::vector<ObsExpr>& pis, Formula& core) {
    Formula cur = to_nnf(f);
    std::vector<ObsExpr> chain;
    while (cur.kind() == Formula::Kind::Dia) {
        if (!is_star_free(cur.regex()))
            return false;
        chain.push_back(cur.regex());
        cur = cur.child();
    }
    if (!epistemic_only(cur))
        return false;
    pis = std::move(chain);
    core = cur;
    return true;
}

}  // namespace

bool sat_encodable(const Formula& f) {
    std::vector<ObsExpr> pis;
    Formula core = Formula::top();
    return fuse_query(f, pis, core);
}

Verdict check_via_sat(const ExpectationModel& m, const std::string& world, const Formula& f) {
    return check_via_sat(m, world, f, [](const CnfInstance& c) { return solve(c); });
}

Verdict check_via_sat(const ExpectationModel& m, const std::string& world, const Formula& f,
                      const SolveFn& solver) {
    m.require_world(world);
    std::vector<ObsExpr> pis;
    Formula core = Formula::top();
    if (!fuse_query(f, pis, core))
        throw FragmentMismatchError(
            "check_via_sat requires a chain of star-free diamonds over an epistemic formula");

    ObsExpr pi = ObsExpr::eps();
    if (!pis.empty()) {
        pi = pis.front();
        for (std::size_t i = 1; i < pis.size(); ++i)
            pi = ObsExpr::concat(std::move(pi), pis[i]);
    }

    Verdict v;
    if (language_empty(pi))
        return v;
    std::size_t maxlen = max_word_length(pi).value();

    for (std::size_t k = 0; k <= maxlen; ++k) {
        CnfInstance c = encode(m, world, pi, core, k);
        v.stats.configs_explored += c.clauses.size();
        v.stats.depth = std::max(v.stats.depth, k);
        if (auto assignment = solver(c)) {
            v.truth = true;
            v.witness = decode_plan(*assignment, c);
            return v;
        }
    }
    return v;
}

}  // namespace polmc
