#pragma once

#include <string>
#include <vector>

#include "polmc/automata.hpp"
#include "polmc/logic.hpp"
#include "polmc/model.hpp"

namespace polmc {

/// CNF over variables 1..num_vars; literals are signed indices.
struct CnfFormula {
    std::size_t num_vars = 0;
    std::vector<std::vector<int>> clauses;
};

enum class Quant { Exists, ForAll };

struct QbfInstance {
    std::vector<std::pair<Quant, std::size_t>> prefix;  // every variable exactly once
    CnfFormula matrix;
};

struct DfaFamily {
    AlphabetRef alphabet;
    std::vector<Dfa> dfas;
};

/// A generated model-checking instance.
struct ReductionInstance {
    ExpectationModel model;
    std::string world;
    Formula formula;
};

/// 3-SAT instance: one world per clause valued {p_j}, a single agent with the
/// universal relation, alphabet {a_i, a_i'}, clause expectations summing the
/// per-literal patterns, query <a_1+a_1'>…<a_n+a_n'> AND_j Kh_1 p_j at the
/// first clause world. Satisfiable iff the query holds.
ReductionInstance from_3sat(const CnfFormula& cnf);

/// QBF instance: the 3-SAT model plus a sentinel starting world whose
/// expectation is the universal language (so universal modalities are never
/// vacuously skipped when a clause world dies); modalities alternate <.>/[.]
/// following the quantifier prefix. True iff the query holds.
ReductionInstance from_qbf(const QbfInstance& qbf);

/// DFA-intersection instance: a chain of worlds 0,0',…,n with two alternating
/// agents, expectations A_i followed by a fresh end marker (the marker makes
/// survival of the chain equivalent to joint membership of the guessed word),
/// p only at world n, query <Sigma*·end>(Kh_1 Kh_2)^{n+1} p at world 0.
/// Intersection nonempty iff the query holds.
ReductionInstance from_dfa_intersection(const DfaFamily& family);

/// State-elimination conversion; L(result) = L(d).
ObsExpr dfa_to_regex(const Dfa& d);

/// Instance file parsers for the CLI.
CnfFormula parse_dimacs_cnf(const std::string& text);
QbfInstance parse_qdimacs(const std::string& text);
/// {"alphabet":["a","b"],
///  "dfas":[{"initial":0,"accepting":[1],"transitions":[[1,0],[1,1]]}]}
DfaFamily load_dfa_family_json(const std::string& text);

}  // namespace polmc
