#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "polmc/engines.hpp"
#include "polmc/model.hpp"
#include "polmc/reductions.hpp"
#include "polmc/satenc.hpp"

namespace {

using namespace polmc;

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitError = 2;

ExpectationModel load_checked_model(const std::string& path) {
    ExpectationModel m = load_model_file(path);
    auto violations = m.validate();
    if (!violations.empty()) {
        std::string msg = "model does not validate:";
        for (const auto& v : violations)
            msg += "\n  " + v;
        throw ModelFormatError(msg);
    }
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CheckOptions {
    std::string model_path;
    std::string formula_text;
    std::string world;
    std::string engine = "auto";
    std::string external_solver;
    bool want_witness = false;
    bool want_stats = false;
    bool prefer_sat = false;
    std::size_t depth = 8;
};

std::string resolve_engine(const CheckOptions& opt, const Formula& f) {
    if (opt.engine != "auto")
        return opt.engine;
    Fragment frag = classify(f);
    if (frag.word)
        return "word";
    if (classify(to_nnf(f)).star_free_existential)
        return opt.prefer_sat ? "sat" : "sfe";
    return "full";
}

int run_check(const CheckOptions& opt) {
    ExpectationModel m = load_checked_model(opt.model_path);
    Formula f = parse_formula(opt.formula_text, m.alphabet());
    std::string engine = resolve_engine(opt, f);

    Verdict v;
    if (engine == "full") {
        v = mc_full(m, opt.world, f);
    } else if (engine == "word") {
        v = mc_word(m, opt.world, f);
    } else if (engine == "sfe") {
        v = mc_sfe(m, opt.world, f);
    } else if (engine == "sat") {
        v = opt.external_solver.empty()
                ? check_via_sat(m, opt.world, f)
                : check_via_sat(m, opt.world, f, [&](const CnfInstance& c) {
                      return solve_with_external(opt.external_solver, c);
                  });
    } else if (engine == "brute") {
        auto r = eval_brute(m, opt.world, f, opt.depth);
        if (!r) {
            std::cerr << "brute-force evaluation is inconclusive at depth " << opt.depth
                      << " (starred modalities); raise --depth or use another engine\n";
            return kExitError;
        }
        v.truth = *r;
    } else {
        std::cerr << "unknown engine: " << engine << "\n";
        return kExitError;
    }

    std::cout << (v.truth ? "TRUE" : "FALSE") << "\n";
    std::cout << "engine: " << engine << "\n";
    if (opt.want_witness && v.witness)
        std::cout << "witness: " << word_to_string(*v.witness) << "\n";
    if (opt.want_stats)
        std::cout << "configs: " << v.stats.configs_explored
                  << "  max_frontier: " << v.stats.max_frontier << "  depth: " << v.stats.depth
                  << "\n";
    return v.truth ? kExitTrue : kExitFalse;
}

int run_worlds(const std::string& model_path, const std::string& formula_text) {
    ExpectationModel m = load_checked_model(model_path);
    Formula f = parse_formula(formula_text, m.alphabet());
    for (const auto& name : satisfying_worlds(m, f))
        std::cout << name << "\n";
    return kExitTrue;
}

int run_encode(const std::string& model_path, const std::string& formula_text,
               const std::string& world, const std::string& out_prefix) {
    ExpectationModel m = load_checked_model(model_path);
    Formula f = parse_formula(formula_text, m.alphabet());
    Formula nnf = to_nnf(f);

    std::vector<ObsExpr> pis;
    Formula cur = nnf;
    while (cur.kind() == Formula::Kind::Dia) {
        pis.push_back(cur.regex());
        cur = cur.child();
    }
    ObsExpr pi = ObsExpr::eps();
    if (!pis.empty()) {
        pi = pis.front();
        for (std::size_t i = 1; i < pis.size(); ++i)
            pi = ObsExpr::concat(std::move(pi), pis[i]);
    }
    if (!is_star_free(pi))
        throw FragmentMismatchError("encode: the observation expression '" + print_obs(pi) +
                                    "' contains a star");
    if (!sat_encodable(f))
        throw FragmentMismatchError("encode: formula is not a star-free diamond chain over an "
                                    "epistemic core (offending part: " +
                                    print_formula(cur) + ")");
    if (language_empty(pi)) {
        std::cerr << "the observation expression denotes the empty language; nothing to encode\n";
        return kExitError;
    }

    std::size_t maxlen = max_word_length(pi).value();
    for (std::size_t k = 0; k <= maxlen; ++k) {
        CnfInstance c = encode(m, world, pi, cur, k);
        std::string path = out_prefix + ".k" + std::to_string(k) + ".cnf";
        std::ofstream out(path);
        out << emit_dimacs(c);
        std::cout << path << ": " << c.var_count << " vars, " << c.clauses.size()
                  << " clauses\n";
    }
    return kExitTrue;
}

int run_reduce(const std::string& kind, const std::string& instance_path,
               const std::string& out_prefix) {
    ReductionInstance instance = [&] {
        std::string text = read_file(instance_path);
        if (kind == "3sat")
            return from_3sat(parse_dimacs_cnf(text));
        if (kind == "qbf")
            return from_qbf(parse_qdimacs(text));
        if (kind == "dfa")
            return from_dfa_intersection(load_dfa_family_json(text));
        throw std::invalid_argument("unknown reduction kind '" + kind +
                                    "' (expected 3sat, qbf or dfa)");
    }();

    std::string model_path = out_prefix + ".model.json";
    std::string formula_path = out_prefix + ".formula.txt";
    {
        std::ofstream out(model_path);
        out << model_to_json(instance.model);
    }
    {
        std::ofstream out(formula_path);
        out << print_formula(instance.formula) << "\n";
    }
    std::cout << model_path << "\n" << formula_path << "\n";
    std::cout << "world: " << instance.world << "\n";
    return kExitTrue;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model checker for public observation logic"};
    app.require_subcommand(1);

    CheckOptions opt;
    auto* check = app.add_subcommand("check", "Decide whether a formula holds at a world");
    check->add_option("model", opt.model_path, "model JSON file")->required();
    check->add_option("formula", opt.formula_text, "formula text")->required();
    check->add_option("world", opt.world, "evaluation world")->required();
    check->add_option("--engine", opt.engine, "auto|brute|full|word|sfe|sat")
        ->check(CLI::IsMember({"auto", "brute", "full", "word", "sfe", "sat"}));
    check->add_flag("--witness", opt.want_witness, "print a witness word for diamonds");
    check->add_flag("--stats", opt.want_stats, "print search statistics");
    check->add_flag("--sat", opt.prefer_sat, "prefer the SAT backend when auto-selecting");
    check->add_option("--depth", opt.depth, "enumeration bound for --engine brute");
    check->add_option("--solver", opt.external_solver,
                      "external SAT solver command (gets a DIMACS file argument)");

    std::string worlds_model, worlds_formula;
    auto* worlds = app.add_subcommand("worlds", "List the worlds where a formula holds");
    worlds->add_option("model", worlds_model, "model JSON file")->required();
    worlds->add_option("formula", worlds_formula, "formula text")->required();

    std::string enc_model, enc_formula, enc_world, enc_out = "out";
    auto* enc = app.add_subcommand("encode", "Export DIMACS encodings, one per word length");
    enc->add_option("model", enc_model, "model JSON file")->required();
    enc->add_option("formula", enc_formula, "formula text")->required();
    enc->add_option("world", enc_world, "evaluation world")->required();
    enc->add_option("-o,--out", enc_out, "output prefix (files <prefix>.k<k>.cnf)");

    std::string red_kind, red_file, red_out;
    auto* red = app.add_subcommand("reduce", "Generate a model-checking instance");
    red->add_option("kind", red_kind, "3sat|qbf|dfa")->required();
    red->add_option("instance", red_file, "instance file (DIMACS, QDIMACS or DFA JSON)")
        ->required();
    red->add_option("-o,--out", red_out, "output prefix");

    try {
        app.parse(argc, argv);
        if (check->parsed())
            return run_check(opt);
        if (worlds->parsed())
            return run_worlds(worlds_model, worlds_formula);
        if (enc->parsed())
            return run_encode(enc_model, enc_formula, enc_world, enc_out);
        if (red->parsed())
            return run_reduce(red_kind, red_file, red_out.empty() ? red_kind : red_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
