#include "polmc/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace polmc {

Nfa::Nfa(AlphabetRef alphabet, std::size_t num_states,
         std::vector<std::vector<std::vector<State>>> trans, std::vector<std::vector<State>> eps,
         std::vector<State> initial, std::vector<bool> accepting)
    : alphabet_(std::move(alphabet)),
      num_states_(num_states),
      trans_(std::move(trans)),
      eps_(std::move(eps)),
      initial_(std::move(initial)),
      accepting_(std::move(accepting)) {
    compute_productive();
}

void Nfa::compute_productive() {
    // Backward reachability from the accepting states over all edges.
    std::vector<std::vector<State>> rev(num_states_);
    for (State s = 0; s < num_states_; ++s) {
        for (std::size_t a = 0; a < alphabet_->size(); ++a)
            for (State t : trans_[s][a])
                rev[t].push_back(s);
        for (State t : eps_[s])
            rev[t].push_back(s);
    }
    productive_.assign(num_states_, false);
    std::deque<State> queue;
    for (State s = 0; s < num_states_; ++s) {
        if (accepting_[s]) {
            productive_[s] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (State p : rev[s]) {
            if (!productive_[p]) {
                productive_[p] = true;
                queue.push_back(p);
            }
        }
    }
}

std::vector<Nfa::State> Nfa::epsilon_closure(const std::vector<State>& states) const {
    std::vector<bool> seen(num_states_, false);
    std::vector<State> stack;
    for (State s : states) {
        if (!seen[s]) {
            seen[s] = true;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        State s = stack.back();
        stack.pop_back();
        for (State t : eps_[s]) {
            if (!seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
        }
    }
    std::vector<State> out;
    for (State s = 0; s < num_states_; ++s)
        if (seen[s])
            out.push_back(s);
    return out;
}

std::string Nfa::dump() const {
    std::ostringstream os;
    os << "states " << num_states_ << "\n";
    os << "initial";
    for (State s : initial_)
        os << ' ' << s;
    os << "\n";
    os << "accepting";
    for (State s = 0; s < num_states_; ++s)
        if (accepting_[s])
            os << ' ' << s;
    os << "\n";
    for (State s = 0; s < num_states_; ++s) {
        for (std::size_t a = 0; a < alphabet_->size(); ++a)
            for (State t : trans_[s][a])
                os << "trans " << s << ' ' << alphabet_->symbol(a) << ' ' << t << "\n";
        for (State t : eps_[s])
            os << "eps " << s << ' ' << t << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Thompson construction

namespace {

struct NfaBuilder {
    const Alphabet& alphabet;
    std::vector<std::vector<std::vector<Nfa::State>>> trans;
    std::vector<std::vector<Nfa::State>> eps;

    explicit NfaBuilder(const Alphabet& a) : alphabet(a) {}

    Nfa::State fresh() {
        trans.emplace_back(alphabet.size());
        eps.emplace_back();
        return trans.size() - 1;
    }

    void edge(Nfa::State from, std::size_t symbol, Nfa::State to) {
        trans[from][symbol].push_back(to);
    }
    void eps_edge(Nfa::State from, Nfa::State to) { eps[from].push_back(to); }

    // Builds e between the given endpoints. Invariant: no edge is ever added
    // into `in` or out of `out`, so parallel sub-builds between shared
    // endpoints cannot interfere.
    void build(const ObsExpr& e, Nfa::State in, Nfa::State out) {
        switch (e.kind()) {
            case ObsExpr::Kind::Empty:
                return;
            case ObsExpr::Kind::Eps:
                eps_edge(in, out);
                return;
            case ObsExpr::Kind::Letter:
                edge(in, alphabet.require(e.symbol()), out);
                return;
            case ObsExpr::Kind::Concat: {
                Nfa::State mid = fresh();
                build(e.left(), in, mid);
                build(e.right(), mid, out);
                return;
            }
            case ObsExpr::Kind::Union:
                build(e.left(), in, out);
                build(e.right(), in, out);
                return;
            case ObsExpr::Kind::Star: {
                Nfa::State hub = fresh();
                eps_edge(in, hub);
                eps_edge(hub, out);
                build(e.inner(), hub, hub);
                return;
            }
        }
    }
};

}  // namespace

NfaRef thompson(const ObsExpr& e, AlphabetRef alphabet) {
    NfaBuilder b(*alphabet);
    Nfa::State init = b.fresh();
    Nfa::State fin = b.fresh();
    b.build(e, init, fin);
    std::vector<bool> accepting(b.trans.size(), false);
    accepting[fin] = true;
    return std::make_shared<Nfa>(std::move(alphabet), b.trans.size(), std::move(b.trans),
                                 std::move(b.eps), std::vector<Nfa::State>{init},
                                 std::move(accepting));
}

// ---------------------------------------------------------------------------
// ResidualLang

ResidualLang ResidualLang::initial(NfaRef base) {
    auto closed = base->epsilon_closure(base->initial());
    return ResidualLang(std::move(base), std::move(closed));
}

ResidualLang ResidualLang::step_index(std::size_t symbol) const {
    std::vector<Nfa::State> moved;
    for (Nfa::State s : current_)
        for (Nfa::State t : base_->targets(s, symbol))
            moved.push_back(t);
    return ResidualLang(base_, base_->epsilon_closure(moved));
}

ResidualLang ResidualLang::step(const std::string& symbol) const {
    return step_index(base_->alphabet().require(symbol));
}

bool ResidualLang::empty_language() const {
    for (Nfa::State s : current_)
        if (base_->is_productive(s))
            return false;
    return true;
}

bool ResidualLang::accepts_epsilon() const {
    for (Nfa::State s : current_)
        if (base_->is_accepting(s))
            return true;
    return false;
}

void ResidualLang::append_key(std::string& out) const {
    for (Nfa::State s : current_) {
        out += std::to_string(s);
        out += ',';
    }
}

bool accepts(const Nfa& n, const Word& w) {
    // Simulation requires a shared-ownership handle; wrap without copying.
    NfaRef alias(std::shared_ptr<const Nfa>(), &n);
    ResidualLang r = ResidualLang::initial(alias);
    for (const auto& a : w)
        r = r.step(a);
    return r.accepts_epsilon();
}

// ---------------------------------------------------------------------------
// DFA: subset construction, minimization, equality

bool Dfa::accepts(const Word& w) const {
    std::size_t q = initial;
    for (const auto& a : w)
        q = trans[q][alphabet->require(a)];
    return accepting[q];
}

std::string Dfa::dump() const {
    std::ostringstream os;
    os << "states " << num_states << "\n";
    os << "initial " << initial << "\n";
    os << "accepting";
    for (std::size_t s = 0; s < num_states; ++s)
        if (accepting[s])
            os << ' ' << s;
    os << "\n";
    for (std::size_t s = 0; s < num_states; ++s)
        for (std::size_t a = 0; a < alphabet->size(); ++a)
            os << "trans " << s << ' ' << alphabet->symbol(a) << ' ' << trans[s][a] << "\n";
    return os.str();
}

bool Dfa::operator==(const Dfa& other) const {
    return *alphabet == *other.alphabet && num_states == other.num_states &&
           initial == other.initial && trans == other.trans && accepting == other.accepting;
}

namespace {

Dfa subset_construction(const Nfa& nfa, std::vector<Nfa::State> start_closed,
                        bool prefix_accepting) {
    const std::size_t nsym = nfa.alphabet().size();
    std::map<std::vector<Nfa::State>, std::size_t> ids;
    std::vector<std::vector<Nfa::State>> subsets;

    auto intern = [&](std::vector<Nfa::State> set) {
        auto [it, inserted] = ids.emplace(std::move(set), subsets.size());
        if (inserted)
            subsets.push_back(it->first);
        return it->second;
    };

    Dfa d;
    d.alphabet = nfa.alphabet_ref();
    intern(std::move(start_closed));

    std::vector<std::vector<std::size_t>> trans;
    for (std::size_t q = 0; q < subsets.size(); ++q) {
        trans.emplace_back(nsym);
        for (std::size_t a = 0; a < nsym; ++a) {
            std::vector<Nfa::State> moved;
            for (Nfa::State s : subsets[q])
                for (Nfa::State t : nfa.targets(s, a))
                    moved.push_back(t);
            trans[q][a] = intern(nfa.epsilon_closure(moved));
        }
    }

    d.num_states = subsets.size();
    d.initial = 0;
    d.trans = std::move(trans);
    d.accepting.assign(d.num_states, false);
    for (std::size_t q = 0; q < d.num_states; ++q) {
        for (Nfa::State s : subsets[q]) {
            if (prefix_accepting ? nfa.is_productive(s) : nfa.is_accepting(s)) {
                d.accepting[q] = true;
                break;
            }
        }
    }
    return d;
}

}  // namespace

Dfa determinize(const Nfa& n) {
    return subset_construction(n, n.epsilon_closure(n.initial()), false);
}

Dfa determinize(const ResidualLang& r) {
    return subset_construction(*r.base(), r.current(), false);
}

Dfa prefix_language_dfa(const ResidualLang& r) {
    return minimize(subset_construction(*r.base(), r.current(), true));
}

Dfa minimize(const Dfa& d) {
    const std::size_t nsym = d.alphabet->size();

    // Drop unreachable states first.
    std::vector<std::size_t> reach_map(d.num_states, SIZE_MAX);
    std::vector<std::size_t> order;
    reach_map[d.initial] = 0;
    order.push_back(d.initial);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t a = 0; a < nsym; ++a) {
            std::size_t t = d.trans[order[i]][a];
            if (reach_map[t] == SIZE_MAX) {
                reach_map[t] = order.size();
                order.push_back(t);
            }
        }
    }

    std::size_t n = order.size();
    std::vector<std::vector<std::size_t>> trans(n, std::vector<std::size_t>(nsym));
    std::vector<bool> accepting(n);
    for (std::size_t q = 0; q < n; ++q) {
        accepting[q] = d.accepting[order[q]];
        for (std::size_t a = 0; a < nsym; ++a)
            trans[q][a] = reach_map[d.trans[order[q]][a]];
    }

    // Moore partition refinement.
    std::vector<std::size_t> cls(n);
    for (std::size_t q = 0; q < n; ++q)
        cls[q] = accepting[q] ? 1 : 0;
    std::size_t num_classes = 2;
    // All-accepting or all-rejecting automata start with a single class.
    {
        bool any0 = false, any1 = false;
        for (std::size_t q = 0; q < n; ++q)
            (cls[q] ? any1 : any0) = true;
        if (!any0 || !any1) {
            for (auto& c : cls)
                c = 0;
            num_classes = 1;
        }
    }
    while (true) {
        std::map<std::vector<std::size_t>, std::size_t> sig_ids;
        std::vector<std::size_t> next(n);
        for (std::size_t q = 0; q < n; ++q) {
            std::vector<std::size_t> sig;
            sig.reserve(nsym + 1);
            sig.push_back(cls[q]);
            for (std::size_t a = 0; a < nsym; ++a)
                sig.push_back(cls[trans[q][a]]);
            auto [it, inserted] = sig_ids.emplace(std::move(sig), sig_ids.size());
            next[q] = it->second;
        }
        if (sig_ids.size() == num_classes) {
            cls = std::move(next);
            break;
        }
        num_classes = sig_ids.size();
        cls = std::move(next);
    }

    // Quotient, then canonical BFS renumbering from the initial class.
    std::vector<std::size_t> rep(num_classes, SIZE_MAX);
    for (std::size_t q = 0; q < n; ++q)
        if (rep[cls[q]] == SIZE_MAX)
            rep[cls[q]] = q;

    std::vector<std::size_t> bfs_id(num_classes, SIZE_MAX);
    std::vector<std::size_t> bfs_order;
    bfs_id[cls[0]] = 0;
    bfs_order.push_back(cls[0]);
    for (std::size_t i = 0; i < bfs_order.size(); ++i) {
        std::size_t c = bfs_order[i];
        for (std::size_t a = 0; a < nsym; ++a) {
            std::size_t t = cls[trans[rep[c]][a]];
            if (bfs_id[t] == SIZE_MAX) {
                bfs_id[t] = bfs_order.size();
                bfs_order.push_back(t);
            }
        }
    }

    Dfa out;
    out.alphabet = d.alphabet;
    out.num_states = num_classes;
    out.initial = 0;
    out.trans.assign(num_classes, std::vector<std::size_t>(nsym));
    out.accepting.assign(num_classes, false);
    for (std::size_t i = 0; i < bfs_order.size(); ++i) {
        std::size_t c = bfs_order[i];
        out.accepting[i] = accepting[rep[c]];
        for (std::size_t a = 0; a < nsym; ++a)
            out.trans[i][a] = bfs_id[cls[trans[rep[c]][a]]];
    }
    return out;
}

bool lang_equal(const Dfa& a, const Dfa& b) {
    if (!(*a.alphabet == *b.alphabet))
        return false;
    return minimize(a) == minimize(b);
}

bool lang_equal(const ResidualLang& a, const ResidualLang& b) {
    return lang_equal(determinize(a), determinize(b));
}

bool lang_equal(const ResidualLang& a, const Dfa& b) { return lang_equal(determinize(a), b); }
bool lang_equal(const Dfa& a, const ResidualLang& b) { return lang_equal(a, determinize(b)); }

bool lang_equal(const ObsExpr& a, const ObsExpr& b, const AlphabetRef& alphabet) {
    return lang_equal(ResidualLang::initial(thompson(a, alphabet)),
                      ResidualLang::initial(thompson(b, alphabet)));
}

}  // namespace polmc
