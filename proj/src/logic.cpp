#include "polmc/logic.hpp"

#include <cctype>

#include "polmc/errors.hpp"

namespace polmc {

// defined in obsexpr.cpp
ObsExpr parse_obs_embedded(std::string_view text, std::size_t base_offset, const Alphabet& alphabet,
                           char closer, std::size_t& consumed);

// ---------------------------------------------------------------------------
// Node and constructors

struct Formula::Node {
    Kind kind;
    std::string name;  // Prop / K / KHat
    std::optional<ObsExpr> regex;
    std::optional<Formula> left, right;
};

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::prop_name() const { return node_->name; }
const std::string& Formula::agent() const { return node_->name; }
const ObsExpr& Formula::regex() const { return *node_->regex; }
const Formula& Formula::child() const { return *node_->left; }
const Formula& Formula::left() const { return *node_->left; }
const Formula& Formula::right() const { return *node_->right; }
const void* Formula::id() const { return node_.get(); }

Formula Formula::top() {
    static const Formula instance(std::make_shared<const Node>(
        Node{Kind::Top, "", std::nullopt, std::nullopt, std::nullopt}));
    return instance;
}
Formula Formula::bot() {
    static const Formula instance(std::make_shared<const Node>(
        Node{Kind::Bot, "", std::nullopt, std::nullopt, std::nullopt}));
    return instance;
}
Formula Formula::prop(std::string name) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Prop, std::move(name), std::nullopt, std::nullopt, std::nullopt}));
}
Formula Formula::negation(Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Not, "", std::nullopt, std::move(f), std::nullopt}));
}
Formula Formula::conj(Formula l, Formula r) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::And, "", std::nullopt, std::move(l), std::move(r)}));
}
Formula Formula::disj(Formula l, Formula r) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Or, "", std::nullopt, std::move(l), std::move(r)}));
}
Formula Formula::implies(Formula l, Formula r) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Imp, "", std::nullopt, std::move(l), std::move(r)}));
}
Formula Formula::knows(std::string agent, Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::K, std::move(agent), std::nullopt, std::move(f), std::nullopt}));
}
Formula Formula::considers(std::string agent, Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::KHat, std::move(agent), std::nullopt, std::move(f), std::nullopt}));
}
Formula Formula::box(ObsExpr re, Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Box, "", std::move(re), std::move(f), std::nullopt}));
}
Formula Formula::dia(ObsExpr re, Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Dia, "", std::move(re), std::move(f), std::nullopt}));
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.id() == b.id())
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bot:
            return true;
        case Formula::Kind::Prop:
            return a.prop_name() == b.prop_name();
        case Formula::Kind::Not:
            return structurally_equal(a.child(), b.child());
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Imp:
            return structurally_equal(a.left(), b.left()) && structurally_equal(a.right(), b.right());
        case Formula::Kind::K:
        case Formula::Kind::KHat:
            return a.agent() == b.agent() && structurally_equal(a.child(), b.child());
        case Formula::Kind::Box:
        case Formula::Kind::Dia:
            return structurally_equal(a.regex(), b.regex()) &&
                   structurally_equal(a.child(), b.child());
    }
    return false;
}

// ---------------------------------------------------------------------------
// Classification

namespace {

void scan_regexes(const Formula& f, bool& all_words, bool& all_star_free) {
    switch (f.kind()) {
        case Formula::Kind::Box:
        case Formula::Kind::Dia:
            all_words = all_words && is_word(f.regex());
            all_star_free = all_star_free && is_star_free(f.regex());
            scan_regexes(f.child(), all_words, all_star_free);
            return;
        case Formula::Kind::Not:
        case Formula::Kind::K:
        case Formula::Kind::KHat:
            scan_regexes(f.child(), all_words, all_star_free);
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Imp:
            scan_regexes(f.left(), all_words, all_star_free);
            scan_regexes(f.right(), all_words, all_star_free);
            return;
        default:
            return;
    }
}

bool existential_shape(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bot:
        case Formula::Kind::Prop:
            return true;
        case Formula::Kind::Not:
            return f.child().kind() == Formula::Kind::Prop;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            return existential_shape(f.left()) && existential_shape(f.right());
        case Formula::Kind::K:
        case Formula::Kind::KHat:
            return existential_shape(f.child());
        case Formula::Kind::Dia:
            return existential_shape(f.child());
        case Formula::Kind::Imp:
        case Formula::Kind::Box:
            return false;
    }
    return false;
}

}  // namespace

Fragment classify(const Formula& f) {
    Fragment out;
    bool words = true, star_free = true;
    scan_regexes(f, words, star_free);
    out.word = words;
    out.star_free = star_free;
    out.existential = existential_shape(f);
    out.star_free_existential = out.star_free && out.existential;
    out.existential_after_nnf = out.existential || existential_shape(to_nnf(f));
    return out;
}

// ---------------------------------------------------------------------------
// NNF

namespace {

Formula nnf_pos(const Formula& f);

Formula nnf_neg(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Top:
            return Formula::bot();
        case Formula::Kind::Bot:
            return Formula::top();
        case Formula::Kind::Prop:
            return Formula::negation(f);
        case Formula::Kind::Not:
            return nnf_pos(f.child());
        case Formula::Kind::And:
            return Formula::disj(nnf_neg(f.left()), nnf_neg(f.right()));
        case Formula::Kind::Or:
            return Formula::conj(nnf_neg(f.left()), nnf_neg(f.right()));
        case Formula::Kind::Imp:
            return Formula::conj(nnf_pos(f.left()), nnf_neg(f.right()));
        case Formula::Kind::K:
            return Formula::considers(f.agent(), nnf_neg(f.child()));
        case Formula::Kind::KHat:
            return Formula::knows(f.agent(), nnf_neg(f.child()));
        case Formula::Kind::Box:
            return Formula::dia(f.regex(), nnf_neg(f.child()));
        case Formula::Kind::Dia:
            return Formula::box(f.regex(), nnf_neg(f.child()));
    }
    return f;
}

Formula nnf_pos(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Top:
        case Formula::Kind::Bot:
        case Formula::Kind::Prop:
            return f;
        case Formula::Kind::Not:
            return nnf_neg(f.child());
        case Formula::Kind::And:
            return Formula::conj(nnf_pos(f.left()), nnf_pos(f.right()));
        case Formula::Kind::Or:
            return Formula::disj(nnf_pos(f.left()), nnf_pos(f.right()));
        case Formula::Kind::Imp:
            return Formula::disj(nnf_neg(f.left()), nnf_pos(f.right()));
        case Formula::Kind::K:
            return Formula::knows(f.agent(), nnf_pos(f.child()));
        case Formula::Kind::KHat:
            return Formula::considers(f.agent(), nnf_pos(f.child()));
        case Formula::Kind::Box:
            return Formula::box(f.regex(), nnf_pos(f.child()));
        case Formula::Kind::Dia:
            return Formula::dia(f.regex(), nnf_pos(f.child()));
    }
    return f;
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf_pos(f); }

// ---------------------------------------------------------------------------
// Parser

namespace {

bool fident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class FormulaParser {
public:
    FormulaParser(std::string_view text, const Alphabet& alphabet)
        : text_(text), alphabet_(alphabet) {}

    Formula parse_all() {
        Formula f = parse_imp();
        skip_ws();
        if (pos_ != text_.size())
            fail("end of formula");
        return f;
    }

private:
    Formula parse_imp() {
        Formula l = parse_or();
        skip_ws();
        if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>') {
            pos_ += 2;
            return Formula::implies(std::move(l), parse_imp());  // right associative
        }
        return l;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '|') {
                ++pos_;
                f = Formula::disj(std::move(f), parse_and());
            } else {
                return f;
            }
        }
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '&') {
                ++pos_;
                f = Formula::conj(std::move(f), parse_unary());
            } else {
                return f;
            }
        }
    }

    Formula parse_unary() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("a formula");
        char c = text_[pos_];
        if (c == '~') {
            ++pos_;
            return Formula::negation(parse_unary());
        }
        if (c == '[') {
            ++pos_;
            ObsExpr re = parse_embedded_regex(']');
            return Formula::box(std::move(re), parse_unary());
        }
        if (c == '<') {
            ++pos_;
            ObsExpr re = parse_embedded_regex('>');
            return Formula::dia(std::move(re), parse_unary());
        }
        if (c == '(') {
            ++pos_;
            Formula f = parse_imp();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')')
                fail("')'");
            ++pos_;
            return f;
        }
        if (fident_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && fident_char(text_[pos_]))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (name == "true")
                return Formula::top();
            if (name == "false")
                return Formula::bot();
            if (name.size() > 2 && name.rfind("K_", 0) == 0)
                return Formula::knows(name.substr(2), parse_unary());
            if (name.size() > 3 && name.rfind("Kh_", 0) == 0)
                return Formula::considers(name.substr(3), parse_unary());
            if (name == "K_" || name == "Kh_")
                throw ParseError(start, "expected an agent name after '" + name + "'");
            return Formula::prop(std::move(name));
        }
        fail("a formula");
        return Formula::top();  // unreachable
    }

    ObsExpr parse_embedded_regex(char closer) {
        std::size_t consumed = 0;
        ObsExpr re = parse_obs_embedded(text_.substr(pos_), pos_, alphabet_, closer, consumed);
        pos_ += consumed;
        ++pos_;  // the closer itself
        return re;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError(pos_, "expected " + expected);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    const Alphabet& alphabet_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Alphabet& alphabet) {
    return FormulaParser(text, alphabet).parse_all();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

// precedence: Imp 1, Or 2, And 3, unary 4, atoms 5
int fprec(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Imp:
            return 1;
        case Formula::Kind::Or:
            return 2;
        case Formula::Kind::And:
            return 3;
        case Formula::Kind::Not:
        case Formula::Kind::K:
        case Formula::Kind::KHat:
        case Formula::Kind::Box:
        case Formula::Kind::Dia:
            return 4;
        default:
            return 5;
    }
}

void print_rec(const Formula& f, int min_prec, std::string& out) {
    bool paren = fprec(f) < min_prec;
    if (paren)
        out += '(';
    switch (f.kind()) {
        case Formula::Kind::Top:
            out += "true";
            break;
        case Formula::Kind::Bot:
            out += "false";
            break;
        case Formula::Kind::Prop:
            out += f.prop_name();
            break;
        case Formula::Kind::Not:
            out += '~';
            print_rec(f.child(), 4, out);
            break;
        case Formula::Kind::And:
            print_rec(f.left(), 3, out);
            out += " & ";
            print_rec(f.right(), 4, out);
            break;
        case Formula::Kind::Or:
            print_rec(f.left(), 2, out);
            out += " | ";
            print_rec(f.right(), 3, out);
            break;
        case Formula::Kind::Imp:
            print_rec(f.left(), 2, out);  // right associative: parenthesize left Imp
            out += " -> ";
            print_rec(f.right(), 1, out);
            break;
        case Formula::Kind::K:
            out += "K_" + f.agent() + " ";
            print_rec(f.child(), 4, out);
            break;
        case Formula::Kind::KHat:
            out += "Kh_" + f.agent() + " ";
            print_rec(f.child(), 4, out);
            break;
        case Formula::Kind::Box:
            out += '[' + print_obs(f.regex()) + "] ";
            print_rec(f.child(), 4, out);
            break;
        case Formula::Kind::Dia:
            out += '<' + print_obs(f.regex()) + "> ";
            print_rec(f.child(), 4, out);
            break;
    }
    if (paren)
        out += ')';
}

}  // namespace

std::string print_formula(const Formula& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

}  // namespace polmc
