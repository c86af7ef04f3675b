#include "polmc/obsexpr.hpp"

#include <cctype>
#include <sstream>

namespace polmc {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty())
        throw std::invalid_argument("alphabet must be nonempty");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i].empty())
            throw std::invalid_argument("alphabet symbols must be nonempty identifiers");
        if (!index_.emplace(symbols_[i], i).second)
            throw std::invalid_argument("duplicate alphabet symbol: " + symbols_[i]);
    }
}

std::optional<std::size_t> Alphabet::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t Alphabet::require(std::string_view name) const {
    auto idx = index_of(name);
    if (!idx)
        throw UnknownSymbolError(std::string(name));
    return *idx;
}

std::string word_to_string(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            out += ' ';
        out += w[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Node and constructors

struct ObsExpr::Node {
    Kind kind;
    std::string symbol;           // Letter only
    std::optional<ObsExpr> left;  // Concat/Union left, Star inner
    std::optional<ObsExpr> right;
};

ObsExpr::Kind ObsExpr::kind() const { return node_->kind; }
const std::string& ObsExpr::symbol() const { return node_->symbol; }
const ObsExpr& ObsExpr::left() const { return *node_->left; }
const ObsExpr& ObsExpr::right() const { return *node_->right; }
const ObsExpr& ObsExpr::inner() const { return *node_->left; }
const void* ObsExpr::id() const { return node_.get(); }

ObsExpr ObsExpr::empty() {
    static const ObsExpr instance(
        std::make_shared<const Node>(Node{Kind::Empty, "", std::nullopt, std::nullopt}));
    return instance;
}

ObsExpr ObsExpr::eps() {
    static const ObsExpr instance(
        std::make_shared<const Node>(Node{Kind::Eps, "", std::nullopt, std::nullopt}));
    return instance;
}

ObsExpr ObsExpr::letter(std::string symbol) {
    return ObsExpr(std::make_shared<const Node>(
        Node{Kind::Letter, std::move(symbol), std::nullopt, std::nullopt}));
}

ObsExpr ObsExpr::concat(ObsExpr left, ObsExpr right) {
    return ObsExpr(
        std::make_shared<const Node>(Node{Kind::Concat, "", std::move(left), std::move(right)}));
}

ObsExpr ObsExpr::alt(ObsExpr left, ObsExpr right) {
    return ObsExpr(
        std::make_shared<const Node>(Node{Kind::Union, "", std::move(left), std::move(right)}));
}

ObsExpr ObsExpr::star(ObsExpr inner) {
    return ObsExpr(
        std::make_shared<const Node>(Node{Kind::Star, "", std::move(inner), std::nullopt}));
}

bool structurally_equal(const ObsExpr& a, const ObsExpr& b) {
    if (a.id() == b.id())
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
        case ObsExpr::Kind::Empty:
        case ObsExpr::Kind::Eps:
            return true;
        case ObsExpr::Kind::Letter:
            return a.symbol() == b.symbol();
        case ObsExpr::Kind::Concat:
        case ObsExpr::Kind::Union:
            return structurally_equal(a.left(), b.left()) && structurally_equal(a.right(), b.right());
        case ObsExpr::Kind::Star:
            return structurally_equal(a.inner(), b.inner());
    }
    return false;
}

// ---------------------------------------------------------------------------
// Structural measures

std::size_t size(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Empty:
        case ObsExpr::Kind::Eps:
            return 0;
        case ObsExpr::Kind::Letter:
            return 1;
        case ObsExpr::Kind::Concat:
            return size(e.left()) + size(e.right());
        case ObsExpr::Kind::Union:
            return size(e.left()) + size(e.right()) + 1;
        case ObsExpr::Kind::Star:
            return size(e.inner()) + 1;
    }
    return 0;
}

bool nullable(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Empty:
        case ObsExpr::Kind::Letter:
            return false;
        case ObsExpr::Kind::Eps:
        case ObsExpr::Kind::Star:
            return true;
        case ObsExpr::Kind::Concat:
            return nullable(e.left()) && nullable(e.right());
        case ObsExpr::Kind::Union:
            return nullable(e.left()) || nullable(e.right());
    }
    return false;
}

bool language_empty(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Empty:
            return true;
        case ObsExpr::Kind::Eps:
        case ObsExpr::Kind::Letter:
        case ObsExpr::Kind::Star:
            return false;
        case ObsExpr::Kind::Concat:
            return language_empty(e.left()) || language_empty(e.right());
        case ObsExpr::Kind::Union:
            return language_empty(e.left()) && language_empty(e.right());
    }
    return false;
}

// ---------------------------------------------------------------------------
// Residues

ObsExpr simplified_concat(ObsExpr l, ObsExpr r) {
    if (l.kind() == ObsExpr::Kind::Empty || r.kind() == ObsExpr::Kind::Empty)
        return ObsExpr::empty();
    if (l.kind() == ObsExpr::Kind::Eps)
        return r;
    if (r.kind() == ObsExpr::Kind::Eps)
        return l;
    return ObsExpr::concat(std::move(l), std::move(r));
}

ObsExpr simplified_union(ObsExpr l, ObsExpr r) {
    if (l.kind() == ObsExpr::Kind::Empty)
        return r;
    if (r.kind() == ObsExpr::Kind::Empty)
        return l;
    return ObsExpr::alt(std::move(l), std::move(r));
}

ObsExpr simplified_star(ObsExpr inner) {
    if (inner.kind() == ObsExpr::Kind::Empty || inner.kind() == ObsExpr::Kind::Eps)
        return ObsExpr::eps();
    return ObsExpr::star(std::move(inner));
}

namespace {

ObsExpr residue_letter_unchecked(const ObsExpr& e, const std::string& a) {
    switch (e.kind()) {
        case ObsExpr::Kind::Empty:
        case ObsExpr::Kind::Eps:
            return ObsExpr::empty();
        case ObsExpr::Kind::Letter:
            return e.symbol() == a ? ObsExpr::eps() : ObsExpr::empty();
        case ObsExpr::Kind::Union:
            return simplified_union(residue_letter_unchecked(e.left(), a),
                                    residue_letter_unchecked(e.right(), a));
        case ObsExpr::Kind::Concat: {
            ObsExpr via_left = simplified_concat(residue_letter_unchecked(e.left(), a), e.right());
            if (!nullable(e.left()))
                return via_left;
            return simplified_union(std::move(via_left), residue_letter_unchecked(e.right(), a));
        }
        case ObsExpr::Kind::Star:
            return simplified_concat(residue_letter_unchecked(e.inner(), a), e);
    }
    return ObsExpr::empty();
}

}  // namespace

ObsExpr residue_letter(const ObsExpr& e, const std::string& a, const Alphabet& alphabet) {
    alphabet.require(a);
    return residue_letter_unchecked(e, a);
}

ObsExpr residue_word(const ObsExpr& e, const Word& w, const Alphabet& alphabet) {
    ObsExpr cur = e;
    for (const auto& a : w)
        cur = residue_letter(cur, a, alphabet);
    return cur;
}

// ---------------------------------------------------------------------------
// Fragments

bool is_star_free(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Star:
            return false;
        case ObsExpr::Kind::Concat:
        case ObsExpr::Kind::Union:
            return is_star_free(e.left()) && is_star_free(e.right());
        default:
            return true;
    }
}

bool is_word(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Eps:
        case ObsExpr::Kind::Letter:
            return true;
        case ObsExpr::Kind::Concat:
            return is_word(e.left()) && is_word(e.right());
        default:
            return false;
    }
}

namespace {
void collect_word(const ObsExpr& e, Word& out) {
    switch (e.kind()) {
        case ObsExpr::Kind::Eps:
            return;
        case ObsExpr::Kind::Letter:
            out.push_back(e.symbol());
            return;
        case ObsExpr::Kind::Concat:
            collect_word(e.left(), out);
            collect_word(e.right(), out);
            return;
        default:
            throw std::logic_error("word_of: expression is not a word");
    }
}
}  // namespace

Word word_of(const ObsExpr& e) {
    Word out;
    collect_word(e, out);
    return out;
}

std::optional<std::size_t> max_word_length(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Empty:
            return std::nullopt;
        case ObsExpr::Kind::Eps:
            return 0;
        case ObsExpr::Kind::Letter:
            return 1;
        case ObsExpr::Kind::Concat: {
            auto l = max_word_length(e.left());
            auto r = max_word_length(e.right());
            if (!l || !r)
                return std::nullopt;
            return *l + *r;
        }
        case ObsExpr::Kind::Union: {
            auto l = max_word_length(e.left());
            auto r = max_word_length(e.right());
            if (!l)
                return r;
            if (!r)
                return l;
            return std::max(*l, *r);
        }
        case ObsExpr::Kind::Star:
            throw std::logic_error("max_word_length: expression contains a star");
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class ObsParser {
public:
    ObsParser(std::string_view text, std::size_t base_offset, const Alphabet& alphabet)
        : text_(text), base_(base_offset), alphabet_(alphabet) {}

    ObsExpr parse_all() {
        ObsExpr e = parse_union();
        skip_ws();
        if (pos_ != text_.size())
            fail("end of expression");
        return e;
    }

    // Parses a regex that ends at `closer` (used inside [..] / <..> of the
    // formula grammar). Leaves pos_ on the closer.
    ObsExpr parse_until(char closer) {
        ObsExpr e = parse_union();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != closer)
            fail(std::string("'") + closer + "'");
        return e;
    }

    std::size_t consumed() const { return pos_; }

private:
    ObsExpr parse_union() {
        ObsExpr e = parse_concat();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '+') {
                ++pos_;
                e = ObsExpr::alt(std::move(e), parse_concat());
            } else {
                return e;
            }
        }
    }

    ObsExpr parse_concat() {
        ObsExpr e = parse_postfix();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '.') {
                ++pos_;
                e = ObsExpr::concat(std::move(e), parse_postfix());
            } else if (pos_ < text_.size() &&
                       (text_[pos_] == '(' || ident_char(text_[pos_]))) {
                // juxtaposition
                e = ObsExpr::concat(std::move(e), parse_postfix());
            } else {
                return e;
            }
        }
    }

    ObsExpr parse_postfix() {
        ObsExpr e = parse_atom();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                ++pos_;
                e = ObsExpr::star(std::move(e));
            } else if (pos_ < text_.size() && text_[pos_] == '^') {
                ++pos_;
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == '+') {
                    ++pos_;
                    // e^+ = e·e*
                    e = ObsExpr::concat(e, ObsExpr::star(e));
                } else if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    std::size_t k = 0;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        k = k * 10 + static_cast<std::size_t>(text_[pos_++] - '0');
                    if (k == 0) {
                        e = ObsExpr::eps();
                    } else {
                        ObsExpr power = e;
                        for (std::size_t i = 1; i < k; ++i)
                            power = ObsExpr::concat(std::move(power), e);
                        e = std::move(power);
                    }
                } else {
                    fail("'+' or a number after '^'");
                }
            } else {
                return e;
            }
        }
    }

    ObsExpr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("a letter, 'eps', 'empty', or '('");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ObsExpr e = parse_union();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')')
                fail("')'");
            ++pos_;
            return e;
        }
        if (ident_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_]))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (name == "eps")
                return ObsExpr::eps();
            if (name == "empty")
                return ObsExpr::empty();
            if (!alphabet_.contains(name))
                throw ParseError(base_ + start, "a symbol of the alphabet (got '" + name + "')");
            return ObsExpr::letter(std::move(name));
        }
        fail("a letter, 'eps', 'empty', or '('");
        return ObsExpr::empty();  // unreachable
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError(base_ + pos_, "expected " + expected);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t base_;
    const Alphabet& alphabet_;
};

}  // namespace

ObsExpr parse_obs(std::string_view text, const Alphabet& alphabet) {
    return ObsParser(text, 0, alphabet).parse_all();
}

// Internal hook for the formula parser: parse a regex embedded at
// `base_offset` within a larger input, stopping at `closer`.
ObsExpr parse_obs_embedded(std::string_view text, std::size_t base_offset, const Alphabet& alphabet,
                           char closer, std::size_t& consumed) {
    ObsParser p(text, base_offset, alphabet);
    ObsExpr e = p.parse_until(closer);
    consumed = p.consumed();
    return e;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

// precedence levels: union 1, concat 2, postfix 3, atom 4
int precedence(const ObsExpr& e) {
    switch (e.kind()) {
        case ObsExpr::Kind::Union:
            return 1;
        case ObsExpr::Kind::Concat:
            return 2;
        case ObsExpr::Kind::Star:
            return 3;
        default:
            return 4;
    }
}

void print_rec(const ObsExpr& e, int min_prec, std::string& out) {
    bool paren = precedence(e) < min_prec;
    if (paren)
        out += '(';
    switch (e.kind()) {
        case ObsExpr::Kind::Empty:
            out += "empty";
            break;
        case ObsExpr::Kind::Eps:
            out += "eps";
            break;
        case ObsExpr::Kind::Letter:
            out += e.symbol();
            break;
        case ObsExpr::Kind::Union:
            print_rec(e.left(), 1, out);
            out += " + ";
            print_rec(e.right(), 2, out);  // right operand parenthesized if itself a union
            break;
        case ObsExpr::Kind::Concat:
            print_rec(e.left(), 2, out);
            out += ' ';
            print_rec(e.right(), 3, out);
            break;
        case ObsExpr::Kind::Star:
            print_rec(e.inner(), 4, out);
            out += '*';
            break;
    }
    if (paren)
        out += ')';
}

}  // namespace

std::string print_obs(const ObsExpr& e) {
    std::string out;
    print_rec(e, 0, out);
    return out;
}

}  // namespace polmc
