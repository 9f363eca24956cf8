#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wb/error.hpp"

// Relational first-order syntax: signatures, formulas, parsing, printing,
// and capture-avoiding manipulation. All values are immutable after
// construction; subtrees are shared freely.

namespace wb {

// The marked scheme predicate. Always unary, never a member of a Signature.
inline const std::string kSchemePredicate = "P";

using Variable = std::string;

inline bool is_valid_variable(const std::string& s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

inline bool is_valid_relation_name(const std::string& s) {
    if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

// A finite set of relation symbols with arities. Equality is a logical
// symbol and is never declared here; "P" is reserved for schemes.
class Signature {
public:
    Signature() = default;

    explicit Signature(std::map<std::string, int> relations)
        : relations_(std::move(relations)) {
        for (const auto& [name, arity] : relations_) {
            if (!is_valid_relation_name(name))
                throw Error(ErrorKind::BadInput, "bad relation name '" + name + "'");
            if (name == kSchemePredicate || name == "=")
                throw Error(ErrorKind::BadInput, "relation name '" + name + "' is reserved");
            if (arity < 1)
                throw Error(ErrorKind::BadInput, "relation '" + name + "' has arity < 1");
        }
    }

    const std::map<std::string, int>& relations() const { return relations_; }

    bool has(const std::string& name) const { return relations_.count(name) != 0; }

    int arity(const std::string& name) const {
        auto it = relations_.find(name);
        if (it == relations_.end())
            throw Error(ErrorKind::UnknownSymbol, "relation '" + name + "' not in signature");
        return it->second;
    }

    bool disjoint_from(const Signature& other) const {
        for (const auto& [name, _] : relations_)
            if (other.has(name)) return false;
        return true;
    }

    // Union of two signatures; clashing names must agree on arity.
    Signature merged(const Signature& other) const {
        std::map<std::string, int> rels = relations_;
        for (const auto& [name, arity] : other.relations_) {
            auto [it, inserted] = rels.emplace(name, arity);
            if (!inserted && it->second != arity)
                throw Error(ErrorKind::SignatureClash,
                            "relation '" + name + "' declared with arities " +
                                std::to_string(it->second) + " and " + std::to_string(arity));
        }
        return Signature(std::move(rels));
    }

    bool operator==(const Signature& other) const { return relations_ == other.relations_; }

private:
    std::map<std::string, int> relations_;
};

enum class FormulaKind {
    True,
    False,
    Atom,
    Eq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
};

class Formula;

namespace detail {
struct FormulaNode;
using NodePtr = std::shared_ptr<const FormulaNode>;
} // namespace detail

class Formula {
public:
    Formula() = default;  // empty handle; only produced by default construction

    FormulaKind kind() const;
    const std::string& symbol() const;             // Atom
    const std::vector<Variable>& args() const;     // Atom
    const Variable& eq_left() const;               // Eq
    const Variable& eq_right() const;              // Eq
    const Variable& bound_var() const;             // Forall / Exists
    const Formula& child() const;                  // Not / quantifier body
    const Formula& left() const;                   // binary
    const Formula& right() const;                  // binary

    bool valid() const { return node_ != nullptr; }
    bool is_quantifier() const {
        return kind() == FormulaKind::Forall || kind() == FormulaKind::Exists;
    }
    bool is_binary() const {
        auto k = kind();
        return k == FormulaKind::And || k == FormulaKind::Or || k == FormulaKind::Implies ||
               k == FormulaKind::Iff;
    }

    // Structural equality (variable names compared literally).
    bool operator==(const Formula& other) const;

private:
    explicit Formula(detail::NodePtr node) : node_(std::move(node)) {}
    detail::NodePtr node_;

    friend Formula truth();
    friend Formula falsity();
    friend Formula atom(std::string, std::vector<Variable>);
    friend Formula eq(Variable, Variable);
    friend Formula lnot(Formula);
    friend Formula land(Formula, Formula);
    friend Formula lor(Formula, Formula);
    friend Formula implies(Formula, Formula);
    friend Formula iff(Formula, Formula);
    friend Formula forall(Variable, Formula);
    friend Formula exists(Variable, Formula);
};

namespace detail {
struct FormulaNode {
    FormulaKind kind;
    std::string symbol;           // Atom relation name
    std::vector<Variable> vars;   // Atom args; Eq pair; quantifier var at [0]
    Formula first;                // Not/quantifier child, binary left
    Formula second;               // binary right
};
} // namespace detail

inline Formula truth() {
    static const auto node =
        std::make_shared<const detail::FormulaNode>(detail::FormulaNode{FormulaKind::True, {}, {}, {}, {}});
    return Formula(node);
}

inline Formula falsity() {
    static const auto node =
        std::make_shared<const detail::FormulaNode>(detail::FormulaNode{FormulaKind::False, {}, {}, {}, {}});
    return Formula(node);
}

inline Formula atom(std::string symbol, std::vector<Variable> args) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Atom, std::move(symbol), std::move(args), {}, {}}));
}

inline Formula eq(Variable a, Variable b) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Eq, {}, {std::move(a), std::move(b)}, {}, {}}));
}

inline Formula lnot(Formula f) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Not, {}, {}, std::move(f), {}}));
}

inline Formula land(Formula l, Formula r) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::And, {}, {}, std::move(l), std::move(r)}));
}

inline Formula lor(Formula l, Formula r) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Or, {}, {}, std::move(l), std::move(r)}));
}

inline Formula implies(Formula l, Formula r) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Implies, {}, {}, std::move(l), std::move(r)}));
}

inline Formula iff(Formula l, Formula r) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Iff, {}, {}, std::move(l), std::move(r)}));
}

inline Formula forall(Variable v, Formula body) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Forall, {}, {std::move(v)}, std::move(body), {}}));
}

inline Formula exists(Variable v, Formula body) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{FormulaKind::Exists, {}, {std::move(v)}, std::move(body), {}}));
}

inline FormulaKind Formula::kind() const { return node_->kind; }
inline const std::string& Formula::symbol() const { return node_->symbol; }
inline const std::vector<Variable>& Formula::args() const { return node_->vars; }
inline const Variable& Formula::eq_left() const { return node_->vars[0]; }
inline const Variable& Formula::eq_right() const { return node_->vars[1]; }
inline const Variable& Formula::bound_var() const { return node_->vars[0]; }
inline const Formula& Formula::child() const { return node_->first; }
inline const Formula& Formula::left() const { return node_->first; }
inline const Formula& Formula::right() const { return node_->second; }

inline bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    if (node_->kind != other.node_->kind) return false;
    if (node_->symbol != other.node_->symbol) return false;
    if (node_->vars != other.node_->vars) return false;
    switch (node_->kind) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
        case FormulaKind::Eq:
            return true;
        case FormulaKind::Not:
        case FormulaKind::Forall:
        case FormulaKind::Exists:
            return node_->first == other.node_->first;
        default:
            return node_->first == other.node_->first && node_->second == other.node_->second;
    }
}

// ---------------------------------------------------------------------------
// Printing.
//
// Output is fully parenthesized at binary connectives, so reparsing yields
// the identical tree. Quantifier bodies that are equations or binary get a
// parenthesis; atoms and nested quantifiers do not.
// ---------------------------------------------------------------------------

std::string print(const Formula& f);

namespace detail {

inline std::string print_operand(const Formula& f) {
    // Binary connectives cannot take a bare quantifier operand in the grammar.
    if (f.is_quantifier()) return "(" + print(f) + ")";
    return print(f);
}

inline std::string print_negand(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Eq:
        case FormulaKind::Forall:
        case FormulaKind::Exists:
            return "(" + print(f) + ")";
        default:
            return print(f);  // binaries carry their own parentheses
    }
}

inline std::string print_quant_body(const Formula& f) {
    if (f.kind() == FormulaKind::Eq) return "(" + print(f) + ")";
    return print(f);
}

} // namespace detail

inline std::string print(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True: return "true";
        case FormulaKind::False: return "false";
        case FormulaKind::Atom: {
            std::string out = f.symbol() + "(";
            for (std::size_t i = 0; i < f.args().size(); ++i) {
                if (i) out += ",";
                out += f.args()[i];
            }
            return out + ")";
        }
        case FormulaKind::Eq: return f.eq_left() + " = " + f.eq_right();
        case FormulaKind::Not: return "~" + detail::print_negand(f.child());
        case FormulaKind::And:
            return "(" + detail::print_operand(f.left()) + " & " + detail::print_operand(f.right()) + ")";
        case FormulaKind::Or:
            return "(" + detail::print_operand(f.left()) + " | " + detail::print_operand(f.right()) + ")";
        case FormulaKind::Implies:
            return "(" + detail::print_operand(f.left()) + " -> " + detail::print_operand(f.right()) + ")";
        case FormulaKind::Iff:
            return "(" + detail::print_operand(f.left()) + " <-> " + detail::print_operand(f.right()) + ")";
        case FormulaKind::Forall:
            return "all " + f.bound_var() + ". " + detail::print_quant_body(f.child());
        case FormulaKind::Exists:
            return "ex " + f.bound_var() + ". " + detail::print_quant_body(f.child());
    }
    return {};
}

// ---------------------------------------------------------------------------
// Parsing.
//
//   formula := "all" var "." formula | "ex" var "." formula | iff
//   iff     := imp ("<->" imp)*
//   imp     := or ("->" formula)?        (right-associative)
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := "~" unary | atom
//   atom    := Name "(" var ("," var)* ")" | var "=" var | "(" formula ")"
//            | "true" | "false"
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Type { Name, Var, All, Ex, True, False, LParen, RParen, Comma, Dot,
                      Eq, Not, And, Or, Implies, Iff, End };
    Type type;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        std::size_t start = i_ + 1;  // positions reported 1-based
        if (i_ >= text_.size()) {
            tok_ = {Token::Type::End, "", start};
            return;
        }
        char c = text_[i_];
        auto word = [&]() {
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                ++j;
            std::string w = text_.substr(i_, j - i_);
            i_ = j;
            return w;
        };
        if (std::islower(static_cast<unsigned char>(c))) {
            std::string w = word();
            if (w == "all") tok_ = {Token::Type::All, w, start};
            else if (w == "ex") tok_ = {Token::Type::Ex, w, start};
            else if (w == "true") tok_ = {Token::Type::True, w, start};
            else if (w == "false") tok_ = {Token::Type::False, w, start};
            else tok_ = {Token::Type::Var, w, start};
            return;
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
            tok_ = {Token::Type::Name, word(), start};
            return;
        }
        switch (c) {
            case '(': tok_ = {Token::Type::LParen, "(", start}; ++i_; return;
            case ')': tok_ = {Token::Type::RParen, ")", start}; ++i_; return;
            case ',': tok_ = {Token::Type::Comma, ",", start}; ++i_; return;
            case '.': tok_ = {Token::Type::Dot, ".", start}; ++i_; return;
            case '=': tok_ = {Token::Type::Eq, "=", start}; ++i_; return;
            case '~': tok_ = {Token::Type::Not, "~", start}; ++i_; return;
            case '&': tok_ = {Token::Type::And, "&", start}; ++i_; return;
            case '|': tok_ = {Token::Type::Or, "|", start}; ++i_; return;
            case '-':
                if (i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
                    tok_ = {Token::Type::Implies, "->", start};
                    i_ += 2;
                    return;
                }
                break;
            case '<':
                if (i_ + 2 < text_.size() && text_[i_ + 1] == '-' && text_[i_ + 2] == '>') {
                    tok_ = {Token::Type::Iff, "<->", start};
                    i_ += 3;
                    return;
                }
                break;
            default: break;
        }
        throw Error(ErrorKind::SyntaxError, "unexpected character '" + std::string(1, c) +
                                                "' at position " + std::to_string(start));
    }

    const std::string& text_;
    std::size_t i_ = 0;
    Token tok_{Token::Type::End, "", 0};
};

class Parser {
public:
    Parser(const std::string& text, const Signature& sig, bool allow_p)
        : lex_(text), sig_(sig), allow_p_(allow_p) {}

    Formula parse_all() {
        Formula f = formula();
        expect(Token::Type::End, "end of input");
        return f;
    }

private:
    Formula formula() {
        if (lex_.peek().type == Token::Type::All || lex_.peek().type == Token::Type::Ex) {
            bool universal = lex_.take().type == Token::Type::All;
            Token v = expect(Token::Type::Var, "variable");
            expect(Token::Type::Dot, "'.'");
            Formula body = formula();
            return universal ? forall(v.text, std::move(body)) : exists(v.text, std::move(body));
        }
        return iff_level();
    }

    Formula iff_level() {
        Formula f = imp_level();
        while (lex_.peek().type == Token::Type::Iff) {
            lex_.take();
            f = iff(std::move(f), imp_level());
        }
        return f;
    }

    Formula imp_level() {
        Formula f = or_level();
        if (lex_.peek().type == Token::Type::Implies) {
            lex_.take();
            // the consequent may open a quantifier whose scope extends right
            return implies(std::move(f), formula());
        }
        return f;
    }

    Formula or_level() {
        Formula f = and_level();
        while (lex_.peek().type == Token::Type::Or) {
            lex_.take();
            f = lor(std::move(f), and_level());
        }
        return f;
    }

    Formula and_level() {
        Formula f = unary();
        while (lex_.peek().type == Token::Type::And) {
            lex_.take();
            f = land(std::move(f), unary());
        }
        return f;
    }

    Formula unary() {
        if (lex_.peek().type == Token::Type::Not) {
            lex_.take();
            return lnot(unary());
        }
        return atom_level();
    }

    Formula atom_level() {
        const Token t = lex_.take();
        switch (t.type) {
            case Token::Type::True: return truth();
            case Token::Type::False: return falsity();
            case Token::Type::LParen: {
                Formula f = formula();
                expect(Token::Type::RParen, "')'");
                return f;
            }
            case Token::Type::Name: {
                expect(Token::Type::LParen, "'('");
                std::vector<Variable> args;
                args.push_back(expect(Token::Type::Var, "variable").text);
                while (lex_.peek().type == Token::Type::Comma) {
                    lex_.take();
                    args.push_back(expect(Token::Type::Var, "variable").text);
                }
                expect(Token::Type::RParen, "')'");
                int arity;
                if (t.text == kSchemePredicate) {
                    if (!allow_p_)
                        throw Error(ErrorKind::UnknownSymbol,
                                    "scheme predicate 'P' not allowed here (position " +
                                        std::to_string(t.pos) + ")");
                    arity = 1;
                } else {
                    if (!sig_.has(t.text))
                        throw Error(ErrorKind::UnknownSymbol,
                                    "relation '" + t.text + "' not in signature (position " +
                                        std::to_string(t.pos) + ")");
                    arity = sig_.arity(t.text);
                }
                if (static_cast<int>(args.size()) != arity)
                    throw Error(ErrorKind::ArityMismatch,
                                "relation '" + t.text + "' expects " + std::to_string(arity) +
                                    " arguments, got " + std::to_string(args.size()) +
                                    " (position " + std::to_string(t.pos) + ")");
                return atom(t.text, std::move(args));
            }
            case Token::Type::Var: {
                expect(Token::Type::Eq, "'='");
                Token rhs = expect(Token::Type::Var, "variable");
                return eq(t.text, rhs.text);
            }
            default:
                throw Error(ErrorKind::SyntaxError,
                            "expected formula at position " + std::to_string(t.pos) +
                                ", found '" + (t.text.empty() ? "end" : t.text) + "'");
        }
    }

    Token expect(Token::Type type, const std::string& what) {
        Token t = lex_.take();
        if (t.type != type)
            throw Error(ErrorKind::SyntaxError,
                        "expected " + what + " at position " + std::to_string(t.pos) +
                            ", found '" + (t.text.empty() ? "end" : t.text) + "'");
        return t;
    }

    Lexer lex_;
    const Signature& sig_;
    bool allow_p_;
};

} // namespace detail

inline Formula parse(const std::string& text, const Signature& sig, bool allow_p = false) {
    return detail::Parser(text, sig, allow_p).parse_all();
}

// ---------------------------------------------------------------------------
// Free variables, substitution, closure, alpha-equality.
// ---------------------------------------------------------------------------

namespace detail {

inline void free_vars_into(const Formula& f, std::set<Variable>& bound,
                           std::vector<Variable>& out, std::set<Variable>& seen) {
    auto add = [&](const Variable& v) {
        if (!bound.count(v) && seen.insert(v).second) out.push_back(v);
    };
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return;
        case FormulaKind::Atom:
            for (const auto& v : f.args()) add(v);
            return;
        case FormulaKind::Eq:
            add(f.eq_left());
            add(f.eq_right());
            return;
        case FormulaKind::Not:
            free_vars_into(f.child(), bound, out, seen);
            return;
        case FormulaKind::Forall:
        case FormulaKind::Exists: {
            bool inserted = bound.insert(f.bound_var()).second;
            free_vars_into(f.child(), bound, out, seen);
            if (inserted) bound.erase(f.bound_var());
            return;
        }
        default:
            free_vars_into(f.left(), bound, out, seen);
            free_vars_into(f.right(), bound, out, seen);
            return;
    }
}

} // namespace detail

// Free variables in first-occurrence order.
inline std::vector<Variable> free_vars(const Formula& f) {
    std::vector<Variable> out;
    std::set<Variable> bound, seen;
    detail::free_vars_into(f, bound, out, seen);
    return out;
}

inline bool is_free_in(const Variable& v, const Formula& f) {
    auto fv = free_vars(f);
    return std::find(fv.begin(), fv.end(), v) != fv.end();
}

inline bool is_closed(const Formula& f) { return free_vars(f).empty(); }

inline bool mentions_symbol(const Formula& f, const std::string& symbol) {
    switch (f.kind()) {
        case FormulaKind::Atom: return f.symbol() == symbol;
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Eq:
            return false;
        case FormulaKind::Not:
        case FormulaKind::Forall:
        case FormulaKind::Exists:
            return mentions_symbol(f.child(), symbol);
        default:
            return mentions_symbol(f.left(), symbol) || mentions_symbol(f.right(), symbol);
    }
}

inline std::vector<std::string> symbols_of(const Formula& f) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto rec = [&](auto&& self, const Formula& g) -> void {
        switch (g.kind()) {
            case FormulaKind::Atom:
                if (seen.insert(g.symbol()).second) out.push_back(g.symbol());
                return;
            case FormulaKind::True:
            case FormulaKind::False:
            case FormulaKind::Eq:
                return;
            case FormulaKind::Not:
            case FormulaKind::Forall:
            case FormulaKind::Exists:
                self(self, g.child());
                return;
            default:
                self(self, g.left());
                self(self, g.right());
                return;
        }
    };
    rec(rec, f);
    return out;
}

// Checks that every atom of f is declared in sig with the right arity
// (P admitted unarily when allow_p).
inline void check_well_formed(const Formula& f, const Signature& sig, bool allow_p = false) {
    auto rec = [&](auto&& self, const Formula& g) -> void {
        switch (g.kind()) {
            case FormulaKind::Atom: {
                int arity;
                if (g.symbol() == kSchemePredicate) {
                    if (!allow_p)
                        throw Error(ErrorKind::UnknownSymbol, "'P' not allowed in this formula");
                    arity = 1;
                } else {
                    arity = sig.arity(g.symbol());
                }
                if (static_cast<int>(g.args().size()) != arity)
                    throw Error(ErrorKind::ArityMismatch,
                                "'" + g.symbol() + "' used with " + std::to_string(g.args().size()) +
                                    " arguments, arity is " + std::to_string(arity));
                return;
            }
            case FormulaKind::True:
            case FormulaKind::False:
            case FormulaKind::Eq:
                return;
            case FormulaKind::Not:
            case FormulaKind::Forall:
            case FormulaKind::Exists:
                self(self, g.child());
                return;
            default:
                self(self, g.left());
                self(self, g.right());
                return;
        }
    };
    rec(rec, f);
}

// Deterministic fresh names: clashing name plus the first unused numeric
// suffix ("y" -> "y0", "y1", ...).
inline Variable fresh_variable(const Variable& base, const std::set<Variable>& avoid) {
    for (int i = 0;; ++i) {
        Variable candidate = base + std::to_string(i);
        if (!avoid.count(candidate)) return candidate;
    }
}

namespace detail {

inline void all_variables_into(const Formula& f, std::set<Variable>& out) {
    switch (f.kind()) {
        case FormulaKind::Atom:
            out.insert(f.args().begin(), f.args().end());
            return;
        case FormulaKind::Eq:
            out.insert(f.eq_left());
            out.insert(f.eq_right());
            return;
        case FormulaKind::True:
        case FormulaKind::False:
            return;
        case FormulaKind::Not:
            all_variables_into(f.child(), out);
            return;
        case FormulaKind::Forall:
        case FormulaKind::Exists:
            out.insert(f.bound_var());
            all_variables_into(f.child(), out);
            return;
        default:
            all_variables_into(f.left(), out);
            all_variables_into(f.right(), out);
            return;
    }
}

} // namespace detail

inline std::set<Variable> all_variables(const Formula& f) {
    std::set<Variable> out;
    detail::all_variables_into(f, out);
    return out;
}

// Simultaneous capture-avoiding renaming of free variables.
inline Formula rename_free(const Formula& f, const std::map<Variable, Variable>& subst) {
    if (subst.empty()) return f;
    auto lookup = [&](const Variable& v) {
        auto it = subst.find(v);
        return it == subst.end() ? v : it->second;
    };
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return f;
        case FormulaKind::Atom: {
            std::vector<Variable> args;
            args.reserve(f.args().size());
            for (const auto& v : f.args()) args.push_back(lookup(v));
            return atom(f.symbol(), std::move(args));
        }
        case FormulaKind::Eq:
            return eq(lookup(f.eq_left()), lookup(f.eq_right()));
        case FormulaKind::Not:
            return lnot(rename_free(f.child(), subst));
        case FormulaKind::And:
            return land(rename_free(f.left(), subst), rename_free(f.right(), subst));
        case FormulaKind::Or:
            return lor(rename_free(f.left(), subst), rename_free(f.right(), subst));
        case FormulaKind::Implies:
            return implies(rename_free(f.left(), subst), rename_free(f.right(), subst));
        case FormulaKind::Iff:
            return iff(rename_free(f.left(), subst), rename_free(f.right(), subst));
        case FormulaKind::Forall:
        case FormulaKind::Exists: {
            const Variable& bound = f.bound_var();
            std::map<Variable, Variable> inner = subst;
            inner.erase(bound);
            // If any incoming image equals the binder, rename it first.
            bool captures = false;
            for (const auto& [from, to] : inner)
                if (to == bound && is_free_in(from, f.child())) { captures = true; break; }
            Variable new_bound = bound;
            Formula body = f.child();
            if (captures) {
                std::set<Variable> avoid = all_variables(body);
                for (const auto& [from, to] : inner) {
                    avoid.insert(from);
                    avoid.insert(to);
                }
                new_bound = fresh_variable(bound, avoid);
                body = rename_free(body, {{bound, new_bound}});
            }
            Formula renamed = rename_free(body, inner);
            return f.kind() == FormulaKind::Forall ? forall(new_bound, std::move(renamed))
                                                   : exists(new_bound, std::move(renamed));
        }
    }
    return f;
}

namespace detail {

// sigma-side recursion for substitute_predicate: binders clashing with phi's
// parameters are renamed before descending into subtrees that mention P.
inline Formula substitute_p(const Formula& f, const Formula& phi, const Variable& pivot,
                            const std::set<Variable>& phi_params) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Eq:
            return f;
        case FormulaKind::Atom: {
            if (f.symbol() != kSchemePredicate) return f;
            if (f.args().size() != 1)
                throw Error(ErrorKind::ArityMismatch, "scheme predicate 'P' must be unary");
            return rename_free(phi, {{pivot, f.args()[0]}});
        }
        case FormulaKind::Not:
            return lnot(substitute_p(f.child(), phi, pivot, phi_params));
        case FormulaKind::And:
            return land(substitute_p(f.left(), phi, pivot, phi_params),
                        substitute_p(f.right(), phi, pivot, phi_params));
        case FormulaKind::Or:
            return lor(substitute_p(f.left(), phi, pivot, phi_params),
                       substitute_p(f.right(), phi, pivot, phi_params));
        case FormulaKind::Implies:
            return implies(substitute_p(f.left(), phi, pivot, phi_params),
                           substitute_p(f.right(), phi, pivot, phi_params));
        case FormulaKind::Iff:
            return iff(substitute_p(f.left(), phi, pivot, phi_params),
                       substitute_p(f.right(), phi, pivot, phi_params));
        case FormulaKind::Forall:
        case FormulaKind::Exists: {
            Variable bound = f.bound_var();
            Formula body = f.child();
            if (phi_params.count(bound) && mentions_symbol(body, kSchemePredicate)) {
                std::set<Variable> avoid = all_variables(body);
                avoid.insert(phi_params.begin(), phi_params.end());
                avoid.insert(pivot);
                Variable nb = fresh_variable(bound, avoid);
                body = rename_free(body, {{bound, nb}});
                bound = nb;
            }
            Formula sub = substitute_p(body, phi, pivot, phi_params);
            return f.kind() == FormulaKind::Forall ? forall(bound, std::move(sub))
                                                   : exists(bound, std::move(sub));
        }
    }
    return f;
}

} // namespace detail

// Replaces every atom P(t) in f by phi[t/pivot], capture-avoiding on both
// sides. The result contains no P.
inline Formula substitute_predicate(const Formula& f, const Formula& phi, const Variable& pivot) {
    if (!is_free_in(pivot, phi))
        throw Error(ErrorKind::PivotNotFree,
                    "pivot '" + pivot + "' is not free in " + print(phi));
    std::set<Variable> phi_params;
    for (const auto& v : free_vars(phi))
        if (v != pivot) phi_params.insert(v);
    Formula out = detail::substitute_p(f, phi, pivot, phi_params);
    if (mentions_symbol(out, kSchemePredicate))
        throw Error(ErrorKind::PStillPresent, "substitution left an occurrence of 'P'");
    return out;
}

// Forall-prefix over free_vars(f) in first-occurrence order.
inline Formula universal_closure(const Formula& f) {
    auto fv = free_vars(f);
    Formula out = f;
    for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = forall(*it, std::move(out));
    return out;
}

namespace detail {

inline bool alpha_equal_rec(const Formula& f, const Formula& g,
                            std::map<Variable, int>& fenv, std::map<Variable, int>& genv,
                            int depth) {
    if (f.kind() != g.kind()) return false;
    auto var_match = [&](const Variable& a, const Variable& b) {
        auto ia = fenv.find(a);
        auto ib = genv.find(b);
        if (ia == fenv.end() && ib == genv.end()) return a == b;  // both free
        if (ia == fenv.end() || ib == genv.end()) return false;
        return ia->second == ib->second;
    };
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return true;
        case FormulaKind::Atom: {
            if (f.symbol() != g.symbol() || f.args().size() != g.args().size()) return false;
            for (std::size_t i = 0; i < f.args().size(); ++i)
                if (!var_match(f.args()[i], g.args()[i])) return false;
            return true;
        }
        case FormulaKind::Eq:
            return var_match(f.eq_left(), g.eq_left()) && var_match(f.eq_right(), g.eq_right());
        case FormulaKind::Not:
            return alpha_equal_rec(f.child(), g.child(), fenv, genv, depth);
        case FormulaKind::Forall:
        case FormulaKind::Exists: {
            auto fold = fenv.find(f.bound_var());
            auto gold = genv.find(g.bound_var());
            std::optional<int> fprev, gprev;
            if (fold != fenv.end()) fprev = fold->second;
            if (gold != genv.end()) gprev = gold->second;
            fenv[f.bound_var()] = depth;
            genv[g.bound_var()] = depth;
            bool ok = alpha_equal_rec(f.child(), g.child(), fenv, genv, depth + 1);
            if (fprev) fenv[f.bound_var()] = *fprev; else fenv.erase(f.bound_var());
            if (gprev) genv[g.bound_var()] = *gprev; else genv.erase(g.bound_var());
            return ok;
        }
        default:
            return alpha_equal_rec(f.left(), g.left(), fenv, genv, depth) &&
                   alpha_equal_rec(f.right(), g.right(), fenv, genv, depth);
    }
}

} // namespace detail

// Equality modulo consistent bound-variable renaming.
inline bool alpha_equal(const Formula& f, const Formula& g) {
    std::map<Variable, int> fenv, genv;
    return detail::alpha_equal_rec(f, g, fenv, genv, 0);
}

// Canonical key under alpha-equality: bound variables renamed to their
// binding depth. Used for deduplication.
inline std::string alpha_key(const Formula& f) {
    std::string out;
    std::map<Variable, std::vector<int>> env;
    int depth = 0;
    auto var_key = [&](const Variable& v) -> std::string {
        auto it = env.find(v);
        if (it == env.end() || it->second.empty()) return "f:" + v;
        return "b:" + std::to_string(it->second.back());
    };
    auto rec = [&](auto&& self, const Formula& g) -> void {
        switch (g.kind()) {
            case FormulaKind::True: out += "T"; return;
            case FormulaKind::False: out += "F"; return;
            case FormulaKind::Atom:
                out += "A[" + g.symbol();
                for (const auto& v : g.args()) out += "," + var_key(v);
                out += "]";
                return;
            case FormulaKind::Eq:
                out += "E[" + var_key(g.eq_left()) + "," + var_key(g.eq_right()) + "]";
                return;
            case FormulaKind::Not:
                out += "N(";
                self(self, g.child());
                out += ")";
                return;
            case FormulaKind::Forall:
            case FormulaKind::Exists: {
                out += g.kind() == FormulaKind::Forall ? "U" : "X";
                out += std::to_string(depth) + "(";
                env[g.bound_var()].push_back(depth++);
                self(self, g.child());
                env[g.bound_var()].pop_back();
                --depth;
                out += ")";
                return;
            }
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::Implies:
            case FormulaKind::Iff: {
                char c = g.kind() == FormulaKind::And ? '&'
                         : g.kind() == FormulaKind::Or ? '|'
                         : g.kind() == FormulaKind::Implies ? '>' : '=';
                out += c;
                out += "(";
                self(self, g.left());
                out += ",";
                self(self, g.right());
                out += ")";
                return;
            }
        }
    };
    rec(rec, f);
    return out;
}

} // namespace wb
