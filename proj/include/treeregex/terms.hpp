#pragma once
// Ranked alphabets, trees and regular tree expressions.
//
// Expression grammar accepted by the parser:
//
//   expr := prod ('+' prod)*
//   prod := post ('.' '[' CONST ']' post)*
//   post := atom ('*' '[' CONST ']')*
//   atom := CONST | SYMBOL '(' expr (',' expr)* ')' | '(' expr ')' | '0'
//
// Closure binds tighter than product, product tighter than sum; sum and
// product associate to the left.  '0' denotes the empty language and is only
// legal as the whole expression.  Operator semantics:
//
//   f(E1,...,En)  trees rooted at f, k-th child drawn from Ek
//   E1 + E2       union
//   E1 .[c] E2    every c-leaf of an E1-tree replaced by an E2-tree
//   E1 *[c]       iterated .[c]-product of E1; always contains the leaf c
//
// Linearization marks every non-constant occurrence with a distinct index
// (preorder, starting at 1) so each marked symbol occurs exactly once.
// Marked symbols print as f@3; constants are never marked.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treeregex {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, std::size_t where)
        : std::runtime_error(msg + " (at offset " + std::to_string(where) + ")"),
          where_(where) {}

    std::size_t where() const noexcept { return where_; }

private:
    std::size_t where_;
};

// A broken construction invariant; never caused by user input alone.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// The derived-term fixpoint exceeded its state cap.
class watchdog_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------- symbols

// A symbol occurrence: base name plus linearization mark (0 = unmarked).
struct sym {
    std::string name;
    int mark = 0;

    std::string str() const {
        return mark == 0 ? name : name + '@' + std::to_string(mark);
    }

    friend bool operator==(const sym& a, const sym& b) {
        return a.mark == b.mark && a.name == b.name;
    }
    friend bool operator!=(const sym& a, const sym& b) { return !(a == b); }
    friend bool operator<(const sym& a, const sym& b) {
        if (a.name != b.name) return a.name < b.name;
        return a.mark < b.mark;
    }
};

inline sym unmarked(std::string name) { return sym{std::move(name), 0}; }

using symbol_set = std::set<sym>;

inline std::string to_string(const symbol_set& s) {
    std::string out = "{";
    bool sep = false;
    for (const sym& m : s) {
        if (sep) out += ',';
        out += m.str();
        sep = true;
    }
    out += '}';
    return out;
}

// ---------------------------------------------------------------- alphabet

class ranked_alphabet {
public:
    ranked_alphabet() = default;

    void add(const std::string& name, int arity) {
        if (arity < 0)
            throw std::invalid_argument("negative arity for symbol '" + name + "'");
        if (arities_.count(name))
            throw std::invalid_argument("duplicate symbol '" + name + "'");
        arities_.emplace(name, arity);
    }

    bool contains(const std::string& name) const { return arities_.count(name) != 0; }

    int arity(const std::string& name) const {
        auto it = arities_.find(name);
        if (it == arities_.end())
            throw std::invalid_argument("unknown symbol '" + name + "'");
        return it->second;
    }

    bool is_constant(const std::string& name) const { return arity(name) == 0; }

    const std::map<std::string, int>& symbols() const { return arities_; }

    std::vector<std::string> constants() const {
        std::vector<std::string> out;
        for (const auto& [n, a] : arities_)
            if (a == 0) out.push_back(n);
        return out;
    }

    std::vector<std::string> non_constants() const {
        std::vector<std::string> out;
        for (const auto& [n, a] : arities_)
            if (a > 0) out.push_back(n);
        return out;
    }

    bool empty() const { return arities_.empty(); }

private:
    std::map<std::string, int> arities_;
};

namespace detail {

inline bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
inline bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace detail

// Alphabet declarations are whitespace-separated `name:arity` pairs, e.g.
// "a:0 b:0 c:0 f:1 h:1 g:2".
inline ranked_alphabet parse_alphabet(const std::string& text) {
    ranked_alphabet sigma;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto skip_ws = [&] {
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    while (i < n) {
        std::size_t start = i;
        if (!detail::name_start(text[i]))
            throw parse_error("expected symbol name", i);
        std::size_t j = i;
        while (j < n && detail::name_char(text[j])) ++j;
        std::string name = text.substr(i, j - i);
        i = j;
        if (i >= n || text[i] != ':')
            throw parse_error("expected ':' after symbol name '" + name + "'", i);
        ++i;
        if (i < n && text[i] == '-')
            throw parse_error("negative arity for symbol '" + name + "'", i);
        if (i >= n || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw parse_error("expected arity digits after '" + name + ":'", i);
        std::size_t k = i;
        while (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        int arity = 0;
        try {
            arity = std::stoi(text.substr(i, k - i));
        } catch (const std::out_of_range&) {
            throw parse_error("arity out of range for symbol '" + name + "'", i);
        }
        i = k;
        if (i < n && !std::isspace(static_cast<unsigned char>(text[i])))
            throw parse_error("unexpected character in declaration", i);
        if (sigma.contains(name))
            throw parse_error("duplicate symbol '" + name + "'", start);
        sigma.add(name, arity);
        skip_ws();
    }
    return sigma;
}

// ------------------------------------------------------------------- trees

struct tree {
    sym root;
    std::vector<tree> children;

    int size() const {
        int n = 1;
        for (const tree& c : children) n += c.size();
        return n;
    }

    std::string str() const {
        std::string out = root.str();
        if (!children.empty()) {
            out += '(';
            for (std::size_t i = 0; i < children.size(); ++i) {
                if (i) out += ',';
                out += children[i].str();
            }
            out += ')';
        }
        return out;
    }

    friend bool operator==(const tree& a, const tree& b) {
        return a.root == b.root && a.children == b.children;
    }
    friend bool operator!=(const tree& a, const tree& b) { return !(a == b); }
    friend bool operator<(const tree& a, const tree& b) {
        if (a.root != b.root) return a.root < b.root;
        return a.children < b.children;
    }
};

inline tree leaf(std::string name) { return tree{unmarked(std::move(name)), {}}; }

inline tree unmark(tree t) {
    t.root.mark = 0;
    for (tree& c : t.children) c = unmark(std::move(c));
    return t;
}

namespace detail {

struct tree_parser {
    const std::string& text;
    const ranked_alphabet& sigma;
    std::size_t i = 0;

    void skip_ws() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }

    sym parse_sym() {
        skip_ws();
        if (i >= text.size() || !name_start(text[i]))
            throw parse_error("expected symbol name", i);
        std::size_t j = i;
        while (j < text.size() && name_char(text[j])) ++j;
        sym s{text.substr(i, j - i), 0};
        i = j;
        if (i < text.size() && text[i] == '@') {
            ++i;
            std::size_t k = i;
            while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
            if (k == i) throw parse_error("expected mark digits after '@'", i);
            s.mark = std::stoi(text.substr(i, k - i));
            i = k;
        }
        return s;
    }

    tree parse_node() {
        std::size_t at = i;
        sym s = parse_sym();
        if (!sigma.contains(s.name))
            throw parse_error("unknown symbol '" + s.name + "'", at);
        int ar = sigma.arity(s.name);
        std::vector<tree> children;
        skip_ws();
        if (i < text.size() && text[i] == '(') {
            ++i;
            children.push_back(parse_node());
            skip_ws();
            while (i < text.size() && text[i] == ',') {
                ++i;
                children.push_back(parse_node());
                skip_ws();
            }
            if (i >= text.size() || text[i] != ')')
                throw parse_error("expected ')'", i);
            ++i;
        }
        if (static_cast<int>(children.size()) != ar)
            throw parse_error("symbol '" + s.name + "' expects " + std::to_string(ar) +
                                  " children, got " + std::to_string(children.size()),
                              at);
        return tree{std::move(s), std::move(children)};
    }
};

}  // namespace detail

inline tree parse_tree(const std::string& text, const ranked_alphabet& sigma) {
    detail::tree_parser p{text, sigma};
    tree t = p.parse_node();
    p.skip_ws();
    if (p.i != text.size()) throw parse_error("trailing input after tree", p.i);
    return t;
}

// ------------------------------------------------------------- expressions

enum class expr_kind { zero, constant, apply, sum, product, closure };

struct expr;
using expr_ptr = std::shared_ptr<const expr>;

struct expr {
    expr_kind kind = expr_kind::zero;
    sym symbol;                      // constant, apply
    std::string subscript;           // product, closure
    std::vector<expr_ptr> children;  // apply: args; sum/product: {lhs,rhs}; closure: {operand}

    const expr_ptr& lhs() const { return children[0]; }
    const expr_ptr& rhs() const { return children[1]; }
    const expr_ptr& operand() const { return children[0]; }
};

inline expr_ptr make_zero() {
    static const expr_ptr z = std::make_shared<expr>(expr{expr_kind::zero, {}, {}, {}});
    return z;
}

inline expr_ptr make_constant(std::string name) {
    return std::make_shared<expr>(
        expr{expr_kind::constant, unmarked(std::move(name)), {}, {}});
}

inline expr_ptr make_apply(sym s, std::vector<expr_ptr> args) {
    return std::make_shared<expr>(
        expr{expr_kind::apply, std::move(s), {}, std::move(args)});
}

inline expr_ptr make_apply(std::string name, std::vector<expr_ptr> args) {
    return make_apply(unmarked(std::move(name)), std::move(args));
}

inline expr_ptr make_sum(expr_ptr l, expr_ptr r) {
    return std::make_shared<expr>(
        expr{expr_kind::sum, {}, {}, {std::move(l), std::move(r)}});
}

inline expr_ptr make_product(expr_ptr l, std::string c, expr_ptr r) {
    return std::make_shared<expr>(
        expr{expr_kind::product, {}, std::move(c), {std::move(l), std::move(r)}});
}

inline expr_ptr make_closure(expr_ptr op, std::string c) {
    return std::make_shared<expr>(
        expr{expr_kind::closure, {}, std::move(c), {std::move(op)}});
}

// Product constructor applying the rewrite 0 .[c] E -> 0.  Derivative-style
// constructions must build products through this; no other identity is used.
inline expr_ptr make_reduced_product(expr_ptr l, std::string c, expr_ptr r) {
    if (l->kind == expr_kind::zero) return make_zero();
    return make_product(std::move(l), std::move(c), std::move(r));
}

namespace detail {

inline void print_expr(const expr& e, std::string& out) {
    switch (e.kind) {
    case expr_kind::zero:
        out += '0';
        return;
    case expr_kind::constant:
        out += e.symbol.str();
        return;
    case expr_kind::apply: {
        out += e.symbol.str();
        out += '(';
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i) out += ',';
            print_expr(*e.children[i], out);
        }
        out += ')';
        return;
    }
    case expr_kind::sum: {
        print_expr(*e.lhs(), out);
        out += '+';
        bool wrap = e.rhs()->kind == expr_kind::sum;
        if (wrap) out += '(';
        print_expr(*e.rhs(), out);
        if (wrap) out += ')';
        return;
    }
    case expr_kind::product: {
        bool wl = e.lhs()->kind == expr_kind::sum;
        if (wl) out += '(';
        print_expr(*e.lhs(), out);
        if (wl) out += ')';
        out += ".[";
        out += e.subscript;
        out += ']';
        bool wr = e.rhs()->kind == expr_kind::sum || e.rhs()->kind == expr_kind::product;
        if (wr) out += '(';
        print_expr(*e.rhs(), out);
        if (wr) out += ')';
        return;
    }
    case expr_kind::closure: {
        bool wrap = e.operand()->kind == expr_kind::sum ||
                    e.operand()->kind == expr_kind::product;
        if (wrap) out += '(';
        print_expr(*e.operand(), out);
        if (wrap) out += ')';
        out += "*[";
        out += e.subscript;
        out += ']';
        return;
    }
    }
}

}  // namespace detail

inline std::string to_string(const expr_ptr& e) {
    std::string out;
    detail::print_expr(*e, out);
    return out;
}

// Syntax-tree node count (operators included).
inline int expr_size(const expr_ptr& e) {
    int n = 1;
    for (const expr_ptr& c : e->children) n += expr_size(c);
    return n;
}

inline bool equal(const expr_ptr& a, const expr_ptr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case expr_kind::zero:
        return true;
    case expr_kind::constant:
    case expr_kind::apply:
        if (a->symbol != b->symbol) return false;
        break;
    case expr_kind::product:
    case expr_kind::closure:
        if (a->subscript != b->subscript) return false;
        break;
    case expr_kind::sum:
        break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!equal(a->children[i], b->children[i])) return false;
    return true;
}

// ------------------------------------------------------------------ parser

namespace detail {

struct expr_parser {
    const std::string& text;
    const ranked_alphabet& sigma;
    bool allow_marks;
    std::size_t i = 0;
    std::vector<std::size_t> zero_offsets;

    void skip_ws() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }

    bool eat(char c) {
        skip_ws();
        if (i < text.size() && text[i] == c) {
            ++i;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (i >= text.size() || text[i] != c)
            throw parse_error(std::string("expected '") + c + "'", i);
        ++i;
    }

    std::string parse_subscript() {
        expect('[');
        skip_ws();
        std::size_t at = i;
        if (i >= text.size() || !name_start(text[i]))
            throw parse_error("expected constant inside '[...]'", i);
        std::size_t j = i;
        while (j < text.size() && name_char(text[j])) ++j;
        std::string name = text.substr(i, j - i);
        i = j;
        expect(']');
        if (!sigma.contains(name))
            throw parse_error("unknown symbol '" + name + "'", at);
        if (sigma.arity(name) != 0)
            throw parse_error("subscript '" + name + "' is not a constant", at);
        return name;
    }

    expr_ptr parse_atom() {
        skip_ws();
        if (i >= text.size()) throw parse_error("unexpected end of expression", i);
        if (text[i] == '0') {
            zero_offsets.push_back(i);
            ++i;
            return make_zero();
        }
        if (text[i] == '(') {
            ++i;
            expr_ptr e = parse_sum();
            expect(')');
            return e;
        }
        std::size_t at = i;
        if (!name_start(text[i])) throw parse_error("expected symbol or '('", i);
        std::size_t j = i;
        while (j < text.size() && name_char(text[j])) ++j;
        sym s{text.substr(i, j - i), 0};
        i = j;
        if (allow_marks && i < text.size() && text[i] == '@') {
            ++i;
            std::size_t k = i;
            while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
            if (k == i) throw parse_error("expected mark digits after '@'", i);
            s.mark = std::stoi(text.substr(i, k - i));
            i = k;
        }
        if (!sigma.contains(s.name))
            throw parse_error("unknown symbol '" + s.name + "'", at);
        int ar = sigma.arity(s.name);
        skip_ws();
        if (i < text.size() && text[i] == '(') {
            ++i;
            std::vector<expr_ptr> args;
            args.push_back(parse_sum());
            skip_ws();
            while (i < text.size() && text[i] == ',') {
                ++i;
                args.push_back(parse_sum());
                skip_ws();
            }
            expect(')');
            if (static_cast<int>(args.size()) != ar)
                throw parse_error("symbol '" + s.name + "' expects " + std::to_string(ar) +
                                      " arguments, got " + std::to_string(args.size()),
                                  at);
            return make_apply(std::move(s), std::move(args));
        }
        if (ar != 0)
            throw parse_error("symbol '" + s.name + "' of arity " + std::to_string(ar) +
                                  " used without arguments",
                              at);
        return make_constant(s.name);
    }

    expr_ptr parse_post() {
        expr_ptr e = parse_atom();
        while (true) {
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                e = make_closure(std::move(e), parse_subscript());
            } else {
                break;
            }
        }
        return e;
    }

    expr_ptr parse_prod() {
        expr_ptr e = parse_post();
        while (true) {
            skip_ws();
            if (i < text.size() && text[i] == '.') {
                ++i;
                std::string c = parse_subscript();
                e = make_product(std::move(e), std::move(c), parse_post());
            } else {
                break;
            }
        }
        return e;
    }

    expr_ptr parse_sum() {
        expr_ptr e = parse_prod();
        while (eat('+')) e = make_sum(std::move(e), parse_prod());
        return e;
    }
};

}  // namespace detail

inline expr_ptr parse_expr(const std::string& text, const ranked_alphabet& sigma,
                           bool allow_marks = false) {
    detail::expr_parser p{text, sigma, allow_marks};
    expr_ptr e = p.parse_sum();
    p.skip_ws();
    if (p.i != text.size()) throw parse_error("trailing input after expression", p.i);
    if (e->kind != expr_kind::zero && !p.zero_offsets.empty())
        throw parse_error("'0' may only appear as the whole expression",
                          p.zero_offsets.front());
    return e;
}

// --------------------------------------------- linearization and positions

inline bool is_marked(const expr_ptr& e) {
    if (e->kind == expr_kind::apply && e->symbol.mark != 0) return true;
    for (const expr_ptr& c : e->children)
        if (is_marked(c)) return true;
    return false;
}

// Non-constant occurrences in preorder of the syntax tree.
inline void collect_positions(const expr_ptr& e, std::vector<sym>& out) {
    if (e->kind == expr_kind::apply) out.push_back(e->symbol);
    for (const expr_ptr& c : e->children) collect_positions(c, out);
}

inline std::vector<sym> positions(const expr_ptr& e) {
    std::vector<sym> out;
    collect_positions(e, out);
    return out;
}

// Linear: every non-constant occurrence is unique (constants may repeat).
inline bool is_linear(const expr_ptr& e) {
    std::vector<sym> occ = positions(e);
    std::set<sym> seen;
    for (const sym& s : occ)
        if (!seen.insert(s).second) return false;
    return true;
}

namespace detail {

inline expr_ptr linearize_rec(const expr_ptr& e, int& next_mark) {
    switch (e->kind) {
    case expr_kind::zero:
    case expr_kind::constant:
        return e;
    case expr_kind::apply: {
        sym s = e->symbol;
        s.mark = next_mark++;
        std::vector<expr_ptr> args;
        args.reserve(e->children.size());
        for (const expr_ptr& c : e->children) args.push_back(linearize_rec(c, next_mark));
        return make_apply(std::move(s), std::move(args));
    }
    case expr_kind::sum: {
        expr_ptr l = linearize_rec(e->lhs(), next_mark);  // left before right
        expr_ptr r = linearize_rec(e->rhs(), next_mark);
        return make_sum(std::move(l), std::move(r));
    }
    case expr_kind::product: {
        expr_ptr l = linearize_rec(e->lhs(), next_mark);
        expr_ptr r = linearize_rec(e->rhs(), next_mark);
        return make_product(std::move(l), e->subscript, std::move(r));
    }
    case expr_kind::closure:
        return make_closure(linearize_rec(e->operand(), next_mark), e->subscript);
    }
    return e;
}

}  // namespace detail

inline expr_ptr linearize(const expr_ptr& e) {
    if (is_marked(e)) throw std::invalid_argument("linearize: expression already marked");
    int next_mark = 1;
    return detail::linearize_rec(e, next_mark);
}

inline expr_ptr unmark(const expr_ptr& e) {
    switch (e->kind) {
    case expr_kind::zero:
    case expr_kind::constant:
        return e;
    case expr_kind::apply: {
        sym s = e->symbol;
        s.mark = 0;
        std::vector<expr_ptr> args;
        args.reserve(e->children.size());
        for (const expr_ptr& c : e->children) args.push_back(unmark(c));
        return make_apply(std::move(s), std::move(args));
    }
    case expr_kind::sum:
        return make_sum(unmark(e->lhs()), unmark(e->rhs()));
    case expr_kind::product:
        return make_product(unmark(e->lhs()), e->subscript, unmark(e->rhs()));
    case expr_kind::closure:
        return make_closure(unmark(e->operand()), e->subscript);
    }
    return e;
}

// -------------------------------------------------- constant membership

// Decides whether the single-node tree `c` belongs to the language of `e`.
inline bool contains_constant(const expr_ptr& e, const std::string& c) {
    switch (e->kind) {
    case expr_kind::zero:
    case expr_kind::apply:
        return false;
    case expr_kind::constant:
        return e->symbol.name == c;
    case expr_kind::sum:
        return contains_constant(e->lhs(), c) || contains_constant(e->rhs(), c);
    case expr_kind::product: {
        const std::string& d = e->subscript;
        if (c != d && contains_constant(e->lhs(), c)) return true;
        return contains_constant(e->lhs(), d) && contains_constant(e->rhs(), c);
    }
    case expr_kind::closure:
        return c == e->subscript || contains_constant(e->operand(), c);
    }
    return false;
}

// ----------------------------------------------- bounded language oracle

namespace detail {

// All combinations of per-child replacements whose total size fits `budget`.
// `parts[i]` holds candidate subtrees for child i.
inline void combine_children(const sym& root, const std::vector<std::set<tree>>& parts,
                             int budget, std::set<tree>& out) {
    const int n = static_cast<int>(parts.size());
    std::vector<tree> picked(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, int idx, int remaining) -> void {
        if (idx == n) {
            out.insert(tree{root, picked});
            return;
        }
        int cap = remaining - (n - 1 - idx);  // later children need >= 1 node each
        for (const tree& t : parts[static_cast<std::size_t>(idx)]) {
            int sz = t.size();
            if (sz > cap) continue;
            picked[static_cast<std::size_t>(idx)] = t;
            self(self, idx + 1, remaining - sz);
        }
    };
    rec(rec, 0, budget);
}

// t with every c-leaf replaced by a member of `repl`, keeping size <= budget.
inline std::set<tree> substitute_bounded(const tree& t, const std::string& c,
                                         const std::set<tree>& repl, int budget) {
    std::set<tree> out;
    if (budget < 1) return out;
    if (t.children.empty()) {
        if (t.root.mark == 0 && t.root.name == c) {
            for (const tree& s : repl)
                if (s.size() <= budget) out.insert(s);
        } else {
            out.insert(t);
        }
        return out;
    }
    std::vector<std::set<tree>> parts;
    parts.reserve(t.children.size());
    const int n = static_cast<int>(t.children.size());
    for (const tree& ch : t.children)
        parts.push_back(substitute_bounded(ch, c, repl, budget - 1 - (n - 1)));
    combine_children(t.root, parts, budget - 1, out);
    return out;
}

}  // namespace detail

// Exactly the trees of the language of `e` with at most `max_nodes` nodes.
// Direct implementation of the semantics; closures iterate the c-product to a
// fixpoint, which the size bound forces to terminate.
inline std::set<tree> enumerate_language(const expr_ptr& e, int max_nodes) {
    if (max_nodes < 1) throw std::invalid_argument("enumerate_language: bound must be >= 1");
    switch (e->kind) {
    case expr_kind::zero:
        return {};
    case expr_kind::constant:
        return {tree{e->symbol, {}}};
    case expr_kind::apply: {
        const int n = static_cast<int>(e->children.size());
        if (max_nodes < 1 + n) return {};
        std::vector<std::set<tree>> parts;
        parts.reserve(e->children.size());
        for (const expr_ptr& ch : e->children)
            parts.push_back(enumerate_language(ch, max_nodes - 1 - (n - 1)));
        std::set<tree> out;
        detail::combine_children(e->symbol, parts, max_nodes - 1, out);
        return out;
    }
    case expr_kind::sum: {
        std::set<tree> out = enumerate_language(e->lhs(), max_nodes);
        std::set<tree> r = enumerate_language(e->rhs(), max_nodes);
        out.insert(r.begin(), r.end());
        return out;
    }
    case expr_kind::product: {
        std::set<tree> l = enumerate_language(e->lhs(), max_nodes);
        std::set<tree> r = enumerate_language(e->rhs(), max_nodes);
        std::set<tree> out;
        for (const tree& t : l) {
            std::set<tree> s = detail::substitute_bounded(t, e->subscript, r, max_nodes);
            out.insert(s.begin(), s.end());
        }
        return out;
    }
    case expr_kind::closure: {
        std::set<tree> base = enumerate_language(e->operand(), max_nodes);
        std::set<tree> acc = {leaf(e->subscript)};
        bool grew = true;
        while (grew) {
            grew = false;
            std::set<tree> add;
            for (const tree& t : base) {
                std::set<tree> s =
                    detail::substitute_bounded(t, e->subscript, acc, max_nodes);
                for (const tree& u : s)
                    if (!acc.count(u)) add.insert(u);
            }
            if (!add.empty()) {
                acc.insert(add.begin(), add.end());
                grew = true;
            }
        }
        return acc;
    }
    }
    return {};
}

}  // namespace treeregex
