#pragma once
// First, Follow and Last over linear expressions.
//
// First(E) is the set of symbols rooting some tree of the language, Last(E)
// the set of constants appearing as a leaf of some tree, and Follow(E, f, k)
// the set of symbols that can appear as the k-th child of an f-node.  All
// three are computed by structural induction.  Follow requires a linear
// expression; First and Last are well-defined for any expression and are
// also used on (possibly non-linear) continuations.

#include <map>
#include <stdexcept>

#include "terms.hpp"

namespace treeregex {

// State identifier shared by the position-style constructions: a pair of a
// non-constant occurrence and a child slot, or the sentinel eps^1.
struct position_id {
    sym symbol;
    int slot = 1;
    bool sentinel = false;

    static position_id eps() { return position_id{{}, 1, true}; }

    std::string str() const {
        if (sentinel) return "eps^1";
        std::string out = symbol.name + '^' + std::to_string(slot);
        if (symbol.mark != 0) out += '@' + std::to_string(symbol.mark);
        return out;
    }

    friend bool operator==(const position_id& a, const position_id& b) {
        if (a.sentinel != b.sentinel) return false;
        if (a.sentinel) return true;
        return a.symbol == b.symbol && a.slot == b.slot;
    }
    friend bool operator<(const position_id& a, const position_id& b) {
        if (a.sentinel != b.sentinel) return a.sentinel < b.sentinel;
        if (a.sentinel) return false;
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.slot < b.slot;
    }
};

// Precomputes per-node First/Last/occurrence sets for one expression; Follow
// queries are answered on demand.  The object is immutable after
// construction, so concurrent reads need no synchronization.
class position_analysis {
public:
    explicit position_analysis(expr_ptr e) : root_(std::move(e)) {
        build(root_);
    }

    const expr_ptr& expression() const { return root_; }

    const symbol_set& first() const { return first_.at(root_.get()); }
    const symbol_set& last() const { return last_.at(root_.get()); }

    // Follow per the inductive case analysis; the cases are tried in order
    // and are mutually exclusive.  Returns the empty set when f does not
    // occur.  Requires a linear expression.
    symbol_set follow(const sym& f, int k) const {
        require_linear();
        return follow_in(root_.get(), f, k);
    }

    symbol_set follow(const position_id& p) const {
        if (p.sentinel) return first();
        return follow(p.symbol, p.slot);
    }

    bool occurs(const sym& f) const { return syms_.at(root_.get()).count(f) != 0; }

    bool linear() const { return linear_; }

    // Lookups on subexpression nodes of the analyzed expression.
    const symbol_set& first_at(const expr* node) const { return first_.at(node); }
    const symbol_set& last_at(const expr* node) const { return last_.at(node); }
    bool occurs_at(const expr* node, const sym& f) const {
        return syms_.at(node).count(f) != 0;
    }

private:
    expr_ptr root_;
    bool linear_ = true;
    std::map<const expr*, symbol_set> first_;
    std::map<const expr*, symbol_set> last_;
    std::map<const expr*, std::set<sym>> syms_;

    void require_linear() const {
        if (!linear_)
            throw std::invalid_argument("Follow requires a linear expression");
    }

    void build(const expr_ptr& e) {
        for (const expr_ptr& c : e->children) build(c);
        const expr* n = e.get();

        std::set<sym> occ;
        if (e->kind == expr_kind::apply) occ.insert(e->symbol);
        for (const expr_ptr& c : e->children) {
            for (const sym& s : syms_.at(c.get())) {
                if (!occ.insert(s).second) linear_ = false;
            }
        }
        syms_[n] = std::move(occ);

        symbol_set fst;
        symbol_set lst;
        switch (e->kind) {
        case expr_kind::zero:
            break;
        case expr_kind::constant:
            fst.insert(e->symbol);
            lst.insert(e->symbol);
            break;
        case expr_kind::apply:
            fst.insert(e->symbol);
            for (const expr_ptr& c : e->children) {
                const symbol_set& cl = last_.at(c.get());
                lst.insert(cl.begin(), cl.end());
            }
            break;
        case expr_kind::sum: {
            fst = first_.at(e->lhs().get());
            const symbol_set& rf = first_.at(e->rhs().get());
            fst.insert(rf.begin(), rf.end());
            lst = last_.at(e->lhs().get());
            const symbol_set& rl = last_.at(e->rhs().get());
            lst.insert(rl.begin(), rl.end());
            break;
        }
        case expr_kind::product: {
            const sym c = unmarked(e->subscript);
            fst = first_.at(e->lhs().get());
            if (contains_constant(e->lhs(), e->subscript)) {
                fst.erase(c);
                const symbol_set& rf = first_.at(e->rhs().get());
                fst.insert(rf.begin(), rf.end());
            }
            lst = last_.at(e->lhs().get());
            if (lst.count(c)) {
                lst.erase(c);
                const symbol_set& rl = last_.at(e->rhs().get());
                lst.insert(rl.begin(), rl.end());
            }
            break;
        }
        case expr_kind::closure: {
            fst = first_.at(e->operand().get());
            fst.insert(unmarked(e->subscript));
            lst = last_.at(e->operand().get());
            lst.insert(unmarked(e->subscript));
            break;
        }
        }
        first_[n] = std::move(fst);
        last_[n] = std::move(lst);
    }

    symbol_set follow_in(const expr* e, const sym& f, int k) const {
        switch (e->kind) {
        case expr_kind::zero:
        case expr_kind::constant:
            return {};
        case expr_kind::apply: {
            if (e->symbol == f) {
                if (k < 1 || k > static_cast<int>(e->children.size()))
                    throw std::invalid_argument("Follow: slot out of range for '" +
                                                f.str() + "'");
                return first_.at(e->children[static_cast<std::size_t>(k - 1)].get());
            }
            for (const expr_ptr& c : e->children)
                if (syms_.at(c.get()).count(f)) return follow_in(c.get(), f, k);
            return {};
        }
        case expr_kind::sum: {
            if (syms_.at(e->lhs().get()).count(f)) return follow_in(e->lhs().get(), f, k);
            if (syms_.at(e->rhs().get()).count(f)) return follow_in(e->rhs().get(), f, k);
            return {};
        }
        case expr_kind::product: {
            const sym c = unmarked(e->subscript);
            symbol_set fl = follow_in(e->lhs().get(), f, k);
            if (fl.count(c)) {
                fl.erase(c);
                const symbol_set& rf = first_.at(e->rhs().get());
                fl.insert(rf.begin(), rf.end());
                return fl;
            }
            if (syms_.at(e->lhs().get()).count(f)) return fl;
            if (syms_.at(e->rhs().get()).count(f) && last_.at(e->lhs().get()).count(c))
                return follow_in(e->rhs().get(), f, k);
            return {};
        }
        case expr_kind::closure: {
            symbol_set fl = follow_in(e->operand().get(), f, k);
            if (fl.count(unmarked(e->subscript))) {
                const symbol_set& of = first_.at(e->operand().get());
                fl.insert(of.begin(), of.end());
            }
            return fl;
        }
        }
        return {};
    }
};

inline symbol_set first(const expr_ptr& e) { return position_analysis(e).first(); }

inline symbol_set last(const expr_ptr& e) { return position_analysis(e).last(); }

inline symbol_set follow(const expr_ptr& e, const sym& f, int k) {
    return position_analysis(e).follow(f, k);
}

}  // namespace treeregex
