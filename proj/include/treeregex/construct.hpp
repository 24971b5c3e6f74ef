#pragma once
// The four automaton constructions over regular tree expressions:
//
//   k_position_automaton        states f^k per occurrence and slot, driven by
//                               First/Follow
//   follow_automaton            states are the Follow sets themselves
//   equation_automaton          states are the derived terms produced by f^-1
//   k_c_continuation_automaton  states pair each position with its
//                               continuation expression
//
// The position-style constructions work on the linearized expression and are
// relabeled afterwards by erasing marks; the equation automaton derives the
// input expression directly.  Expression equality is syntactic, after the
// single rewrite 0 .[c] E -> 0 applied when continuations and derivative
// components are built.

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "automaton.hpp"
#include "posfun.hpp"
#include "terms.hpp"

namespace treeregex {

// ------------------------------------------------------------- derivatives

// A tuple of expressions, one per child slot of the consumed symbol.
using expr_tuple = std::vector<expr_ptr>;

// Set of tuples with deterministic (insertion) order; identity is the
// componentwise canonical text.
class tuple_set {
public:
    void insert(expr_tuple t) {
        if (keys_.insert(key(t)).second) items_.push_back(std::move(t));
    }

    void merge(const tuple_set& other) {
        for (const expr_tuple& t : other.items_) insert(t);
    }

    bool contains(const expr_tuple& t) const { return keys_.count(key(t)) != 0; }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<expr_tuple>& items() const { return items_; }

private:
    static std::string key(const expr_tuple& t) {
        std::string k;
        for (const expr_ptr& e : t) {
            k += to_string(e);
            k += '\x1f';
        }
        return k;
    }

    std::vector<expr_tuple> items_;
    std::set<std::string> keys_;
};

// f^-1(e): the tuples of expressions that can sit below one f-node of a tree
// of the language.  Componentwise products apply the 0-rewrite.
inline tuple_set f_inverse(const sym& f, const expr_ptr& e) {
    tuple_set out;
    switch (e->kind) {
    case expr_kind::zero:
    case expr_kind::constant:
        return out;
    case expr_kind::apply:
        if (e->symbol == f) out.insert(e->children);
        return out;
    case expr_kind::sum:
        out = f_inverse(f, e->lhs());
        out.merge(f_inverse(f, e->rhs()));
        return out;
    case expr_kind::product: {
        tuple_set left = f_inverse(f, e->lhs());
        for (const expr_tuple& t : left.items()) {
            expr_tuple mapped;
            mapped.reserve(t.size());
            for (const expr_ptr& comp : t)
                mapped.push_back(make_reduced_product(comp, e->subscript, e->rhs()));
            out.insert(std::move(mapped));
        }
        if (contains_constant(e->lhs(), e->subscript)) out.merge(f_inverse(f, e->rhs()));
        return out;
    }
    case expr_kind::closure: {
        tuple_set inner = f_inverse(f, e->operand());
        for (const expr_tuple& t : inner.items()) {
            expr_tuple mapped;
            mapped.reserve(t.size());
            for (const expr_ptr& comp : t)
                mapped.push_back(make_reduced_product(comp, e->subscript, e));
            out.insert(std::move(mapped));
        }
        return out;
    }
    }
    return out;
}

// Expression set with deterministic order, keyed by canonical text.
class expr_set {
public:
    void insert(expr_ptr e) {
        if (keys_.insert(to_string(e)).second) items_.push_back(std::move(e));
    }
    bool contains(const expr_ptr& e) const { return keys_.count(to_string(e)) != 0; }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<expr_ptr>& items() const { return items_; }

private:
    std::vector<expr_ptr> items_;
    std::set<std::string> keys_;
};

// Partial derivative of e w.r.t. a word of non-constant symbols: the set of
// expressions left after consuming the word top-down, {0} once a step yields
// no tuple.
inline expr_set partial_derivative(const expr_ptr& e, const std::vector<sym>& word) {
    expr_set cur;
    cur.insert(e);
    for (const sym& f : word) {
        tuple_set image;
        for (const expr_ptr& d : cur.items()) image.merge(f_inverse(f, d));
        expr_set next;
        if (image.empty()) {
            next.insert(make_zero());
        } else {
            for (const expr_tuple& t : image.items())
                for (const expr_ptr& comp : t) next.insert(comp);
        }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------- linear kit

// Shared machinery for the position-style constructions on one expression:
// the linearized form, its position list, the position analysis and the
// continuations.  Immutable once built.
class linear_kit {
public:
    linear_kit(const expr_ptr& e, ranked_alphabet sigma)
        : sigma_(std::move(sigma)),
          original_(is_marked(e) ? unmark(e) : e),
          linear_(is_marked(e) ? e : linearize(e)),
          analysis_(linear_) {
        if (!analysis_.linear())
            throw std::invalid_argument("expression is not linear after marking");
        for (const sym& p : positions(linear_)) position_syms_.push_back(p);
        build_continuations();
    }

    const ranked_alphabet& alphabet() const { return sigma_; }
    const expr_ptr& original() const { return original_; }
    const expr_ptr& linear() const { return linear_; }
    const position_analysis& analysis() const { return analysis_; }
    const std::vector<sym>& position_syms() const { return position_syms_; }

    // State universe shared by the k-position and continuation automata:
    // eps^1 first, then each position in mark order, slots ascending.
    const std::vector<position_id>& states() const { return states_; }

    int state_index(const position_id& p) const {
        auto it = state_index_.find(p);
        if (it == state_index_.end())
            throw std::invalid_argument("unknown position " + p.str());
        return it->second;
    }

    symbol_set follow_of(const position_id& p) const { return analysis_.follow(p); }

    // The continuation expression of a position (the whole expression for
    // eps^1), with the 0-rewrite applied.
    const expr_ptr& continuation(const position_id& p) const {
        return continuations_.at(static_cast<std::size_t>(state_index(p)));
    }

    int arity_of(const sym& s) const { return sigma_.arity(s.name); }

private:
    void build_continuations() {
        states_.push_back(position_id::eps());
        for (const sym& p : position_syms_) {
            int m = sigma_.arity(p.name);
            for (int k = 1; k <= m; ++k) states_.push_back(position_id{p, k, false});
        }
        for (std::size_t i = 0; i < states_.size(); ++i)
            state_index_[states_[i]] = static_cast<int>(i);
        continuations_.reserve(states_.size());
        for (const position_id& p : states_)
            continuations_.push_back(p.sentinel ? linear_
                                                : compute_continuation(linear_, p));
    }

    // Structural induction mirroring the derivative: descend to the unique
    // occurrence, collecting the product context on the way out.
    expr_ptr compute_continuation(const expr_ptr& e, const position_id& p) const {
        auto occurs_in = [this](const expr_ptr& node, const sym& f) {
            return analysis_.occurs_at(node.get(), f);
        };
        switch (e->kind) {
        case expr_kind::zero:
        case expr_kind::constant:
            break;
        case expr_kind::apply: {
            if (e->symbol == p.symbol)
                return e->children.at(static_cast<std::size_t>(p.slot - 1));
            for (const expr_ptr& c : e->children)
                if (occurs_in(c, p.symbol)) return compute_continuation(c, p);
            break;
        }
        case expr_kind::sum:
            if (occurs_in(e->lhs(), p.symbol)) return compute_continuation(e->lhs(), p);
            if (occurs_in(e->rhs(), p.symbol)) return compute_continuation(e->rhs(), p);
            break;
        case expr_kind::product: {
            if (occurs_in(e->lhs(), p.symbol))
                return make_reduced_product(compute_continuation(e->lhs(), p),
                                            e->subscript, e->rhs());
            if (occurs_in(e->rhs(), p.symbol)) {
                if (analysis_.last_at(e->lhs().get()).count(unmarked(e->subscript)))
                    return compute_continuation(e->rhs(), p);
                return make_zero();
            }
            break;
        }
        case expr_kind::closure:
            if (occurs_in(e->operand(), p.symbol))
                return make_reduced_product(compute_continuation(e->operand(), p),
                                            e->subscript, e);
            break;
        }
        throw std::invalid_argument("position " + p.str() + " does not occur");
    }

    ranked_alphabet sigma_;
    expr_ptr original_;
    expr_ptr linear_;
    position_analysis analysis_;
    std::vector<sym> position_syms_;
    std::vector<position_id> states_;
    std::map<position_id, int> state_index_;
    std::vector<expr_ptr> continuations_;
};

// The continuation of one position of a linear expression.
inline expr_ptr c_continuation(const expr_ptr& linear_expr, const position_id& p,
                               const ranked_alphabet& sigma) {
    linear_kit kit(linear_expr, sigma);
    return kit.continuation(p);
}

// --------------------------------------------------------------- k-position

namespace detail {

inline tree_automaton empty_automaton(const ranked_alphabet& sigma) {
    return tree_automaton(sigma);
}

}  // namespace detail

// Marked variant: states f^k per position plus eps^1 (final); a transition
// into f^k per symbol of Follow(f, k), with eps^1 fed by First.
inline tree_automaton k_position_automaton_marked(const linear_kit& kit) {
    tree_automaton a(kit.alphabet());
    for (const position_id& p : kit.states())
        a.add_state(p.str(), p.sentinel);
    for (const position_id& p : kit.states()) {
        int target = kit.state_index(p);
        for (const sym& g : kit.follow_of(p)) {
            int m = kit.arity_of(g);
            std::vector<int> sources;
            sources.reserve(static_cast<std::size_t>(m));
            for (int k = 1; k <= m; ++k)
                sources.push_back(kit.state_index(position_id{g, k, false}));
            a.add_transition(target, g, std::move(sources));
        }
    }
    return a;
}

inline tree_automaton k_position_automaton(const expr_ptr& e, const ranked_alphabet& sigma) {
    if (e->kind == expr_kind::zero) return detail::empty_automaton(sigma);
    linear_kit kit(e, sigma);
    return k_position_automaton_marked(kit).relabeled();
}

// ------------------------------------------------------------------- follow

// Marked variant: states are the distinct Follow sets (First included),
// the First set being final; a transition into a set per member symbol.
inline tree_automaton follow_automaton_marked(const linear_kit& kit) {
    tree_automaton a(kit.alphabet());
    std::map<symbol_set, int> state_of;
    std::vector<symbol_set> sets;
    auto intern = [&](const symbol_set& s) {
        auto it = state_of.find(s);
        if (it != state_of.end()) return it->second;
        int id = a.add_state(to_string(s));
        state_of.emplace(s, id);
        sets.push_back(s);
        return id;
    };
    symbol_set first_set = kit.analysis().first();
    int final_id = intern(first_set);
    a.set_final(final_id);
    std::map<position_id, int> set_of_position;
    for (const position_id& p : kit.states()) {
        if (p.sentinel) {
            set_of_position[p] = final_id;
            continue;
        }
        set_of_position[p] = intern(kit.follow_of(p));
    }
    for (std::size_t id = 0; id < sets.size(); ++id) {
        for (const sym& g : sets[id]) {
            int m = kit.arity_of(g);
            if (m == 0) {
                a.add_transition(static_cast<int>(id), g, {});
                continue;
            }
            std::vector<int> sources;
            sources.reserve(static_cast<std::size_t>(m));
            for (int k = 1; k <= m; ++k)
                sources.push_back(set_of_position.at(position_id{g, k, false}));
            a.add_transition(static_cast<int>(id), g, std::move(sources));
        }
    }
    return a;
}

inline tree_automaton follow_automaton(const expr_ptr& e, const ranked_alphabet& sigma) {
    if (e->kind == expr_kind::zero) return detail::empty_automaton(sigma);
    linear_kit kit(e, sigma);
    return follow_automaton_marked(kit).relabeled();
}

// ----------------------------------------------------------------- equation

// Cap on the derived-term fixpoint; exceeding it means the reduction policy
// failed to keep the state set finite.
inline constexpr std::size_t equation_state_cap = 10000;

// States are the individual derived terms: the least set containing e and
// closed under taking components of f^-1 images.  Works on the expression
// as given (no linearization).
inline tree_automaton equation_automaton(const expr_ptr& e, const ranked_alphabet& sigma) {
    if (e->kind == expr_kind::zero) return detail::empty_automaton(sigma);
    tree_automaton a(sigma);
    std::map<std::string, int> state_of;
    std::vector<expr_ptr> terms;
    std::deque<int> work;
    auto intern = [&](const expr_ptr& d) {
        std::string key = to_string(d);
        auto it = state_of.find(key);
        if (it != state_of.end()) return it->second;
        if (terms.size() >= equation_state_cap)
            throw watchdog_error("derived-term fixpoint exceeded " +
                                 std::to_string(equation_state_cap) + " states");
        int id = a.add_state(key);
        state_of.emplace(std::move(key), id);
        terms.push_back(d);
        work.push_back(id);
        return id;
    };
    int root = intern(e);
    a.set_final(root);
    std::vector<std::string> ranked = sigma.non_constants();
    std::vector<std::string> consts = sigma.constants();
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        expr_ptr d = terms[static_cast<std::size_t>(q)];
        for (const std::string& f : ranked) {
            tuple_set image = f_inverse(unmarked(f), d);
            for (const expr_tuple& t : image.items()) {
                std::vector<int> sources;
                sources.reserve(t.size());
                for (const expr_ptr& comp : t) sources.push_back(intern(comp));
                a.add_transition(q, unmarked(f), std::move(sources));
            }
        }
        for (const std::string& c : consts)
            if (contains_constant(d, c)) a.add_transition(q, unmarked(c), {});
    }
    return a;
}

// ----------------------------------------------------------- k-continuation

// Marked variant: states pair each position with its continuation.  A
// transition into (x, C_x) consuming g exists iff the tuple of g's slot
// continuations is a member of g^-1(C_x); the Follow-based route must agree
// with that membership, and any disagreement is an internal error.
inline tree_automaton k_c_continuation_automaton_marked(const linear_kit& kit) {
    tree_automaton a(kit.alphabet());
    for (const position_id& p : kit.states())
        a.add_state(p.str() + ':' + to_string(kit.continuation(p)), p.sentinel);
    std::vector<std::string> consts = kit.alphabet().constants();
    for (const position_id& p : kit.states()) {
        int target = kit.state_index(p);
        const expr_ptr& cont = kit.continuation(p);
        symbol_set fol = kit.follow_of(p);
        for (const sym& g : kit.position_syms()) {
            int m = kit.arity_of(g);
            expr_tuple slot_conts;
            std::vector<int> sources;
            slot_conts.reserve(static_cast<std::size_t>(m));
            sources.reserve(static_cast<std::size_t>(m));
            for (int k = 1; k <= m; ++k) {
                position_id slot{g, k, false};
                slot_conts.push_back(kit.continuation(slot));
                sources.push_back(kit.state_index(slot));
            }
            tuple_set image = f_inverse(g, cont);
            bool member = image.contains(slot_conts);
            bool follow_hit = fol.count(g) != 0;
            if (member != follow_hit || image.empty() == follow_hit)
                throw internal_error(
                    "derivative/Follow disagreement at state " + p.str() +
                    " on symbol " + g.str());
            if (member) a.add_transition(target, g, std::move(sources));
        }
        for (const std::string& c : consts) {
            bool member = contains_constant(cont, c);
            bool follow_hit = fol.count(unmarked(c)) != 0;
            if (member != follow_hit)
                throw internal_error(
                    "constant membership/Follow disagreement at state " + p.str() +
                    " on constant " + c);
            if (member) a.add_transition(target, unmarked(c), {});
        }
    }
    return a;
}

inline tree_automaton k_c_continuation_automaton(const expr_ptr& e,
                                                 const ranked_alphabet& sigma) {
    if (e->kind == expr_kind::zero) return detail::empty_automaton(sigma);
    linear_kit kit(e, sigma);
    return k_c_continuation_automaton_marked(kit).relabeled();
}

}  // namespace treeregex
