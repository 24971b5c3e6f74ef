#pragma once
// Differential verification battery: builds every construction for one
// expression and checks the expected structural identities plus bounded
// language agreement against the enumeration oracle.
//
// Bounded agreement enumerates every tree up to a node bound over the whole
// alphabet (not just the denoted language) and compares acceptance across
// all five automata and oracle membership.  The tree universe is hash-consed
// so acceptance is one bottom-up sweep per automaton.

#include <bitset>
#include <functional>
#include <string>
#include <vector>

#include "construct.hpp"
#include "relations.hpp"
#include "terms.hpp"

namespace treeregex {

// ------------------------------------------------------------ tree universe

class tree_universe {
public:
    struct node {
        sym root;
        std::vector<int> children;
        int size = 1;
    };

    tree_universe(const ranked_alphabet& sigma, int max_nodes)
        : tree_universe(to_syms(sigma.constants()), ranked_syms(sigma), max_nodes) {}

    // Explicit symbol lists; lets callers enumerate over marked alphabets.
    tree_universe(const std::vector<sym>& constants,
                  const std::vector<std::pair<sym, int>>& ranked, int max_nodes)
        : max_nodes_(max_nodes) {
        by_size_.resize(static_cast<std::size_t>(max_nodes) + 1);
        for (const sym& c : constants) intern_node(c, {}, 1);
        for (int s = 2; s <= max_nodes; ++s) {
            for (const auto& [f, m] : ranked) {
                if (m > s - 1 || m == 0) continue;
                std::vector<int> picked(static_cast<std::size_t>(m));
                enumerate_children(f, s, 0, s - 1, picked);
            }
        }
    }

    int max_nodes() const { return max_nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<node>& nodes() const { return nodes_; }

    // Id of an existing tree, or -1 when it is not part of the universe.
    int find(const tree& t) const {
        std::vector<int> kids;
        kids.reserve(t.children.size());
        for (const tree& c : t.children) {
            int id = find(c);
            if (id < 0) return -1;
            kids.push_back(id);
        }
        auto it = index_.find(key(t.root, kids));
        return it == index_.end() ? -1 : it->second;
    }

    tree materialize(int id) const {
        const node& n = nodes_.at(static_cast<std::size_t>(id));
        tree t{n.root, {}};
        t.children.reserve(n.children.size());
        for (int c : n.children) t.children.push_back(materialize(c));
        return t;
    }

private:
    static std::vector<sym> to_syms(const std::vector<std::string>& names) {
        std::vector<sym> out;
        out.reserve(names.size());
        for (const std::string& n : names) out.push_back(unmarked(n));
        return out;
    }

    static std::vector<std::pair<sym, int>> ranked_syms(const ranked_alphabet& sigma) {
        std::vector<std::pair<sym, int>> out;
        for (const std::string& f : sigma.non_constants())
            out.emplace_back(unmarked(f), sigma.arity(f));
        return out;
    }

    static std::string key(const sym& root, const std::vector<int>& kids) {
        std::string k = root.str();
        for (int c : kids) {
            k += ',';
            k += std::to_string(c);
        }
        return k;
    }

    int intern_node(sym root, std::vector<int> kids, int sz) {
        std::string k = key(root, kids);
        auto it = index_.find(k);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node{std::move(root), std::move(kids), sz});
        by_size_[static_cast<std::size_t>(sz)].push_back(id);
        index_.emplace(std::move(k), id);
        return id;
    }

    void enumerate_children(const sym& root, int total, std::size_t idx, int remaining,
                            std::vector<int>& picked) {
        const std::size_t m = picked.size();
        if (idx == m) {
            if (remaining == 0) intern_node(root, picked, total);
            return;
        }
        int slack = remaining - static_cast<int>(m - 1 - idx);
        for (int s = 1; s <= slack; ++s) {
            for (int id : by_size_[static_cast<std::size_t>(s)]) {
                picked[idx] = id;
                enumerate_children(root, total, idx + 1, remaining - s, picked);
            }
        }
    }

    int max_nodes_;
    std::vector<node> nodes_;
    std::map<std::string, int> index_;
    std::vector<std::vector<int>> by_size_;
};

// One bottom-up sweep; children always precede parents in the universe.
inline std::vector<char> acceptance_vector(const tree_automaton& a,
                                           const tree_universe& u) {
    constexpr std::size_t max_states = 256;
    if (a.state_count() > max_states)
        throw internal_error("acceptance sweep supports at most 256 states");
    std::bitset<max_states> finals;
    for (int q : a.final_states()) finals.set(static_cast<std::size_t>(q));
    std::map<sym, std::vector<const fta_transition*>> by_sym;
    for (const fta_transition& t : a.transitions()) by_sym[t.symbol].push_back(&t);

    std::vector<std::bitset<max_states>> mask(u.size());
    std::vector<char> accept(u.size(), 0);
    for (std::size_t id = 0; id < u.size(); ++id) {
        const tree_universe::node& n = u.nodes()[id];
        auto it = by_sym.find(n.root);
        if (it != by_sym.end()) {
            for (const fta_transition* t : it->second) {
                if (t->sources.size() != n.children.size()) continue;
                bool ok = true;
                for (std::size_t i = 0; i < t->sources.size(); ++i) {
                    if (!mask[static_cast<std::size_t>(n.children[i])].test(
                            static_cast<std::size_t>(t->sources[i]))) {
                        ok = false;
                        break;
                    }
                }
                if (ok) mask[id].set(static_cast<std::size_t>(t->target));
            }
        }
        accept[id] = (mask[id] & finals).any() ? 1 : 0;
    }
    return accept;
}

// Oracle membership flags over the universe.
inline std::vector<char> oracle_vector(const expr_ptr& e, const tree_universe& u) {
    std::vector<char> member(u.size(), 0);
    for (const tree& t : enumerate_language(e, u.max_nodes())) {
        int id = u.find(t);
        if (id < 0)
            throw internal_error("oracle produced a tree outside the universe: " + t.str());
        member[static_cast<std::size_t>(id)] = 1;
    }
    return member;
}

// ----------------------------------------------------------------- shrinking

namespace detail {

inline expr_ptr replace_at(const expr_ptr& e, const std::vector<int>& path,
                           std::size_t depth, const expr_ptr& replacement) {
    if (depth == path.size()) return replacement;
    std::vector<expr_ptr> children = e->children;
    std::size_t i = static_cast<std::size_t>(path[depth]);
    children[i] = replace_at(children[i], path, depth + 1, replacement);
    expr e2 = *e;
    e2.children = std::move(children);
    return std::make_shared<expr>(std::move(e2));
}

inline void collect_paths(const expr_ptr& e, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
    out.push_back(cur);
    for (std::size_t i = 0; i < e->children.size(); ++i) {
        cur.push_back(static_cast<int>(i));
        collect_paths(e->children[i], cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

// Greedy shrink: repeatedly replace a subexpression by the smallest constant
// while the predicate keeps failing.
inline expr_ptr shrink_expr(expr_ptr e, const ranked_alphabet& sigma,
                            const std::function<bool(const expr_ptr&)>& still_fails) {
    std::vector<std::string> consts = sigma.constants();
    if (consts.empty()) return e;
    expr_ptr smallest = make_constant(consts.front());
    bool improved = true;
    while (improved) {
        improved = false;
        std::vector<std::vector<int>> paths;
        std::vector<int> cur;
        detail::collect_paths(e, cur, paths);
        for (const std::vector<int>& path : paths) {
            if (path.empty()) continue;  // keep the root, only prune under it
            expr_ptr candidate = detail::replace_at(e, path, 0, smallest);
            if (to_string(candidate) == to_string(e)) continue;
            bool fails = false;
            try {
                fails = still_fails(candidate);
            } catch (const std::exception&) {
                fails = false;
            }
            if (fails) {
                e = std::move(candidate);
                improved = true;
                break;
            }
        }
    }
    return e;
}

// ------------------------------------------------------------------ battery

struct claim_result {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct construction_suite {
    tree_automaton kpos;
    tree_automaton follow;
    tree_automaton equation;
    tree_automaton kcc;
    v_merge_result vm;
};

inline construction_suite build_all(const linear_kit& kit) {
    construction_suite s;
    s.kpos = k_position_automaton_marked(kit).relabeled();
    s.follow = follow_automaton_marked(kit).relabeled();
    s.equation = equation_automaton(kit.original(), kit.alphabet());
    s.kcc = k_c_continuation_automaton_marked(kit).relabeled();
    s.vm = v_merge(kit);
    return s;
}

// True when all five automata and the oracle agree on every tree of the
// universe; used both by the battery and by shrinking.
inline bool language_agreement_holds(const expr_ptr& e, const ranked_alphabet& sigma,
                                     const tree_universe& u) {
    if (e->kind == expr_kind::zero) return true;
    linear_kit kit(e, sigma);
    construction_suite s = build_all(kit);
    std::vector<char> want = oracle_vector(kit.original(), u);
    for (const tree_automaton* a :
         {&s.kpos, &s.follow, &s.equation, &s.kcc, &s.vm.merged}) {
        if (acceptance_vector(*a, u) != want) return false;
    }
    return true;
}

inline std::vector<claim_result> run_battery(const expr_ptr& e,
                                             const ranked_alphabet& sigma, int depth,
                                             const tree_universe* shared = nullptr) {
    std::vector<claim_result> out;
    auto claim = [&](std::string name, bool pass, std::string detail = "") {
        out.push_back(claim_result{std::move(name), pass, std::move(detail)});
    };

    if (e->kind == expr_kind::zero) {
        claim("language agreement", true, "0 denotes the empty language");
        return out;
    }

    std::optional<tree_universe> local;
    const tree_universe* u = shared;
    if (u == nullptr || u->max_nodes() != depth) {
        local.emplace(sigma, depth);
        u = &*local;
    }

    linear_kit kit(e, sigma);
    construction_suite s = build_all(kit);

    auto counts = [](const tree_automaton& a) {
        return std::to_string(a.state_count()) + " states / " +
               std::to_string(a.transition_count()) + " transitions";
    };

    // 1. bounded language agreement, all five constructions vs the oracle
    {
        std::vector<char> want = oracle_vector(kit.original(), *u);
        const char* names[] = {"kpos", "follow", "equation", "kcc", "vmerge"};
        const tree_automaton* autos[] = {&s.kpos, &s.follow, &s.equation, &s.kcc,
                                         &s.vm.merged};
        bool ok = true;
        std::string detail =
            "all trees up to " + std::to_string(depth) + " nodes agree";
        for (int i = 0; i < 5 && ok; ++i) {
            std::vector<char> got = acceptance_vector(*autos[i], *u);
            for (std::size_t id = 0; id < u->size(); ++id) {
                if (got[id] != want[id]) {
                    ok = false;
                    tree witness = u->materialize(static_cast<int>(id));
                    expr_ptr shrunk = shrink_expr(
                        e, sigma, [&](const expr_ptr& cand) {
                            return !language_agreement_holds(cand, sigma, *u);
                        });
                    detail = std::string(names[i]) + " disagrees with the oracle on " +
                             witness.str() + " (" +
                             (want[id] ? "should accept" : "should reject") +
                             "); shrunk counterexample: " + to_string(shrunk);
                    break;
                }
            }
        }
        claim("language agreement", ok, detail);
    }

    // 2. the position and continuation automata coincide state-for-state
    {
        bool same = s.kpos.transition_count() == s.kcc.transition_count() &&
                    s.kpos.state_count() == s.kcc.state_count() &&
                    s.kpos.transitions() == s.kcc.transitions();
        bool iso = isomorphic(s.kpos, s.kcc).has_value();
        claim("kpos/kcc isomorphism", same && iso,
              same ? counts(s.kpos) : "transition sets differ under the shared numbering");
    }

    partition pf = rel_follow(kit);
    partition pe = rel_e(kit);
    partition pc = rel_combined(kit);

    // 3-5. quotient identities
    claim("kpos quotient by follow-equality is the follow automaton",
          isomorphic(quotient(s.kpos, pf), s.follow).has_value(), counts(s.follow));
    claim("kcc quotient by continuation-image equality is the equation automaton",
          isomorphic(quotient(s.kcc, pe), s.equation).has_value(), counts(s.equation));
    claim("kcc quotient by follow-equality is the follow automaton",
          isomorphic(quotient(s.kcc, pc), s.follow).has_value(), counts(s.follow));

    // 6-7. similarity and maximality of follow-equality on the position automaton
    claim("follow-equality is a similarity on kpos", is_similarity(s.kpos, pf));
    {
        bool maximal = true;
        std::string detail;
        std::vector<int> block_of = pf.block_of(s.kpos.state_count());
        for (std::size_t q = 0; q < s.kpos.state_count() && maximal; ++q) {
            for (std::size_t r = q + 1; r < s.kpos.state_count() && maximal; ++r) {
                if (block_of[q] == block_of[r]) continue;
                if (is_similarity(s.kpos, pf.merged(static_cast<int>(q),
                                                    static_cast<int>(r)))) {
                    maximal = false;
                    detail = "merging " + s.kpos.states()[q].label + " with " +
                             s.kpos.states()[r].label + " stays a similarity";
                }
            }
        }
        claim("follow-equality is the largest similarity on kpos", maximal, detail);
    }

    // 8. merged automaton never beats both quotients
    {
        std::size_t bound = std::min(s.follow.state_count(), s.equation.state_count());
        claim("merged automaton within the size bound",
              s.vm.merged.state_count() <= bound,
              std::to_string(s.vm.merged.state_count()) + " <= min(" +
                  std::to_string(s.follow.state_count()) + "," +
                  std::to_string(s.equation.state_count()) + ")");
    }

    // 9. First of a continuation equals the Follow set of its position
    {
        bool ok = true;
        std::string detail;
        for (const position_id& p : kit.states()) {
            symbol_set lhs = position_analysis(kit.continuation(p)).first();
            symbol_set rhs = kit.follow_of(p);
            if (lhs != rhs) {
                ok = false;
                detail = "position " + p.str() + ": First(continuation) = " +
                         to_string(lhs) + " but Follow = " + to_string(rhs);
                break;
            }
        }
        claim("continuation First equals Follow", ok, detail);
    }

    // 10. derivability of a continuation matches Follow membership
    {
        bool ok = true;
        std::string detail;
        for (const position_id& p : kit.states()) {
            symbol_set fol = kit.follow_of(p);
            for (const sym& g : kit.position_syms()) {
                bool derivable = !f_inverse(g, kit.continuation(p)).empty();
                if (derivable != (fol.count(g) != 0)) {
                    ok = false;
                    detail = "state " + p.str() + ", symbol " + g.str();
                    break;
                }
            }
            if (!ok) break;
        }
        claim("continuation derivability matches Follow", ok, detail);
    }

    return out;
}

}  // namespace treeregex
