#pragma once
// Bottom-up nondeterministic finite tree automaton.
//
// A transition (target, f, q1..qn) fires as the rewrite f(q1,...,qn) ->
// target; arity-0 transitions are (target, c) with no sources.  A tree is
// accepted when the bottom-up state set of its root meets the final states.
//
// The quotient by a partition uses the existential rule: a block transition
// exists iff at least one member transition does.  That alone does not
// preserve the language; callers needing preservation must pass a partition
// that is a similarity relation (see is_similarity).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "terms.hpp"

namespace treeregex {

struct fta_state {
    std::string label;
    bool is_final = false;
};

struct fta_transition {
    int target = 0;
    sym symbol;
    std::vector<int> sources;

    friend bool operator==(const fta_transition& a, const fta_transition& b) {
        return a.target == b.target && a.symbol == b.symbol && a.sources == b.sources;
    }
    friend bool operator<(const fta_transition& a, const fta_transition& b) {
        if (a.target != b.target) return a.target < b.target;
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.sources < b.sources;
    }
};

class tree_automaton {
public:
    tree_automaton() = default;
    explicit tree_automaton(ranked_alphabet sigma) : sigma_(std::move(sigma)) {}

    int add_state(std::string label, bool is_final = false) {
        states_.push_back(fta_state{std::move(label), is_final});
        return static_cast<int>(states_.size()) - 1;
    }

    void set_final(int q, bool f = true) { states_.at(static_cast<std::size_t>(q)).is_final = f; }

    void add_transition(int target, sym symbol, std::vector<int> sources) {
        check_state(target);
        for (int s : sources) check_state(s);
        if (!sigma_.empty()) {
            if (!sigma_.contains(symbol.name))
                throw std::invalid_argument("transition symbol '" + symbol.name +
                                            "' not in alphabet");
            if (sigma_.arity(symbol.name) != static_cast<int>(sources.size()))
                throw std::invalid_argument("transition arity mismatch for '" +
                                            symbol.name + "'");
        }
        transitions_.insert(fta_transition{target, std::move(symbol), std::move(sources)});
    }

    const ranked_alphabet& alphabet() const { return sigma_; }
    const std::vector<fta_state>& states() const { return states_; }
    const std::set<fta_transition>& transitions() const { return transitions_; }

    std::size_t state_count() const { return states_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }

    std::vector<int> final_states() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (states_[i].is_final) out.push_back(static_cast<int>(i));
        return out;
    }

    // Same symbols on every transition with marks erased; duplicates collapse.
    tree_automaton relabeled() const {
        tree_automaton out(sigma_);
        out.states_ = states_;
        for (fta_transition t : transitions_) {
            t.symbol.mark = 0;
            out.transitions_.insert(std::move(t));
        }
        return out;
    }

private:
    void check_state(int q) const {
        if (q < 0 || q >= static_cast<int>(states_.size()))
            throw std::invalid_argument("transition references unknown state");
    }

    ranked_alphabet sigma_;
    std::vector<fta_state> states_;
    std::set<fta_transition> transitions_;
};

// ---------------------------------------------------------------------- run

namespace detail {

inline std::set<int> run_node(const tree_automaton& a,
                              const std::multimap<sym, const fta_transition*>& by_sym,
                              const tree& t) {
    if (!a.alphabet().empty() && !a.alphabet().contains(t.root.name))
        throw std::invalid_argument("tree symbol '" + t.root.name + "' not in alphabet");
    std::vector<std::set<int>> child_states;
    child_states.reserve(t.children.size());
    for (const tree& c : t.children) child_states.push_back(run_node(a, by_sym, c));
    std::set<int> out;
    auto [lo, hi] = by_sym.equal_range(t.root);
    for (auto it = lo; it != hi; ++it) {
        const fta_transition& tr = *it->second;
        if (tr.sources.size() != t.children.size()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < tr.sources.size(); ++i) {
            if (!child_states[i].count(tr.sources[i])) {
                ok = false;
                break;
            }
        }
        if (ok) out.insert(tr.target);
    }
    return out;
}

}  // namespace detail

// The state set reached bottom-up on t.
inline std::set<int> run(const tree_automaton& a, const tree& t) {
    std::multimap<sym, const fta_transition*> by_sym;
    for (const fta_transition& tr : a.transitions()) by_sym.emplace(tr.symbol, &tr);
    return detail::run_node(a, by_sym, t);
}

inline bool accepts(const tree_automaton& a, const tree& t) {
    std::set<int> reached = run(a, t);
    for (int q : reached)
        if (a.states()[static_cast<std::size_t>(q)].is_final) return true;
    return false;
}

// ---------------------------------------------------------------- partition

// Disjoint nonempty blocks covering all states.  Canonical form: blocks
// sorted internally and ordered by their smallest member.
struct partition {
    std::vector<std::vector<int>> blocks;

    static partition discrete(std::size_t n) {
        partition p;
        for (std::size_t i = 0; i < n; ++i) p.blocks.push_back({static_cast<int>(i)});
        return p;
    }

    // block_ids[q] = arbitrary block tag of state q.
    static partition from_block_ids(const std::vector<int>& block_ids) {
        std::map<int, std::vector<int>> by_tag;
        for (std::size_t q = 0; q < block_ids.size(); ++q)
            by_tag[block_ids[q]].push_back(static_cast<int>(q));
        partition p;
        for (auto& [tag, members] : by_tag) p.blocks.push_back(std::move(members));
        p.normalize();
        return p;
    }

    void normalize() {
        for (auto& b : blocks) std::sort(b.begin(), b.end());
        std::sort(blocks.begin(), blocks.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }

    std::size_t size() const { return blocks.size(); }

    // Maps state -> block index; throws unless the blocks exactly cover
    // 0..n_states-1 without repetition.
    std::vector<int> block_of(std::size_t n_states) const {
        std::vector<int> out(n_states, -1);
        std::size_t covered = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (blocks[b].empty()) throw std::invalid_argument("partition has an empty block");
            for (int q : blocks[b]) {
                if (q < 0 || static_cast<std::size_t>(q) >= n_states)
                    throw std::invalid_argument("partition references unknown state");
                if (out[static_cast<std::size_t>(q)] != -1)
                    throw std::invalid_argument("partition blocks overlap");
                out[static_cast<std::size_t>(q)] = static_cast<int>(b);
                ++covered;
            }
        }
        if (covered != n_states)
            throw std::invalid_argument("partition does not cover all states");
        return out;
    }

    // The coarser partition obtained by joining the blocks containing q and r.
    partition merged(int q, int r) const {
        partition p = *this;
        int bq = -1, br = -1;
        for (std::size_t b = 0; b < p.blocks.size(); ++b) {
            for (int m : p.blocks[b]) {
                if (m == q) bq = static_cast<int>(b);
                if (m == r) br = static_cast<int>(b);
            }
        }
        if (bq < 0 || br < 0) throw std::invalid_argument("merged: state not in partition");
        if (bq == br) return p;
        auto& dst = p.blocks[static_cast<std::size_t>(bq)];
        auto& src = p.blocks[static_cast<std::size_t>(br)];
        dst.insert(dst.end(), src.begin(), src.end());
        p.blocks.erase(p.blocks.begin() + br);
        p.normalize();
        return p;
    }
};

// ----------------------------------------------------------------- quotient

inline tree_automaton quotient(const tree_automaton& a, const partition& p) {
    std::vector<int> block_of = p.block_of(a.state_count());
    tree_automaton out(a.alphabet());
    for (const auto& block : p.blocks) {
        std::string label = "{";
        bool is_final = false;
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (i) label += ',';
            const fta_state& st = a.states()[static_cast<std::size_t>(block[i])];
            label += st.label;
            is_final = is_final || st.is_final;
        }
        label += '}';
        out.add_state(std::move(label), is_final);
    }
    for (const fta_transition& t : a.transitions()) {
        std::vector<int> sources;
        sources.reserve(t.sources.size());
        for (int s : t.sources) sources.push_back(block_of[static_cast<std::size_t>(s)]);
        out.add_transition(block_of[static_cast<std::size_t>(t.target)], t.symbol,
                           std::move(sources));
    }
    return out;
}

// -------------------------------------------------------------- similarity

// True iff states in a common block have identical predecessor transitions:
// whenever (q, f, q1..qn) is a transition and q ~ q', so is (q', f, q1..qn).
// Quotients by such partitions preserve the accepted language.
inline bool is_similarity(const tree_automaton& a, const partition& p) {
    std::vector<int> block_of = p.block_of(a.state_count());
    (void)block_of;
    std::vector<std::set<std::pair<sym, std::vector<int>>>> sig(a.state_count());
    for (const fta_transition& t : a.transitions())
        sig[static_cast<std::size_t>(t.target)].insert({t.symbol, t.sources});
    for (const auto& block : p.blocks) {
        for (std::size_t i = 1; i < block.size(); ++i) {
            if (sig[static_cast<std::size_t>(block[i])] !=
                sig[static_cast<std::size_t>(block[0])])
                return false;
        }
    }
    return true;
}

// -------------------------------------------------------------- isomorphism

namespace detail {

// Iterated signature refinement; states that can correspond under an
// isomorphism always end up with equal colors.
inline std::vector<std::string> refine_colors(const tree_automaton& a) {
    const std::size_t n = a.state_count();
    std::vector<std::string> color(n);
    for (std::size_t q = 0; q < n; ++q)
        color[q] = a.states()[q].is_final ? "F" : "_";
    for (std::size_t round = 0; round < n + 1; ++round) {
        std::vector<std::vector<std::string>> feats(n);
        for (const fta_transition& t : a.transitions()) {
            std::string src_colors;
            for (int s : t.sources) {
                src_colors += color[static_cast<std::size_t>(s)];
                src_colors += '|';
            }
            feats[static_cast<std::size_t>(t.target)].push_back(
                "T:" + t.symbol.str() + ':' + src_colors);
            for (std::size_t i = 0; i < t.sources.size(); ++i) {
                feats[static_cast<std::size_t>(t.sources[i])].push_back(
                    "S:" + t.symbol.str() + ':' + std::to_string(i) + ':' +
                    color[static_cast<std::size_t>(t.target)]);
            }
        }
        std::vector<std::string> next(n);
        for (std::size_t q = 0; q < n; ++q) {
            std::sort(feats[q].begin(), feats[q].end());
            next[q] = color[q] + '#';
            for (const std::string& f : feats[q]) {
                next[q] += f;
                next[q] += ';';
            }
        }
        std::set<std::string> before(color.begin(), color.end());
        std::set<std::string> after(next.begin(), next.end());
        bool stable = before.size() == after.size();
        color = std::move(next);
        // compress to keep strings short
        std::map<std::string, std::string> ids;
        for (std::string& c : color) {
            auto [it, fresh] = ids.emplace(c, std::to_string(ids.size()));
            c = it->second;
            (void)fresh;
        }
        if (stable) break;
    }
    return color;
}

}  // namespace detail

// Exact isomorphism search: a state bijection preserving finals and the
// transition set, found by backtracking over color-compatible pairings.
// Returns the mapping a-state -> b-state, or nothing.
inline std::optional<std::vector<int>> isomorphic(const tree_automaton& a,
                                                  const tree_automaton& b) {
    const std::size_t n = a.state_count();
    if (n != b.state_count()) return std::nullopt;
    if (a.transition_count() != b.transition_count()) return std::nullopt;
    if (a.final_states().size() != b.final_states().size()) return std::nullopt;
    if (n == 0) return std::vector<int>{};

    std::vector<std::string> ca = detail::refine_colors(a);
    std::vector<std::string> cb = detail::refine_colors(b);
    {
        std::multiset<std::string> ma(ca.begin(), ca.end());
        std::multiset<std::string> mb(cb.begin(), cb.end());
        if (ma != mb) return std::nullopt;
    }

    std::vector<std::vector<int>> candidates(n);
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t r = 0; r < n; ++r) {
            if (ca[q] == cb[r] &&
                a.states()[q].is_final == b.states()[r].is_final)
                candidates[q].push_back(static_cast<int>(r));
        }
        if (candidates[q].empty()) return std::nullopt;
    }

    // transitions touching each a-state, for incremental checking
    std::vector<std::vector<const fta_transition*>> touching(n);
    for (const fta_transition& t : a.transitions()) {
        touching[static_cast<std::size_t>(t.target)].push_back(&t);
        for (int s : t.sources) touching[static_cast<std::size_t>(s)].push_back(&t);
    }

    std::vector<int> map_ab(n, -1);
    std::vector<char> used_b(n, 0);

    // assign most-constrained states first
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return candidates[x].size() < candidates[y].size();
    });

    auto consistent = [&](std::size_t q) {
        for (const fta_transition* t : touching[q]) {
            if (map_ab[static_cast<std::size_t>(t->target)] < 0) continue;
            bool all = true;
            fta_transition img;
            img.target = map_ab[static_cast<std::size_t>(t->target)];
            img.symbol = t->symbol;
            img.sources.reserve(t->sources.size());
            for (int s : t->sources) {
                int m = map_ab[static_cast<std::size_t>(s)];
                if (m < 0) {
                    all = false;
                    break;
                }
                img.sources.push_back(m);
            }
            if (all && !b.transitions().count(img)) return false;
        }
        return true;
    };

    auto search = [&](auto&& self, std::size_t idx) -> bool {
        if (idx == n) return true;
        std::size_t q = order[idx];
        for (int r : candidates[q]) {
            if (used_b[static_cast<std::size_t>(r)]) continue;
            map_ab[q] = r;
            used_b[static_cast<std::size_t>(r)] = 1;
            if (consistent(q) && self(self, idx + 1)) return true;
            map_ab[q] = -1;
            used_b[static_cast<std::size_t>(r)] = 0;
        }
        return false;
    };

    if (!search(search, 0)) return std::nullopt;
    // every a-transition maps into b and the counts agree, so the map is a
    // bijection on transitions as well
    return map_ab;
}

// ------------------------------------------------------------ serialization

// JSON schema:
//   { "states": [{"id": int, "label": str, "final": bool}],
//     "transitions": [{"target": int, "symbol": str, "sources": [int,...]}] }
// States are emitted sorted by label (ids renumbered accordingly),
// transitions sorted by (target, symbol, sources).
inline std::string to_json(const tree_automaton& a) {
    const std::size_t n = a.state_count();
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return a.states()[static_cast<std::size_t>(x)].label <
               a.states()[static_cast<std::size_t>(y)].label;
    });
    std::vector<int> new_id(n);
    for (std::size_t i = 0; i < n; ++i) new_id[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

    nlohmann::json j;
    j["states"] = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const fta_state& st = a.states()[static_cast<std::size_t>(order[i])];
        j["states"].push_back({{"id", static_cast<int>(i)},
                               {"label", st.label},
                               {"final", st.is_final}});
    }
    std::vector<fta_transition> ts(a.transitions().begin(), a.transitions().end());
    for (fta_transition& t : ts) {
        t.target = new_id[static_cast<std::size_t>(t.target)];
        for (int& s : t.sources) s = new_id[static_cast<std::size_t>(s)];
    }
    std::sort(ts.begin(), ts.end(), [](const fta_transition& x, const fta_transition& y) {
        if (x.target != y.target) return x.target < y.target;
        if (x.symbol.str() != y.symbol.str()) return x.symbol.str() < y.symbol.str();
        return x.sources < y.sources;
    });
    j["transitions"] = nlohmann::json::array();
    for (const fta_transition& t : ts) {
        j["transitions"].push_back(
            {{"target", t.target}, {"symbol", t.symbol.str()}, {"sources", t.sources}});
    }
    return j.dump(2);
}

namespace detail {

inline sym parse_sym_string(const std::string& s) {
    std::size_t at = s.find('@');
    if (at == std::string::npos) return unmarked(s);
    return sym{s.substr(0, at), std::stoi(s.substr(at + 1))};
}

}  // namespace detail

inline tree_automaton from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what(), 0);
    }
    if (!j.contains("states") || !j.contains("transitions"))
        throw parse_error("automaton JSON needs 'states' and 'transitions'", 0);

    // arities reconstructed from the transitions
    std::map<std::string, int> arities;
    for (const auto& t : j["transitions"]) {
        sym s = detail::parse_sym_string(t.at("symbol").get<std::string>());
        arities[s.name] = static_cast<int>(t.at("sources").size());
    }
    ranked_alphabet sigma;
    for (const auto& [name, ar] : arities) sigma.add(name, ar);

    tree_automaton a(sigma);
    std::map<int, int> id_map;
    for (const auto& st : j["states"]) {
        int id = st.at("id").get<int>();
        int q = a.add_state(st.at("label").get<std::string>(), st.at("final").get<bool>());
        if (!id_map.emplace(id, q).second)
            throw parse_error("duplicate state id in JSON", 0);
    }
    for (const auto& t : j["transitions"]) {
        int target = t.at("target").get<int>();
        if (!id_map.count(target)) throw parse_error("transition targets unknown state", 0);
        std::vector<int> sources;
        for (const auto& s : t.at("sources")) {
            int v = s.get<int>();
            if (!id_map.count(v)) throw parse_error("transition uses unknown state", 0);
            sources.push_back(id_map[v]);
        }
        a.add_transition(id_map[target],
                         detail::parse_sym_string(t.at("symbol").get<std::string>()),
                         std::move(sources));
    }
    return a;
}

// DOT output.  Final states are double-circled.  Arity-0 transitions are
// source-less arrows labelled by the constant; arity >= 2 transitions go
// through a junction node labelled with the symbol, with child slots on the
// incoming edges.
inline std::string to_dot(const tree_automaton& a) {
    auto escape = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out;
    };
    std::string out = "digraph fta {\n  rankdir=BT;\n";
    for (std::size_t q = 0; q < a.state_count(); ++q) {
        const fta_state& st = a.states()[q];
        out += "  s" + std::to_string(q) + " [label=\"" + escape(st.label) + "\", shape=" +
               (st.is_final ? "doublecircle" : "circle") + "];\n";
    }
    int anchor = 0;
    for (const fta_transition& t : a.transitions()) {
        if (t.sources.empty()) {
            std::string node = "c" + std::to_string(anchor++);
            out += "  " + node + " [shape=point, style=invis];\n";
            out += "  " + node + " -> s" + std::to_string(t.target) + " [label=\"" +
                   escape(t.symbol.str()) + "\"];\n";
        } else if (t.sources.size() == 1) {
            out += "  s" + std::to_string(t.sources[0]) + " -> s" +
                   std::to_string(t.target) + " [label=\"" + escape(t.symbol.str()) +
                   "\"];\n";
        } else {
            std::string node = "j" + std::to_string(anchor++);
            out += "  " + node + " [shape=box, label=\"" + escape(t.symbol.str()) +
                   "\", fontsize=10, width=0.2, height=0.2];\n";
            for (std::size_t i = 0; i < t.sources.size(); ++i) {
                out += "  s" + std::to_string(t.sources[i]) + " -> " + node +
                       " [label=\"" + std::to_string(i + 1) + "\", arrowhead=none];\n";
            }
            out += "  " + node + " -> s" + std::to_string(t.target) + ";\n";
        }
    }
    out += "}\n";
    return out;
}

}  // namespace treeregex
