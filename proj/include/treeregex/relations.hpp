#pragma once
// Equivalence relations between construction states and the quotient
// pipeline built on them.
//
//   rel_follow    positions with equal Follow sets (eps^1 uses First);
//                 quotienting the k-position automaton by it yields the
//                 follow automaton, and it is the largest similarity there
//   rel_e         positions whose continuations have equal unmarked images;
//                 quotienting the continuation automaton by it yields the
//                 equation automaton
//   rel_combined  rel_follow transported to continuation states
//   v_merge       two-stage join of rel_follow and rel_e giving an automaton
//                 no larger than both the follow and the equation automata
//
// All partitions index the shared state universe of linear_kit::states(),
// which is exactly the state numbering used by k_position_automaton_marked
// and k_c_continuation_automaton_marked.

#include <numeric>
#include <string>
#include <vector>

#include "construct.hpp"

namespace treeregex {

// Blocks of positions with equal Follow sets.
inline partition rel_follow(const linear_kit& kit) {
    std::map<std::string, int> tag_of;
    std::vector<int> block_ids;
    for (const position_id& p : kit.states()) {
        std::string key = to_string(kit.follow_of(p));
        auto [it, fresh] = tag_of.emplace(std::move(key), static_cast<int>(tag_of.size()));
        (void)fresh;
        block_ids.push_back(it->second);
    }
    return partition::from_block_ids(block_ids);
}

// Blocks of positions whose continuations have the same unmarked image.
inline partition rel_e(const linear_kit& kit) {
    std::map<std::string, int> tag_of;
    std::vector<int> block_ids;
    for (const position_id& p : kit.states()) {
        std::string key = to_string(unmark(kit.continuation(p)));
        auto [it, fresh] = tag_of.emplace(std::move(key), static_cast<int>(tag_of.size()));
        (void)fresh;
        block_ids.push_back(it->second);
    }
    return partition::from_block_ids(block_ids);
}

// Follow-set equality carried over to continuation states; same blocks as
// rel_follow under the shared state numbering.
inline partition rel_combined(const linear_kit& kit) { return rel_follow(kit); }

namespace detail {

struct union_find {
    std::vector<int> parent;

    explicit union_find(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(b)] = a;
    }
};

}  // namespace detail

struct v_merge_result {
    partition follow_part;        // stage 1: Follow-set equality
    tree_automaton stage1;        // continuation automaton / stage-1 partition
    partition merged_part;        // stage 2: blocks joined on shared unmarked
                                  // continuations, closed transitively
    tree_automaton merged;        // final automaton
};

// Two-stage merge on the continuation automaton.  Stage 1 groups positions
// by Follow-set equality, each group keeping the set of its members'
// continuations.  Stage 2 joins any two groups whose continuation sets share
// an unmarked image, closing transitively.  The result is the quotient of
// the continuation automaton by the joined partition.
inline v_merge_result v_merge(const linear_kit& kit) {
    v_merge_result out{rel_follow(kit), {}, {}, {}};
    tree_automaton cont = k_c_continuation_automaton_marked(kit).relabeled();
    out.stage1 = quotient(cont, out.follow_part);

    const std::size_t n_blocks = out.follow_part.size();
    detail::union_find uf(n_blocks);
    std::map<std::string, int> owner;  // unmarked continuation -> first block
    std::vector<int> block_of = out.follow_part.block_of(kit.states().size());
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (int q : out.follow_part.blocks[b]) {
            std::string image =
                to_string(unmark(kit.continuation(kit.states()[static_cast<std::size_t>(q)])));
            auto [it, fresh] = owner.emplace(std::move(image), static_cast<int>(b));
            if (!fresh) uf.unite(it->second, static_cast<int>(b));
        }
    }
    std::vector<int> merged_ids(kit.states().size());
    for (std::size_t q = 0; q < kit.states().size(); ++q)
        merged_ids[q] = uf.find(block_of[q]);
    out.merged_part = partition::from_block_ids(merged_ids);
    out.merged = quotient(cont, out.merged_part);
    return out;
}

inline tree_automaton v_merge_automaton(const expr_ptr& e, const ranked_alphabet& sigma) {
    if (e->kind == expr_kind::zero) return tree_automaton(sigma);
    linear_kit kit(e, sigma);
    return v_merge(kit).merged;
}

}  // namespace treeregex
