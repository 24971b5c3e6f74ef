#pragma once
// Shared fixtures: the running example used across the suites and the two
// parametric families exercising the follow/equation size gap.

#include "treeregex/generator.hpp"
#include "treeregex/terms.hpp"

namespace fixtures {

inline const char* example_alphabet_text() { return "a:0 b:0 c:0 f:1 h:1 g:2"; }

inline const char* example_expr_text() {
    return "(f(a)*[a].[a]b+h(b))*[b]+g(c,a)*[c].[c](f(a)*[a].[a]b+h(b))*[b]";
}

inline treeregex::ranked_alphabet example_alphabet() {
    return treeregex::parse_alphabet(example_alphabet_text());
}

inline treeregex::expr_ptr example_expr() {
    return treeregex::parse_expr(example_expr_text(), example_alphabet());
}

// ((f1(a)*[a] .[a] f2(a)*[a]) .[a] ...) .[a] fn(a)*[a], all closed under *[a].
// Linear by construction; its follow automaton collapses to one state while
// the equation automaton keeps n+1 derived terms.
inline treeregex::ranked_alphabet product_chain_alphabet(int n) {
    treeregex::ranked_alphabet sigma;
    sigma.add("a", 0);
    for (int i = 1; i <= n; ++i) sigma.add("f" + std::to_string(i), 1);
    return sigma;
}

inline treeregex::expr_ptr product_chain_expr(int n) {
    using namespace treeregex;
    auto star_f = [](int i) {
        return make_closure(
            make_apply("f" + std::to_string(i), {make_constant("a")}), "a");
    };
    expr_ptr chain = star_f(1);
    for (int i = 2; i <= n; ++i) chain = make_product(std::move(chain), "a", star_f(i));
    return make_closure(std::move(chain), "a");
}

// f(a)*[a] + f(a)*[a] + ... (n copies).  The equation automaton collapses to
// two derived terms while the follow automaton keeps one state per copy.
inline treeregex::ranked_alphabet closure_sum_alphabet() {
    treeregex::ranked_alphabet sigma;
    sigma.add("a", 0);
    sigma.add("f", 1);
    return sigma;
}

inline treeregex::expr_ptr closure_sum_expr(int n) {
    using namespace treeregex;
    auto star_f = [] {
        return make_closure(make_apply("f", {make_constant("a")}), "a");
    };
    expr_ptr e = star_f();
    for (int i = 2; i <= n; ++i) e = make_sum(std::move(e), star_f());
    return e;
}

inline treeregex::generator_config example_generator(std::uint64_t seed,
                                                     int max_nodes = 12) {
    treeregex::generator_config cfg;
    cfg.alphabet = example_alphabet();
    cfg.seed = seed;
    cfg.max_ast_nodes = max_nodes;
    return cfg;
}

}  // namespace fixtures
