#include <functional>

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "treeregex/battery.hpp"
#include "treeregex/construct.hpp"

using namespace treeregex;

namespace {

void check_counts(const tree_automaton& a, std::size_t states, std::size_t transitions) {
    CHECK(a.state_count() == states);
    CHECK(a.transition_count() == transitions);
}

}  // namespace

TEST_CASE("construction sizes on the running example") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    expr_ptr e = fixtures::example_expr();
    check_counts(k_position_automaton(e, sigma), 7, 23);
    check_counts(follow_automaton(e, sigma), 5, 17);
    check_counts(equation_automaton(e, sigma), 5, 15);
    check_counts(k_c_continuation_automaton(e, sigma), 7, 23);
}

TEST_CASE("single-constant expression") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    expr_ptr e = parse_expr("a", sigma);

    tree_automaton pos = k_position_automaton(e, sigma);
    REQUIRE(pos.state_count() == 1);
    CHECK(pos.states()[0].label == "eps^1");
    CHECK(pos.transition_count() == 1);

    check_counts(follow_automaton(e, sigma), 1, 1);
    check_counts(equation_automaton(e, sigma), 1, 1);
    check_counts(k_c_continuation_automaton(e, sigma), 1, 1);

    // accepts exactly the single-node tree a
    tree_universe universe(sigma, 3);
    std::vector<char> accept = acceptance_vector(pos, universe);
    for (std::size_t id = 0; id < universe.size(); ++id) {
        tree t = universe.materialize(static_cast<int>(id));
        CHECK((accept[id] != 0) == (t == leaf("a")));
    }
}

TEST_CASE("empty expression gives empty automata") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    for (const tree_automaton& a :
         {k_position_automaton(make_zero(), sigma), follow_automaton(make_zero(), sigma),
          equation_automaton(make_zero(), sigma),
          k_c_continuation_automaton(make_zero(), sigma)}) {
        CHECK(a.state_count() == 0);
        CHECK(a.transition_count() == 0);
    }
}

TEST_CASE("derivative tuples") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    expr_ptr e = fixtures::example_expr();

    tuple_set g_inv = f_inverse(unmarked("g"), e);
    REQUIRE(g_inv.size() == 1);
    expr_tuple expected = {
        parse_expr("(c.[c]g(c,a)*[c]).[c](f(a)*[a].[a]b+h(b))*[b]", sigma),
        parse_expr("(a.[c]g(c,a)*[c]).[c](f(a)*[a].[a]b+h(b))*[b]", sigma)};
    CHECK(g_inv.contains(expected));

    CHECK(f_inverse(unmarked("f"), parse_expr("a", sigma)).empty());
    CHECK(f_inverse(unmarked("f"), parse_expr("h(b)", sigma)).empty());

    tuple_set h_inv = f_inverse(unmarked("h"), parse_expr("h(b)", sigma));
    REQUIRE(h_inv.size() == 1);
    CHECK(h_inv.contains(expr_tuple{parse_expr("b", sigma)}));
}

TEST_CASE("partial derivatives by words") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    expr_ptr e = fixtures::example_expr();
    expr_ptr cont_h = parse_expr("b.[b](f(a)*[a].[a]b+h(b))*[b]", sigma);
    expr_ptr cont_f =
        parse_expr("((a.[a]f(a)*[a]).[a]b).[b](f(a)*[a].[a]b+h(b))*[b]", sigma);

    expr_set d_eps = partial_derivative(e, {});
    REQUIRE(d_eps.size() == 1);
    CHECK(d_eps.contains(e));

    expr_set d_h = partial_derivative(e, {unmarked("h")});
    REQUIRE(d_h.size() == 1);
    CHECK(d_h.contains(cont_h));

    expr_set d_f = partial_derivative(e, {unmarked("f")});
    REQUIRE(d_f.size() == 1);
    CHECK(d_f.contains(cont_f));

    expr_set d_gh = partial_derivative(e, {unmarked("g"), unmarked("h")});
    REQUIRE(d_gh.size() == 1);
    CHECK(d_gh.contains(cont_h));

    // a dead word collapses to {0} and stays there
    expr_set dead = partial_derivative(parse_expr("h(b)", sigma),
                                       {unmarked("f"), unmarked("f")});
    REQUIRE(dead.size() == 1);
    CHECK(dead.contains(make_zero()));
}

TEST_CASE("continuations of the running example") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    linear_kit kit(linearize(fixtures::example_expr()), sigma);

    auto cont = [&](const char* name, int mark, int slot) {
        return to_string(kit.continuation(position_id{sym{name, mark}, slot, false}));
    };
    CHECK(cont("f", 1, 1) ==
          "((a.[a]f@1(a)*[a]).[a]b).[b](f@1(a)*[a].[a]b+h@2(b))*[b]");
    CHECK(cont("h", 2, 1) == "b.[b](f@1(a)*[a].[a]b+h@2(b))*[b]");
    CHECK(cont("g", 3, 1) ==
          "(c.[c]g@3(c,a)*[c]).[c](f@4(a)*[a].[a]b+h@5(b))*[b]");
    CHECK(cont("g", 3, 2) ==
          "(a.[c]g@3(c,a)*[c]).[c](f@4(a)*[a].[a]b+h@5(b))*[b]");
    CHECK(cont("f", 4, 1) ==
          "((a.[a]f@4(a)*[a]).[a]b).[b](f@4(a)*[a].[a]b+h@5(b))*[b]");
    CHECK(cont("h", 5, 1) == "b.[b](f@4(a)*[a].[a]b+h@5(b))*[b]");

    // the sentinel keeps the whole linearized expression
    CHECK(equal(kit.continuation(position_id::eps()), kit.linear()));

    CHECK_THROWS_AS(kit.continuation(position_id{sym{"f", 9}, 1, false}),
                    std::invalid_argument);

    // product whose left factor cannot reach the subscript kills the
    // right-hand position
    expr_ptr dead = parse_expr("f@1(c).[a]h@2(b)", sigma, true);
    linear_kit dead_kit(dead, sigma);
    CHECK(dead_kit.continuation(position_id{sym{"h", 2}, 1, false})->kind ==
          expr_kind::zero);

    // and the automaton still accepts exactly the denoted language
    tree_automaton cont_aut = k_c_continuation_automaton(unmark(dead), sigma);
    CHECK(cont_aut.state_count() == 3);
    CHECK(accepts(cont_aut, parse_tree("f(c)", sigma)));
    CHECK_FALSE(accepts(cont_aut, parse_tree("h(b)", sigma)));
    CHECK_FALSE(accepts(cont_aut, parse_tree("c", sigma)));
}

TEST_CASE("First of a continuation equals the Follow set of the position") {
    linear_kit kit(linearize(fixtures::example_expr()), fixtures::example_alphabet());
    for (const position_id& p : kit.states()) {
        CHECK(position_analysis(kit.continuation(p)).first() == kit.follow_of(p));
    }
}

TEST_CASE("derived terms never contain the empty expression") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    generator_config cfg = fixtures::example_generator(0, 10);
    std::function<bool(const expr_ptr&)> has_zero = [&](const expr_ptr& e) {
        if (e->kind == expr_kind::zero) return true;
        for (const expr_ptr& c : e->children)
            if (has_zero(c)) return true;
        return false;
    };
    for (int i = 0; i < 40; ++i) {
        cfg.seed = 8000 + static_cast<std::uint64_t>(i);
        expr_ptr e = generate_expr(cfg);
        tree_automaton eq = equation_automaton(e, sigma);
        for (const fta_state& st : eq.states()) {
            expr_ptr back = parse_expr(st.label, sigma, true);
            CHECK(to_string(back) == st.label);
            CHECK_FALSE(has_zero(back));
        }
    }
}

TEST_CASE("parametric family sizes, small instances") {
    {
        ranked_alphabet sigma = fixtures::product_chain_alphabet(3);
        expr_ptr e = fixtures::product_chain_expr(3);
        CHECK(k_position_automaton(e, sigma).state_count() == 4);
        CHECK(follow_automaton(e, sigma).state_count() == 1);
        CHECK(equation_automaton(e, sigma).state_count() == 4);
    }
    {
        ranked_alphabet sigma = fixtures::closure_sum_alphabet();
        expr_ptr e = fixtures::closure_sum_expr(3);
        CHECK(k_position_automaton(e, sigma).state_count() == 4);
        CHECK(follow_automaton(e, sigma).state_count() == 4);
        CHECK(equation_automaton(e, sigma).state_count() == 2);
    }
}

TEST_CASE("position and continuation automata coincide") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    generator_config cfg = fixtures::example_generator(0, 12);
    for (int i = 0; i < 25; ++i) {
        cfg.seed = 9000 + static_cast<std::uint64_t>(i);
        expr_ptr e = generate_expr(cfg);
        linear_kit kit(e, sigma);
        tree_automaton pos = k_position_automaton_marked(kit).relabeled();
        tree_automaton cont = k_c_continuation_automaton_marked(kit).relabeled();
        CHECK(pos.transitions() == cont.transitions());
        CHECK(isomorphic(pos, cont).has_value());
    }
}

TEST_CASE("watchdog guards the derived-term fixpoint") {
    CHECK(equation_state_cap == 10000);
}
