#include <functional>
#include <map>

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "treeregex/battery.hpp"
#include "treeregex/posfun.hpp"

using namespace treeregex;

namespace {

symbol_set syms(std::initializer_list<const char*> names) {
    symbol_set out;
    for (const char* n : names) {
        std::string s = n;
        std::size_t at = s.find('@');
        if (at == std::string::npos)
            out.insert(unmarked(s));
        else
            out.insert(sym{s.substr(0, at), std::stoi(s.substr(at + 1))});
    }
    return out;
}

}  // namespace

TEST_CASE("First/Follow fixtures on the linearized running example") {
    expr_ptr bar = linearize(fixtures::example_expr());
    position_analysis pa(bar);

    CHECK(pa.first() == syms({"b", "f@1", "h@2", "g@3", "f@4", "h@5"}));
    CHECK(pa.follow(sym{"g", 3}, 2) == syms({"a"}));
    CHECK(pa.follow(sym{"f", 1}, 1) == syms({"b", "f@1", "h@2"}));
    CHECK(pa.follow(sym{"h", 2}, 1) == syms({"b", "f@1", "h@2"}));
    CHECK(pa.follow(sym{"g", 3}, 1) == syms({"b", "g@3", "f@4", "h@5"}));
    CHECK(pa.follow(sym{"f", 4}, 1) == syms({"b", "f@4", "h@5"}));
    CHECK(pa.follow(sym{"h", 5}, 1) == syms({"b", "f@4", "h@5"}));

    // the sentinel position delegates to First
    CHECK(pa.follow(position_id::eps()) == pa.first());
}

TEST_CASE("First basics") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    CHECK(first(make_zero()).empty());
    CHECK(first(parse_expr("a", sigma)) == syms({"a"}));

    expr_ptr chain = linearize(fixtures::product_chain_expr(5));
    CHECK(first(chain) == syms({"a", "f1@1", "f2@2", "f3@3", "f4@4", "f5@5"}));
}

TEST_CASE("Follow basics and errors") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    CHECK(follow(parse_expr("a", sigma), unmarked("f"), 1).empty());

    // a symbol absent from the expression has an empty Follow set
    expr_ptr bar = linearize(fixtures::example_expr());
    CHECK(follow(bar, sym{"f", 9}, 1).empty());

    // non-linear input is rejected for Follow
    expr_ptr dup = parse_expr("f(a)+f(b)", sigma);
    CHECK_THROWS_AS(follow(dup, unmarked("f"), 1), std::invalid_argument);

    // First stays defined on non-linear expressions (continuations need it)
    CHECK(first(dup) == syms({"f"}));
}

TEST_CASE("Last fixtures") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    CHECK(last(parse_expr("f(a)*[a].[a]b", sigma)) == syms({"b"}));
    CHECK(last(parse_expr("c", sigma)) == syms({"c"}));
    CHECK(last(parse_expr("g@3(c,a)*[c]", sigma, true)) == syms({"a", "c"}));
    CHECK(last(make_zero()).empty());
}

TEST_CASE("position functions agree with the enumeration oracle") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    generator_config cfg = fixtures::example_generator(0, 5);
    for (int i = 0; i < 30; ++i) {
        cfg.seed = 6000 + static_cast<std::uint64_t>(i);
        expr_ptr bar = linearize(generate_expr(cfg));
        position_analysis pa(bar);
        int bound = 2 * expr_size(bar);
        std::set<tree> lang = enumerate_language(bar, bound);

        symbol_set roots;
        symbol_set leaves;
        std::map<std::pair<sym, int>, symbol_set> observed_follow;
        std::function<void(const tree&)> walk = [&](const tree& t) {
            if (t.children.empty()) leaves.insert(t.root);
            for (std::size_t k = 0; k < t.children.size(); ++k) {
                observed_follow[{t.root, static_cast<int>(k) + 1}].insert(
                    t.children[k].root);
                walk(t.children[k]);
            }
        };
        for (const tree& t : lang) {
            roots.insert(t.root);
            walk(t);
        }

        CHECK(roots == pa.first());
        CHECK(leaves == pa.last());
        for (const sym& p : positions(bar)) {
            for (int k = 1; k <= sigma.arity(p.name); ++k) {
                symbol_set want = pa.follow(p, k);
                symbol_set got = observed_follow.count({p, k})
                                     ? observed_follow[{p, k}]
                                     : symbol_set{};
                CHECK(got == want);
            }
        }
    }
}

TEST_CASE("membership is characterized by First and Follow") {
    ranked_alphabet sigma = fixtures::example_alphabet();
    auto characterized = [&](const position_analysis& pa, const tree& t) {
        if (!pa.first().count(t.root)) return false;
        std::function<bool(const tree&)> ok = [&](const tree& node) {
            for (std::size_t k = 0; k < node.children.size(); ++k) {
                symbol_set fol = pa.follow(node.root, static_cast<int>(k) + 1);
                if (!fol.count(node.children[k].root)) return false;
                if (!ok(node.children[k])) return false;
            }
            return true;
        };
        return ok(t);
    };

    generator_config cfg = fixtures::example_generator(0, 5);
    for (int i = 0; i < 12; ++i) {
        cfg.seed = 7000 + static_cast<std::uint64_t>(i);
        expr_ptr bar = linearize(generate_expr(cfg));
        position_analysis pa(bar);

        std::vector<sym> consts;
        for (const std::string& c : sigma.constants()) consts.push_back(unmarked(c));
        std::vector<std::pair<sym, int>> ranked;
        for (const sym& p : positions(bar)) ranked.emplace_back(p, sigma.arity(p.name));
        const int bound = 6;
        tree_universe universe(consts, ranked, bound);
        std::set<tree> lang = enumerate_language(bar, bound);

        for (std::size_t id = 0; id < universe.size(); ++id) {
            tree t = universe.materialize(static_cast<int>(id));
            CHECK(characterized(pa, t) == (lang.count(t) != 0));
        }
    }
}
