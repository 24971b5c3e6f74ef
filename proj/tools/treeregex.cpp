// treeregex — regular tree expressions to bottom-up tree automata.
//
// Subcommands:
//   build    construct an automaton and serialize it (json or dot)
//   run      evaluate a tree bottom-up and report the verdict
//   stats    per-construction sizes and relation block counts
//   compare  verification battery: structural identities and bounded
//            language agreement against the enumeration oracle
//   gen      seeded random expressions
//
// Exit codes: 0 ok, 1 claim failure, 2 bad user input, 3 broken internal
// invariant (including the derived-term watchdog).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "treeregex/battery.hpp"
#include "treeregex/construct.hpp"
#include "treeregex/generator.hpp"
#include "treeregex/relations.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_claim_failure = 1;
constexpr int exit_user_error = 2;
constexpr int exit_internal = 3;

struct user_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw user_error("cannot read file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct common_inputs {
    std::string expr_text;
    std::string expr_file;
    std::string alphabet_text;
    std::string alphabet_file;
};

void add_common(CLI::App* cmd, common_inputs& in, bool need_expr = true) {
    cmd->add_option("--alphabet", in.alphabet_text, "alphabet declaration, e.g. \"a:0 f:1\"");
    cmd->add_option("--alphabet-file", in.alphabet_file, "file holding the alphabet declaration");
    if (need_expr) {
        cmd->add_option("--expr", in.expr_text, "expression text");
        cmd->add_option("--expr-file", in.expr_file, "file holding the expression");
    }
}

treeregex::ranked_alphabet load_alphabet(const common_inputs& in) {
    std::string text = in.alphabet_text;
    if (!in.alphabet_file.empty()) text = slurp(in.alphabet_file);
    if (text.empty()) throw user_error("missing --alphabet or --alphabet-file");
    return treeregex::parse_alphabet(text);
}

treeregex::expr_ptr load_expr(const common_inputs& in, const treeregex::ranked_alphabet& sigma) {
    std::string text = in.expr_text;
    if (!in.expr_file.empty()) text = slurp(in.expr_file);
    if (text.empty()) throw user_error("missing --expr or --expr-file");
    return treeregex::parse_expr(text, sigma);
}

treeregex::tree_automaton build_construction(const std::string& kind,
                                             const treeregex::expr_ptr& e,
                                             const treeregex::ranked_alphabet& sigma) {
    if (kind == "kpos") return treeregex::k_position_automaton(e, sigma);
    if (kind == "follow") return treeregex::follow_automaton(e, sigma);
    if (kind == "equation") return treeregex::equation_automaton(e, sigma);
    if (kind == "kcc") return treeregex::k_c_continuation_automaton(e, sigma);
    if (kind == "vmerge") return treeregex::v_merge_automaton(e, sigma);
    throw user_error("unknown construction '" + kind + "'");
}

void write_output(const std::string& payload, const std::string& out_path,
                  const std::string& summary) {
    if (out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
        std::cerr << summary << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw user_error("cannot write file: " + out_path);
        out << payload;
        if (!payload.empty() && payload.back() != '\n') out << '\n';
        std::cout << summary << '\n';
    }
}

int cmd_build(const common_inputs& in, const std::string& construction,
              const std::string& format, const std::string& out_path) {
    treeregex::ranked_alphabet sigma = load_alphabet(in);
    treeregex::expr_ptr e = load_expr(in, sigma);
    if (e->kind == treeregex::expr_kind::zero)
        std::cerr << "warning: expression denotes the empty language; the automaton is empty\n";
    treeregex::tree_automaton a = build_construction(construction, e, sigma);
    std::string payload;
    if (format == "json") {
        payload = treeregex::to_json(a);
    } else if (format == "dot") {
        payload = treeregex::to_dot(a);
    } else {
        throw user_error("unknown format '" + format + "'");
    }
    std::string summary = construction + ": " + std::to_string(a.state_count()) +
                          " states, " + std::to_string(a.transition_count()) +
                          " transitions";
    write_output(payload, out_path, summary);
    return exit_ok;
}

int cmd_run(const common_inputs& in, const std::string& construction,
            const std::string& tree_text) {
    treeregex::ranked_alphabet sigma = load_alphabet(in);
    treeregex::expr_ptr e = load_expr(in, sigma);
    treeregex::tree_automaton a = build_construction(construction, e, sigma);
    treeregex::tree t = treeregex::parse_tree(tree_text, sigma);
    std::set<int> reached = treeregex::run(a, t);
    std::string labels;
    bool accept = false;
    for (int q : reached) {
        if (!labels.empty()) labels += ", ";
        labels += a.states()[static_cast<std::size_t>(q)].label;
        accept = accept || a.states()[static_cast<std::size_t>(q)].is_final;
    }
    std::cout << "states: {" << labels << "}\n";
    std::cout << "verdict: " << (accept ? "accept" : "reject") << '\n';
    return exit_ok;
}

int cmd_stats(const common_inputs& in, bool show_posfun) {
    treeregex::ranked_alphabet sigma = load_alphabet(in);
    treeregex::expr_ptr e = load_expr(in, sigma);
    auto row = [](const std::string& name, std::size_t q, std::size_t d) {
        std::printf("%-10s %8zu %13zu\n", name.c_str(), q, d);
    };
    std::printf("%-10s %8s %13s\n", "automaton", "states", "transitions");
    if (e->kind == treeregex::expr_kind::zero) {
        for (const char* n : {"kpos", "follow", "equation", "kcc", "vmerge"})
            row(n, 0, 0);
        return exit_ok;
    }
    treeregex::linear_kit kit(e, sigma);
    treeregex::construction_suite s = treeregex::build_all(kit);
    row("kpos", s.kpos.state_count(), s.kpos.transition_count());
    row("follow", s.follow.state_count(), s.follow.transition_count());
    row("equation", s.equation.state_count(), s.equation.transition_count());
    row("kcc", s.kcc.state_count(), s.kcc.transition_count());
    row("vmerge", s.vm.merged.state_count(), s.vm.merged.transition_count());
    std::cout << "relation blocks: follow-equality=" << treeregex::rel_follow(kit).size()
              << " continuation-image=" << treeregex::rel_e(kit).size()
              << " combined=" << treeregex::rel_combined(kit).size()
              << " merged=" << s.vm.merged_part.size() << '\n';
    if (show_posfun) {
        std::cout << "First = " << treeregex::to_string(kit.analysis().first()) << '\n';
        for (const treeregex::position_id& p : kit.states()) {
            if (p.sentinel) continue;
            std::cout << "Follow(" << p.str()
                      << ") = " << treeregex::to_string(kit.follow_of(p)) << '\n';
        }
        std::cout << "Last = " << treeregex::to_string(kit.analysis().last()) << '\n';
    }
    return exit_ok;
}

int report_battery(const std::vector<treeregex::claim_result>& results) {
    int failures = 0;
    for (const treeregex::claim_result& c : results) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) std::cout << " — " << c.detail;
        std::cout << '\n';
        if (!c.pass) ++failures;
    }
    return failures;
}

int cmd_compare(const common_inputs& in, int depth, int count, std::uint64_t seed,
                int max_nodes) {
    treeregex::ranked_alphabet sigma = load_alphabet(in);
    treeregex::tree_universe universe(sigma, depth);
    int failures = 0;
    if (count > 0) {
        treeregex::generator_config cfg;
        cfg.alphabet = sigma;
        cfg.seed = seed;
        cfg.max_ast_nodes = max_nodes;
        std::vector<treeregex::expr_ptr> batch = treeregex::generate_batch(cfg, count);
        for (int i = 0; i < count; ++i) {
            std::cout << "# expression " << i + 1 << ": " << treeregex::to_string(batch[static_cast<std::size_t>(i)])
                      << '\n';
            failures += report_battery(
                treeregex::run_battery(batch[static_cast<std::size_t>(i)], sigma, depth, &universe));
        }
        std::cout << (failures == 0 ? "all claims hold over " : "claim failures over ")
                  << count << " expressions\n";
    } else {
        treeregex::expr_ptr e = load_expr(in, sigma);
        failures = report_battery(treeregex::run_battery(e, sigma, depth, &universe));
    }
    return failures == 0 ? exit_ok : exit_claim_failure;
}

int cmd_gen(const common_inputs& in, int count, std::uint64_t seed, int max_nodes,
            const std::string& out_path) {
    treeregex::ranked_alphabet sigma = load_alphabet(in);
    treeregex::generator_config cfg;
    cfg.alphabet = sigma;
    cfg.seed = seed;
    cfg.max_ast_nodes = max_nodes;
    std::string payload;
    for (const treeregex::expr_ptr& e : treeregex::generate_batch(cfg, count)) {
        payload += treeregex::to_string(e);
        payload += '\n';
    }
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream out(out_path);
        if (!out) throw user_error("cannot write file: " + out_path);
        out << payload;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regular tree expressions to bottom-up tree automata"};
    app.require_subcommand(1);

    common_inputs in;
    std::string construction = "kpos";
    std::string format = "json";
    std::string out_path;
    std::string tree_text;
    int depth = 8;
    int count = 0;
    int gen_count = 1;
    std::uint64_t seed = 0;
    int max_nodes = 12;
    bool show_posfun = false;

    CLI::App* build = app.add_subcommand("build", "construct and serialize an automaton");
    add_common(build, in);
    build->add_option("--construction", construction,
                      "kpos | follow | equation | kcc | vmerge");
    build->add_option("--format", format, "json | dot");
    build->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* runc = app.add_subcommand("run", "evaluate a tree against an automaton");
    add_common(runc, in);
    runc->add_option("--construction", construction,
                     "kpos | follow | equation | kcc | vmerge");
    runc->add_option("tree", tree_text, "tree literal, e.g. g(f(b),a)")->required();

    CLI::App* stats = app.add_subcommand("stats", "construction sizes and relation blocks");
    add_common(stats, in);
    stats->add_flag("--show-posfun", show_posfun, "also print First/Follow/Last");

    CLI::App* compare = app.add_subcommand("compare", "run the verification battery");
    add_common(compare, in);
    compare->add_option("--depth", depth, "tree-size bound for language agreement");
    compare->add_option("--count", count, "verify this many generated expressions instead of --expr");
    compare->add_option("--seed", seed, "generator seed");
    compare->add_option("--max-nodes", max_nodes, "generator AST node budget");

    CLI::App* gen = app.add_subcommand("gen", "emit seeded random expressions");
    add_common(gen, in, false);
    gen->add_option("--count", gen_count, "number of expressions");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--max-nodes", max_nodes, "AST node budget per expression");
    gen->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_user_error;
    }

    try {
        if (build->parsed()) return cmd_build(in, construction, format, out_path);
        if (runc->parsed()) return cmd_run(in, construction, tree_text);
        if (stats->parsed()) return cmd_stats(in, show_posfun);
        if (compare->parsed()) return cmd_compare(in, depth, count, seed, max_nodes);
        if (gen->parsed()) return cmd_gen(in, gen_count, seed, max_nodes, out_path);
    } catch (const treeregex::watchdog_error& e) {
        std::cerr << "watchdog: " << e.what() << '\n';
        return exit_internal;
    } catch (const treeregex::internal_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << '\n';
        return exit_internal;
    } catch (const treeregex::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_user_error;
    } catch (const user_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_user_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_user_error;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_user_error;
}
