#pragma once
// Seeded random expression generator used by the property suites and the
// CLI.  Output respects the expression invariants: no inner 0, arities
// match, subscripts are constants of the alphabet.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "terms.hpp"

namespace treeregex {

struct generator_config {
    int max_ast_nodes = 12;
    ranked_alphabet alphabet;
    std::uint64_t seed = 0;
    struct weight_table {
        double constant = 1.0;
        double apply = 2.0;
        double sum = 1.0;
        double product = 1.0;
        double closure = 1.0;
    } weights;
};

namespace detail {

class expr_generator {
public:
    explicit expr_generator(const generator_config& cfg)
        : cfg_(cfg), rng_(cfg.seed), consts_(cfg.alphabet.constants()) {
        const auto& w = cfg.weights;
        if (w.constant < 0 || w.apply < 0 || w.sum < 0 || w.product < 0 || w.closure < 0)
            throw std::invalid_argument("generator weights must be nonnegative");
        if (w.constant + w.apply + w.sum + w.product + w.closure <= 0)
            throw std::invalid_argument("generator needs at least one positive weight");
        if (consts_.empty())
            throw std::invalid_argument("generator alphabet needs a constant");
        if (cfg.max_ast_nodes < 1)
            throw std::invalid_argument("generator budget must be >= 1");
        for (const auto& [name, ar] : cfg.alphabet.symbols())
            if (ar > 0) ranked_.emplace_back(name, ar);
    }

    expr_ptr gen() { return gen_node(cfg_.max_ast_nodes); }

private:
    enum kind { k_const, k_apply, k_sum, k_prod, k_star };

    int uniform(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }

    const std::string& pick_const() {
        return consts_[static_cast<std::size_t>(uniform(0, static_cast<int>(consts_.size()) - 1))];
    }

    expr_ptr gen_node(int budget) {
        std::vector<std::pair<kind, double>> choices;
        const auto& w = cfg_.weights;
        choices.emplace_back(k_const, w.constant);
        if (budget >= 2 && smallest_arity() >= 1 && smallest_arity() + 1 <= budget)
            choices.emplace_back(k_apply, w.apply);
        if (budget >= 3) choices.emplace_back(k_sum, w.sum);
        if (budget >= 3) choices.emplace_back(k_prod, w.product);
        if (budget >= 2) choices.emplace_back(k_star, w.closure);

        double total = 0;
        for (const auto& [k, p] : choices) total += p;
        kind chosen = k_const;
        if (total > 0) {
            double roll = std::uniform_real_distribution<double>(0.0, total)(rng_);
            for (const auto& [k, p] : choices) {
                if (roll < p) {
                    chosen = k;
                    break;
                }
                roll -= p;
            }
        }

        switch (chosen) {
        case k_const:
            return make_constant(pick_const());
        case k_apply: {
            std::vector<std::pair<std::string, int>> fits;
            for (const auto& [name, ar] : ranked_)
                if (ar + 1 <= budget) fits.emplace_back(name, ar);
            const auto& [name, ar] =
                fits[static_cast<std::size_t>(uniform(0, static_cast<int>(fits.size()) - 1))];
            std::vector<int> sizes = split(budget - 1, ar);
            std::vector<expr_ptr> args;
            args.reserve(static_cast<std::size_t>(ar));
            for (int s : sizes) args.push_back(gen_node(s));
            return make_apply(name, std::move(args));
        }
        case k_sum: {
            std::vector<int> sizes = split(budget - 1, 2);
            expr_ptr l = gen_node(sizes[0]);
            return make_sum(std::move(l), gen_node(sizes[1]));
        }
        case k_prod: {
            std::vector<int> sizes = split(budget - 1, 2);
            expr_ptr l = gen_node(sizes[0]);
            std::string c = pick_const();
            return make_product(std::move(l), std::move(c), gen_node(sizes[1]));
        }
        case k_star:
            return make_closure(gen_node(budget - 1), pick_const());
        }
        return make_constant(pick_const());
    }

    int smallest_arity() const {
        int best = 0;
        for (const auto& [name, ar] : ranked_)
            if (best == 0 || ar < best) best = ar;
        return best;
    }

    // A random composition of `total` into `parts` positive summands.
    std::vector<int> split(int total, int parts) {
        std::vector<int> out(static_cast<std::size_t>(parts));
        int remaining = total;
        for (int i = 0; i < parts - 1; ++i) {
            int hi = remaining - (parts - 1 - i);
            out[static_cast<std::size_t>(i)] = uniform(1, hi);
            remaining -= out[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(parts - 1)] = remaining;
        return out;
    }

    const generator_config& cfg_;
    std::mt19937_64 rng_;
    std::vector<std::string> consts_;
    std::vector<std::pair<std::string, int>> ranked_;
};

}  // namespace detail

// Deterministic in the whole config, including the seed.
inline expr_ptr generate_expr(const generator_config& cfg) {
    detail::expr_generator g(cfg);
    return g.gen();
}

// `count` expressions drawn from one stream seeded by cfg.seed.
inline std::vector<expr_ptr> generate_batch(const generator_config& cfg, int count) {
    detail::expr_generator g(cfg);
    std::vector<expr_ptr> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(g.gen());
    return out;
}

}  // namespace treeregex
