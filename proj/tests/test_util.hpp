#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "dpframe/parse.hpp"
#include "dpframe/term.hpp"

namespace dpframe::testing {

inline Term T(const std::string& text, const std::set<std::string>& vars = {}) {
    return parse_term_vars(text, vars);
}

/// Random ground term over the signature of `trs`, depth at most `depth`.
inline Term random_term(std::mt19937& rng, const Trs& trs, std::size_t depth) {
    std::vector<Symbol> all = trs.symbols(), constants;
    for (const Symbol& s : all)
        if (s.arity == 0) constants.push_back(s);
    auto pick = [&](const std::vector<Symbol>& from) {
        return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
    };
    Symbol f = depth == 0 ? pick(constants) : pick(all);
    std::vector<Term> args;
    for (std::size_t i = 0; i < f.arity; ++i) args.push_back(random_term(rng, trs, depth - 1));
    return Term::app(f.name, std::move(args));
}

/// Random term that may contain the given variables.
inline Term random_open_term(std::mt19937& rng, const Trs& trs, std::size_t depth, const std::vector<std::string>& vars) {
    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0)
        return Term::variable(vars[std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng)]);
    std::vector<Symbol> all = trs.symbols();
    Symbol f = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    if (depth == 0 && f.arity > 0) return Term::variable(vars.front());
    std::vector<Term> args;
    for (std::size_t i = 0; i < f.arity; ++i) args.push_back(random_open_term(rng, trs, depth - 1, vars));
    return Term::app(f.name, std::move(args));
}

}  // namespace dpframe::testing
