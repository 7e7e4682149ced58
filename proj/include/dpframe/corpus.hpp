#pragma once

// Built-in example systems with their known termination proofs.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpframe/dp.hpp"
#include "dpframe/parse.hpp"
#include "dpframe/term.hpp"

namespace dpframe {

struct CorpusEntry {
    std::string name;
    std::optional<std::size_t> k;  // rspeter only
    Trs trs;
    std::map<std::string, LinearInterpretation> interpretations;
    std::map<std::string, SimpleProjection> projections;
};

class UnknownBuiltin : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline Rule rule_of(const std::string& l, const std::string& r, const std::set<std::string>& vars) {
    return Rule{parse_term_vars(l, vars), parse_term_vars(r, vars), {}};
}

inline Term app_n(const std::string& f, std::vector<Term> args) { return Term::app(f, std::move(args)); }

inline Trs rspeter_trs(std::size_t k) {
    const Term zero = Term::app("0");
    auto s = [](Term t) { return Term::app("s", {std::move(t)}); };
    const Term m = Term::variable("m"), n = Term::variable("n");
    std::vector<Term> l;
    for (std::size_t i = 1; i + 2 <= k; ++i) l.push_back(Term::variable("l" + std::to_string(i)));
    auto with = [&](std::vector<Term> prefix, std::initializer_list<Term> tail) {
        prefix.insert(prefix.end(), tail.begin(), tail.end());
        return app_n("Ack", std::move(prefix));
    };
    std::vector<Rule> rules;
    {
        std::vector<Term> zeros(k - 1, zero);
        zeros.push_back(n);
        rules.push_back({app_n("Ack", zeros), s(n), {}});
    }
    rules.push_back({with(l, {s(m), zero}), with(l, {m, s(zero)}), {}});
    rules.push_back({with(l, {s(m), s(n)}), with(l, {m, with(l, {s(m), n})}), {}});
    for (std::size_t i = 1; i + 2 <= k; ++i) {
        std::vector<Term> lhs(l.begin(), l.begin() + static_cast<long>(i - 1));
        lhs.push_back(s(l[i - 1]));
        while (lhs.size() < k - 1) lhs.push_back(zero);
        lhs.push_back(n);
        std::vector<Term> rhs(l.begin(), l.begin() + static_cast<long>(i));
        rhs.push_back(n);
        while (rhs.size() < k - 1) rhs.push_back(zero);
        rhs.push_back(n);
        rules.push_back({app_n("Ack", lhs), app_n("Ack", rhs), {}});
    }
    return Trs::make(std::move(rules));
}

}  // namespace detail

inline CorpusEntry builtin(const std::string& name, std::optional<std::size_t> k = std::nullopt) {
    using detail::rule_of;
    CorpusEntry e;
    e.name = name;
    if (name == "rsack") {
        std::set<std::string> v{"x", "y"};
        e.trs = Trs::make({rule_of("Ack(0,y)", "s(y)", v), rule_of("Ack(s(x),0)", "Ack(x,s(0))", v),
                           rule_of("Ack(s(x),s(y))", "Ack(x,Ack(s(x),y))", v)});
        e.projections["first"] = {{"Ack#", 1}};
        e.projections["second"] = {{"Ack#", 2}};
    } else if (name == "rsup") {
        std::set<std::string> v{"x", "y"};
        e.trs = Trs::make({rule_of("d(0)", "0", v), rule_of("d(s(x))", "s(s(d(x)))", v),
                           rule_of("e(s(x),y)", "e(x,d(y))", v),
                           rule_of("sup(s(x),e(0,y))", "sup(x,e(y,s(0)))", v)});
        e.interpretations["A"] = LinearInterpretation{
            {"d", {{2}, 0}},     {"e", {{0, 0}, 0}},    {"sup", {{0, 0}, 0}},  {"s", {{1}, 1}},
            {"0", {{}, 0}},      {"d#", {{1}, 0}},      {"e#", {{1, 0}, 0}},   {"sup#", {{1, 0}, 0}},
        };
    } else if (name == "rsdieter") {
        std::set<std::string> v{"x", "y", "z", "w"};
        e.trs = Trs::make({rule_of("o(i(x),o(y,z))", "o(x,o(i(i(y)),z))", v),
                           rule_of("o(i(x),o(y,o(z,w)))", "o(x,o(z,o(y,w)))", v)});
        e.interpretations["A"] = LinearInterpretation{
            {"o#", {{0, 1}, 0}},
            {"o", {{0, 1}, 1}},
            {"i", {{0}, 0}},
        };
        e.interpretations["B"] = LinearInterpretation{
            {"o#", {{1, 0}, 0}},
            {"o", {{0, 0}, 0}},
            {"i", {{1}, 1}},
        };
    } else if (name == "rspeter") {
        std::size_t kk = k.value_or(2);
        if (kk < 2) throw UnknownBuiltin("rspeter needs k >= 2");
        e.k = kk;
        e.trs = detail::rspeter_trs(kk);
    } else {
        throw UnknownBuiltin("unknown builtin system '" + name + "' (known: rsack, rsdieter, rsup, rspeter)");
    }
    return e;
}

/// Graph processor at the root, then the given algebra on every SCC.
inline ProofTree rsup_tree(const CorpusEntry& e) {
    const LinearInterpretation& a = e.interpretations.at("A");
    std::size_t all = compute_dps(e.trs).size();
    return build_tree(e.trs, [&](const std::vector<DependencyPair>& ps) -> Processor {
        if (ps.size() == all) return GraphStep{};
        return ReductionPairStep{a};
    });
}

/// Algebra A on the full problem, then algebra B on the remainder.
inline ProofTree rsdieter_tree(const CorpusEntry& e) {
    std::size_t all = compute_dps(e.trs).size();
    return build_tree(e.trs, [&](const std::vector<DependencyPair>& ps) -> Processor {
        return ReductionPairStep{e.interpretations.at(ps.size() == all ? "A" : "B")};
    });
}

/// The known proof of the entry: canonical trees where an algebra is
/// supplied, proof search otherwise.
inline ProofTree canonical_tree(const CorpusEntry& e) {
    if (e.name == "rsup") return rsup_tree(e);
    if (e.name == "rsdieter") return rsdieter_tree(e);
    auto res = search_proof(e.trs);
    if (!res.tree) throw TreeBuilderError("no proof found for " + e.name);
    return *res.tree;
}

}  // namespace dpframe
