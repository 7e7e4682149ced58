#include <gtest/gtest.h>

#include <random>

#include "dpframe/analysis.hpp"
#include "dpframe/corpus.hpp"
#include "dpframe/dp.hpp"
#include "test_util.hpp"

using namespace dpframe;
using dpframe::testing::T;

namespace {

// Oracle: plain recursion over one-step successors.
std::size_t dh_oracle(const Term& t, const std::vector<Rule>& rules) {
    std::size_t best = 0;
    for (const auto& st : rewrite_successors(t, rules)) best = std::max(best, 1 + dh_oracle(st.result, rules));
    return best;
}

// Oracle: textbook two-argument Ackermann closed forms for m <= 3.
std::size_t ack2(std::size_t m, std::size_t n) {
    switch (m) {
        case 0: return n + 1;
        case 1: return n + 2;
        case 2: return 2 * n + 3;
        default: return (std::size_t{1} << (n + 3)) - 3;
    }
}

Term normalise(Term t, const Trs& trs) {
    RuleIndex idx(trs.rules());
    for (auto succ = idx.successors(t); !succ.empty(); succ = idx.successors(t)) t = succ.front().result;
    return t;
}

std::set<Term> node_set(const ReachGraph& g) { return {g.nodes.begin(), g.nodes.end()}; }

}  // namespace

TEST(Reachable, Examples) {
    auto ack = builtin("rsack").trs.rules();
    auto a = reachable_set(T("s(0)"), ack);
    EXPECT_EQ(a.size(), 1u);
    EXPECT_TRUE(a.exhausted);
    EXPECT_EQ(node_set(reachable_set(T("Ack(0,0)"), ack)), (std::set<Term>{T("Ack(0,0)"), T("s(0)")}));
    EXPECT_EQ(node_set(reachable_set(T("Ack(s(0),0)"), ack)),
              (std::set<Term>{T("Ack(s(0),0)"), T("Ack(0,s(0))"), T("s(s(0))")}));
}

TEST(Reachable, FuelExhaustionIsReported) {
    auto ack = builtin("rsack").trs.rules();
    auto g = reachable_set(T("Ack(s(s(0)),s(s(0)))"), ack, Fuel{5, 100});
    EXPECT_FALSE(g.exhausted);
    EXPECT_THROW(dheight(T("Ack(s(s(0)),s(s(0)))"), ack, Fuel{5, 100}), Indeterminate);
    EXPECT_THROW(dheight(T("Ack(s(s(0)),s(s(0)))"), ack, Fuel{100000, 2}), Indeterminate);
}

TEST(NormalForms, Relative) {
    auto e = builtin("rsup");
    auto dps = compute_dps(e.trs);
    auto p = pair_rules(dps);
    EXPECT_TRUE(is_nf_relative(T("sup#(0,e(s(0),s(0)))"), p, e.trs.rules()));
    std::vector<Rule> five{dps[4].as_rule()};
    EXPECT_FALSE(is_nf_relative(T("sup#(s(0),e(0,s(0)))"), five, e.trs.rules()));
    EXPECT_TRUE(is_nf_relative(T("s(0)"), p, e.trs.rules()));
}

TEST(DerivationHeight, Examples) {
    auto ack = builtin("rsack").trs.rules();
    EXPECT_EQ(dheight(T("Ack(0,0)"), ack), 1);
    EXPECT_EQ(dheight(T("Ack(s(0),0)"), ack), 2);
    EXPECT_EQ(dheight(T("s(s(0))"), ack), 0);
}

TEST(DerivationHeight, Relative) {
    auto e = builtin("rsup");
    auto dps = compute_dps(e.trs);
    std::vector<Rule> five{dps[4].as_rule()};
    EXPECT_EQ(dheight_relative(T("sup#(s(0),e(0,s(0)))"), five, e.trs.rules()), 1);
    EXPECT_EQ(dheight_relative(T("sup#(s(0),e(0,s(0)))"), {}, e.trs.rules()), 0);
}

TEST(DerivationHeight, StrictCycleIsNontermination) {
    std::vector<Rule> loop{{T("f(x)", {"x"}), T("f(x)", {"x"}), ""}};
    EXPECT_THROW(dheight(T("f(a)"), loop), NonTermination);
    std::vector<Rule> weak{{T("g(x)", {"x"}), T("g(x)", {"x"}), ""}};
    std::vector<Rule> strict{{T("h(a)"), T("a"), ""}};
    EXPECT_EQ(dheight_relative(T("g(h(a))"), strict, weak), 1);
}

TEST(DerivationHeight, MatchesRecursiveOracle) {
    for (auto [name, size] : {std::pair{"rsack", 6}, std::pair{"rsup", 6}, std::pair{"rsdieter", 7}}) {
        auto e = builtin(name);
        std::size_t positive = 0;
        for (const Term& t : TermEnumerator(e.trs.symbols(), size).up_to(size)) {
            Nat h = dheight(t, e.trs.rules());
            EXPECT_EQ(h, dh_oracle(t, e.trs.rules())) << name << " " << t;
            if (h > 0) ++positive;
        }
        EXPECT_GT(positive, 0u) << name;
    }
}

TEST(DerivationHeight, SuccessorProperty) {
    std::mt19937 rng(21);
    auto e = builtin("rsup");
    for (int i = 0; i < 60; ++i) {
        Term t = dpframe::testing::random_term(rng, e.trs, 3);
        Nat h = dheight(t, e.trs.rules());
        auto succ = rewrite_successors(t, e.trs.rules());
        EXPECT_EQ(h == 0, succ.empty()) << t;
        bool tight = succ.empty();
        for (const auto& st : succ) {
            Nat hs = dheight(st.result, e.trs.rules());
            EXPECT_GE(h, 1 + hs) << t;
            tight = tight || h == 1 + hs;
        }
        EXPECT_TRUE(tight) << t;
        EXPECT_EQ(dheight_relative(t, e.trs.rules(), {}), h);
    }
}

TEST(LongestDerivation, RealisesHeight) {
    auto e = builtin("rsack");
    for (const char* s : {"Ack(0,0)", "Ack(s(0),s(0))", "Ack(s(s(0)),0)", "s(0)"}) {
        auto path = longest_derivation(T(s), e.trs.rules());
        EXPECT_EQ(Nat(path.size() - 1), dheight(T(s), e.trs.rules())) << s;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            auto succ = rewrite_successors(path[i], e.trs.rules());
            bool found = std::any_of(succ.begin(), succ.end(), [&](const auto& st) { return st.result == path[i + 1]; });
            EXPECT_TRUE(found) << path[i] << " -> " << path[i + 1];
        }
        EXPECT_TRUE(rewrite_successors(path.back(), e.trs.rules()).empty());
    }
}

TEST(Dc, Examples) {
    Trs ack = builtin("rsack").trs;
    EXPECT_EQ(dc(ack, 0), 0);
    EXPECT_EQ(dc(ack, 3), 1);
    EXPECT_EQ(dc(ack, 4), 2);
}

TEST(Dc, MonotoneAndMatchesOracle) {
    auto e = builtin("rsup");
    std::string fresh;
    auto sig = signature_with_fresh_constant(e.trs, &fresh);
    EXPECT_FALSE(e.trs.has_symbol(fresh));
    Nat prev = 0;
    for (std::size_t n = 0; n <= 6; ++n) {
        Nat v = dc(e.trs, n);
        EXPECT_GE(v, prev);
        prev = v;
        std::size_t best = 0;
        for (const Term& t : TermEnumerator(sig, n).up_to(n)) best = std::max(best, dh_oracle(t, e.trs.rules()));
        EXPECT_EQ(v, best) << n;
    }
}

TEST(Dc, FreshConstantMirrorsVariables) {
    auto e = builtin("rsup");
    std::string fresh;
    signature_with_fresh_constant(e.trs, &fresh);
    for (const char* s : {"sup(s(x),e(0,x))", "e(s(x),d(x))", "d(s(s(x)))"}) {
        Term open = T(s, {"x"});
        Substitution sigma;
        sigma.bind("x", Term::app(fresh));
        EXPECT_EQ(reachable_set(open, e.trs.rules()).size(), reachable_set(sigma.apply(open), e.trs.rules()).size()) << s;
        EXPECT_EQ(dheight(open, e.trs.rules()), dheight(sigma.apply(open), e.trs.rules())) << s;
    }
}

TEST(Ackermann, Examples) {
    EXPECT_EQ(ackermann_k(2, {0, 5}), 6);
    EXPECT_EQ(ackermann_k(2, {1, 1}), 3);
    EXPECT_EQ(ackermann_k(2, {2, 2}), 7);
    EXPECT_EQ(ackermann_k(3, {0, 1, 0}), ackermann_k(3, {0, 0, 1}));
    EXPECT_EQ(ackermann_k(3, {0, 0, 1}), 2);
    EXPECT_THROW(ackermann_k(1, {3}), std::invalid_argument);
    EXPECT_THROW(ackermann_k(2, {4, 4}, 100), BudgetExceeded);
}

TEST(Ackermann, BinaryClosedForms) {
    for (std::size_t m = 0; m <= 3; ++m)
        for (std::size_t n = 0; n <= 4; ++n) EXPECT_EQ(ackermann_k(2, {m, n}), ack2(m, n)) << m << "," << n;
}

TEST(Ackermann, RewriteSystemsEncodeIt) {
    for (std::size_t m = 0; m <= 2; ++m)
        for (std::size_t n = 0; n <= 2; ++n) {
            Term t = Term::app("Ack", {numeral(m), numeral(n)});
            auto v = numeral_value(normalise(t, builtin("rsack").trs));
            ASSERT_TRUE(v);
            EXPECT_EQ(*v, ack2(m, n));
        }
    for (std::size_t k : {3u, 4u}) {
        Trs peter = builtin("rspeter", k).trs;
        std::vector<std::vector<std::size_t>> inputs{std::vector<std::size_t>(k, 0)};
        inputs.push_back(std::vector<std::size_t>(k, 0));
        inputs.back()[k - 3] = 1;
        inputs.push_back(std::vector<std::size_t>(k, 1));
        inputs.back()[0] = 0;
        for (const auto& in : inputs) {
            std::vector<Term> args;
            std::vector<Nat> nats;
            for (std::size_t x : in) args.push_back(numeral(x)), nats.emplace_back(x);
            auto v = numeral_value(normalise(Term::app("Ack", args), peter));
            ASSERT_TRUE(v);
            EXPECT_EQ(Nat(*v), ackermann_k(k, nats)) << "k=" << k;
        }
    }
}
