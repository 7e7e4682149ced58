#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "dpframe/analysis.hpp"
#include "dpframe/corpus.hpp"
#include "dpframe/lpo.hpp"
#include "dpframe/norm.hpp"
#include "dpframe/simulate.hpp"
#include "test_util.hpp"

using namespace dpframe;
using dpframe::testing::T;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string str(const Term& t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

bool same_pairs(const std::vector<DependencyPair>& dps, std::initializer_list<std::pair<const char*, const char*>> want,
                const std::set<std::string>& vars) {
    if (dps.size() != want.size()) return false;
    std::size_t i = 0;
    for (auto [l, r] : want) {
        if (dps[i].lhs != T(l, vars) || dps[i].rhs != T(r, vars)) return false;
        ++i;
    }
    return true;
}

// Oracle: recursion over one-step successors, memoised on the term.
std::size_t dh_oracle(const Term& t, const std::vector<Rule>& rules, std::map<Term, std::size_t>& memo) {
    if (auto it = memo.find(t); it != memo.end()) return it->second;
    std::size_t best = 0;
    for (const auto& st : rewrite_successors(t, rules)) best = std::max(best, 1 + dh_oracle(st.result, rules, memo));
    return memo[t] = best;
}

std::size_t dh_oracle(const Term& t, const std::vector<Rule>& rules) {
    std::map<Term, std::size_t> memo;
    return dh_oracle(t, rules, memo);
}

// Oracle: textbook two-argument Ackermann closed forms for m <= 2.
std::size_t ack2(std::size_t m, std::size_t n) { return m == 0 ? n + 1 : m == 1 ? n + 2 : 2 * n + 3; }

struct SimSetup {
    CorpusEntry entry;
    ProofTree tree;
    SimSystem sys;
    NormEngine eng;

    explicit SimSetup(const std::string& name)
        : entry(builtin(name)),
          tree(canonical_tree(entry)),
          sys(generate_rsim(entry.trs, tree, RpFunction{{Nat(max_scc_count(tree)), 1}})),
          eng(tree) {}
};

Outcome dp_computation() {
    Outcome o;
    std::set<std::string> xy{"x", "y"};
    o.require(same_pairs(compute_dps(builtin("rsack").trs),
                         {{"Ack#(s(x),0)", "Ack#(x,s(0))"},
                          {"Ack#(s(x),s(y))", "Ack#(x,Ack(s(x),y))"},
                          {"Ack#(s(x),s(y))", "Ack#(s(x),y)"}},
                         xy),
              "RSack pairs differ");
    o.require(same_pairs(compute_dps(builtin("rsup").trs),
                         {{"d#(s(x))", "d#(x)"},
                          {"e#(s(x),y)", "d#(y)"},
                          {"e#(s(x),y)", "e#(x,d(y))"},
                          {"sup#(s(x),e(0,y))", "e#(y,s(0))"},
                          {"sup#(s(x),e(0,y))", "sup#(x,e(y,s(0)))"}},
                         xy),
              "RSsup pairs differ");
    o.require(same_pairs(compute_dps(builtin("rsdieter").trs),
                         {{"o#(i(x),o(y,z))", "o#(x,o(i(i(y)),z))"},
                          {"o#(i(x),o(y,z))", "o#(i(i(y)),z)"},
                          {"o#(i(x),o(y,o(z,w)))", "o#(x,o(z,o(y,w)))"},
                          {"o#(i(x),o(y,o(z,w)))", "o#(z,o(y,w))"},
                          {"o#(i(x),o(y,o(z,w)))", "o#(y,w)"}},
                         {"x", "y", "z", "w"}),
              "RSdieter pairs differ");
    o.detail = o.pass ? "3 + 5 + 5 pairs" : o.detail;
    return o;
}

Outcome dependency_graph() {
    Outcome o;
    auto sup = builtin("rsup");
    DepGraph g = estimate_dependency_graph({compute_dps(sup.trs), &sup.trs});
    std::set<std::size_t> nontrivial, trivial;
    for (std::size_t c = 0; c < g.scc_count(); ++c) {
        o.require(g.sccs[c].size() == 1, "SCC with more than one pair");
        for (std::size_t v : g.sccs[c]) (g.trivial[c] ? trivial : nontrivial).insert(g.pairs[v].index);
    }
    o.require(g.scc_count() == 5, "expected 5 SCCs");
    o.require(nontrivial == std::set<std::size_t>{1, 3, 5}, "nontrivial SCCs differ");
    o.require(trivial == std::set<std::size_t>{2, 4}, "trivial SCCs differ");
    if (o.pass) o.detail = "nontrivial {1},{3},{5}; trivial {2},{4}";
    return o;
}

Outcome proof_replication() {
    Outcome o;
    auto ack = search_proof(builtin("rsack").trs);
    o.require(ack.tree.has_value(), "no proof for RSack");
    if (!o.pass) return o;
    const ProofTree& at = *ack.tree;
    auto* s1 = at.root.processor ? std::get_if<SubtermStep>(&*at.root.processor) : nullptr;
    o.require(s1 && s1->projection.at("Ack#") == 1, "RSack root is not a subterm step with projection 1");
    const ProofNode& n1 = at.node_at({1});
    auto* s2 = n1.processor ? std::get_if<SubtermStep>(&*n1.processor) : nullptr;
    o.require(s2 && s2->projection.at("Ack#") == 2, "RSack node 1 is not a subterm step with projection 2");
    o.require(at.depth() == 2 && at.node_at({1, 1}).pairs.empty(), "RSack proof does not close after two steps");

    SearchConfig cfg;
    cfg.coeff_bound = 2;
    cfg.order = {ProcessorKind::graph, ProcessorKind::reduction_pair, ProcessorKind::subterm};
    auto sup = search_proof(builtin("rsup").trs, cfg);
    o.require(sup.tree.has_value(), "no proof for RSsup");
    if (!o.pass) return o;
    const ProofTree& st = *sup.tree;
    o.require(st.root.processor && std::holds_alternative<GraphStep>(*st.root.processor), "RSsup root is not a graph step");
    o.require(st.root.children.size() == 5, "RSsup root does not have 5 children");
    std::size_t rp_leaves = 0;
    for (unsigned c = 1; c <= st.root.children.size(); ++c) {
        const ProofNode& n = st.node_at({c});
        if (n.processor && std::holds_alternative<ReductionPairStep>(*n.processor) && st.node_at({c, 1}).pairs.empty())
            ++rp_leaves;
        if (n.processor)
            o.require(pair_indices(n.pairs) == std::set<std::size_t>{6 - c}, "RSsup children are not in rank order");
    }
    o.require(rp_leaves == 3, "RSsup tree does not have three reduction-pair leaves");

    auto dieter = builtin("rsdieter");
    DpProblem p{compute_dps(dieter.trs), &dieter.trs};
    auto a = apply_reduction_pair(p, dieter.interpretations.at("A"));
    o.require(a.progress && pair_indices(a.removed) == std::set<std::size_t>{2, 4, 5}, "algebra A does not remove {2,4,5}");
    auto b = apply_reduction_pair({a.kept, &dieter.trs}, dieter.interpretations.at("B"));
    o.require(b.progress && pair_indices(b.removed) == std::set<std::size_t>{1, 3}, "algebra B does not remove {1,3}");
    if (o.pass) o.detail = "RSack 2 subterm steps, RSsup 5 children / 3 RP leaves, RSdieter A {2,4,5} B {1,3}";
    return o;
}

Outcome current_paths() {
    Outcome o;
    ProofTree tree = canonical_tree(builtin("rsup"));
    o.require(current_path(T("sup(s(0),e(0,s(0)))"), tree) == PtPath{Position{}, Position{1}}, "t1 path differs");
    o.require(current_path(T("sup(0,e(s(0),s(0)))"), tree).empty(), "t2 path is not empty");
    o.require(current_path(T("e(s(0),s(0))"), tree) == PtPath{Position{}, Position{3}}, "t3 path differs");
    if (o.pass) o.detail = "(ε,1), (), (ε,3)";
    return o;
}

Outcome lemma_suite() {
    Outcome o;
    std::size_t steps = 0;
    for (auto [name, size] : {std::pair{"rsup", 6}, std::pair{"rsack", 5}}) {
        LemmaReport rep = verify_lemmas(canonical_tree(builtin(name)), size);
        o.require(rep.failures.empty(), std::string(name) + ": " + (rep.failures.empty() ? "" : rep.failures.front()));
        o.require(rep.indeterminate.empty(), std::string(name) + ": indeterminate results");
        o.require(rep.root_steps > 0, std::string(name) + ": no root steps checked");
        steps += rep.below_root_steps + rep.root_steps;
    }
    if (o.pass) o.detail = std::to_string(steps) + " steps, 0 violations, 0 indeterminate";
    return o;
}

Outcome simulation_suite() {
    Outcome o;
    SimSetup s("rsup");
    Simulator sim(s.sys, s.eng);
    auto check = [&](const SimDerivation& der, const Term& from, const Term& to, const std::string& what) {
        auto problems = validate_derivation(s.sys, der);
        o.require(problems.empty(), what + ": " + (problems.empty() ? "" : problems.front()));
        o.require(der.start == from && der.end() == to, what + ": wrong endpoints");
    };
    std::size_t steps = 0, starts = 0, sizes = 0;
    for (const Term& t : TermEnumerator(s.entry.trs.symbols(), 5).up_to(5)) {
        for (const auto& st : rewrite_successors(t, s.entry.trs.rules())) {
            std::string what = "step " + str(t) + " -> " + str(st.result);
            try {
                check(sim.simulate_step(t, st.result), sim.translate(t), sim.translate(st.result), what);
            } catch (const std::exception& e) {
                o.require(false, what + ": " + e.what());
            }
            ++steps;
        }
        std::string what = "size " + str(t);
        try {
            SimDerivation der = sim.simulate_size(sim.translate(t), t);
            auto problems = validate_derivation(s.sys, der);
            o.require(problems.empty(), what + ": " + (problems.empty() ? "" : problems.front()));
            auto n = numeral_value(der.end());
            o.require(n && *n >= t.size(), what + ": result below term size");
        } catch (const std::exception& e) {
            o.require(false, what + ": " + e.what());
        }
        ++sizes;
        if (t.size() <= 4) {
            std::string what = "start " + str(t);
            try {
                SimDerivation der = sim.simulate_start(t);
                auto problems = validate_derivation(s.sys, der);
                o.require(problems.empty(), what + ": " + (problems.empty() ? "" : problems.front()));
                o.require(der.end() == sim.translate(t), what + ": does not reach the translation");
            } catch (const std::exception& e) {
                o.require(false, what + ": " + e.what());
            }
            ++starts;
        }
    }
    if (o.pass)
        o.detail = std::to_string(steps) + " steps, " + std::to_string(starts) + " starts, " + std::to_string(sizes) +
                   " sizes";
    return o;
}

Outcome lpo_certification() {
    Outcome o;
    std::size_t rules = 0;
    for (const char* name : {"rsup", "rsack"}) {
        SimSetup s(name);
        auto rep = check_compatible(std::span<const Rule>(s.sys.rules), rsim_precedence(s.sys));
        o.require(rep.ok(), std::string(name) + ": some RSsim rule is not oriented");
        rules += s.sys.rules.size();
    }
    if (o.pass) o.detail = std::to_string(rules) + " rules oriented";
    return o;
}

Outcome height_chaining() {
    Outcome o;
    SimSetup s("rsup");
    Simulator sim(s.sys, s.eng);
    std::vector<Term> pool = TermEnumerator(s.entry.trs.symbols(), 5).up_to(5);
    std::mt19937 rng(42);
    std::size_t slack = 0;
    for (int i = 0; i < 50; ++i) {
        const Term& t = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        auto path = longest_derivation(t, s.entry.trs.rules());
        std::size_t h = dh_oracle(t, s.entry.trs.rules());
        SimDerivation der = sim.simulate_derivation(path);
        auto problems = validate_derivation(s.sys, der);
        o.require(problems.empty(), str(t) + ": " + (problems.empty() ? "" : problems.front()));
        o.require(der.start == sim.translate(t), str(t) + ": derivation does not start at tr(t)");
        o.require(h <= der.length(), str(t) + ": height exceeds simulated length");
        slack = std::max<std::size_t>(slack, der.length() - std::min(h, der.length()));
    }
    if (o.pass) o.detail = "50 terms, max slack " + std::to_string(slack);
    return o;
}

Outcome ackermann_encodings() {
    Outcome o;
    for (auto [name, k] : {std::pair<const char*, std::optional<std::size_t>>{"rsack", {}}, {"rspeter", 2}}) {
        Trs trs = builtin(name, k).trs;
        RuleIndex idx(trs.rules());
        for (std::size_t m = 0; m <= 2; ++m)
            for (std::size_t n = 0; n <= 2; ++n) {
                Term t = Term::app("Ack", {numeral(m), numeral(n)});
                std::string what = std::string(name) + " Ack(" + std::to_string(m) + "," + std::to_string(n) + ")";
                Term nf = t;
                for (auto succ = idx.successors(nf); !succ.empty(); succ = idx.successors(nf)) nf = succ.front().result;
                o.require(nf == numeral(ack2(m, n)), what + ": wrong normal form");
                o.require(Nat(ack2(m, n)) == ackermann_k(2, {Nat(m), Nat(n)}), what + ": ackermann_k disagrees");
                o.require(dheight(t, trs.rules()) == Nat(dh_oracle(t, trs.rules())), what + ": height differs from oracle");
            }
    }
    if (o.pass) o.detail = "18 inputs";
    return o;
}

Outcome rp_function() {
    Outcome o;
    auto v = validate_rp_function(canonical_tree(builtin("rsdieter")), RpFunction{{2, 1}}, 5);
    o.require(v.ok, v.violation ? *v.violation : "validation failed");
    o.require(v.indeterminate.empty(), "indeterminate results");
    if (o.pass) o.detail = "g(n) = 2 + n, " + std::to_string(v.checked) + " checks";
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dp-computation", dp_computation},       {"dependency-graph", dependency_graph},
        {"proof-replication", proof_replication}, {"current-paths", current_paths},
        {"lemma-suite", lemma_suite},             {"simulation-suite", simulation_suite},
        {"lpo-certification", lpo_certification}, {"height-chaining", height_chaining},
        {"ackermann-encodings", ackermann_encodings}, {"rp-function", rp_function}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << " (" << o.detail << ", "
                  << std::fixed << std::setprecision(2) << secs << "s)" << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
