#pragma once

// Reachability, relative normal forms, derivation heights, derivational
// complexity at small sizes, and the k-ary Ackermann function.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpframe/term.hpp"

namespace dpframe {

using Nat = boost::multiprecision::cpp_int;

struct Fuel {
    std::size_t max_nodes = 200000;
    std::size_t max_depth = 100000;
};

/// Exploration ran out of fuel; the question is undecided, not answered.
class Indeterminate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A cycle with a strict step was found: evidence of nontermination.
class NonTermination : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StepKind { strict, weak };

struct ReachGraph {
    std::vector<Term> nodes;  // nodes[0] is the start term
    std::vector<std::vector<std::pair<StepKind, std::size_t>>> edges;
    bool exhausted = true;

    const Term& root() const { return nodes.front(); }
    std::size_t size() const { return nodes.size(); }
};

/// Breadth-first closure of {t} under strict ∪ weak one-step rewriting.
/// Edges are labelled strict when some strict rule produces the successor.
inline ReachGraph explore(const Term& t, std::span<const Rule> strict, std::span<const Rule> weak, const Fuel& fuel) {
    RuleIndex si(strict), wi(weak);
    ReachGraph g;
    TermMap<std::size_t> index;
    std::vector<std::size_t> level;
    g.nodes.push_back(t);
    g.edges.emplace_back();
    level.push_back(0);
    index.emplace(t, 0);
    std::deque<std::size_t> queue{0};
    auto node_of = [&](const Term& u, std::size_t lvl) -> std::optional<std::size_t> {
        auto it = index.find(u);
        if (it != index.end()) return it->second;
        if (g.nodes.size() >= fuel.max_nodes) return std::nullopt;
        std::size_t id = g.nodes.size();
        g.nodes.push_back(u);
        g.edges.emplace_back();
        level.push_back(lvl);
        index.emplace(u, id);
        queue.push_back(id);
        return id;
    };
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        if (level[cur] >= fuel.max_depth) {
            if (si.has_redex(g.nodes[cur]) || wi.has_redex(g.nodes[cur])) g.exhausted = false;
            continue;
        }
        Term here = g.nodes[cur];
        for (auto [rules, kind] : {std::pair{&si, StepKind::strict}, std::pair{&wi, StepKind::weak}}) {
            for (const RewriteStep& st : rules->successors(here)) {
                auto id = node_of(st.result, level[cur] + 1);
                if (!id) {
                    g.exhausted = false;
                    continue;
                }
                auto& out = g.edges[cur];
                std::pair<StepKind, std::size_t> e{kind, *id};
                if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
            }
        }
    }
    return g;
}

inline ReachGraph reachable_set(const Term& t, std::span<const Rule> rules, const Fuel& fuel = {}) {
    return explore(t, rules, {}, fuel);
}

/// t ∈ NF(strict/weak): no weak-reduct of t contains a strict redex.
inline bool is_nf_relative(const Term& t, std::span<const Rule> strict, std::span<const Rule> weak,
                           const Fuel& fuel = {}) {
    RuleIndex si(strict), wi(weak);
    if (strict.empty()) return true;
    TermMap<std::size_t> seen;
    std::deque<std::pair<Term, std::size_t>> queue{{t, 0}};
    seen.emplace(t, 0);
    bool complete = true;
    while (!queue.empty()) {
        auto [u, lvl] = queue.front();
        queue.pop_front();
        if (si.has_redex(u)) return false;
        if (lvl >= fuel.max_depth) {
            if (wi.has_redex(u)) complete = false;
            continue;
        }
        for (const RewriteStep& st : wi.successors(u)) {
            if (seen.count(st.result)) continue;
            if (seen.size() >= fuel.max_nodes) {
                complete = false;
                continue;
            }
            seen.emplace(st.result, lvl + 1);
            queue.emplace_back(st.result, lvl + 1);
        }
    }
    if (!complete) throw Indeterminate("normal-form test for " + t.to_string() + " ran out of fuel");
    return true;
}

/// Strongly connected components (Tarjan, iterative). Components are
/// numbered in reverse topological order: every edge leaving a component
/// points to a component with a smaller number.
inline std::vector<std::size_t> tarjan_scc(std::size_t n, const std::function<void(std::size_t, std::vector<std::size_t>&)>& succ,
                                           std::size_t& count) {
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> idx(n, none), low(n, 0), comp(n, none);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    count = 0;
    struct Frame {
        std::size_t v;
        std::vector<std::size_t> succ;
        std::size_t next;
    };
    for (std::size_t s = 0; s < n; ++s) {
        if (idx[s] != none) continue;
        std::vector<Frame> call;
        auto push = [&](std::size_t v) {
            idx[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = true;
            Frame f{v, {}, 0};
            succ(v, f.succ);
            call.push_back(std::move(f));
        };
        push(s);
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next < f.succ.size()) {
                std::size_t w = f.succ[f.next++];
                if (idx[w] == none) {
                    push(w);
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
                continue;
            }
            std::size_t v = f.v;
            if (low[v] == idx[v]) {
                while (true) {
                    std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                    if (w == v) break;
                }
                ++count;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return comp;
}

/// Maximum number of strict edges on a path from the root of an exhausted
/// reach graph. Weak cycles are collapsed; a strict edge inside a cycle is
/// reported as nontermination.
inline Nat longest_strict_path(const ReachGraph& g) {
    std::size_t ncomp = 0;
    auto comp = tarjan_scc(
        g.size(),
        [&](std::size_t v, std::vector<std::size_t>& out) {
            for (auto [_, w] : g.edges[v]) out.push_back(w);
        },
        ncomp);
    for (std::size_t v = 0; v < g.size(); ++v)
        for (auto [kind, w] : g.edges[v])
            if (kind == StepKind::strict && comp[v] == comp[w])
                throw NonTermination("strict step on a cycle through " + g.nodes[v].to_string());
    // Components are numbered so that edges go from higher to lower numbers.
    std::vector<std::vector<std::size_t>> members(ncomp);
    for (std::size_t v = 0; v < g.size(); ++v) members[comp[v]].push_back(v);
    std::vector<std::uint64_t> best(ncomp, 0);
    for (std::size_t c = 0; c < ncomp; ++c)
        for (std::size_t v : members[c])
            for (auto [kind, w] : g.edges[v])
                if (comp[w] != c)
                    best[c] = std::max(best[c], best[comp[w]] + (kind == StepKind::strict ? 1 : 0));
    return Nat(best[comp[0]]);
}

/// dh(t, →strict/weak).
inline Nat dheight_relative(const Term& t, std::span<const Rule> strict, std::span<const Rule> weak,
                            const Fuel& fuel = {}) {
    if (strict.empty()) return 0;
    ReachGraph g = explore(t, strict, weak, fuel);
    if (!g.exhausted) throw Indeterminate("derivation height of " + t.to_string() + " ran out of fuel");
    return longest_strict_path(g);
}

/// dh(t, →rules).
inline Nat dheight(const Term& t, std::span<const Rule> rules, const Fuel& fuel = {}) {
    return dheight_relative(t, rules, {}, fuel);
}

/// A →rules derivation from t of maximal length dh(t, →rules), as its list of terms.
inline std::vector<Term> longest_derivation(const Term& t, std::span<const Rule> rules, const Fuel& fuel = {}) {
    ReachGraph g = reachable_set(t, rules, fuel);
    if (!g.exhausted) throw Indeterminate("derivation height of " + t.to_string() + " ran out of fuel");
    longest_strict_path(g);
    std::vector<std::optional<std::size_t>> best(g.size());
    std::vector<std::size_t> next(g.size(), g.size());
    std::function<std::size_t(std::size_t)> visit = [&](std::size_t v) -> std::size_t {
        if (best[v]) return *best[v];
        std::size_t b = 0;
        for (auto [_, w] : g.edges[v]) {
            std::size_t l = visit(w) + 1;
            if (l > b) b = l, next[v] = w;
        }
        best[v] = b;
        return b;
    };
    visit(0);
    std::vector<Term> path{g.nodes[0]};
    for (std::size_t v = 0; next[v] != g.size(); v = next[v]) path.push_back(g.nodes[next[v]]);
    return path;
}

// ---------------------------------------------------------------------------
// Ground term enumeration

/// All ground terms over `symbols` of size exactly 1..max_size, ordered by
/// size, then symbol order, then argument tuples.
class TermEnumerator {
public:
    TermEnumerator(std::vector<Symbol> symbols, std::size_t max_size) : symbols_(std::move(symbols)) {
        by_size_.resize(max_size + 1);
        for (std::size_t s = 1; s <= max_size; ++s) fill(s);
    }

    const std::vector<Term>& of_size(std::size_t s) const { return by_size_.at(s); }

    std::vector<Term> up_to(std::size_t s) const {
        std::vector<Term> out;
        for (std::size_t k = 1; k <= s && k < by_size_.size(); ++k)
            out.insert(out.end(), by_size_[k].begin(), by_size_[k].end());
        return out;
    }

private:
    void fill(std::size_t s) {
        for (const Symbol& f : symbols_) {
            if (f.arity == 0) {
                if (s == 1) by_size_[s].push_back(Term::app(f.name));
                continue;
            }
            if (s < 1 + f.arity) continue;
            std::vector<Term> args(f.arity);
            compose(f, 0, s - 1, args, s);
        }
    }

    void compose(const Symbol& f, std::size_t k, std::size_t remaining, std::vector<Term>& args, std::size_t s) {
        if (k + 1 == f.arity) {
            for (const Term& a : by_size_[remaining]) {
                args[k] = a;
                by_size_[s].push_back(Term::app(f.name, args));
            }
            return;
        }
        std::size_t later = f.arity - k - 1;
        for (std::size_t sz = 1; sz + later <= remaining; ++sz)
            for (const Term& a : by_size_[sz]) {
                args[k] = a;
                compose(f, k + 1, remaining - sz, args, s);
            }
    }

    std::vector<Symbol> symbols_;
    std::vector<std::vector<Term>> by_size_;
};

/// Signature of `trs` plus one fresh inert constant standing in for variables.
inline std::vector<Symbol> signature_with_fresh_constant(const Trs& trs, std::string* fresh = nullptr) {
    std::vector<Symbol> syms = trs.symbols();
    std::string c = trs.fresh_name("_v");
    syms.push_back(Symbol{c, 0, SymbolKind::constructor});
    if (fresh) *fresh = c;
    return syms;
}

/// Dc_R(n): maximal derivation height over terms of size ≤ n.
inline Nat dc(const Trs& trs, std::size_t n, const Fuel& fuel = {}) {
    if (n == 0) return 0;
    TermEnumerator en(signature_with_fresh_constant(trs), n);
    Nat best = 0;
    for (const Term& t : en.up_to(n)) best = std::max(best, dheight(t, trs.rules(), fuel));
    return best;
}

// ---------------------------------------------------------------------------
// k-ary Ackermann function

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Nat ackermann_rec(std::vector<Nat> x, std::size_t& budget) {
    if (budget == 0) throw BudgetExceeded("Ackermann recursion budget exceeded");
    --budget;
    const std::size_t k = x.size();
    // last nonzero argument among x_1..x_{k-1}
    std::size_t j = k - 1;
    while (j > 0 && x[j - 1] == 0) --j;
    if (j == 0) return x[k - 1] + 1;
    if (j == k - 1) {
        if (x[k - 1] == 0) {
            x[k - 2] -= 1;
            x[k - 1] = 1;
            return ackermann_rec(std::move(x), budget);
        }
        std::vector<Nat> inner = x;
        inner[k - 1] -= 1;
        Nat v = ackermann_rec(std::move(inner), budget);
        x[k - 2] -= 1;
        x[k - 1] = v;
        return ackermann_rec(std::move(x), budget);
    }
    // x_j > 0 with j < k-1 and zeros between
    x[j - 1] -= 1;
    x[j] = x[k - 1];
    return ackermann_rec(std::move(x), budget);
}

}  // namespace detail

/// A_k(x_1, …, x_k) for k = args.size() ≥ 2.
inline Nat ackermann_k(std::size_t k, const std::vector<Nat>& args, std::size_t budget = 10'000'000) {
    if (k < 2 || args.size() != k) throw std::invalid_argument("ackermann_k needs k >= 2 and k arguments");
    for (const Nat& a : args)
        if (a < 0) throw std::invalid_argument("ackermann_k arguments must be natural numbers");
    return detail::ackermann_rec(args, budget);
}

}  // namespace dpframe
