#pragma once

// Current paths, the norm vector of a term and its lexicographic order.

#include <algorithm>
#include <deque>
#include <span>
#include <stdexcept>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpframe/analysis.hpp"
#include "dpframe/dp.hpp"
#include "dpframe/term.hpp"

namespace dpframe {

struct Bot {
    bool operator==(const Bot&) const = default;
};

struct NormValue {
    std::variant<Nat, Term, Bot> v;

    static NormValue nat(Nat n) { return {std::move(n)}; }
    static NormValue trm(Term t) { return {std::move(t)}; }
    static NormValue bot() { return {Bot{}}; }

    bool is_nat() const { return std::holds_alternative<Nat>(v); }
    bool is_trm() const { return std::holds_alternative<Term>(v); }
    bool is_bot() const { return std::holds_alternative<Bot>(v); }
    const Nat& as_nat() const { return std::get<Nat>(v); }
    const Term& as_trm() const { return std::get<Term>(v); }

    bool operator==(const NormValue&) const = default;

    std::string to_string() const {
        if (is_bot()) return "⊥";
        if (is_nat()) return as_nat().str();
        return as_trm().to_string();
    }
};

struct NormVector {
    std::vector<NormValue> values;

    std::size_t size() const { return values.size(); }
    const NormValue& operator[](std::size_t i) const { return values[i]; }
    bool operator==(const NormVector&) const = default;

    std::string to_string() const {
        std::string out = "(";
        for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + values[i].to_string();
        return out + ")";
    }
};

using PtPath = std::vector<Position>;

inline std::string path_string(const PtPath& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ", " : "") + p[i].to_string();
    return out + ")";
}

/// Order on candidate paths: lexicographically least, except that a path
/// extending another is preferred to its prefix.
inline bool path_before(const PtPath& a, const PtPath& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return a.size() > b.size();
}

enum class NormOrder { greater, equal, less, incomparable };

inline const char* to_string(NormOrder o) {
    switch (o) {
        case NormOrder::greater: return "greater";
        case NormOrder::equal: return "equal";
        case NormOrder::less: return "less";
        case NormOrder::incomparable: return "incomparable";
    }
    return "?";
}

/// a (→R ∪ ⊳)⁺ b, by bounded breadth-first search from a.
inline bool rewrite_or_superterm_reaches(const Term& a, const Term& b, const Trs& trs, const Fuel& fuel = {}) {
    RuleIndex idx(trs.rules());
    TermMap<bool> seen;
    std::deque<Term> queue;
    bool complete = true;
    auto push = [&](const Term& u) {
        if (seen.count(u)) return;
        if (seen.size() >= fuel.max_nodes) {
            complete = false;
            return;
        }
        seen.emplace(u, true);
        queue.push_back(u);
    };
    auto expand = [&](const Term& u) {
        for (const Term& c : u.args()) push(c);
        for (const RewriteStep& st : idx.successors(u)) push(st.result);
    };
    expand(a);
    while (!queue.empty()) {
        Term u = queue.front();
        queue.pop_front();
        if (u == b) return true;
        if (u.size() < b.size() && !idx.has_redex(u)) continue;
        expand(u);
    }
    if (!complete)
        throw Indeterminate("comparison " + a.to_string() + " against " + b.to_string() + " ran out of fuel");
    return false;
}

/// The order ⊐ on ℕ ∪ T ∪ {⊥}, with its converse.
inline NormOrder compare_norm(const NormValue& a, const NormValue& b, const Trs& trs, const Fuel& fuel = {}) {
    if (a == b) return NormOrder::equal;
    auto gt = [&](const NormValue& x, const NormValue& y) {
        if (x.is_nat() && y.is_nat()) return x.as_nat() > y.as_nat();
        if (x.is_trm() && y.is_trm()) return rewrite_or_superterm_reaches(x.as_trm(), y.as_trm(), trs, fuel);
        if (x.is_trm() && y.is_nat()) return y.as_nat() == 0;
        return !x.is_bot() && y.is_bot();
    };
    if (gt(a, b)) return NormOrder::greater;
    if (gt(b, a)) return NormOrder::less;
    return NormOrder::incomparable;
}

enum class LexOrder { greater, equal, incomparable_or_less };

inline const char* to_string(LexOrder o) {
    switch (o) {
        case LexOrder::greater: return "greater";
        case LexOrder::equal: return "equal";
        case LexOrder::incomparable_or_less: return "incomparable-or-less";
    }
    return "?";
}

inline LexOrder compare_norm_lex(const NormVector& a, const NormVector& b, const Trs& trs, const Fuel& fuel = {}) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == b[i]) continue;
        return compare_norm(a[i], b[i], trs, fuel) == NormOrder::greater ? LexOrder::greater
                                                                          : LexOrder::incomparable_or_less;
    }
    return a.size() == b.size() ? LexOrder::equal : LexOrder::incomparable_or_less;
}

/// Norm computations against a fixed proof tree, with memoisation.
class NormEngine {
public:
    explicit NormEngine(const ProofTree& tree, Fuel fuel = {}) : tree_(tree), fuel_(fuel) {
        for (const auto& dp : tree_.dps) {
            all_rules_.push_back(dp.as_rule());
            pair_paths_.push_back(tree_.path_of_pair(dp.index));
        }
    }

    const ProofTree& tree() const { return tree_; }
    const Trs& trs() const { return *tree_.trs; }
    const Fuel& fuel() const { return fuel_; }
    std::size_t d() const { return tree_.depth() + 1; }

    PtPath current_path(const Term& t) {
        if (auto it = paths_.find(t); it != paths_.end()) return it->second;
        PtPath best;
        if (!t.is_var() && trs().is_defined(t.name())) {
            Term ts = mark(t);
            if (!is_nf_relative(ts, all_rules_, trs().rules(), fuel_)) {
                bool have = false;
                for (std::size_t k = 0; k < tree_.dps.size(); ++k) {
                    std::span<const Rule> one(&all_rules_[k], 1);
                    if (is_nf_relative(ts, one, trs().rules(), fuel_)) continue;
                    if (!have || path_before(pair_paths_[k], best)) best = pair_paths_[k];
                    have = true;
                }
            }
        }
        paths_.emplace(t, best);
        return best;
    }

    NormValue component(const Term& t, std::size_t i) {
        PtPath path = current_path(t);
        bool defined = !t.is_var() && trs().is_defined(t.name());
        if (i == 0 || i > path.size()) return defined ? NormValue::nat(0) : NormValue::bot();
        const ProofNode& node = tree_.node_at(path[i - 1]);
        Term ts = mark(t);
        if (!node.processor) {
            auto strict = pair_rules(node.pairs);
            return NormValue::nat(dheight_relative(ts, strict, trs().rules(), fuel_));
        }
        return std::visit(
            [&](const auto& step) -> NormValue {
                using S = std::decay_t<decltype(step)>;
                if constexpr (std::is_same_v<S, ReductionPairStep>) {
                    std::set<std::size_t> keep = pair_indices(node.children.at(0).pairs);
                    std::vector<Rule> strict, weak = trs().rules();
                    for (const auto& dp : node.pairs) (keep.count(dp.index) ? weak : strict).push_back(dp.as_rule());
                    return NormValue::nat(dheight_relative(ts, strict, weak, fuel_));
                } else if constexpr (std::is_same_v<S, GraphStep>) {
                    auto rk = rank_of_term(step.graph, t, trs(), fuel_);
                    return NormValue::nat(rk ? Nat(*rk) : Nat(0));
                } else {
                    return NormValue::trm(project(ts, step.projection));
                }
            },
            *node.processor);
    }

    NormVector norm(const Term& t) {
        if (auto it = norms_.find(t); it != norms_.end()) return it->second;
        NormVector v;
        for (std::size_t i = 1; i <= d(); ++i) v.values.push_back(component(t, i));
        norms_.emplace(t, v);
        return v;
    }

private:
    const ProofTree& tree_;
    Fuel fuel_;
    std::vector<Rule> all_rules_;
    std::vector<PtPath> pair_paths_;
    TermMap<PtPath> paths_;
    TermMap<NormVector> norms_;
};

inline PtPath current_path(const Term& t, const ProofTree& tree, const Fuel& fuel = {}) {
    return NormEngine(tree, fuel).current_path(t);
}

inline NormValue norm_component(const Term& t, std::size_t i, const ProofTree& tree, const Fuel& fuel = {}) {
    return NormEngine(tree, fuel).component(t, i);
}

inline NormVector norm_of(const Term& t, const ProofTree& tree, const Fuel& fuel = {}) {
    return NormEngine(tree, fuel).norm(t);
}

// ---------------------------------------------------------------------------
// Decrease lemmas, checked on concrete steps

class StepPrecondition : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline bool is_step(const Term& s, const Term& t, const Trs& trs, StepScope scope) {
    for (const RewriteStep& st : rewrite_successors(s, trs.rules(), scope))
        if (st.result == t) return true;
    return false;
}

/// norm(s) ⊒lex norm(t) for a step strictly below the root.
inline bool verify_weak_decrease(const Term& s, const Term& t, NormEngine& eng) {
    if (!is_step(s, t, eng.trs(), StepScope::below_root_only))
        throw StepPrecondition(s.to_string() + " does not rewrite below the root to " + t.to_string());
    LexOrder o = compare_norm_lex(eng.norm(s), eng.norm(t), eng.trs(), eng.fuel());
    return o != LexOrder::incomparable_or_less;
}

inline bool verify_weak_decrease(const Term& s, const Term& t, const ProofTree& tree, const Fuel& fuel = {}) {
    NormEngine eng(tree, fuel);
    return verify_weak_decrease(s, t, eng);
}

struct StrictCheck {
    Position position;
    Term subterm;
    NormVector source, target;
    LexOrder verdict;
};

struct StrictReport {
    std::vector<StrictCheck> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.verdict == LexOrder::greater; });
    }
};

/// norm(s) ⊐lex norm(t|p) for every p with t|p not a proper subterm of s.
inline StrictReport verify_strict_decrease(const Term& s, const Term& t, NormEngine& eng) {
    if (!is_step(s, t, eng.trs(), StepScope::root_only))
        throw StepPrecondition(s.to_string() + " does not rewrite at the root to " + t.to_string());
    StrictReport rep;
    NormVector ns = eng.norm(s);
    for (const Position& p : positions(t)) {
        const Term& u = subterm_at(t, p);
        if (proper_subterm(u, s)) continue;
        NormVector nu = eng.norm(u);
        rep.checks.push_back({p, u, ns, nu, compare_norm_lex(ns, nu, eng.trs(), eng.fuel())});
    }
    return rep;
}

inline StrictReport verify_strict_decrease(const Term& s, const Term& t, const ProofTree& tree, const Fuel& fuel = {}) {
    NormEngine eng(tree, fuel);
    return verify_strict_decrease(s, t, eng);
}

/// For a below-root step s → t: whenever the paths and norms agree at i,
/// the path of t at i+1 is absent or agrees with that of s.
inline std::optional<std::size_t> equal_positions_violation(const Term& s, const Term& t, NormEngine& eng) {
    PtPath ps = eng.current_path(s), pt = eng.current_path(t);
    auto at = [](const PtPath& p, std::size_t i) -> std::optional<Position> {
        if (i > p.size()) return std::nullopt;
        return p[i - 1];
    };
    for (std::size_t i = 1; i < eng.d(); ++i) {
        if (at(ps, i) != at(pt, i) || eng.component(s, i) != eng.component(t, i)) continue;
        if (at(pt, i + 1) && at(pt, i + 1) != at(ps, i + 1)) return i;
    }
    return std::nullopt;
}

struct LemmaReport {
    std::size_t terms = 0;
    std::size_t below_root_steps = 0;
    std::size_t root_steps = 0;
    std::size_t positions_checked = 0;
    std::vector<std::string> failures;
    std::vector<std::string> indeterminate;
    std::vector<std::string> lines;

    bool ok() const { return failures.empty() && indeterminate.empty(); }
};

/// Every step from every ground term of size at most max_size.
inline LemmaReport verify_lemmas(const ProofTree& tree, std::size_t max_size, const Fuel& fuel = {}) {
    LemmaReport rep;
    NormEngine eng(tree, fuel);
    TermEnumerator en(tree.trs->symbols(), max_size);
    for (const Term& s : en.up_to(max_size)) {
        ++rep.terms;
        for (const RewriteStep& st : rewrite_successors(s, tree.trs->rules())) {
            try {
                if (st.position.is_root()) {
                    ++rep.root_steps;
                    StrictReport sr = verify_strict_decrease(s, st.result, eng);
                    for (const auto& c : sr.checks) {
                        ++rep.positions_checked;
                        std::string line = "root " + s.to_string() + " -> " + st.result.to_string() + " at " +
                                           c.position.to_string() + ": " + c.source.to_string() + " vs " +
                                           c.target.to_string() + " " + to_string(c.verdict);
                        if (c.verdict != LexOrder::greater) rep.failures.push_back(line);
                        rep.lines.push_back(std::move(line));
                    }
                } else {
                    ++rep.below_root_steps;
                    NormVector ns = eng.norm(s), nt = eng.norm(st.result);
                    LexOrder o = compare_norm_lex(ns, nt, eng.trs(), eng.fuel());
                    std::string line = "below " + s.to_string() + " -> " + st.result.to_string() + ": " +
                                       ns.to_string() + " vs " + nt.to_string() + " " + to_string(o);
                    if (o == LexOrder::incomparable_or_less) rep.failures.push_back(line);
                    if (auto i = equal_positions_violation(s, st.result, eng))
                        rep.failures.push_back("paths diverge after agreeing at " + std::to_string(*i) + ": " + line);
                    rep.lines.push_back(std::move(line));
                }
            } catch (const Indeterminate& e) {
                rep.indeterminate.push_back(e.what());
            }
        }
    }
    return rep;
}

}  // namespace dpframe
