#pragma once

// Dependency pairs, DP problems, the reduction pair / dependency graph /
// subterm criterion processors, proof trees and proof search.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dpframe/analysis.hpp"
#include "dpframe/term.hpp"

namespace dpframe {

struct DependencyPair {
    Term lhs;             // l#
    Term rhs;             // u#
    std::size_t origin;   // 0-based index of the rule l -> r
    std::size_t index;    // 1-based stable number
    Position position;    // position of u in r

    Rule as_rule() const { return Rule{lhs, rhs, std::to_string(index)}; }
    std::string to_string() const { return std::to_string(index) + ": " + lhs.to_string() + " -> " + rhs.to_string(); }
    friend bool operator==(const DependencyPair& a, const DependencyPair& b) {
        return a.index == b.index && a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

/// DP(R) with the Dershowitz condition. Numbering: by rule, then pairs
/// calling a different defined symbol before recursive calls, then pre-order
/// position in the right-hand side.
inline std::vector<DependencyPair> compute_dps(const Trs& trs) {
    std::vector<DependencyPair> out;
    for (std::size_t ri = 0; ri < trs.rules().size(); ++ri) {
        const Rule& r = trs.rules()[ri];
        std::vector<std::pair<Position, Term>> other, self;
        for (const Position& p : positions(r.rhs)) {
            const Term& u = subterm_at(r.rhs, p);
            if (u.is_var() || !trs.is_defined(u.name()) || proper_subterm(u, r.lhs)) continue;
            (u.name() == r.lhs.name() ? self : other).emplace_back(p, u);
        }
        other.insert(other.end(), self.begin(), self.end());
        for (auto& [p, u] : other) {
            Term l = mark(r.lhs), rr = mark(u);
            bool dup = std::any_of(out.begin(), out.end(), [&](const DependencyPair& d) { return d.lhs == l && d.rhs == rr; });
            if (dup) continue;
            out.push_back(DependencyPair{l, rr, ri, out.size() + 1, p});
        }
    }
    return out;
}

inline std::vector<Rule> pair_rules(const std::vector<DependencyPair>& ps) {
    std::vector<Rule> out;
    for (const auto& p : ps) out.push_back(p.as_rule());
    return out;
}

inline std::set<std::size_t> pair_indices(const std::vector<DependencyPair>& ps) {
    std::set<std::size_t> out;
    for (const auto& p : ps) out.insert(p.index);
    return out;
}

inline std::string index_set_string(const std::vector<DependencyPair>& ps) {
    if (ps.empty()) return "∅";
    std::string out = "{";
    bool first = true;
    for (std::size_t i : pair_indices(ps)) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(i);
    }
    return out + "}";
}

struct DpProblem {
    std::vector<DependencyPair> pairs;
    const Trs* trs = nullptr;

    bool empty() const { return pairs.empty(); }
};

// ---------------------------------------------------------------------------
// Linear polynomial interpretations over ℕ

struct LinearFn {
    std::vector<long long> coeffs;
    long long constant = 0;

    friend bool operator==(const LinearFn&, const LinearFn&) = default;
};

class MissingInterpretation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearPoly {
    std::map<std::string, long long> coeffs;
    long long constant = 0;
};

class LinearInterpretation {
public:
    LinearInterpretation() = default;
    LinearInterpretation(std::initializer_list<std::pair<const std::string, LinearFn>> init) : fns_(init) {}

    void set(const std::string& f, LinearFn fn) { fns_[f] = std::move(fn); }
    bool has(const std::string& f) const { return fns_.count(f) != 0; }
    const LinearFn& at(const std::string& f) const {
        auto it = fns_.find(f);
        if (it == fns_.end()) throw MissingInterpretation("no interpretation for symbol " + f);
        return it->second;
    }
    const std::map<std::string, LinearFn>& functions() const { return fns_; }

    LinearPoly eval(const Term& t) const {
        LinearPoly out;
        if (t.is_var()) {
            out.coeffs[t.name()] = 1;
            return out;
        }
        const LinearFn& fn = at(t.name());
        if (fn.coeffs.size() != t.arity())
            throw MissingInterpretation("interpretation of " + t.name() + " has wrong arity");
        out.constant = fn.constant;
        for (std::size_t i = 0; i < t.arity(); ++i) {
            if (fn.coeffs[i] == 0) continue;
            LinearPoly a = eval(t.arg(i + 1));
            for (auto& [x, c] : a.coeffs) out.coeffs[x] += fn.coeffs[i] * c;
            out.constant += fn.coeffs[i] * a.constant;
        }
        return out;
    }

    /// "f(x1,x2) = 2x1 + 1" style rendering, one symbol per entry.
    std::vector<std::string> describe() const {
        std::vector<std::string> out;
        for (const auto& [f, fn] : fns_) {
            std::string lhs = f, rhs;
            if (!fn.coeffs.empty()) {
                lhs += "(";
                for (std::size_t i = 0; i < fn.coeffs.size(); ++i) lhs += (i ? ",x" : "x") + std::to_string(i + 1);
                lhs += ")";
            }
            for (std::size_t i = 0; i < fn.coeffs.size(); ++i) {
                if (fn.coeffs[i] == 0) continue;
                if (!rhs.empty()) rhs += " + ";
                rhs += (fn.coeffs[i] == 1 ? "" : std::to_string(fn.coeffs[i])) + "x" + std::to_string(i + 1);
            }
            if (fn.constant != 0 || rhs.empty()) rhs += (rhs.empty() ? "" : " + ") + std::to_string(fn.constant);
            out.push_back(lhs + " = " + rhs);
        }
        return out;
    }

    friend bool operator==(const LinearInterpretation&, const LinearInterpretation&) = default;

private:
    std::map<std::string, LinearFn> fns_;
};

enum class Orientation { strict, weak, none };

inline const char* to_string(Orientation o) {
    switch (o) {
        case Orientation::strict: return "strict";
        case Orientation::weak: return "weak";
        default: return "none";
    }
}

/// Absolute positiveness check of [lhs] - [rhs].
inline Orientation orient_check(const LinearInterpretation& interp, const Rule& rule) {
    LinearPoly l = interp.eval(rule.lhs), r = interp.eval(rule.rhs);
    for (const auto& [x, c] : r.coeffs) {
        auto it = l.coeffs.find(x);
        if ((it == l.coeffs.end() ? 0 : it->second) < c) return Orientation::none;
    }
    if (l.constant < r.constant) return Orientation::none;
    return l.constant > r.constant ? Orientation::strict : Orientation::weak;
}

struct ProcessorOutcome {
    bool progress = false;
    std::string reason;
    std::vector<DependencyPair> kept;
    std::vector<DependencyPair> removed;
};

inline ProcessorOutcome apply_reduction_pair(const DpProblem& p, const LinearInterpretation& interp) {
    ProcessorOutcome out;
    try {
        for (const Rule& r : p.trs->rules())
            if (orient_check(interp, r) == Orientation::none) {
                out.reason = "rule " + r.to_string() + " not weakly oriented";
                return out;
            }
        for (const DependencyPair& dp : p.pairs) {
            Orientation o = orient_check(interp, dp.as_rule());
            if (o == Orientation::none) {
                out.reason = "pair " + std::to_string(dp.index) + " not weakly oriented";
                out.kept.clear();
                out.removed.clear();
                return out;
            }
            (o == Orientation::strict ? out.removed : out.kept).push_back(dp);
        }
    } catch (const MissingInterpretation& e) {
        out.reason = e.what();
        out.kept.clear();
        out.removed.clear();
        return out;
    }
    if (out.removed.empty()) {
        out.reason = "no pair strictly oriented";
        out.kept.clear();
        return out;
    }
    out.progress = true;
    return out;
}

// ---------------------------------------------------------------------------
// Dependency graph

/// cap_R followed by ren: defined-rooted subterms and all variable
/// occurrences become distinct fresh variables.
inline Term cap_ren(const Term& t, const Trs& trs, std::size_t& counter, bool at_root = true) {
    if (t.is_var() || (!at_root && trs.is_defined(t.name()))) return Term::variable("_cap" + std::to_string(counter++));
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    for (const Term& a : t.args()) args.push_back(cap_ren(a, trs, counter, false));
    return Term::app(t.name(), std::move(args));
}

inline bool graph_edge(const DependencyPair& from, const DependencyPair& to, const Trs& trs) {
    std::size_t counter = 0;
    Term capped = cap_ren(from.rhs, trs, counter);
    return unify_terms(capped, rename_vars(to.lhs, "_to_")).has_value();
}

struct DepGraph {
    std::vector<DependencyPair> pairs;
    std::vector<std::vector<std::size_t>> edges;  // indices into pairs
    std::vector<std::vector<std::size_t>> sccs;   // members (indices into pairs), ordered by decreasing rank
    std::vector<std::size_t> scc_of;              // pair -> scc id
    std::vector<std::size_t> rank;                // scc id -> rank in 1..k
    std::vector<bool> trivial;                    // scc id -> trivial

    std::size_t scc_count() const { return sccs.size(); }

    bool has_edge(std::size_t a, std::size_t b) const {
        return std::find(edges[a].begin(), edges[a].end(), b) != edges[a].end();
    }

    std::vector<DependencyPair> scc_pairs(std::size_t c) const {
        std::vector<DependencyPair> out;
        for (std::size_t v : sccs[c]) out.push_back(pairs[v]);
        return out;
    }

    std::optional<std::size_t> rank_of_pair(std::size_t pair_index) const {
        for (std::size_t v = 0; v < pairs.size(); ++v)
            if (pairs[v].index == pair_index) return rank[scc_of[v]];
        return std::nullopt;
    }
};

/// Estimated dependency graph with SCCs and ranks. Ranks are assigned from
/// k downwards, always to a source component of the remaining graph; among
/// several sources the one holding the smallest pair number comes first.
inline DepGraph estimate_dependency_graph(const DpProblem& p) {
    DepGraph g;
    g.pairs = p.pairs;
    std::sort(g.pairs.begin(), g.pairs.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    const std::size_t n = g.pairs.size();
    g.edges.resize(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (graph_edge(g.pairs[a], g.pairs[b], *p.trs)) g.edges[a].push_back(b);
    std::size_t ncomp = 0;
    auto comp = tarjan_scc(
        n, [&](std::size_t v, std::vector<std::size_t>& out) { out = g.edges[v]; }, ncomp);
    std::vector<std::vector<std::size_t>> members(ncomp);
    for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(v);
    std::vector<std::set<std::size_t>> preds(ncomp);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b : g.edges[a])
            if (comp[a] != comp[b]) preds[comp[b]].insert(comp[a]);
    std::vector<bool> done(ncomp, false);
    std::vector<std::size_t> order;
    for (std::size_t step = 0; step < ncomp; ++step) {
        std::optional<std::size_t> pick;
        for (std::size_t c = 0; c < ncomp; ++c) {
            if (done[c]) continue;
            bool source = std::all_of(preds[c].begin(), preds[c].end(), [&](std::size_t q) { return done[q]; });
            if (!source) continue;
            if (!pick || g.pairs[members[c].front()].index < g.pairs[members[*pick].front()].index) pick = c;
        }
        done[*pick] = true;
        order.push_back(*pick);
    }
    g.scc_of.assign(n, 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto& mem = members[order[pos]];
        g.sccs.push_back(mem);
        g.rank.push_back(ncomp - pos);
        g.trivial.push_back(mem.size() == 1 && !g.has_edge(mem[0], mem[0]));
        for (std::size_t v : mem) g.scc_of[v] = pos;
    }
    return g;
}

struct GraphOutcome {
    bool progress = false;
    std::string reason;
    DepGraph graph;
    std::vector<std::pair<std::vector<DependencyPair>, bool>> children;  // (pairs, trivial leaf), decreasing rank
};

inline GraphOutcome apply_dependency_graph(const DpProblem& p) {
    GraphOutcome out;
    out.graph = estimate_dependency_graph(p);
    const DepGraph& g = out.graph;
    if (g.scc_count() == 1 && !g.trivial[0] && g.sccs[0].size() == p.pairs.size()) {
        out.reason = "graph is a single nontrivial SCC";
        return out;
    }
    for (std::size_t c = 0; c < g.scc_count(); ++c) out.children.emplace_back(g.scc_pairs(c), g.trivial[c]);
    out.progress = true;
    return out;
}

// ---------------------------------------------------------------------------
// Subterm criterion

using SimpleProjection = std::map<std::string, std::size_t>;

inline const Term& project(const Term& marked, const SimpleProjection& pi) {
    auto it = pi.find(marked.name());
    if (it == pi.end() || it->second == 0 || it->second > marked.arity())
        throw std::invalid_argument("projection undefined for " + marked.name());
    return marked.arg(it->second);
}

inline ProcessorOutcome apply_subterm_criterion(const DpProblem& p, const SimpleProjection& pi) {
    ProcessorOutcome out;
    for (const DependencyPair& dp : p.pairs) {
        if (dp.lhs.arity() == 0 || !pi.count(dp.lhs.name()) || !pi.count(dp.rhs.name())) {
            out.reason = "projection undefined for pair " + std::to_string(dp.index);
            out.kept.clear();
            out.removed.clear();
            return out;
        }
        const Term& l = project(dp.lhs, pi);
        const Term& r = project(dp.rhs, pi);
        if (r == l) {
            out.kept.push_back(dp);
        } else if (proper_subterm(r, l)) {
            out.removed.push_back(dp);
        } else {
            out.reason = "pair " + std::to_string(dp.index) + " not decreasing under projection";
            out.kept.clear();
            out.removed.clear();
            return out;
        }
    }
    if (out.removed.empty()) {
        out.reason = "no pair strictly decreasing";
        out.kept.clear();
        return out;
    }
    out.progress = true;
    return out;
}

inline std::string describe_projection(const SimpleProjection& pi) {
    std::string out;
    for (const auto& [f, i] : pi) out += (out.empty() ? "" : ", ") + std::string("π(") + f + ")=" + std::to_string(i);
    return out;
}

// ---------------------------------------------------------------------------
// Proof trees

struct ReductionPairStep {
    LinearInterpretation interp;
};
struct GraphStep {
    DepGraph graph;
};
struct SubtermStep {
    SimpleProjection projection;
};
using Processor = std::variant<ReductionPairStep, GraphStep, SubtermStep>;

inline const char* processor_name(const Processor& p) {
    switch (p.index()) {
        case 0: return "reduction-pair";
        case 1: return "graph";
        default: return "subterm";
    }
}

struct ProofNode {
    std::vector<DependencyPair> pairs;
    std::optional<Processor> processor;  // empty for leaves
    std::vector<ProofNode> children;
    bool trivial_scc_leaf = false;

    bool is_leaf() const { return children.empty() && !processor; }
};

struct ProofTree {
    std::shared_ptr<const Trs> trs;
    std::vector<DependencyPair> dps;
    ProofNode root;

    const ProofNode& node_at(const Position& p) const {
        const ProofNode* cur = &root;
        for (unsigned i : p.indices()) {
            if (i == 0 || i > cur->children.size()) throw std::out_of_range("no proof-tree node at " + p.to_string());
            cur = &cur->children[i - 1];
        }
        return *cur;
    }

    std::size_t depth() const {
        std::function<std::size_t(const ProofNode&)> rec = [&](const ProofNode& n) -> std::size_t {
            std::size_t d = 0;
            for (const auto& c : n.children) d = std::max(d, 1 + rec(c));
            return d;
        };
        return rec(root);
    }

    /// Pre-order list of (position, node).
    std::vector<std::pair<Position, const ProofNode*>> nodes() const {
        std::vector<std::pair<Position, const ProofNode*>> out;
        std::function<void(const ProofNode&, const Position&)> rec = [&](const ProofNode& n, const Position& p) {
            out.emplace_back(p, &n);
            for (unsigned i = 1; i <= n.children.size(); ++i) rec(n.children[i - 1], p.child(i));
        };
        rec(root, Position{});
        return out;
    }

    /// Node positions containing the given pair, root first.
    std::vector<Position> path_of_pair(std::size_t index) const {
        std::vector<Position> out;
        const ProofNode* cur = &root;
        Position p;
        auto contains = [&](const ProofNode& n) {
            return std::any_of(n.pairs.begin(), n.pairs.end(), [&](const auto& d) { return d.index == index; });
        };
        if (!contains(root)) return out;
        out.push_back(p);
        while (true) {
            bool moved = false;
            for (unsigned i = 1; i <= cur->children.size(); ++i)
                if (contains(cur->children[i - 1])) {
                    cur = &cur->children[i - 1];
                    p = p.child(i);
                    out.push_back(p);
                    moved = true;
                    break;
                }
            if (!moved) break;
        }
        return out;
    }
};

/// Builds a tree node-by-node from processor choices, validating each step.
class TreeBuilderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline ProofNode leaf_node(std::vector<DependencyPair> pairs, bool trivial = false) {
    ProofNode n;
    n.pairs = std::move(pairs);
    n.trivial_scc_leaf = trivial;
    return n;
}

/// Independent replay of every processor application; returns the list of
/// problems found (empty when the tree is valid).
inline std::vector<std::string> validate_tree(const ProofTree& tree) {
    std::vector<std::string> errors;
    auto same = [](const std::vector<DependencyPair>& a, const std::vector<DependencyPair>& b) {
        return pair_indices(a) == pair_indices(b);
    };
    if (!same(tree.root.pairs, compute_dps(*tree.trs))) errors.push_back("root is not DP(R)");
    std::map<std::size_t, std::size_t> leaf_count;
    for (const auto& [pos, node] : tree.nodes()) {
        const std::string at = "node " + pos.to_string() + ": ";
        DpProblem prob{node->pairs, tree.trs.get()};
        if (!node->processor) {
            if (!node->children.empty()) errors.push_back(at + "children without processor");
            if (!node->pairs.empty() && !node->trivial_scc_leaf) errors.push_back(at + "nonempty leaf that is not a trivial SCC");
            for (std::size_t i : pair_indices(node->pairs)) ++leaf_count[i];
            continue;
        }
        const Processor& proc = *node->processor;
        if (const auto* rp = std::get_if<ReductionPairStep>(&proc)) {
            auto o = apply_reduction_pair(prob, rp->interp);
            if (!o.progress) errors.push_back(at + "reduction pair fails: " + o.reason);
            else if (node->children.size() != 1 || !same(node->children[0].pairs, o.kept))
                errors.push_back(at + "reduction pair child mismatch");
        } else if (const auto* sc = std::get_if<SubtermStep>(&proc)) {
            auto o = apply_subterm_criterion(prob, sc->projection);
            if (!o.progress) errors.push_back(at + "subterm criterion fails: " + o.reason);
            else if (node->children.size() != 1 || !same(node->children[0].pairs, o.kept))
                errors.push_back(at + "subterm criterion child mismatch");
        } else {
            auto o = apply_dependency_graph(prob);
            if (!o.progress) {
                errors.push_back(at + "graph processor fails: " + o.reason);
            } else if (o.children.size() != node->children.size()) {
                errors.push_back(at + "graph child count mismatch");
            } else {
                for (std::size_t i = 0; i < o.children.size(); ++i) {
                    if (!same(o.children[i].first, node->children[i].pairs))
                        errors.push_back(at + "graph child " + std::to_string(i + 1) + " mismatch");
                    if (o.children[i].second && (node->children[i].processor || !node->children[i].trivial_scc_leaf))
                        errors.push_back(at + "trivial SCC child " + std::to_string(i + 1) + " must be a leaf");
                }
            }
        }
    }
    for (const auto& dp : tree.dps)
        if (leaf_count[dp.index] > 1) errors.push_back("pair " + std::to_string(dp.index) + " reaches several leaves");
    return errors;
}

// ---------------------------------------------------------------------------
// Proof search

enum class ProcessorKind { graph, subterm, reduction_pair };

struct SearchConfig {
    long long coeff_bound = 2;
    std::vector<ProcessorKind> order{ProcessorKind::graph, ProcessorKind::subterm, ProcessorKind::reduction_pair};
    std::vector<LinearInterpretation> user_interpretations;
    std::size_t max_search_nodes = 5'000'000;
};

struct SearchResult {
    std::optional<ProofTree> tree;
    std::vector<std::vector<DependencyPair>> frontier;  // unresolved problems on failure
};

namespace detail {

inline std::vector<LinearFn> linear_candidates(std::size_t arity, long long bound) {
    std::vector<LinearFn> out;
    std::vector<long long> v(arity + 1, 0);
    // enumerate by total weight, then lexicographically
    for (long long total = 0; total <= bound * static_cast<long long>(arity + 1); ++total) {
        std::function<void(std::size_t, long long)> rec = [&](std::size_t k, long long left) {
            if (k == arity) {
                if (left > bound) return;
                v[k] = left;
                out.push_back(LinearFn{std::vector<long long>(v.begin(), v.begin() + arity), v[arity]});
                return;
            }
            for (long long c = 0; c <= std::min(bound, left); ++c) {
                v[k] = c;
                rec(k + 1, left - c);
            }
        };
        rec(0, total);
    }
    return out;
}

inline void symbols_of(const Term& t, std::set<std::string>& out) {
    if (t.is_var()) return;
    out.insert(t.name());
    for (const Term& a : t.args()) symbols_of(a, out);
}

}  // namespace detail

/// Depth-first search for a linear interpretation with coefficients in
/// 0..bound that makes the reduction pair processor succeed. Constraints
/// are checked as soon as all their symbols have values.
inline std::optional<LinearInterpretation> search_interpretation(const DpProblem& p, long long bound,
                                                                 std::size_t max_nodes = 5'000'000) {
    struct Constraint {
        Rule rule;
        bool is_pair;
        std::set<std::string> syms;
    };
    std::vector<Constraint> cons;
    for (const Rule& r : p.trs->rules()) {
        Constraint c{r, false, {}};
        detail::symbols_of(r.lhs, c.syms);
        detail::symbols_of(r.rhs, c.syms);
        cons.push_back(std::move(c));
    }
    for (const auto& dp : p.pairs) {
        Constraint c{dp.as_rule(), true, {}};
        detail::symbols_of(dp.lhs, c.syms);
        detail::symbols_of(dp.rhs, c.syms);
        cons.push_back(std::move(c));
    }
    // Symbol order: greedily pick the symbol that completes the most constraints.
    std::set<std::string> remaining;
    for (const auto& c : cons) remaining.insert(c.syms.begin(), c.syms.end());
    std::vector<std::string> order;
    std::set<std::string> chosen;
    while (!remaining.empty()) {
        std::string best;
        long long best_score = -1;
        for (const std::string& f : remaining) {
            long long score = 0;
            for (const auto& c : cons) {
                if (!c.syms.count(f)) continue;
                std::size_t missing = 0;
                for (const auto& s : c.syms)
                    if (!chosen.count(s) && s != f) ++missing;
                score += missing == 0 ? 1000 : 1000 / static_cast<long long>(missing + 1);
            }
            if (score > best_score) {
                best_score = score;
                best = f;
            }
        }
        order.push_back(best);
        chosen.insert(best);
        remaining.erase(best);
    }
    std::vector<std::vector<std::size_t>> check_at(order.size());
    for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        std::size_t last = 0;
        for (std::size_t k = 0; k < order.size(); ++k)
            if (cons[ci].syms.count(order[k])) last = k;
        check_at[last].push_back(ci);
    }
    std::map<std::string, std::size_t> arity;
    for (const auto& c : cons) {
        std::function<void(const Term&)> scan = [&](const Term& t) {
            if (t.is_var()) return;
            arity[t.name()] = t.arity();
            for (const Term& a : t.args()) scan(a);
        };
        scan(c.rule.lhs);
        scan(c.rule.rhs);
    }
    std::vector<std::vector<LinearFn>> cands;
    for (const std::string& f : order) cands.push_back(detail::linear_candidates(arity[f], bound));

    LinearInterpretation interp;
    std::size_t visited = 0;
    std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
        if (k == order.size()) {
            for (const auto& c : cons)
                if (c.is_pair && orient_check(interp, c.rule) == Orientation::strict) return true;
            return false;
        }
        for (const LinearFn& fn : cands[k]) {
            if (++visited > max_nodes) return false;
            interp.set(order[k], fn);
            bool ok = true;
            for (std::size_t ci : check_at[k])
                if (orient_check(interp, cons[ci].rule) == Orientation::none) {
                    ok = false;
                    break;
                }
            if (ok && rec(k + 1)) return true;
        }
        return false;
    };
    if (rec(0)) return interp;
    return std::nullopt;
}

/// All simple projections over the marked symbols of P, in a fixed order.
inline std::vector<SimpleProjection> all_projections(const std::vector<DependencyPair>& pairs) {
    std::map<std::string, std::size_t> marked;
    for (const auto& dp : pairs) {
        marked[dp.lhs.name()] = dp.lhs.arity();
        marked[dp.rhs.name()] = dp.rhs.arity();
    }
    std::vector<SimpleProjection> out{{}};
    for (const auto& [f, n] : marked) {
        if (n == 0) return {};
        std::vector<SimpleProjection> next;
        for (const auto& base : out)
            for (std::size_t i = 1; i <= n; ++i) {
                SimpleProjection pi = base;
                pi[f] = i;
                next.push_back(std::move(pi));
            }
        out = std::move(next);
    }
    return out;
}

namespace detail {

inline bool prove_node(ProofNode& node, const Trs& trs, const SearchConfig& cfg,
                       std::vector<std::vector<DependencyPair>>& frontier) {
    if (node.pairs.empty()) return true;
    DpProblem prob{node.pairs, &trs};
    for (ProcessorKind kind : cfg.order) {
        if (kind == ProcessorKind::graph) {
            auto o = apply_dependency_graph(prob);
            if (!o.progress) continue;
            node.processor = GraphStep{o.graph};
            bool ok = true;
            for (auto& [pairs, trivial] : o.children) {
                ProofNode child = leaf_node(pairs, trivial);
                if (!trivial) ok = prove_node(child, trs, cfg, frontier) && ok;
                node.children.push_back(std::move(child));
            }
            return ok;
        }
        if (kind == ProcessorKind::subterm) {
            for (const auto& pi : all_projections(node.pairs)) {
                auto o = apply_subterm_criterion(prob, pi);
                if (!o.progress) continue;
                node.processor = SubtermStep{pi};
                ProofNode child = leaf_node(o.kept);
                bool ok = prove_node(child, trs, cfg, frontier);
                node.children.push_back(std::move(child));
                return ok;
            }
            continue;
        }
        std::vector<LinearInterpretation> tries;
        if (auto found = search_interpretation(prob, cfg.coeff_bound, cfg.max_search_nodes)) tries.push_back(*found);
        tries.insert(tries.end(), cfg.user_interpretations.begin(), cfg.user_interpretations.end());
        for (const auto& interp : tries) {
            auto o = apply_reduction_pair(prob, interp);
            if (!o.progress) continue;
            node.processor = ReductionPairStep{interp};
            ProofNode child = leaf_node(o.kept);
            bool ok = prove_node(child, trs, cfg, frontier);
            node.children.push_back(std::move(child));
            return ok;
        }
    }
    frontier.push_back(node.pairs);
    return false;
}

}  // namespace detail

inline SearchResult search_proof(const Trs& trs, const SearchConfig& cfg = {}) {
    SearchResult res;
    ProofTree tree;
    tree.trs = std::make_shared<const Trs>(trs);
    tree.dps = compute_dps(trs);
    tree.root = leaf_node(tree.dps);
    if (detail::prove_node(tree.root, *tree.trs, cfg, res.frontier)) res.tree = std::move(tree);
    return res;
}

/// Builds a proof tree by asking `plan` which processor to apply to each
/// nonempty, non-trivial problem. Throws TreeBuilderError when a planned
/// application makes no progress.
inline ProofTree build_tree(const Trs& trs,
                            const std::function<Processor(const std::vector<DependencyPair>&)>& plan) {
    ProofTree tree;
    tree.trs = std::make_shared<const Trs>(trs);
    tree.dps = compute_dps(trs);
    std::function<ProofNode(std::vector<DependencyPair>, bool)> rec = [&](std::vector<DependencyPair> pairs,
                                                                           bool trivial) {
        ProofNode node = leaf_node(std::move(pairs), trivial);
        if (node.pairs.empty() || trivial) return node;
        DpProblem prob{node.pairs, tree.trs.get()};
        Processor proc = plan(node.pairs);
        if (std::holds_alternative<GraphStep>(proc)) {
            auto o = apply_dependency_graph(prob);
            if (!o.progress) throw TreeBuilderError("graph processor: " + o.reason);
            node.processor = GraphStep{o.graph};
            for (auto& [ps, triv] : o.children) node.children.push_back(rec(ps, triv));
        } else if (const auto* rp = std::get_if<ReductionPairStep>(&proc)) {
            auto o = apply_reduction_pair(prob, rp->interp);
            if (!o.progress) throw TreeBuilderError("reduction pair on " + index_set_string(node.pairs) + ": " + o.reason);
            node.processor = proc;
            node.children.push_back(rec(o.kept, false));
        } else {
            auto o = apply_subterm_criterion(prob, std::get<SubtermStep>(proc).projection);
            if (!o.progress) throw TreeBuilderError("subterm criterion on " + index_set_string(node.pairs) + ": " + o.reason);
            node.processor = proc;
            node.children.push_back(rec(o.kept, false));
        }
        return node;
    };
    tree.root = rec(tree.dps, false);
    return tree;
}

// ---------------------------------------------------------------------------
// Ranks of terms and reduction pair functions

/// rk(G, t) = max rank of a pair whose lhs matches an R-reduct of t#.
inline std::optional<std::size_t> rank_of_term(const DepGraph& g, const Term& t, const Trs& trs, const Fuel& fuel = {}) {
    if (t.is_var()) return std::nullopt;
    ReachGraph reach = reachable_set(mark(t), trs.rules(), fuel);
    if (!reach.exhausted) throw Indeterminate("rank of " + t.to_string() + " ran out of fuel");
    std::optional<std::size_t> best;
    for (const Term& u : reach.nodes)
        for (std::size_t v = 0; v < g.pairs.size(); ++v)
            if (match_term(g.pairs[v].lhs, u)) {
                std::size_t r = g.rank[g.scc_of[v]];
                if (!best || r > *best) best = r;
            }
    return best;
}

/// g(n) = Σ c_j n^j with natural coefficients.
struct RpFunction {
    std::vector<Nat> coeffs;

    Nat operator()(const Nat& n) const {
        Nat v = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * n + *it;
        return v;
    }
    std::string to_string() const {
        std::string out;
        for (std::size_t j = coeffs.size(); j-- > 0;) {
            if (coeffs[j] == 0) continue;
            if (!out.empty()) out += " + ";
            std::string c = coeffs[j].str();
            if (j == 0) out += c;
            else out += (coeffs[j] == 1 ? "" : c) + (j == 1 ? "n" : "n^" + std::to_string(j));
        }
        return out.empty() ? "0" : out;
    }
};

inline std::size_t max_scc_count(const ProofTree& tree) {
    std::size_t k = 0;
    for (const auto& [_, node] : tree.nodes())
        if (node->processor)
            if (const auto* gs = std::get_if<GraphStep>(&*node->processor)) k = std::max(k, gs->graph.scc_count());
    return k;
}

struct RpValidation {
    bool ok = true;
    std::size_t k = 0;
    std::size_t n_max = 0;
    std::size_t checked = 0;
    std::optional<std::string> violation;
    std::vector<std::string> indeterminate;
    std::vector<std::string> lines;
};

/// Bounded empirical check of the reduction pair function conditions.
inline RpValidation validate_rp_function(const ProofTree& tree, const RpFunction& g, std::size_t n_max,
                                         const Fuel& fuel = {}) {
    RpValidation rep;
    rep.n_max = n_max;
    rep.k = max_scc_count(tree);
    for (std::size_t n = 0; n <= n_max; ++n)
        if (g(n) < rep.k) {
            rep.ok = false;
            rep.violation = "g(" + std::to_string(n) + ") = " + g(n).str() + " < k = " + std::to_string(rep.k);
            rep.lines.push_back(*rep.violation);
            return rep;
        }
    TermEnumerator en(signature_with_fresh_constant(*tree.trs), n_max);
    for (const auto& [pos, node] : tree.nodes()) {
        if (!node->processor || !std::holds_alternative<ReductionPairStep>(*node->processor)) continue;
        const auto& kept = node->children.at(0).pairs;
        std::set<std::size_t> keep = pair_indices(kept);
        std::vector<Rule> strict, weak = tree.trs->rules();
        for (const auto& dp : node->pairs) (keep.count(dp.index) ? weak : strict).push_back(dp.as_rule());
        Nat worst = 0;
        for (std::size_t s = 1; s <= n_max; ++s)
            for (const Term& t : en.of_size(s)) {
                if (!tree.trs->is_defined(t.name())) continue;
                ++rep.checked;
                try {
                    Nat h = dheight_relative(mark(t), strict, weak, fuel);
                    worst = std::max(worst, h);
                    if (h > g(s)) {
                        rep.ok = false;
                        rep.violation = "node " + pos.to_string() + ": dh(" + mark(t).to_string() + ") = " + h.str() +
                                        " > g(" + std::to_string(s) + ") = " + g(s).str();
                        rep.lines.push_back(*rep.violation);
                        return rep;
                    }
                } catch (const Indeterminate& e) {
                    rep.indeterminate.push_back(e.what());
                }
            }
        rep.lines.push_back("node " + pos.to_string() + " " + index_set_string(node->pairs) + " -> " +
                            index_set_string(kept) + ": max relative height " + worst.str());
    }
    if (!rep.indeterminate.empty()) rep.ok = false;
    rep.lines.push_back(std::string(rep.ok ? "validated" : "not validated") + " up to n_max = " + std::to_string(n_max) +
                        " (k = " + std::to_string(rep.k) + ", " + std::to_string(rep.checked) + " terms)");
    return rep;
}

}  // namespace dpframe
