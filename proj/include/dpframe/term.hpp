#pragma once

// First-order terms, positions, substitutions, rules and rewrite systems.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dpframe {

enum class SymbolKind { constructor, defined, marked };

struct Symbol {
    std::string name;
    std::size_t arity = 0;
    SymbolKind kind = SymbolKind::constructor;

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

inline const std::string kMarkSuffix = "#";

inline std::string marked_name(const std::string& f) { return f + kMarkSuffix; }

inline bool is_marked_name(const std::string& f) {
    return f.size() > kMarkSuffix.size() && f.ends_with(kMarkSuffix);
}

inline std::string unmarked_name(const std::string& f) {
    return is_marked_name(f) ? f.substr(0, f.size() - kMarkSuffix.size()) : f;
}

/// Position in a term: a sequence of 1-based argument indices. The empty
/// sequence is the root.
class Position {
public:
    Position() = default;
    Position(std::initializer_list<unsigned> idx) : path_(idx) {}
    explicit Position(std::vector<unsigned> idx) : path_(std::move(idx)) {}

    bool is_root() const { return path_.empty(); }
    std::size_t length() const { return path_.size(); }
    unsigned operator[](std::size_t i) const { return path_[i]; }
    const std::vector<unsigned>& indices() const { return path_; }

    Position child(unsigned i) const {
        Position p = *this;
        p.path_.push_back(i);
        return p;
    }
    Position concat(const Position& other) const {
        Position p = *this;
        p.path_.insert(p.path_.end(), other.path_.begin(), other.path_.end());
        return p;
    }
    Position parent() const {
        Position p = *this;
        if (!p.path_.empty()) p.path_.pop_back();
        return p;
    }
    Position tail() const {
        return Position(std::vector<unsigned>(path_.begin() + (path_.empty() ? 0 : 1), path_.end()));
    }
    bool is_prefix_of(const Position& other) const {
        return path_.size() <= other.path_.size() &&
               std::equal(path_.begin(), path_.end(), other.path_.begin());
    }

    /// "ε" for the root; digits concatenated when every index is a single
    /// digit, dot-separated otherwise.
    std::string to_string() const {
        if (path_.empty()) return "ε";
        bool compact = std::all_of(path_.begin(), path_.end(), [](unsigned i) { return i < 10; });
        std::string out;
        for (std::size_t k = 0; k < path_.size(); ++k) {
            if (!compact && k > 0) out += '.';
            out += std::to_string(path_[k]);
        }
        return out;
    }

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position& a, const Position& b) { return a.path_ <=> b.path_; }

private:
    std::vector<unsigned> path_;
};

/// Immutable first-order term with structural sharing. Copies are cheap.
class Term {
    struct Node {
        bool is_var;
        std::string name;
        std::vector<Term> args;
        std::size_t hash;
        std::size_t size;
        std::size_t depth;
    };

public:
    Term() : Term(variable("_")) {}

    static Term variable(std::string name) {
        std::size_t h = std::hash<std::string>{}(name) * 0x9e3779b97f4a7c15ULL + 0x51ed27;
        return Term(std::make_shared<const Node>(Node{true, std::move(name), {}, h, 1, 0}));
    }

    static Term app(std::string f, std::vector<Term> args = {}) {
        std::size_t h = std::hash<std::string>{}(f);
        std::size_t sz = 1, dp = 0;
        for (const Term& a : args) {
            h = h * 1000003ULL ^ a.hash();
            sz += a.size();
            dp = std::max(dp, a.depth() + 1);
        }
        return Term(std::make_shared<const Node>(Node{false, std::move(f), std::move(args), h, sz, dp}));
    }

    bool is_var() const { return node_->is_var; }
    /// Variable name or root function symbol.
    const std::string& name() const { return node_->name; }
    std::span<const Term> args() const { return node_->args; }
    std::size_t arity() const { return node_->args.size(); }
    /// 1-based argument access.
    const Term& arg(std::size_t i) const { return node_->args.at(i - 1); }
    std::size_t hash() const { return node_->hash; }
    std::size_t size() const { return node_->size; }
    std::size_t depth() const { return node_->depth; }
    const void* identity() const { return node_.get(); }

    bool is_ground() const {
        if (is_var()) return false;
        return std::all_of(args().begin(), args().end(), [](const Term& a) { return a.is_ground(); });
    }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.node_ == b.node_) return true;
        if (a.hash() != b.hash() || a.size() != b.size() || a.is_var() != b.is_var() ||
            a.name() != b.name() || a.arity() != b.arity())
            return false;
        for (std::size_t i = 0; i < a.arity(); ++i)
            if (!(a.node_->args[i] == b.node_->args[i])) return false;
        return true;
    }

    /// Total structural order: variables before applications, then name,
    /// then arguments left to right.
    friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
        if (a.node_ == b.node_) return std::strong_ordering::equal;
        if (a.is_var() != b.is_var()) return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
        if (auto c = a.name() <=> b.name(); c != 0) return c;
        if (auto c = a.arity() <=> b.arity(); c != 0) return c;
        for (std::size_t i = 0; i < a.arity(); ++i)
            if (auto c = a.node_->args[i] <=> b.node_->args[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        std::string out;
        append_to(out);
        return out;
    }

private:
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    void append_to(std::string& out) const {
        out += name();
        if (!is_var() && arity() > 0) {
            out += '(';
            for (std::size_t i = 0; i < arity(); ++i) {
                if (i) out += ',';
                node_->args[i].append_to(out);
            }
            out += ')';
        }
    }

    std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << t.to_string(); }

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

template <class V>
using TermMap = std::unordered_map<Term, V, TermHash>;

// ---------------------------------------------------------------------------
// Structural helpers

inline const Term& subterm_at(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (unsigned i : p.indices()) {
        if (cur->is_var() || i == 0 || i > cur->arity())
            throw std::out_of_range("invalid position " + p.to_string() + " in " + t.to_string());
        cur = &cur->arg(i);
    }
    return *cur;
}

inline bool is_valid_position(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (unsigned i : p.indices()) {
        if (cur->is_var() || i == 0 || i > cur->arity()) return false;
        cur = &cur->arg(i);
    }
    return true;
}

inline Term replace_at(const Term& t, const Position& p, const Term& replacement, std::size_t from = 0) {
    if (from == p.length()) return replacement;
    unsigned i = p[from];
    if (t.is_var() || i == 0 || i > t.arity())
        throw std::out_of_range("invalid position " + p.to_string() + " in " + t.to_string());
    std::vector<Term> args(t.args().begin(), t.args().end());
    args[i - 1] = replace_at(args[i - 1], p, replacement, from + 1);
    return Term::app(t.name(), std::move(args));
}

/// All positions of t in pre-order (root first, children left to right).
inline std::vector<Position> positions(const Term& t) {
    std::vector<Position> out;
    std::function<void(const Term&, const Position&)> walk = [&](const Term& u, const Position& p) {
        out.push_back(p);
        for (unsigned i = 1; i <= u.arity(); ++i) walk(u.arg(i), p.child(i));
    };
    walk(t, Position{});
    return out;
}

/// Positions in leftmost-innermost order (children left to right, then the
/// node itself).
inline std::vector<Position> positions_innermost(const Term& t) {
    std::vector<Position> out;
    std::function<void(const Term&, const Position&)> walk = [&](const Term& u, const Position& p) {
        for (unsigned i = 1; i <= u.arity(); ++i) walk(u.arg(i), p.child(i));
        out.push_back(p);
    };
    walk(t, Position{});
    return out;
}

inline bool is_subterm(const Term& u, const Term& t) {
    if (u.size() > t.size()) return false;
    if (u == t) return true;
    for (const Term& a : t.args())
        if (is_subterm(u, a)) return true;
    return false;
}

/// u ⊲ t: u occurs in t at some non-root position.
inline bool proper_subterm(const Term& u, const Term& t) {
    if (u.size() >= t.size()) return false;
    for (const Term& a : t.args())
        if (is_subterm(u, a)) return true;
    return false;
}

/// First position (pre-order) at which u occurs in t.
inline std::optional<Position> find_subterm(const Term& u, const Term& t) {
    for (const Position& p : positions(t))
        if (subterm_at(t, p) == u) return p;
    return std::nullopt;
}

inline void collect_vars(const Term& t, std::set<std::string>& out) {
    if (t.is_var()) {
        out.insert(t.name());
        return;
    }
    for (const Term& a : t.args()) collect_vars(a, out);
}

inline std::set<std::string> variables_of(const Term& t) {
    std::set<std::string> out;
    collect_vars(t, out);
    return out;
}

/// t# : the root symbol replaced by its marked counterpart (variables unchanged).
inline Term mark(const Term& t) {
    if (t.is_var()) return t;
    return Term::app(marked_name(t.name()), {t.args().begin(), t.args().end()});
}

inline Term unmark(const Term& t) {
    if (t.is_var() || !is_marked_name(t.name())) return t;
    return Term::app(unmarked_name(t.name()), {t.args().begin(), t.args().end()});
}

/// Numeral s^n(0) over the given successor and zero symbols.
inline Term numeral(std::size_t n, const std::string& succ = "s", const std::string& zero = "0") {
    Term t = Term::app(zero);
    for (std::size_t i = 0; i < n; ++i) t = Term::app(succ, {t});
    return t;
}

/// n if t is s^n(0), otherwise nullopt.
inline std::optional<std::size_t> numeral_value(const Term& t, const std::string& succ = "s",
                                                const std::string& zero = "0") {
    std::size_t n = 0;
    const Term* cur = &t;
    while (!cur->is_var() && cur->name() == succ && cur->arity() == 1) {
        ++n;
        cur = &cur->arg(1);
    }
    if (!cur->is_var() && cur->name() == zero && cur->arity() == 0) return n;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Substitutions

class Substitution {
public:
    Substitution() = default;

    bool contains(const std::string& x) const { return map_.count(x) != 0; }
    const Term* lookup(const std::string& x) const {
        auto it = map_.find(x);
        return it == map_.end() ? nullptr : &it->second;
    }
    void bind(const std::string& x, Term t) { map_.insert_or_assign(x, std::move(t)); }
    std::size_t size() const { return map_.size(); }
    bool empty() const { return map_.empty(); }
    const std::map<std::string, Term>& bindings() const { return map_; }

    Term apply(const Term& t) const {
        if (t.is_var()) {
            const Term* b = lookup(t.name());
            return b ? *b : t;
        }
        if (t.arity() == 0) return t;
        std::vector<Term> args;
        args.reserve(t.arity());
        for (const Term& a : t.args()) args.push_back(apply(a));
        return Term::app(t.name(), std::move(args));
    }

    std::string to_string() const {
        std::string out = "{";
        bool first = true;
        for (const auto& [x, t] : map_) {
            if (!first) out += ", ";
            first = false;
            out += x + "↦" + t.to_string();
        }
        return out + "}";
    }

    friend bool operator==(const Substitution&, const Substitution&) = default;

private:
    std::map<std::string, Term> map_;
};

inline bool match_into(const Term& pattern, const Term& subject, Substitution& sigma) {
    if (pattern.is_var()) {
        if (const Term* b = sigma.lookup(pattern.name())) return *b == subject;
        sigma.bind(pattern.name(), subject);
        return true;
    }
    if (subject.is_var() || pattern.name() != subject.name() || pattern.arity() != subject.arity())
        return false;
    for (std::size_t i = 1; i <= pattern.arity(); ++i)
        if (!match_into(pattern.arg(i), subject.arg(i), sigma)) return false;
    return true;
}

/// Most general σ with pattern·σ = subject.
inline std::optional<Substitution> match_term(const Term& pattern, const Term& subject) {
    Substitution sigma;
    if (match_into(pattern, subject, sigma)) return sigma;
    return std::nullopt;
}

namespace detail {

inline Term resolve(const Term& t, const std::map<std::string, Term>& bound) {
    Term cur = t;
    while (cur.is_var()) {
        auto it = bound.find(cur.name());
        if (it == bound.end()) break;
        cur = it->second;
    }
    return cur;
}

inline bool occurs(const std::string& x, const Term& t, const std::map<std::string, Term>& bound) {
    Term r = resolve(t, bound);
    if (r.is_var()) return r.name() == x;
    for (const Term& a : r.args())
        if (occurs(x, a, bound)) return true;
    return false;
}

inline Term fully_apply(const Term& t, const std::map<std::string, Term>& bound) {
    Term r = resolve(t, bound);
    if (r.is_var() || r.arity() == 0) return r;
    std::vector<Term> args;
    for (const Term& a : r.args()) args.push_back(fully_apply(a, bound));
    return Term::app(r.name(), std::move(args));
}

}  // namespace detail

/// Most general unifier with occurs-check. Callers rename variables apart.
inline std::optional<Substitution> unify_terms(const Term& s, const Term& t) {
    std::map<std::string, Term> bound;
    std::vector<std::pair<Term, Term>> work{{s, t}};
    while (!work.empty()) {
        auto [a0, b0] = work.back();
        work.pop_back();
        Term a = detail::resolve(a0, bound);
        Term b = detail::resolve(b0, bound);
        if (a.is_var() && b.is_var() && a.name() == b.name()) continue;
        if (a.is_var() || b.is_var()) {
            if (!a.is_var()) std::swap(a, b);
            if (detail::occurs(a.name(), b, bound)) return std::nullopt;
            bound.insert_or_assign(a.name(), b);
            continue;
        }
        if (a.name() != b.name() || a.arity() != b.arity()) return std::nullopt;
        for (std::size_t i = 1; i <= a.arity(); ++i) work.emplace_back(a.arg(i), b.arg(i));
    }
    Substitution mgu;
    for (const auto& [x, _] : bound) mgu.bind(x, detail::fully_apply(Term::variable(x), bound));
    return mgu;
}

/// Renames every variable occurrence to a distinct fresh variable.
inline Term rename_linear(const Term& t, const std::string& prefix, std::size_t& counter) {
    if (t.is_var()) return Term::variable(prefix + std::to_string(counter++));
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    for (const Term& a : t.args()) args.push_back(rename_linear(a, prefix, counter));
    return Term::app(t.name(), std::move(args));
}

/// Consistent renaming x ↦ prefix+x.
inline Term rename_vars(const Term& t, const std::string& prefix) {
    if (t.is_var()) return Term::variable(prefix + t.name());
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    for (const Term& a : t.args()) args.push_back(rename_vars(a, prefix));
    return Term::app(t.name(), std::move(args));
}

// ---------------------------------------------------------------------------
// Rules and rewrite systems

struct Rule {
    Term lhs;
    Term rhs;
    std::string name;  // optional label (generated systems name their rules)

    std::string to_string() const { return lhs.to_string() + " -> " + rhs.to_string(); }
    friend bool operator==(const Rule& a, const Rule& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
};

class TrsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void check_rule(const Rule& r) {
    if (r.lhs.is_var()) throw TrsError("variable left-hand side in rule " + r.to_string());
    auto lv = variables_of(r.lhs);
    for (const std::string& x : variables_of(r.rhs))
        if (!lv.count(x)) throw TrsError("extra variable " + x + " on right-hand side of rule " + r.to_string());
}

/// A finite TRS: rules in order plus a signature whose kinds are inferred
/// (defined iff root of some left-hand side).
class Trs {
public:
    Trs() = default;

    /// Validates the rules and infers the signature. `extra` adds symbols
    /// that do not occur in any rule. When the result has no constant, a
    /// fresh constructor constant is added.
    static Trs make(std::vector<Rule> rules, std::vector<Symbol> extra = {}) {
        Trs out;
        for (const Rule& r : rules) check_rule(r);
        auto note = [&](const std::string& f, std::size_t n) {
            auto [it, inserted] = out.signature_.try_emplace(f, Symbol{f, n, SymbolKind::constructor});
            if (!inserted && it->second.arity != n)
                throw TrsError("symbol " + f + " used with arities " + std::to_string(it->second.arity) +
                               " and " + std::to_string(n));
        };
        std::function<void(const Term&)> scan = [&](const Term& t) {
            if (t.is_var()) return;
            note(t.name(), t.arity());
            for (const Term& a : t.args()) scan(a);
        };
        for (const Rule& r : rules) {
            scan(r.lhs);
            scan(r.rhs);
        }
        for (const Symbol& s : extra) note(s.name, s.arity);
        for (const Rule& r : rules) out.signature_.at(r.lhs.name()).kind = SymbolKind::defined;
        for (auto& [name, sym] : out.signature_)
            if (sym.kind != SymbolKind::defined && is_marked_name(name)) sym.kind = SymbolKind::marked;
        bool has_constant = std::any_of(out.signature_.begin(), out.signature_.end(),
                                        [](const auto& kv) { return kv.second.arity == 0; });
        if (!has_constant) {
            std::string c = out.fresh_name("_c");
            out.signature_.emplace(c, Symbol{c, 0, SymbolKind::constructor});
            out.padding_constant_ = c;
        }
        out.rules_ = std::move(rules);
        return out;
    }

    const std::vector<Rule>& rules() const { return rules_; }
    const std::map<std::string, Symbol>& signature() const { return signature_; }

    bool has_symbol(const std::string& f) const { return signature_.count(f) != 0; }
    bool is_defined(const std::string& f) const {
        auto it = signature_.find(f);
        return it != signature_.end() && it->second.kind == SymbolKind::defined;
    }
    std::size_t arity(const std::string& f) const { return signature_.at(f).arity; }

    std::size_t max_arity() const {
        std::size_t a = 0;
        for (const auto& [_, s] : signature_) a = std::max(a, s.arity);
        return a;
    }

    /// Constant added because the rules mention none, if any.
    const std::optional<std::string>& padding_constant() const { return padding_constant_; }

    /// A symbol name not yet in the signature, derived from `base`.
    std::string fresh_name(const std::string& base) const {
        if (!signature_.count(base)) return base;
        for (std::size_t i = 0;; ++i) {
            std::string cand = base + std::to_string(i);
            if (!signature_.count(cand)) return cand;
        }
    }

    /// Symbols in name order.
    std::vector<Symbol> symbols() const {
        std::vector<Symbol> out;
        for (const auto& [_, s] : signature_) out.push_back(s);
        return out;
    }

private:
    std::vector<Rule> rules_;
    std::map<std::string, Symbol> signature_;
    std::optional<std::string> padding_constant_;
};

// ---------------------------------------------------------------------------
// One-step rewriting

enum class StepScope { anywhere, root_only, below_root_only };

struct RewriteStep {
    std::size_t rule_index;  // 0-based index into the rule list
    Position position;
    Term result;

    friend bool operator==(const RewriteStep& a, const RewriteStep& b) {
        return a.rule_index == b.rule_index && a.position == b.position && a.result == b.result;
    }
};

/// Rule list indexed by root symbol, for repeated successor queries.
class RuleIndex {
public:
    explicit RuleIndex(std::span<const Rule> rules) : rules_(rules.begin(), rules.end()) {
        for (std::size_t i = 0; i < rules_.size(); ++i) by_root_[rules_[i].lhs.name()].push_back(i);
    }

    const std::vector<Rule>& rules() const { return rules_; }

    const std::vector<std::size_t>& candidates(const std::string& root) const {
        static const std::vector<std::size_t> none;
        auto it = by_root_.find(root);
        return it == by_root_.end() ? none : it->second;
    }

    /// One-step successors in leftmost-innermost position order, then rule index.
    std::vector<RewriteStep> successors(const Term& t, StepScope scope = StepScope::anywhere) const {
        std::vector<RewriteStep> out;
        collect(t, t, Position{}, scope, out);
        return out;
    }

    bool has_redex(const Term& t, StepScope scope = StepScope::anywhere) const {
        if (scope != StepScope::below_root_only && root_redex(t)) return true;
        if (scope == StepScope::root_only || t.is_var()) return false;
        for (const Term& a : t.args())
            if (has_redex(a, StepScope::anywhere)) return true;
        return false;
    }

    bool root_redex(const Term& t) const {
        if (t.is_var()) return false;
        for (std::size_t i : candidates(t.name())) {
            Substitution sigma;
            if (match_into(rules_[i].lhs, t, sigma)) return true;
        }
        return false;
    }

private:
    void collect(const Term& whole, const Term& u, const Position& p, StepScope scope,
                 std::vector<RewriteStep>& out) const {
        if (u.is_var()) return;
        if (scope != StepScope::root_only)
            for (unsigned i = 1; i <= u.arity(); ++i) collect(whole, u.arg(i), p.child(i), StepScope::anywhere, out);
        if (scope == StepScope::below_root_only) return;
        for (std::size_t i : candidates(u.name())) {
            Substitution sigma;
            if (match_into(rules_[i].lhs, u, sigma))
                out.push_back({i, p, replace_at(whole, p, sigma.apply(rules_[i].rhs))});
        }
    }

    std::vector<Rule> rules_;
    std::map<std::string, std::vector<std::size_t>> by_root_;
};

inline std::vector<RewriteStep> rewrite_successors(const Term& t, std::span<const Rule> rules,
                                                   StepScope scope = StepScope::anywhere) {
    return RuleIndex(rules).successors(t, scope);
}

/// Applies `rule` at position p of t, or nullopt when the subterm is not an
/// instance of the left-hand side.
inline std::optional<Term> rewrite_at(const Term& t, const Rule& rule, const Position& p) {
    if (!is_valid_position(t, p)) return std::nullopt;
    auto sigma = match_term(rule.lhs, subterm_at(t, p));
    if (!sigma) return std::nullopt;
    return replace_at(t, p, sigma->apply(rule.rhs));
}

}  // namespace dpframe
