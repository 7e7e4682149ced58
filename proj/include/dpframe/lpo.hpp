#pragma once

// Lexicographic path order with left-to-right status.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpframe/term.hpp"

namespace dpframe {

class PrecedenceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strict partial order on symbol names, kept transitively closed.
class Precedence {
public:
    Precedence() = default;
    Precedence(std::initializer_list<std::pair<std::string, std::string>> pairs) {
        for (const auto& [a, b] : pairs) add(a, b);
    }

    void add(const std::string& greater, const std::string& smaller) {
        if (greater == smaller || this->greater(smaller, greater))
            throw PrecedenceError("precedence cycle through " + greater + " and " + smaller);
        std::set<std::string> above{greater}, below{smaller};
        for (const auto& [a, b] : pairs_) {
            if (b == greater) above.insert(a);
            if (a == smaller) below.insert(b);
        }
        for (const auto& a : above)
            for (const auto& b : below) pairs_.emplace(a, b);
    }

    /// Adds a chain a1 > a2 > ... between consecutive groups.
    void chain(const std::vector<std::vector<std::string>>& groups) {
        for (std::size_t i = 0; i + 1 < groups.size(); ++i)
            for (const auto& a : groups[i])
                for (const auto& b : groups[i + 1]) add(a, b);
    }

    bool greater(const std::string& a, const std::string& b) const { return pairs_.count({a, b}) > 0; }
    const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }

private:
    std::set<std::pair<std::string, std::string>> pairs_;
};

namespace detail {

class LpoMemo {
public:
    explicit LpoMemo(const Precedence& prec) : prec_(prec) {}

    bool greater(const Term& s, const Term& t) {
        if (s.is_var()) return false;
        if (t.is_var()) return s != t && variables_of(s).count(t.name()) > 0;
        Key key{s.identity(), t.identity()};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool r = compute(s, t);
        memo_.emplace(key, r);
        return r;
    }

private:
    using Key = std::pair<const void*, const void*>;

    bool geq(const Term& s, const Term& t) { return s == t || greater(s, t); }

    bool dominates_args(const Term& s, const Term& t) {
        for (const Term& tj : t.args())
            if (!greater(s, tj)) return false;
        return true;
    }

    bool compute(const Term& s, const Term& t) {
        for (const Term& si : s.args())
            if (geq(si, t)) return true;
        if (prec_.greater(s.name(), t.name())) return dominates_args(s, t);
        if (s.name() == t.name() && s.arity() == t.arity()) {
            for (std::size_t i = 0; i < s.arity(); ++i) {
                if (s.args()[i] == t.args()[i]) continue;
                return greater(s.args()[i], t.args()[i]) && dominates_args(s, t);
            }
        }
        return false;
    }

    const Precedence& prec_;
    std::map<Key, bool> memo_;
};

}  // namespace detail

inline bool lpo_greater(const Term& s, const Term& t, const Precedence& prec) {
    return detail::LpoMemo(prec).greater(s, t);
}

struct CompatLine {
    std::size_t index;  // 1-based
    Rule rule;
    bool oriented;
};

struct CompatReport {
    std::vector<CompatLine> lines;

    bool ok() const {
        for (const auto& l : lines)
            if (!l.oriented) return false;
        return true;
    }

    std::string to_string() const {
        std::string out;
        for (const auto& l : lines) {
            out += std::to_string(l.index) + (l.rule.name.empty() ? "" : " [" + l.rule.name + "]") + ": " +
                   l.rule.lhs.to_string() + " -> " + l.rule.rhs.to_string() + (l.oriented ? "  oriented" : "  NOT oriented") + "\n";
        }
        out += ok() ? "compatible\n" : "not compatible\n";
        return out;
    }
};

inline CompatReport check_compatible(std::span<const Rule> rules, const Precedence& prec) {
    CompatReport rep;
    for (std::size_t i = 0; i < rules.size(); ++i)
        rep.lines.push_back({i + 1, rules[i], lpo_greater(rules[i].lhs, rules[i].rhs, prec)});
    return rep;
}

inline CompatReport check_compatible(const Trs& trs, const Precedence& prec) {
    return check_compatible(std::span<const Rule>(trs.rules()), prec);
}

}  // namespace dpframe
