#pragma once

// The simulating system: generation, translation of terms and constructive
// replays of rewrite steps.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpframe/analysis.hpp"
#include "dpframe/dp.hpp"
#include "dpframe/lpo.hpp"
#include "dpframe/norm.hpp"
#include "dpframe/term.hpp"

namespace dpframe {

struct SimConstants {
    std::size_t d = 1;
    std::size_t A = 1;
    std::size_t C = 0;
};

inline SimConstants sim_constants(const Trs& trs, const ProofTree& tree) {
    SimConstants k;
    k.d = tree.depth() + 1;
    k.A = std::max<std::size_t>(1, trs.max_arity());
    for (const Rule& r : trs.rules()) k.C = std::max(k.C, r.rhs.depth());
    return k;
}

namespace sim {
inline const std::string f = "f", c = "c", h = "h", z = "z", size = "size", choice = "choice", s = "s", zero = "0",
                         bot = "bot", g = "g", plus = "plus", mult = "mult";
inline std::string times(std::size_t A) { return "times_" + std::to_string(A); }
}  // namespace sim

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimSystem {
    SimConstants k;
    RpFunction g;
    std::vector<Rule> rules;
    std::size_t schema_rules = 0;  // rules before the evaluator for g
    Precedence precedence;

    const Rule& rule(const std::string& name) const {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw SimulationError("no simulating rule named " + name);
        return rules[it->second];
    }
    std::size_t index_of(const std::string& name) const { return by_name.at(name); }
    Trs as_trs() const { return Trs::make(rules); }

    std::map<std::string, std::size_t> by_name;
};

namespace detail {

struct SimBuilder {
    SimConstants k;

    Term var(const std::string& x, std::size_t i) const { return Term::variable(x + std::to_string(i)); }
    std::vector<Term> vars(const std::string& x, std::size_t n) const {
        std::vector<Term> out;
        for (std::size_t i = 1; i <= n; ++i) out.push_back(var(x, i));
        return out;
    }
    Term F(std::vector<Term> first, const std::vector<Term>& last) const {
        first.insert(first.end(), last.begin(), last.end());
        return Term::app(sim::f, std::move(first));
    }
    /// choice(f(prefix, 0, ..., 0, xs)).
    Term N(const std::vector<Term>& prefix, const std::vector<Term>& xs) const {
        std::vector<Term> first = prefix;
        while (first.size() < k.d) first.push_back(Term::app(sim::zero));
        return Term::app(sim::choice, {F(first, xs)});
    }
    Term M(std::size_t level, const std::vector<Term>& prefix, const std::vector<Term>& xs) const {
        std::vector<Term> children = xs;
        if (level > 0) children.assign(k.A, M(level - 1, prefix, xs));
        std::vector<Term> first = prefix;
        Term n = N(prefix, children);
        while (first.size() < k.d) first.push_back(n);
        return F(first, children);
    }
};

inline Term unary_chain(const std::string& f, std::size_t n, Term inner) {
    for (std::size_t i = 0; i < n; ++i) inner = Term::app(f, {inner});
    return inner;
}

}  // namespace detail

/// M^level_i with the given prefix u_1..u_i and children xs.
inline Term sim_M(const SimConstants& k, std::size_t level, const std::vector<Term>& prefix, const std::vector<Term>& xs) {
    return detail::SimBuilder{k}.M(level, prefix, xs);
}

inline Precedence rsim_precedence(const SimSystem& sys) {
    Precedence p;
    p.chain({{sim::h, sim::z}, {sim::f}, {sim::choice}, {sim::g, sim::size}, {sim::times(sys.k.A)}, {sim::s},
             {sim::zero}, {sim::c, sim::bot}});
    p.chain({{sim::g}, {sim::mult}, {sim::plus}, {sim::s}});
    return p;
}

/// Unary-numeral evaluator for g(n) = Σ c_j n^j.
inline std::vector<Rule> g_evaluator(const RpFunction& g) {
    Term x = Term::variable("x"), y = Term::variable("y"), zero = Term::app(sim::zero);
    auto S = [](Term t) { return Term::app(sim::s, {std::move(t)}); };
    auto plus = [](Term a, Term b) { return Term::app(sim::plus, {std::move(a), std::move(b)}); };
    auto mult = [](Term a, Term b) { return Term::app(sim::mult, {std::move(a), std::move(b)}); };
    std::vector<Rule> out{
        {plus(zero, y), y, "plus_0"},
        {plus(S(x), y), S(plus(x, y)), "plus_s"},
        {mult(zero, y), zero, "mult_0"},
        {mult(S(x), y), plus(y, mult(x, y)), "mult_s"},
    };
    auto num = [](const Nat& n) { return numeral(static_cast<std::size_t>(n), sim::s, sim::zero); };
    std::optional<Term> acc;
    for (std::size_t j = g.coeffs.size(); j-- > 0;) {
        if (acc) acc = mult(*acc, x);
        if (g.coeffs[j] != 0) acc = acc ? plus(*acc, num(g.coeffs[j])) : num(g.coeffs[j]);
    }
    out.push_back({Term::app(sim::g, {x}), acc ? *acc : zero, "g"});
    return out;
}

inline SimSystem generate_rsim(const SimConstants& k, const RpFunction& g) {
    detail::SimBuilder b{k};
    const std::size_t d = k.d, A = k.A;
    SimSystem sys;
    sys.k = k;
    sys.g = g;
    auto add = [&](Term l, Term r, std::string name) { sys.rules.push_back({std::move(l), std::move(r), std::move(name)}); };
    std::vector<Term> u = b.vars("u", d), v = b.vars("v", d), xs = b.vars("x", A), ys = b.vars("y", A);
    Term zero = Term::app(sim::zero), bot = Term::app(sim::bot), c = Term::app(sim::c), x = Term::variable("x");
    auto with = [&](std::size_t i, Term t) {
        std::vector<Term> w = u;
        w[i - 1] = std::move(t);
        return b.F(w, xs);
    };
    auto prefix = [&](std::size_t i, Term last) {
        std::vector<Term> p(u.begin(), u.begin() + static_cast<long>(i - 1));
        p.push_back(std::move(last));
        return p;
    };
    const std::string I = "_";
    for (std::size_t i = 1; i <= d; ++i)
        add(with(i, Term::app(sim::s, {u[i - 1]})), b.M(k.C, prefix(i, u[i - 1]), xs), "1" + I + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 1; j <= A; ++j)
            add(with(i, b.F(v, ys)), b.M(k.C, prefix(i, ys[j - 1]), xs),
                "2" + I + std::to_string(i) + I + std::to_string(j));
    for (std::size_t i = 1; i <= d; ++i) add(with(i, b.F(v, ys)), b.M(k.C, prefix(i, zero), xs), "3" + I + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i) add(with(i, zero), b.M(k.C, prefix(i, bot), xs), "4" + I + std::to_string(i));
    const std::string times = sim::times(A);
    for (std::size_t j = 1; j <= A; ++j)
        add(Term::app(sim::size, {b.F(u, xs)}), Term::app(times, {Term::app(sim::size, {xs[j - 1]})}),
            "5" + I + std::to_string(j));
    add(Term::app(sim::size, {c}), Term::app(sim::s, {zero}), "6");
    add(Term::app(times, {Term::app(sim::s, {x})}), detail::unary_chain(sim::s, A, Term::app(times, {x})), "7");
    add(Term::app(times, {zero}), zero, "8");
    add(b.F(u, xs), c, "9");
    for (std::size_t j = 1; j <= A; ++j) add(b.F(u, xs), xs[j - 1], "10" + I + std::to_string(j));
    {
        std::vector<Term> xa(A, x), ca(A, c);
        add(Term::app(sim::h, {x}), b.F(std::vector<Term>(d, b.N({}, xa)), xa), "11");
        add(Term::app(sim::z), b.F(std::vector<Term>(d, b.N({}, ca)), ca), "12");
    }
    for (std::size_t j = 1; j <= A; ++j)
        add(Term::app(sim::choice, {b.F(u, xs)}), xs[j - 1], "13" + I + std::to_string(j));
    add(Term::app(sim::choice, {x}), Term::app(sim::g, {Term::app(sim::size, {x})}), "14");
    add(Term::app(sim::choice, {x}), bot, "15");
    sys.schema_rules = sys.rules.size();
    for (Rule& r : g_evaluator(g)) sys.rules.push_back(std::move(r));
    for (std::size_t i = 0; i < sys.rules.size(); ++i) sys.by_name.emplace(sys.rules[i].name, i);
    sys.precedence = rsim_precedence(sys);
    return sys;
}

inline SimSystem generate_rsim(const Trs& trs, const ProofTree& tree, const RpFunction& g) {
    return generate_rsim(sim_constants(trs, tree), g);
}

/// Both c, or both f-rooted with pairwise ≈ last A arguments.
inline bool approx_equiv(const Term& a, const Term& b, const SimConstants& k) {
    if (a.is_var() || b.is_var()) return false;
    if (a.name() == sim::c || b.name() == sim::c) return a.name() == b.name() && a.arity() == 0 && b.arity() == 0;
    if (a.name() != sim::f || b.name() != sim::f || a.arity() != k.d + k.A || b.arity() != k.d + k.A) return false;
    for (std::size_t j = k.d; j < k.d + k.A; ++j)
        if (!approx_equiv(a.args()[j], b.args()[j], k)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Derivations

struct SimStep {
    std::string rule;
    Position position;
    Term result;
};

struct SimDerivation {
    Term start;
    std::vector<SimStep> steps;

    const Term& end() const { return steps.empty() ? start : steps.back().result; }
    std::size_t length() const { return steps.size(); }

    void append(const SimDerivation& other) {
        if (other.start != end()) throw SimulationError("derivations do not chain at " + other.start.to_string());
        steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    }

    std::string to_string() const {
        std::string out = "start : " + start.to_string() + "\n";
        for (const auto& st : steps) out += st.rule + " @ " + st.position.to_string() + " : " + st.result.to_string() + "\n";
        return out;
    }
};

/// Replays every step with term-core rewriting; returns the problems found.
inline std::vector<std::string> validate_derivation(const SimSystem& sys, const SimDerivation& der) {
    std::vector<std::string> problems;
    Term cur = der.start;
    for (std::size_t i = 0; i < der.steps.size(); ++i) {
        const SimStep& st = der.steps[i];
        auto it = sys.by_name.find(st.rule);
        std::optional<Term> next;
        if (it != sys.by_name.end()) next = rewrite_at(cur, sys.rules[it->second], st.position);
        if (!next || *next != st.result) {
            problems.push_back("step " + std::to_string(i + 1) + ": " + st.rule + " @ " + st.position.to_string() +
                               " does not produce the recorded term");
            return problems;
        }
        cur = *next;
    }
    return problems;
}

// ---------------------------------------------------------------------------
// Constructive simulation

class Simulator {
public:
    Simulator(const SimSystem& sys, NormEngine& eng) : sys_(sys), eng_(eng), index_(sys.rules) {
        if (eng.d() != sys.k.d) throw SimulationError("proof tree depth does not match the simulating system");
    }

    const SimSystem& system() const { return sys_; }

    Term translate(const Term& t) {
        if (auto it = tr_.find(t); it != tr_.end()) return it->second;
        if (!variables_of(t).empty()) throw SimulationError("translation needs a ground term, got " + t.to_string());
        if (t.arity() > sys_.k.A) throw SimulationError("symbol " + t.name() + " exceeds the simulated arity");
        NormVector v = eng_.norm(t);
        std::vector<Term> args;
        for (const NormValue& x : v.values) args.push_back(star(x));
        for (const Term& c : t.args()) args.push_back(translate(c));
        while (args.size() < sys_.k.d + sys_.k.A) args.push_back(Term::app(sim::c));
        Term out = Term::app(sim::f, std::move(args));
        tr_.emplace(t, out);
        return out;
    }

    Term star(const NormValue& v) {
        if (v.is_bot()) return Term::app(sim::bot);
        if (v.is_nat()) return numeral(static_cast<std::size_t>(v.as_nat()), sim::s, sim::zero);
        return translate(v.as_trm());
    }

    /// size(a) →+ sⁿ(0) with n ≥ |original|, for a ≈ tr(original).
    SimDerivation simulate_size(const Term& a, const Term& original) {
        if (!approx_equiv(a, translate(original), sys_.k))
            throw SimulationError("argument structure of " + a.to_string() + " does not mirror " + original.to_string());
        Run r{this, Term::app(sim::size, {a}), {}};
        size_to(r, Position{}, original.size());
        return r.finish();
    }

    /// tr(s) →+ tr(t) for a single step s →R t.
    SimDerivation simulate_step(const Term& s, const Term& t) {
        const Trs& trs = eng_.trs();
        std::optional<RewriteStep> found;
        for (const RewriteStep& st : rewrite_successors(s, trs.rules()))
            if (st.result == t) {
                found = st;
                break;
            }
        if (!found) throw StepPrecondition(s.to_string() + " does not rewrite to " + t.to_string());
        Run r{this, translate(s), {}};
        step_at(r, Position{}, s, found->position, trs.rules()[found->rule_index]);
        if (r.cur != translate(t)) throw SimulationError("replay of " + s.to_string() + " -> " + t.to_string() + " ended elsewhere");
        return r.finish();
    }

    /// Concatenated replay of an R-derivation given as its list of terms.
    SimDerivation simulate_derivation(const std::vector<Term>& path) {
        SimDerivation out{translate(path.at(0)), {}};
        for (std::size_t i = 0; i + 1 < path.size(); ++i) out.append(simulate_step(path[i], path[i + 1]));
        return out;
    }

    /// h^depth(t)(z) →+ tr(t).
    SimDerivation simulate_start(const Term& t) {
        if (!variables_of(t).empty()) throw SimulationError("start needs a ground term, got " + t.to_string());
        Run r{this, detail::unary_chain(sim::h, t.depth(), Term::app(sim::z)), {}};
        start_at(r, Position{}, t.depth(), t);
        if (r.cur != translate(t)) throw SimulationError("start derivation for " + t.to_string() + " ended elsewhere");
        return r.finish();
    }

private:
    struct Run {
        Simulator* self;
        Term cur;
        std::vector<SimStep> steps;
        Term start = cur;

        const Term& at(const Position& p) const { return subterm_at(cur, p); }
        void apply(const std::string& name, const Position& p) {
            auto next = rewrite_at(cur, self->sys_.rule(name), p);
            if (!next) throw SimulationError("rule " + name + " does not apply at " + p.to_string() + " of " + subterm_at(cur, p).to_string());
            cur = *next;
            steps.push_back({name, p, cur});
        }
        SimDerivation finish() { return {start, std::move(steps)}; }
    };

    std::size_t d() const { return sys_.k.d; }
    std::size_t A() const { return sys_.k.A; }
    Position arg_pos(const Position& p, std::size_t i) const { return p.child(static_cast<unsigned>(i)); }
    static std::string idx(std::size_t i) { return std::to_string(i); }

    /// Number of f nodes reachable through the last A arguments.
    std::size_t shape_size(const Term& a) const {
        if (a.name() != sim::f) return 0;
        std::size_t n = 1;
        for (std::size_t j = d(); j < a.arity(); ++j) n += shape_size(a.args()[j]);
        return n;
    }

    // Rules 5_j, 6, 7, 8 and 9. at(pos) = size(X); ends in sⁿ(0) and returns n.
    std::size_t size_to(Run& r, const Position& pos, std::size_t need) {
        const Term& x = r.at(pos).arg(1);
        std::size_t best = 0, best_size = 0;
        for (std::size_t j = 1; j <= A(); ++j) {
            std::size_t sz = shape_size(x.arg(d() + j));
            if (sz > best_size) best = j, best_size = sz;
        }
        if (best == 0 && need <= 1) {
            r.apply("9", pos.child(1));
            r.apply("6", pos);
            return 1;
        }
        if (best == 0) {
            r.apply("5_1", pos);
            r.apply("6", pos.child(1));
            return times_out(r, pos, 1);
        }
        r.apply("5_" + idx(best), pos);
        std::size_t n = size_to(r, pos.child(1), std::max(best_size, (need + A() - 1) / A()));
        return times_out(r, pos, n);
    }

    std::size_t times_out(Run& r, Position pos, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            r.apply("7", pos);
            for (std::size_t a = 0; a < A(); ++a) pos = pos.child(1);
        }
        r.apply("8", pos);
        return A() * n;
    }

    void normalize(Run& r, const Position& pos) {
        while (true) {
            auto succ = index_.successors(r.at(pos));
            if (succ.empty()) return;
            r.apply(sys_.rules[succ.front().rule_index].name, pos.concat(succ.front().position));
        }
    }

    // Rules 13_j, 14, 15. at(pos) = choice(f(..., children)); the children
    // already translate the intended term.
    NormValue choice_to(Run& r, const Position& pos, const NormValue& target) {
        if (target.is_bot()) {
            r.apply("15", pos);
            return target;
        }
        const Term& inner = r.at(pos).arg(1);
        if (target.is_trm()) {
            Term want = translate(target.as_trm());
            for (std::size_t j = 1; j <= A(); ++j)
                if (inner.arg(d() + j) == want) {
                    r.apply("13_" + idx(j), pos);
                    return target;
                }
            throw SimulationError("no argument of " + inner.to_string() + " translates " + target.as_trm().to_string());
        }
        r.apply("14", pos);
        std::size_t n = size_to(r, pos.child(1), shape_size(inner));
        normalize(r, pos);
        Nat value = sys_.g(n);
        if (value < target.as_nat())
            throw SimulationError("g(" + std::to_string(n) + ") = " + value.str() + " is below the norm value " +
                                  target.as_nat().str());
        return NormValue::nat(value);
    }

    // Lemma part 1: at(pos) = f(cur*, children) with cur ⊒lex W; ends in f(W*, children).
    void descend(Run& r, const Position& pos, std::vector<NormValue> cur, const NormVector& W) {
        while (true) {
            std::size_t i = 0;
            while (i < d() && cur[i] == W[i]) ++i;
            if (i == d()) return;
            const NormValue a = cur[i], b = W[i];
            std::string rule;
            NormValue next;
            std::string I = idx(i + 1);
            if (a.is_nat() && a.as_nat() > 0 && (b.is_bot() || (b.is_nat() && b.as_nat() < a.as_nat()))) {
                rule = "1_" + I;
                next = NormValue::nat(a.as_nat() - 1);
            } else if (a.is_nat() && b.is_bot()) {
                rule = "4_" + I;
                next = NormValue::bot();
            } else if (a.is_trm() && (b.is_bot() || b == NormValue::nat(0))) {
                rule = "3_" + I;
                next = NormValue::nat(0);
            } else if (a.is_trm() && b.is_trm() && proper_subterm(b.as_trm(), a.as_trm())) {
                const Term& u = a.as_trm();
                std::size_t k = 1;
                while (!is_subterm(b.as_trm(), u.arg(k))) ++k;
                rule = "2_" + I + "_" + idx(k);
                next = NormValue::trm(u.arg(k));
            } else {
                throw SimulationError("cannot lower norm component " + std::to_string(i + 1) + " from " +
                                      a.to_string() + " to " + b.to_string());
            }
            r.apply(rule, pos);
            for (std::size_t c = 0; c < sys_.k.C; ++c) r.apply("10_1", pos);
            cur[i] = next;
            bool exact = next == b;
            for (std::size_t j = i + 1; j < d(); ++j)
                cur[j] = choice_to(r, arg_pos(pos, j + 1), exact ? W[j] : NormValue::bot());
        }
    }

    // Lemma part 3: a step below the root of s.
    void step_at(Run& r, const Position& pos, const Term& s, const Position& p, const Rule& rule) {
        if (p.is_root()) return root_step(r, pos, s, rule);
        unsigned k = p[0];
        Term t = *rewrite_at(s, rule, p);
        step_at(r, arg_pos(pos, d() + k), s.arg(k), p.tail(), rule);
        NormVector V = eng_.norm(s), W = eng_.norm(t);
        std::vector<NormValue> cur = V.values;
        for (std::size_t i = 0; i < d(); ++i)
            if (V[i] == NormValue::trm(s.arg(k)) && W[i] == NormValue::trm(t.arg(k))) {
                step_at(r, arg_pos(pos, i + 1), s.arg(k), p.tail(), rule);
                cur[i] = W[i];
            }
        descend(r, pos, cur, W);
    }

    static std::size_t first_difference(const NormVector& a, const NormVector& b) {
        std::size_t i = 0;
        while (i < a.size() && a[i] == b[i]) ++i;
        return i;
    }

    // Lemma part 2: a root step s → t.
    void root_step(Run& r, const Position& pos, const Term& s, const Rule& rule) {
        auto sigma = match_term(rule.lhs, s);
        Term t = sigma->apply(rule.rhs);
        if (proper_subterm(t, s)) return project(r, pos, t, s);
        NormVector V = eng_.norm(s);
        std::size_t istar = 0;
        std::vector<NormValue> targets;
        for (const Position& q : positions(t)) {
            const Term& u = subterm_at(t, q);
            if (proper_subterm(u, s)) continue;
            NormVector w = eng_.norm(u);
            std::size_t i = first_difference(V, w);
            if (i == d()) throw SimulationError("norm of " + u.to_string() + " does not decrease below " + s.to_string());
            if (i > istar) istar = i, targets.clear();
            if (i == istar) targets.push_back(w[i]);
        }
        const NormValue& a = V[istar];
        std::string I = idx(istar + 1);
        std::string name;
        NormValue next;
        if (a.is_nat() && a.as_nat() > 0) {
            name = "1_" + I;
            next = NormValue::nat(a.as_nat() - 1);
        } else if (a.is_nat()) {
            name = "4_" + I;
            next = NormValue::bot();
        } else if (a.is_trm()) {
            const Term& u = a.as_trm();
            std::size_t k = 0;
            bool any_term = std::any_of(targets.begin(), targets.end(), [](const auto& x) { return x.is_trm(); });
            for (std::size_t j = 1; any_term && j <= u.arity() && k == 0; ++j) {
                bool all = std::all_of(targets.begin(), targets.end(),
                                       [&](const auto& x) { return !x.is_trm() || is_subterm(x.as_trm(), u.arg(j)); });
                if (all) k = j;
            }
            if (any_term && k == 0) throw SimulationError("no argument of " + u.to_string() + " covers the created terms");
            name = any_term ? "2_" + I + "_" + idx(k) : "3_" + I;
            next = any_term ? NormValue::trm(u.arg(k)) : NormValue::nat(0);
        } else {
            throw SimulationError("norm component " + I + " of " + s.to_string() + " is already minimal");
        }
        r.apply(name, pos);
        std::vector<NormValue> prefix(V.values.begin(), V.values.begin() + static_cast<long>(istar));
        prefix.push_back(next);
        build(r, pos, sys_.k.C, rule.rhs, *sigma, s, prefix);
    }

    // Rules 10_j along the position of t inside s.
    void project(Run& r, const Position& pos, const Term& t, const Term& s) {
        auto q = find_subterm(t, s);
        for (unsigned k : q->indices()) r.apply("10_" + idx(k), pos);
    }

    // The claim: at(pos) = M^level(prefix*, children of tr(s)); ends in tr(uσ).
    void build(Run& r, const Position& pos, std::size_t level, const Term& u, const Substitution& sigma, const Term& s,
               const std::vector<NormValue>& prefix) {
        Term us = sigma.apply(u);
        if (proper_subterm(us, s)) {
            for (std::size_t i = 0; i < level; ++i) r.apply("10_1", pos);
            return project(r, pos, us, s);
        }
        if (u.is_var() || u.depth() > level)
            throw SimulationError("created term " + us.to_string() + " is deeper than the simulating rules allow");
        auto fill = [&](const Position& at, std::optional<std::size_t> only) {
            for (std::size_t j = 1; j <= A(); ++j) {
                if (only && j != *only) continue;
                Position cj = arg_pos(at, d() + j);
                if (j <= u.arity()) {
                    if (level == 0) throw SimulationError("no level left for the arguments of " + us.to_string());
                    build(r, cj, level - 1, u.arg(j), sigma, s, prefix);
                } else if (r.at(cj).name() != sim::c) {
                    r.apply("9", cj);
                }
            }
        };
        fill(pos, std::nullopt);
        finish_choices(r, pos, prefix, us, fill);
    }

    // Positions after the prefix hold N terms; pick values ⊒ norm(t), then descend.
    template <class Fill>
    void finish_choices(Run& r, const Position& pos, const std::vector<NormValue>& prefix, const Term& t, Fill&& fill) {
        NormVector W = eng_.norm(t);
        std::vector<NormValue> cur = prefix;
        for (std::size_t j = prefix.size(); j < d(); ++j) {
            Position at = arg_pos(pos, j + 1);
            const NormValue& target = W[j];
            if (target.is_trm()) {
                std::size_t k = 1;
                while (k <= t.arity() && t.arg(k) != target.as_trm()) ++k;
                if (k > t.arity()) throw SimulationError("norm value " + target.to_string() + " is not an argument of " + t.to_string());
                fill(at.child(1), k);
            } else if (target.is_nat()) {
                fill(at.child(1), std::nullopt);
            }
            cur.push_back(choice_to(r, at, target));
        }
        descend(r, pos, cur, W);
    }

    // h^level(z) →+ tr(t).
    void start_at(Run& r, const Position& pos, std::size_t level, const Term& t) {
        for (; level > t.depth(); --level) {
            r.apply("11", pos);
            r.apply("10_1", pos);
        }
        r.apply(level == 0 ? "12" : "11", pos);
        auto fill = [&](const Position& at, std::optional<std::size_t> only) {
            for (std::size_t j = 1; j <= A(); ++j) {
                if (only && j != *only) continue;
                Position cj = arg_pos(at, d() + j);
                if (j <= t.arity()) {
                    start_at(r, cj, level - 1, t.arg(j));
                } else if (r.at(cj).name() != sim::c) {
                    r.apply(r.at(cj).name() == sim::z ? "12" : "11", cj);
                    r.apply("9", cj);
                }
            }
        };
        fill(pos, std::nullopt);
        finish_choices(r, pos, {}, t, fill);
    }

    const SimSystem& sys_;
    NormEngine& eng_;
    RuleIndex index_;
    TermMap<Term> tr_;
};

}  // namespace dpframe
