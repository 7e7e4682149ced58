#pragma once

// Reader and writer for the old-style TPDB rule format, plus the small
// line formats used for interpretations, projections and precedences.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpframe/term.hpp"

namespace dpframe {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t col)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

private:
    std::size_t line_ = 0, col_ = 0;
};

namespace detail {

enum class Tok { lparen, rparen, comma, arrow, ident, greater, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line, col;
};

inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'' || c == '+' ||
           c == '*' || c == '^' || c == '-';
}

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        std::size_t l = line, cl = col;
        if (c == '(') { out.push_back({Tok::lparen, "(", l, cl}); advance(1); continue; }
        if (c == ')') { out.push_back({Tok::rparen, ")", l, cl}); advance(1); continue; }
        if (c == ',') { out.push_back({Tok::comma, ",", l, cl}); advance(1); continue; }
        if (c == '>') { out.push_back({Tok::greater, ">", l, cl}); advance(1); continue; }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            out.push_back({Tok::arrow, "->", l, cl});
            advance(2);
            continue;
        }
        if (ident_char(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j]) && !(text[j] == '-' && j + 1 < text.size() && text[j + 1] == '>'))
                ++j;
            out.push_back({Tok::ident, std::string(text.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class Cursor {
public:
    explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    Token expect(Tok k, const char* what) {
        const Token& t = peek();
        if (t.kind != k) throw ParseError(std::string("expected ") + what + (t.text.empty() ? "" : ", got '" + t.text + "'"), t.line, t.col);
        return next();
    }
    bool at_end() const { return peek().kind == Tok::end; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

struct RawTerm {
    std::string name;
    std::vector<RawTerm> args;
    bool applied = false;
    std::size_t line, col;
};

inline RawTerm read_raw(Cursor& cur) {
    Token id = cur.expect(Tok::ident, "identifier");
    RawTerm t{id.text, {}, false, id.line, id.col};
    if (cur.peek().kind == Tok::lparen) {
        cur.next();
        t.applied = true;
        if (cur.peek().kind == Tok::rparen) {
            cur.next();
            return t;
        }
        t.args.push_back(read_raw(cur));
        while (cur.peek().kind == Tok::comma) {
            cur.next();
            t.args.push_back(read_raw(cur));
        }
        cur.expect(Tok::rparen, "')'");
    }
    return t;
}

class TermBuilder {
public:
    explicit TermBuilder(std::set<std::string> vars) : vars_(std::move(vars)) {}

    Term build(const RawTerm& r) {
        if (vars_.count(r.name)) {
            if (r.applied) throw ParseError("variable " + r.name + " used as a function", r.line, r.col);
            return Term::variable(r.name);
        }
        auto [it, inserted] = arity_.try_emplace(r.name, r.args.size());
        if (!inserted && it->second != r.args.size())
            throw ParseError("arity inconsistency for " + r.name + ": " + std::to_string(it->second) + " vs " +
                                 std::to_string(r.args.size()),
                             r.line, r.col);
        std::vector<Term> args;
        for (const RawTerm& a : r.args) args.push_back(build(a));
        return Term::app(r.name, std::move(args));
    }

private:
    std::set<std::string> vars_;
    std::map<std::string, std::size_t> arity_;
};

}  // namespace detail

/// Parses `(VAR ...)(RULES l -> r ...)` text.
inline Trs parse_trs(std::string_view text) {
    detail::Cursor cur(detail::tokenize(text));
    std::set<std::string> vars;
    struct RawRule {
        detail::RawTerm lhs, rhs;
    };
    std::vector<RawRule> raw;
    while (!cur.at_end()) {
        cur.expect(detail::Tok::lparen, "'('");
        detail::Token kw = cur.expect(detail::Tok::ident, "VAR or RULES");
        if (kw.text == "VAR") {
            while (cur.peek().kind == detail::Tok::ident) vars.insert(cur.next().text);
        } else if (kw.text == "RULES") {
            while (cur.peek().kind == detail::Tok::ident) {
                detail::RawTerm l = detail::read_raw(cur);
                cur.expect(detail::Tok::arrow, "'->'");
                detail::RawTerm r = detail::read_raw(cur);
                raw.push_back({std::move(l), std::move(r)});
            }
        } else {
            throw ParseError("unknown declaration " + kw.text, kw.line, kw.col);
        }
        cur.expect(detail::Tok::rparen, "')'");
    }
    detail::TermBuilder tb(vars);
    std::vector<Rule> rules;
    for (const RawRule& rr : raw) {
        Rule rule{tb.build(rr.lhs), tb.build(rr.rhs), {}};
        if (rule.lhs.is_var()) throw ParseError("variable left-hand side " + rule.lhs.name(), rr.lhs.line, rr.lhs.col);
        auto lv = variables_of(rule.lhs);
        for (const std::string& x : variables_of(rule.rhs))
            if (!lv.count(x))
                throw ParseError("extra variable " + x + " on right-hand side", rr.rhs.line, rr.rhs.col);
        rules.push_back(std::move(rule));
    }
    return Trs::make(std::move(rules));
}

/// Parses a term against a signature: known symbols are function symbols,
/// unknown bare identifiers are variables.
inline Term parse_term(std::string_view text, const Trs& trs) {
    detail::Cursor cur(detail::tokenize(text));
    detail::RawTerm raw = detail::read_raw(cur);
    if (!cur.at_end()) {
        const auto& t = cur.peek();
        throw ParseError("trailing input '" + t.text + "'", t.line, t.col);
    }
    std::function<Term(const detail::RawTerm&)> build = [&](const detail::RawTerm& r) -> Term {
        if (!trs.has_symbol(r.name)) {
            if (r.applied) throw ParseError("unknown function symbol " + r.name, r.line, r.col);
            return Term::variable(r.name);
        }
        if (trs.arity(r.name) != r.args.size())
            throw ParseError("symbol " + r.name + " expects " + std::to_string(trs.arity(r.name)) + " arguments",
                             r.line, r.col);
        std::vector<Term> args;
        for (const auto& a : r.args) args.push_back(build(a));
        return Term::app(r.name, std::move(args));
    };
    return build(raw);
}

/// Parses a term where the given names are variables and everything else a
/// function symbol (used for tests and built-in definitions).
inline Term parse_term_vars(std::string_view text, const std::set<std::string>& vars) {
    detail::Cursor cur(detail::tokenize(text));
    detail::RawTerm raw = detail::read_raw(cur);
    if (!cur.at_end()) {
        const auto& t = cur.peek();
        throw ParseError("trailing input '" + t.text + "'", t.line, t.col);
    }
    detail::TermBuilder tb(vars);
    return tb.build(raw);
}

inline std::string render_trs(const Trs& trs) {
    std::set<std::string> vars;
    for (const Rule& r : trs.rules()) {
        collect_vars(r.lhs, vars);
        collect_vars(r.rhs, vars);
    }
    std::string out = "(VAR";
    for (const std::string& x : vars) out += " " + x;
    out += ")\n(RULES\n";
    for (const Rule& r : trs.rules()) out += "  " + r.to_string() + "\n";
    out += ")\n";
    return out;
}

// ---------------------------------------------------------------------------
// Line formats: (INTERP f n a1 .. an b), (PROJ f# i), (PREC f > g)

struct InterpEntry {
    std::string symbol;
    std::vector<long long> coeffs;
    long long constant = 0;
};

inline std::vector<InterpEntry> parse_interp_file(std::string_view text) {
    detail::Cursor cur(detail::tokenize(text));
    std::vector<InterpEntry> out;
    auto number = [&](const detail::Token& t) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(t.text, &used);
            if (used != t.text.size() || v < 0) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ParseError("expected natural number, got '" + t.text + "'", t.line, t.col);
        }
    };
    while (!cur.at_end()) {
        cur.expect(detail::Tok::lparen, "'('");
        detail::Token kw = cur.expect(detail::Tok::ident, "INTERP");
        if (kw.text != "INTERP") throw ParseError("expected INTERP", kw.line, kw.col);
        InterpEntry e;
        e.symbol = cur.expect(detail::Tok::ident, "symbol").text;
        long long n = number(cur.expect(detail::Tok::ident, "arity"));
        for (long long k = 0; k < n; ++k) e.coeffs.push_back(number(cur.expect(detail::Tok::ident, "coefficient")));
        e.constant = number(cur.expect(detail::Tok::ident, "constant"));
        cur.expect(detail::Tok::rparen, "')'");
        out.push_back(std::move(e));
    }
    return out;
}

inline std::map<std::string, std::size_t> parse_projection_file(std::string_view text) {
    detail::Cursor cur(detail::tokenize(text));
    std::map<std::string, std::size_t> out;
    while (!cur.at_end()) {
        cur.expect(detail::Tok::lparen, "'('");
        detail::Token kw = cur.expect(detail::Tok::ident, "PROJ");
        if (kw.text != "PROJ") throw ParseError("expected PROJ", kw.line, kw.col);
        std::string f = cur.expect(detail::Tok::ident, "symbol").text;
        detail::Token it = cur.expect(detail::Tok::ident, "index");
        std::size_t i = 0;
        try {
            i = std::stoul(it.text);
        } catch (const std::exception&) {
            throw ParseError("expected index", it.line, it.col);
        }
        out[f] = i;
        cur.expect(detail::Tok::rparen, "')'");
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> parse_precedence_file(std::string_view text) {
    detail::Cursor cur(detail::tokenize(text));
    std::vector<std::pair<std::string, std::string>> out;
    while (!cur.at_end()) {
        cur.expect(detail::Tok::lparen, "'('");
        detail::Token kw = cur.expect(detail::Tok::ident, "PREC");
        if (kw.text != "PREC") throw ParseError("expected PREC", kw.line, kw.col);
        std::string f = cur.expect(detail::Tok::ident, "symbol").text;
        cur.expect(detail::Tok::greater, "'>'");
        std::string g = cur.expect(detail::Tok::ident, "symbol").text;
        cur.expect(detail::Tok::rparen, "')'");
        out.emplace_back(f, g);
    }
    return out;
}

}  // namespace dpframe
