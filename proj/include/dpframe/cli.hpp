#pragma once

// Command-line front end: subcommands over files or built-in systems.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpframe/analysis.hpp"
#include "dpframe/corpus.hpp"
#include "dpframe/dp.hpp"
#include "dpframe/lpo.hpp"
#include "dpframe/norm.hpp"
#include "dpframe/parse.hpp"
#include "dpframe/report.hpp"
#include "dpframe/simulate.hpp"

namespace dpframe {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2, exit_indeterminate = 3 };

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A system loaded from a file or from `builtin:NAME[:K]`.
struct LoadedSystem {
    Trs trs;
    std::optional<CorpusEntry> entry;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LoadedSystem load_system(const std::string& source) {
    const std::string prefix = "builtin:";
    if (source.rfind(prefix, 0) != 0) return {parse_trs(read_file(source)), std::nullopt};
    std::string rest = source.substr(prefix.size());
    std::optional<std::size_t> k;
    if (auto colon = rest.find(':'); colon != std::string::npos) {
        try {
            k = std::stoul(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("bad parameter in " + source);
        }
        rest = rest.substr(0, colon);
    }
    CorpusEntry e = builtin(rest, k);
    Trs trs = e.trs;
    return {std::move(trs), std::move(e)};
}

inline LinearInterpretation interpretation_from(const std::vector<InterpEntry>& entries) {
    LinearInterpretation out;
    for (const auto& e : entries) out.set(e.symbol, LinearFn{e.coeffs, e.constant});
    return out;
}

inline RpFunction parse_g_poly(const std::string& text) {
    RpFunction g;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            g.coeffs.emplace_back(part);
        } catch (const std::exception&) {
            throw UsageError("bad coefficient '" + part + "' in --g-poly");
        }
        if (g.coeffs.back() < 0) throw UsageError("negative coefficient in --g-poly");
    }
    if (g.coeffs.empty()) throw UsageError("empty --g-poly");
    return g;
}

struct CliOptions {
    std::size_t fuel_nodes = Fuel{}.max_nodes;
    std::size_t fuel_depth = Fuel{}.max_depth;
    long long coeff_bound = 2;
    std::string g_poly;
    unsigned seed = 1;
    std::string out_file;

    Fuel fuel() const { return Fuel{fuel_nodes, fuel_depth}; }
};

namespace detail {

struct CliRun {
    const CliOptions& opt;
    std::string out;

    SearchConfig search_config() const {
        SearchConfig cfg;
        cfg.coeff_bound = opt.coeff_bound;
        return cfg;
    }

    ProofTree tree_for(const LoadedSystem& sys) const {
        if (sys.entry) return canonical_tree(*sys.entry);
        auto res = search_proof(sys.trs, search_config());
        if (!res.tree) throw TreeBuilderError("no proof found");
        return *res.tree;
    }

    RpFunction g_for(const ProofTree& tree) const {
        if (!opt.g_poly.empty()) return parse_g_poly(opt.g_poly);
        return RpFunction{{Nat(max_scc_count(tree)), 1}};
    }

    int dps(const LoadedSystem& sys) {
        out += render_dps(compute_dps(sys.trs));
        return exit_ok;
    }

    int graph(const LoadedSystem& sys) {
        DpProblem p{compute_dps(sys.trs), &sys.trs};
        out += render_graph(estimate_dependency_graph(p));
        return exit_ok;
    }

    int prove(const LoadedSystem& sys, const std::string& interp_file) {
        SearchConfig cfg = search_config();
        if (!interp_file.empty()) cfg.user_interpretations.push_back(interpretation_from(parse_interp_file(read_file(interp_file))));
        auto res = search_proof(sys.trs, cfg);
        if (!res.tree) {
            out += "NO PROOF\n";
            for (const auto& f : res.frontier) out += "unresolved " + render_pairs_brief(f) + "\n";
            return exit_failure;
        }
        out += render_tree(*res.tree);
        auto errors = validate_tree(*res.tree);
        for (const auto& e : errors) out += "INVALID " + e + "\n";
        out += errors.empty() ? "YES\n" : "NO\n";
        return errors.empty() ? exit_ok : exit_failure;
    }

    int tree(const LoadedSystem& sys) {
        out += render_tree(tree_for(sys));
        return exit_ok;
    }

    int norm(const LoadedSystem& sys, const std::string& term) {
        ProofTree t = tree_for(sys);
        NormEngine eng(t, opt.fuel());
        out += render_norm(parse_term(term, sys.trs), eng);
        return exit_ok;
    }

    int verify_lemmas(const LoadedSystem& sys, std::size_t max_size) {
        ProofTree t = tree_for(sys);
        LemmaReport rep = dpframe::verify_lemmas(t, max_size, opt.fuel());
        out += render_lemma_report(rep);
        if (!rep.failures.empty()) return exit_failure;
        return rep.indeterminate.empty() ? exit_ok : exit_indeterminate;
    }

    int gen_rsim(const LoadedSystem& sys, const std::string& prec_out) {
        ProofTree t = tree_for(sys);
        SimSystem rsim = generate_rsim(sys.trs, t, g_for(t));
        out += render_trs(rsim.as_trs());
        if (!prec_out.empty()) {
            std::ofstream p(prec_out);
            if (!p) throw UsageError("cannot write " + prec_out);
            Precedence prec = rsim_precedence(rsim);
            for (const auto& [a, b] : prec.pairs()) p << "(PREC " << a << " > " << b << ")\n";
        }
        return exit_ok;
    }

    int simulate(const LoadedSystem& sys, const std::string& term) {
        ProofTree t = tree_for(sys);
        RpFunction g = g_for(t);
        if (g(0) < max_scc_count(t)) {
            out += "g = " + g.to_string() + " is below the SCC count " + std::to_string(max_scc_count(t)) + "\n";
            return exit_failure;
        }
        SimSystem rsim = generate_rsim(sys.trs, t, g);
        NormEngine eng(t, opt.fuel());
        Simulator sim(rsim, eng);
        Term start = term.empty() ? sample_term(sys.trs) : parse_term(term, sys.trs);
        auto path = longest_derivation(start, sys.trs.rules(), opt.fuel());
        SimDerivation der = sim.simulate_start(start);
        der.append(sim.simulate_derivation(path));
        out += der.to_string();
        auto problems = validate_derivation(rsim, der);
        for (const auto& p : problems) out += "INVALID " + p + "\n";
        out += "R steps " + std::to_string(path.size() - 1) + ", simulating steps " + std::to_string(der.length()) +
               (problems.empty() ? ", valid\n" : ", invalid\n");
        return problems.empty() ? exit_ok : exit_failure;
    }

    Term sample_term(const Trs& trs) const {
        std::mt19937 rng(opt.seed);
        auto terms = TermEnumerator(trs.symbols(), 5).up_to(5);
        if (terms.empty()) throw UsageError("signature has no ground terms");
        return terms[rng() % terms.size()];
    }

    int lpo_check(const LoadedSystem& sys, const std::string& prec_file) {
        Precedence prec;
        for (const auto& [a, b] : parse_precedence_file(read_file(prec_file))) prec.add(a, b);
        CompatReport rep = check_compatible(sys.trs, prec);
        out += rep.to_string();
        return rep.ok() ? exit_ok : exit_failure;
    }

    int dheight(const LoadedSystem& sys, const std::string& term) {
        out += dpframe::dheight(parse_term(term, sys.trs), sys.trs.rules(), opt.fuel()).str() + "\n";
        return exit_ok;
    }

    int dc(const LoadedSystem& sys, std::size_t n) {
        out += dpframe::dc(sys.trs, n, opt.fuel()).str() + "\n";
        return exit_ok;
    }

    int show_builtin(const std::string& name, std::optional<std::size_t> k) {
        out += render_trs(builtin(name, k).trs);
        return exit_ok;
    }
};

}  // namespace detail

/// Runs the command line; writes reports to `out` (or --out) and diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dependency pair proofs, norms and simulating systems", "dpframe"};
    app.require_subcommand(1);
    app.fallthrough();
    CliOptions opt;
    app.add_option("--fuel-nodes", opt.fuel_nodes, "Node budget for reachability searches");
    app.add_option("--fuel-depth", opt.fuel_depth, "Depth budget for reachability searches");
    app.add_option("--coeff-bound", opt.coeff_bound, "Largest coefficient tried by interpretation search");
    app.add_option("--g-poly", opt.g_poly, "Coefficients c0,c1,... of the reduction pair function g");
    app.add_option("--seed", opt.seed, "Seed for sampled terms");
    app.add_option("--out", opt.out_file, "Write the report to FILE");

    std::string file, term, extra, interp_file, prec_out, name;
    std::size_t max_size = 6, n = 0;
    std::optional<std::size_t> k;
    std::function<int(detail::CliRun&, const LoadedSystem&)> action;

    auto with_file = [&](const std::string& cmd, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(cmd, desc);
        sub->add_option("FILE", file, "TRS file or builtin:NAME[:K]")->required();
        return sub;
    };
    with_file("dps", "List dependency pairs")->callback([&] { action = [](auto& r, auto& s) { return r.dps(s); }; });
    with_file("graph", "Estimated dependency graph with SCCs and ranks")->callback([&] {
        action = [](auto& r, auto& s) { return r.graph(s); };
    });
    auto* prove = with_file("prove", "Search and validate a termination proof");
    prove->add_option("--interp", interp_file, "Interpretation file tried first");
    prove->callback([&] { action = [&](auto& r, auto& s) { return r.prove(s, interp_file); }; });
    with_file("tree", "Known proof tree")->callback([&] { action = [](auto& r, auto& s) { return r.tree(s); }; });
    auto* norm = with_file("norm", "Current path and norm of a ground term");
    norm->add_option("TERM", term)->required();
    norm->callback([&] { action = [&](auto& r, auto& s) { return r.norm(s, term); }; });
    auto* lemmas = with_file("verify-lemmas", "Check the decrease lemmas on all small ground terms");
    lemmas->add_option("--max-size", max_size, "Largest term size")->capture_default_str();
    lemmas->callback([&] { action = [&](auto& r, auto& s) { return r.verify_lemmas(s, max_size); }; });
    auto* gen = with_file("gen-rsim", "Emit the simulating system");
    gen->add_option("--prec-out", prec_out, "Also write its precedence to FILE");
    gen->callback([&] { action = [&](auto& r, auto& s) { return r.gen_rsim(s, prec_out); }; });
    auto* simulate = with_file("simulate", "Replay a longest derivation in the simulating system");
    simulate->add_option("TERM", term, "Start term (sampled with --seed when absent)");
    simulate->callback([&] { action = [&](auto& r, auto& s) { return r.simulate(s, term); }; });
    auto* lpo = with_file("lpo-check", "Check LPO compatibility for a precedence file");
    lpo->add_option("PRECFILE", extra)->required();
    lpo->callback([&] { action = [&](auto& r, auto& s) { return r.lpo_check(s, extra); }; });
    auto* dh = with_file("dheight", "Derivation height of a term");
    dh->add_option("TERM", term)->required();
    dh->callback([&] { action = [&](auto& r, auto& s) { return r.dheight(s, term); }; });
    auto* dcc = with_file("dc", "Derivational complexity for size N");
    dcc->add_option("N", n)->required();
    dcc->callback([&] { action = [&](auto& r, auto& s) { return r.dc(s, n); }; });
    auto* bi = app.add_subcommand("builtin", "Print a built-in system");
    bi->add_option("NAME", name)->required();
    bi->add_option("K", k);
    bi->callback([&] {
        file.clear();
        action = [&](auto& r, auto&) { return r.show_builtin(name, k); };
    });

    std::vector<const char*> argv{"dpframe"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    detail::CliRun run{opt, {}};
    int code = exit_ok;
    try {
        LoadedSystem sys = file.empty() ? LoadedSystem{} : load_system(file);
        code = action(run, sys);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_usage;
    } catch (const TrsError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_usage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const UnknownBuiltin& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const PrecedenceError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Indeterminate& e) {
        out << run.out;
        err << "INDETERMINATE: " << e.what() << "\n";
        return exit_indeterminate;
    } catch (const NonTermination& e) {
        err << "NONTERMINATION: " << e.what() << "\n";
        return exit_failure;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return exit_failure;
    }

    if (opt.out_file.empty()) {
        out << run.out;
    } else {
        std::ofstream f(opt.out_file);
        if (!f) {
            err << "usage error: cannot write " << opt.out_file << "\n";
            return exit_usage;
        }
        f << run.out;
    }
    return code;
}

}  // namespace dpframe
