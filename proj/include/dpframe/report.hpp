#pragma once

// Deterministic text rendering of analysis results.

#include <string>
#include <vector>

#include "dpframe/dp.hpp"
#include "dpframe/norm.hpp"

namespace dpframe {

inline std::string render_dps(const std::vector<DependencyPair>& dps) {
    std::string out;
    for (const auto& d : dps) out += d.to_string() + "\n";
    return out;
}

inline std::string render_pairs_brief(const std::vector<DependencyPair>& ps) {
    return ps.empty() ? "(∅, R)" : index_set_string(ps);
}

inline std::string render_graph(const DepGraph& g) {
    std::string out;
    for (std::size_t a = 0; a < g.pairs.size(); ++a) {
        out += "edges " + std::to_string(g.pairs[a].index) + " ->";
        for (std::size_t b : g.edges[a]) out += " " + std::to_string(g.pairs[b].index);
        out += "\n";
    }
    for (std::size_t c = 0; c < g.scc_count(); ++c) {
        out += "scc " + std::to_string(c + 1) + " rank " + std::to_string(g.rank[c]) + " " +
               index_set_string(g.scc_pairs(c)) + (g.trivial[c] ? " trivial" : " nontrivial") + "\n";
    }
    return out;
}

inline std::string render_processor_detail(const Processor& p) {
    if (const auto* rp = std::get_if<ReductionPairStep>(&p)) {
        std::string out;
        for (const auto& line : rp->interp.describe()) out += (out.empty() ? "" : "; ") + line;
        return out;
    }
    if (const auto* sc = std::get_if<SubtermStep>(&p)) return describe_projection(sc->projection);
    const auto& g = std::get<GraphStep>(p).graph;
    std::string out;
    for (std::size_t c = 0; c < g.scc_count(); ++c)
        out += (c ? " " : "") + index_set_string(g.scc_pairs(c)) + ":" + std::to_string(g.rank[c]);
    return out;
}

/// One node per line: `position | pairs | processor | detail`.
inline std::string render_tree(const ProofTree& tree) {
    std::string out;
    for (const auto& [pos, node] : tree.nodes()) {
        std::string proc = node->processor ? processor_name(*node->processor) : (node->trivial_scc_leaf ? "trivial" : "leaf");
        std::string detail = node->processor ? render_processor_detail(*node->processor) : "";
        out += pos.to_string() + " | " + render_pairs_brief(node->pairs) + " | " + proc + " |" + (detail.empty() ? "" : " " + detail) + "\n";
    }
    return out;
}

inline std::string render_norm(const Term& t, NormEngine& eng) {
    std::string out = "term " + t.to_string() + "\n";
    out += "path " + path_string(eng.current_path(t)) + "\n";
    out += "norm " + eng.norm(t).to_string() + "\n";
    return out;
}

inline std::string render_lemma_report(const LemmaReport& rep) {
    std::string out;
    for (const auto& l : rep.lines) out += l + "\n";
    for (const auto& f : rep.failures) out += "VIOLATION " + f + "\n";
    for (const auto& f : rep.indeterminate) out += "INDETERMINATE " + f + "\n";
    out += "terms " + std::to_string(rep.terms) + ", below-root steps " + std::to_string(rep.below_root_steps) +
           ", root steps " + std::to_string(rep.root_steps) + ", positions " + std::to_string(rep.positions_checked) +
           ", violations " + std::to_string(rep.failures.size()) + ", indeterminate " +
           std::to_string(rep.indeterminate.size()) + "\n";
    return out;
}

}  // namespace dpframe
