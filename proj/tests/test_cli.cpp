#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dpframe/cli.hpp"

using namespace dpframe;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    auto p = std::filesystem::temp_directory_path() / ("dpframe_cli_" + std::to_string(::getpid()) + "_" + name);
    std::ofstream(p) << content;
    return p;
}

// Runs the installed binary; returns (exit code, stdout).
std::pair<int, std::string> run_binary(const std::string& args) {
    std::string cmd = std::string(DPFRAME_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, ProveAckermann) {
    Result r = run({"prove", "builtin:rsack"});
    EXPECT_EQ(r.code, 0) << r.err;
    std::size_t subterm = 0;
    for (std::size_t p = r.out.find("| subterm |"); p != std::string::npos; p = r.out.find("| subterm |", p + 1)) ++subterm;
    EXPECT_EQ(subterm, 2u);
    EXPECT_NE(r.out.find("YES"), std::string::npos);
}

TEST(Cli, VerifyLemmasSup) {
    Result r = run({"verify-lemmas", "builtin:rsup", "--max-size", "6"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("violations 0, indeterminate 0"), std::string::npos);
}

TEST(Cli, DcAndDheight) {
    Result r = run({"dc", "builtin:rsack", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "2\n");
    Result h = run({"dheight", "builtin:rsack", "Ack(s(0),0)"});
    EXPECT_EQ(h.out, "2\n");
}

TEST(Cli, DpsGraphTreeNorm) {
    EXPECT_EQ(run({"dps", "builtin:rsup"}).out.substr(0, 20), "1: d#(s(x)) -> d#(x)");
    EXPECT_NE(run({"graph", "builtin:rsup"}).out.find("scc 1 rank 5 {5} nontrivial"), std::string::npos);
    Result t = run({"tree", "builtin:rsup"});
    EXPECT_NE(t.out.find("51 | (∅, R) | leaf |"), std::string::npos);
    Result n = run({"norm", "builtin:rsup", "sup(s(0),e(0,s(0)))"});
    EXPECT_NE(n.out.find("norm (5, 1, 0)"), std::string::npos);
}

TEST(Cli, GenRsimRoundTripsAndLpoChecks) {
    auto prec = std::filesystem::temp_directory_path() / ("dpframe_cli_prec_" + std::to_string(::getpid()));
    Result g = run({"gen-rsim", "builtin:rsup", "--prec-out", prec.string()});
    ASSERT_EQ(g.code, 0) << g.err;
    Trs rsim = parse_trs(g.out);
    EXPECT_EQ(rsim.rules().size(), 29u + 5u);
    auto file = temp_file("rsim.trs", g.out);
    Result l = run({"lpo-check", file.string(), prec.string()});
    EXPECT_EQ(l.code, 0);
    EXPECT_NE(l.out.find("\ncompatible\n"), std::string::npos);
    Result bad = run({"lpo-check", "builtin:rsack", prec.string()});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("not compatible"), std::string::npos);
    std::filesystem::remove(prec);
    std::filesystem::remove(file);
}

TEST(Cli, SimulateIsDeterministic) {
    Result a = run({"--seed", "3", "simulate", "builtin:rsup"});
    Result b = run({"--seed", "3", "simulate", "builtin:rsup"});
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find(", valid\n"), std::string::npos);
    Result t = run({"simulate", "builtin:rsup", "e(s(0),d(0))"});
    EXPECT_NE(t.out.find("R steps 3"), std::string::npos);
    Result low = run({"--g-poly", "0", "simulate", "builtin:rsup", "d(0)"});
    EXPECT_EQ(low.code, 1);
}

TEST(Cli, FilesAndBuiltinPrinting) {
    auto trs = temp_file("ack.trs", run({"builtin", "rsack"}).out);
    Result r = run({"dps", trs.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, run({"dps", "builtin:rsack"}).out);
    EXPECT_EQ(run({"prove", trs.string()}).code, 0);
    EXPECT_EQ(run({"builtin", "rspeter", "4"}).out, render_trs(builtin("rspeter", 4).trs));
    EXPECT_EQ(run({"dps", "builtin:rspeter:3"}).code, 0);
    std::filesystem::remove(trs);
}

TEST(Cli, OutFlagWritesFile) {
    auto out = std::filesystem::temp_directory_path() / ("dpframe_cli_out_" + std::to_string(::getpid()));
    Result r = run({"--out", out.string(), "dc", "builtin:rsack", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, "1\n");
    std::filesystem::remove(out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"dps", "/nonexistent/file.trs"}).code, 2);
    EXPECT_EQ(run({"dps", "builtin:nothing"}).code, 2);
    auto bad = temp_file("bad.trs", "(VAR x)(RULES f(x -> x)");
    Result p = run({"dps", bad.string()});
    EXPECT_EQ(p.code, 2);
    EXPECT_NE(p.err.find("parse error"), std::string::npos);
    auto loop = temp_file("loop.trs", "(VAR x)(RULES f(x) -> f(x))");
    Result np = run({"prove", loop.string()});
    EXPECT_EQ(np.code, 1);
    EXPECT_NE(np.out.find("NO PROOF"), std::string::npos);
    Result nt = run({"dheight", loop.string(), "f(f(x))"});
    EXPECT_EQ(nt.code, 1);
    EXPECT_NE(nt.err.find("NONTERMINATION"), std::string::npos);
    Result fuel = run({"--fuel-nodes", "3", "dheight", "builtin:rsack", "Ack(s(s(0)),s(s(0)))"});
    EXPECT_EQ(fuel.code, 3);
    EXPECT_NE(fuel.err.find("INDETERMINATE"), std::string::npos);
    std::filesystem::remove(bad);
    std::filesystem::remove(loop);
}

TEST(CliBinary, ExitCodesAndOutput) {
    auto [code, out] = run_binary("dc builtin:rsack 4");
    EXPECT_EQ(code, 0);
    EXPECT_EQ(out, "2\n");
    EXPECT_EQ(run_binary("prove builtin:rsack").first, 0);
    EXPECT_EQ(run_binary("nonsense").first, 2);
    EXPECT_EQ(run_binary("--fuel-nodes 3 dheight builtin:rsack 'Ack(s(s(0)),s(s(0)))'").first, 3);
    EXPECT_EQ(run_binary("tree builtin:rsup").second, run_binary("tree builtin:rsup").second);
}
