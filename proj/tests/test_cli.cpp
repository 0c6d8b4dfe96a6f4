#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "extcharts/cli.hpp"

using extcharts::cli::run_cli;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("extcharts_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("cli: usage errors exit 2")
{
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"ext", "--bogus-flag"}) == 2);
    CHECK(run_cli({"frobnicate"}) == 2);
}

TEST_CASE("cli: ext writes a TSV table")
{
    TempDir tmp;
    std::string out = tmp.file("t.tsv");
    CHECK(run_cli({"ext", "--algebra", "A1", "--module", "F2", "--smax", "4", "--tmax", "8",
                   "--out", out}) == 0);
    std::string text = slurp(out);
    CHECK(text.substr(0, 10) == "s\tt\tdim\n0\t");
    CHECK(text.find("1\t1\t1") != std::string::npos);
}

TEST_CASE("cli: repeated runs are byte-identical")
{
    TempDir tmp;
    std::string a = tmp.file("a.tsv"), b = tmp.file("b.tsv");
    for (const char* out : {"a.tsv", "b.tsv"})
        REQUIRE(run_cli({"ext", "--algebra", "A2", "--module", "M21", "--smax", "5", "--tmax",
                         "16", "--out", tmp.file(out)}) == 0);
    CHECK(slurp(a) == slurp(b));

    std::string sva = tmp.file("a.svg"), svb = tmp.file("b.svg");
    REQUIRE(run_cli({"chart", "--table", a, "--format", "svg", "--out", sva}) == 0);
    REQUIRE(run_cli({"chart", "--table", b, "--format", "svg", "--out", svb}) == 0);
    CHECK(slurp(sva) == slurp(svb));
    CHECK(slurp(sva).find("<svg") != std::string::npos);
}

TEST_CASE("cli: cone and vanish compose")
{
    TempDir tmp;
    std::string t = tmp.file("h14.tsv");
    REQUIRE(run_cli({"cone", "--class", "v1^4", "--on", "H1", "--algebra", "A1", "--smax", "10",
                     "--tmax", "40", "--out", t}) == 0);
    CHECK(run_cli({"vanish", "--lemma", "7.3", "--j", "0", "--table", t, "--out",
                   tmp.file("v.txt")}) == 0);
    // a corrupted table must fail with exit 1
    std::string bad = tmp.file("bad.tsv");
    {
        std::ofstream out(bad);
        out << "s\tt\tdim\n12\t14\t1\n";
    }
    CHECK(run_cli({"vanish", "--lemma", "7.4", "--table", bad, "--out", tmp.file("v2.txt")}) == 1);
}

TEST_CASE("cli: oracle, bg, product")
{
    TempDir tmp;
    CHECK(run_cli({"oracle", "--algebra", "A1", "--module", "H1", "--smax", "6", "--tmax", "8",
                   "--out", tmp.file("o.tsv")}) == 0);
    CHECK(run_cli({"bg", "dump", "--i", "1", "--dmax", "8", "--out", tmp.file("bg.tsv")}) == 0);
    CHECK(slurp(tmp.file("bg.tsv")).find("xi1^4\t4\t4") != std::string::npos);
    CHECK(run_cli({"bg", "split", "--i", "1", "--dmax", "16"}) == 0);
    CHECK(run_cli({"bg", "seq", "--j", "1", "--out", tmp.file("seq.txt")}) == 0);
    CHECK(slurp(tmp.file("seq.txt")).find("pass") != std::string::npos);
    CHECK(run_cli({"product", "--algebra", "A", "--tmax", "10", "--smax", "5", "--classes",
                   "h1,h1,h1", "--out", tmp.file("p.txt")}) == 0);
    CHECK(slurp(tmp.file("p.txt")).find("!= 0") != std::string::npos);
}

TEST_CASE("cli: tmf-e1 single entry")
{
    TempDir tmp;
    std::string out = tmp.file("e1.tsv");
    REQUIRE(run_cli({"tmf-e1", "--x", "F2", "--entry", "1", "--smax", "5", "--tmax", "14", "--out",
                     out}) == 0);
    std::string text = slurp(out);
    CHECK(text.substr(0, 8) == "s\tt\tdim\n");
    // bottom class of M_2(1)[-1] at (s,t) = (1,8)
    CHECK(text.find("1\t8\t1") != std::string::npos);
}

TEST_CASE("cli: module file input")
{
    TempDir tmp;
    std::string mod = tmp.file("moore.mod");
    {
        std::ofstream out(mod);
        out << "# Moore module\ngen e0 0\ngen e1 1\nact Sq^1 e0 = e1\n";
    }
    std::string t1 = tmp.file("t1.tsv"), t2 = tmp.file("t2.tsv");
    REQUIRE(run_cli({"ext", "--algebra", "A1", "--module", "@" + mod, "--smax", "4", "--tmax",
                     "10", "--out", t1}) == 0);
    REQUIRE(run_cli({"ext", "--algebra", "A1", "--module", "H1", "--smax", "4", "--tmax", "10",
                     "--out", t2}) == 0);
    CHECK(slurp(t1) == slurp(t2));
}

TEST_CASE("cli: config file supplies default windows")
{
    TempDir tmp;
    std::string cfg = tmp.file("defaults.cfg");
    {
        std::ofstream out(cfg);
        out << "smax=3\ntmax=6\n";
    }
    std::string out = tmp.file("cfg.tsv");
    REQUIRE(run_cli({"--config", cfg, "ext", "--algebra", "A1", "--module", "F2", "--out", out}) ==
            0);
    std::string text = slurp(out);
    CHECK(text.find("3\t3\t1") != std::string::npos);
    CHECK(text.find("4\t4\t1") == std::string::npos); /* smax=3 honored */
}

TEST_CASE("cli: ext-between locates the unique v1^4 position")
{
    TempDir tmp;
    std::string out = tmp.file("between.tsv");
    REQUIRE(run_cli({"ext-between", "--algebra", "A", "--module", "H1", "--target", "H1",
                     "--smax", "5", "--tmax", "13", "--out", out}) == 0);
    CHECK(slurp(out).find("4\t12\t1") != std::string::npos);
}

TEST_CASE("cli: --threads does not change results")
{
    TempDir tmp;
    std::string a = tmp.file("thr1.tsv"), b = tmp.file("thr4.tsv");
    REQUIRE(run_cli({"--threads", "1", "ext", "--algebra", "A2", "--module", "N11*H1", "--smax",
                     "8", "--tmax", "24", "--out", a}) == 0);
    REQUIRE(run_cli({"--threads", "4", "ext", "--algebra", "A2", "--module", "N11*H1", "--smax",
                     "8", "--tmax", "24", "--out", b}) == 0);
    CHECK(slurp(a) == slurp(b));
    extcharts::thread_cap() = 0;
}
