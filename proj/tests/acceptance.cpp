// Acceptance suite: runs the project's correctness gates end to end and
// prints one pass/fail line per criterion.  Usage: acceptance [k] runs
// criterion k only (1..10); no argument runs everything.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "extcharts/brown_gitler.hpp"
#include "extcharts/chart.hpp"
#include "extcharts/cli.hpp"
#include "extcharts/cobar.hpp"
#include "extcharts/derived.hpp"
#include "extcharts/tmf.hpp"
#include "extcharts/vanishing.hpp"

using namespace extcharts;
using namespace extcharts::alg;
using namespace extcharts::mod;
using namespace extcharts::res;

namespace {

int failures = 0;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, const std::string& what, bool pass, const Stopwatch& sw,
            const std::string& detail = "")
{
    std::printf("criterion %2d [%s]: %s (%.1fs)%s\n", criterion, what.c_str(),
                pass ? "PASS" : "FAIL", sw.seconds(),
                detail.empty() ? "" : ("  " + detail).c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

XiMonomial xi(std::initializer_list<uint32_t> e)
{
    return XiMonomial(Expo(e));
}

std::optional<int> min_gen_degree(const FreeChainComplex& c, int stage)
{
    if (stage >= c.stages() || c.gen_degrees[stage].empty())
        return std::nullopt; /* no generators in the window: min degree above t_limit */
    return *std::min_element(c.gen_degrees[stage].begin(), c.gen_degrees[stage].end());
}

std::optional<int> min_gen_stem(const FreeChainComplex& c, int stage)
{
    auto d = min_gen_degree(c, stage);
    if (!d.has_value())
        return std::nullopt;
    int best = 1 << 30;
    for (int t : c.gen_degrees[stage])
        best = std::min(best, t - stage);
    return best;
}

// ---------------------------------------------------------------------------
// criterion 1: the six-term coaction of xi1^4 xi2^2 in (A//A(1))_*.

void criterion_1()
{
    Stopwatch sw;
    TensorSum expected = {
        {xi({4, 2}), xi({})},  {xi({4}), xi({0, 2})}, {xi({0, 2}), xi({4})},
        {xi({}), xi({4, 2})},  {xi({6}), xi({4})},    {xi({2}), xi({8})},
    };
    sort_reduce_mod2(expected);
    bool pass = expected.size() == 6 && coproduct_monomial(xi({4, 2}), 1) == expected;
    report(1, "coaction fidelity", pass, sw);
}

// ---------------------------------------------------------------------------
// criterion 2: algebra sanity.

void criterion_2()
{
    Stopwatch sw;
    auto a1 = AlgebraSlice::finite(1);
    auto a2 = AlgebraSlice::finite(2);
    auto a_full = AlgebraSlice::truncated(40);
    bool pass = a1->total_dimension() == 8 && a2->total_dimension() == 64;

    auto assoc = [&](const AlgebraSlice& s, const MilnorElement& a, const MilnorElement& b,
                     const MilnorElement& c) {
        MilnorSum left, right;
        for (const auto& m : s.multiply(a, b))
            left = add_mod2(left, s.multiply(m, c));
        for (const auto& m : s.multiply(b, c))
            right = add_mod2(right, s.multiply(a, m));
        return left == right;
    };

    // exhaustive over A(1)
    std::vector<MilnorElement> all1;
    for (int d = 0; d <= a1->t_max(); ++d)
        for (const auto& m : a1->basis(d))
            all1.push_back(m);
    for (const auto& a : all1)
        for (const auto& b : all1)
            for (const auto& c : all1) {
                if (a.degree() + b.degree() + c.degree() > a1->t_max())
                    continue;
                if (!assoc(*a1, a, b, c))
                    pass = false;
            }

    // 10^4 random triples over A(2) and over the truncated full algebra
    std::mt19937_64 rng(20260811);
    auto random_triples = [&](const AlgebraSlice& s, int trials) {
        int done = 0;
        while (done < trials) {
            int cap = s.t_max();
            int d1 = (int)(rng() % (uint64_t)(cap / 3 + 1));
            int d2 = (int)(rng() % (uint64_t)(cap / 3 + 1));
            int d3 = (int)(rng() % (uint64_t)(cap / 3 + 1));
            if (d1 + d2 + d3 > cap)
                continue;
            const auto &b1 = s.basis(d1), &b2 = s.basis(d2), &b3 = s.basis(d3);
            if (b1.empty() || b2.empty() || b3.empty())
                continue;
            const MilnorElement& a = b1[rng() % b1.size()];
            const MilnorElement& b = b2[rng() % b2.size()];
            const MilnorElement& c = b3[rng() % b3.size()];
            if (!assoc(s, a, b, c))
                return false;
            ++done;
        }
        return true;
    };
    pass = pass && random_triples(*a2, 10000) && random_triples(*a_full, 10000);
    report(2, "algebra sanity", pass, sw);
}

// ---------------------------------------------------------------------------
// criterion 3: oracle equivalence, t <= 14 over A(1) and A(2).

void criterion_3()
{
    Stopwatch sw;
    bool pass = true;
    std::string detail;
    for (int level : {1, 2}) {
        SlicePtr slice = AlgebraSlice::finite(level);
        std::map<std::string, GradedModule> modules;
        modules.emplace("F2", builtin_module("F2", slice));
        modules.emplace("H1", builtin_module("H1", slice));
        modules.emplace("N11", dual_module_of_comodule(bg::n_comodule(1, 1).pres, slice));
        modules.emplace("M21", builtin_module("M21", slice));
        for (const auto& [name, m] : modules) {
            int t_res = std::max(14, m.top_degree()); /* window must present the module */
            FreeChainComplex c = minimal_resolution(m, 14, t_res);
            ExtTable resolved = ext_dims(c);
            ExtTable oracle = cobar_ext_oracle(comodule_of_module(m), level, 14, 14);
            for (int s = 0; s <= 14; ++s)
                for (int t = 0; t <= 14; ++t)
                    if (resolved.dim(s, t) != oracle.dim(s, t)) {
                        pass = false;
                        if (detail.empty())
                            detail = name + " over A(" + std::to_string(level) + ") at (" +
                                     std::to_string(s) + "," + std::to_string(t) + ")";
                    }
        }
    }
    report(3, "oracle equivalence", pass, sw, detail);
}

// ---------------------------------------------------------------------------
// criterion 4: deep Ext facts over the full algebra.

void criterion_4a()
{
    Stopwatch sw;
    auto slice = AlgebraSlice::truncated(14);
    GradedModule h1 = builtin_module("H1", slice);
    ExtBetween eb = ext_between(h1, h1, 5, 13);
    report(4, "unique v1^4 at Ext^{4,12}_A(H(1),H(1))", eb.table.dim(4, 12) == 1, sw,
           "dim = " + std::to_string(eb.table.dim(4, 12)));
}

void criterion_4b()
{
    Stopwatch sw;
    auto slice = AlgebraSlice::truncated(45);
    GradedModule f2m = builtin_module("F2", slice);
    FreeChainComplex c = resolve_with_cache(f2m, 7, 45);
    auto h0 = h_class(c, 0), h3 = h_class(c, 3), h5 = h_class(c, 5);
    bool pass = h0.has_value() && h3.has_value() && h5.has_value();
    std::string detail;
    if (pass) {
        ExtClass p = yoneda_product(*h3, *h5, c, c);
        for (int k = 0; k < 3; ++k)
            p = yoneda_product(*h0, p, c, c);
        pass = !p.is_zero() && p.s == 5 && p.t == 43;
        detail = "h0^3h3h5 " + std::string(p.is_zero() ? "= 0" : "!= 0");
        if (pass) {
            ExtClass killed = yoneda_product(*h0, p, c, c);
            pass = killed.is_zero();
            detail += killed.is_zero() ? ", h0-annihilated" : ", NOT h0-annihilated";
        }
    }
    report(4, "h0^3h3h5 in Ext^{5,43}_A(F2)", pass, sw, detail);
}

void criterion_4c()
{
    Stopwatch sw;
    auto slice = AlgebraSlice::truncated(58);
    GradedModule h1 = builtin_module("H1", slice);
    GradedModule f2m = builtin_module("F2", slice);
    FreeChainComplex res_h1 = resolve_with_cache(h1, 10, 58);
    res_h1.require_minimal();
    res_h1.require_differential_squares_to_zero();
    FreeChainComplex res_f2 = minimal_resolution(f2m, 2, 20);
    Facts43Report rep = prop43_facts(res_h1, res_f2);
    std::string detail = "dims: Ext^{9,56}=" + std::to_string(rep.dim_9_56) + " Ext^{5,44}=" +
                         std::to_string(rep.dim_5_44) + " Ext^{8,56}=" +
                         std::to_string(rep.dim_8_56) + " Ext^{9,57}=" +
                         std::to_string(rep.dim_9_57);
    report(4, "deep lifting facts (stretch gate)", rep.pass(), sw, detail);
}

// ---------------------------------------------------------------------------
// criterion 5: Brown-Gitler structure.

void criterion_5()
{
    Stopwatch sw;
    bool pass = bg::verify_splitting(2, 32).pass && bg::verify_splitting(1, 32).pass;

    bg::BGComodule m21 = bg::m_comodule(2, 1);
    bg::BGComodule n11 = bg::n_comodule(1, 1);
    bg::ComoduleMap f = bg::phi(2, m21, n11);
    try {
        f.require_comodule_map(2);
    }
    catch (const ComputeError&) {
        pass = false;
    }
    pass = pass && f.is_iso();
    for (uint32_t v = 0; v < m21.dim(); ++v)
        if (m21.basis[v].degree() != 8 + n11.basis[f.map[v][0]].degree())
            pass = false;

    pass = pass && n11.dim() == 4 && n11.contains(xi({})) && n11.contains(xi({4})) &&
           n11.contains(xi({0, 2})) && n11.contains(xi({0, 0, 1}));
    std::multiset<int> degs;
    for (const auto& m : n11.basis)
        degs.insert(m.degree());
    pass = pass && degs == std::multiset<int>{0, 4, 6, 7};
    report(5, "Brown-Gitler structure", pass, sw);
}

// ---------------------------------------------------------------------------
// criterion 6: the inductive exact sequences, j in {1, 2}.

void criterion_6()
{
    Stopwatch sw;
    bool pass = true;
    std::string detail;
    for (int j : {1, 2}) {
        bg::SequenceCertificate odd = bg::odd_sequence(j);
        bg::SequenceCertificate even = bg::even_sequence(j);
        if (!odd.pass || !even.pass) {
            pass = false;
            detail = (odd.pass ? even.failures : odd.failures).front();
        }
        if (j == 1) {
            pass = pass && odd.object_dims == std::vector<size_t>{16, 24, 8};
            pass = pass && even.object_dims == std::vector<size_t>{4, 11, 8, 1};
        }
    }
    report(6, "inductive exact sequences", pass, sw, detail);
}

// ---------------------------------------------------------------------------
// criterion 7: cone correctness.

void criterion_7a()
{
    Stopwatch sw;
    auto slice = AlgebraSlice::truncated(44);
    DerivedObject cone_h0{builtin_module("F2", slice), ConeSpec{1, 1}, 0, 0};
    ExtComputation comp = ext_of_object(cone_h0, nullptr, 8, 30);
    GradedModule h1 = builtin_module("H1", slice);
    FreeChainComplex direct = resolve_with_cache(h1, 8, 30);
    ExtTable want = ext_dims(direct);
    bool pass = true;
    for (int s = 0; s <= 8; ++s)
        for (int t = 0; t <= 30; ++t)
            if (comp.table.dim(s, t) != want.dim(s, t))
                pass = false;
    ConeLesReport les = verify_cone_les(comp);
    report(7, "Ext(cone h0) = Ext_A(H(1)) on s<=8, t<=30", pass && les.pass, sw);
}

void criterion_7b()
{
    Stopwatch sw;
    // Ext_{A(1)}(H(1,4)): finite; vanishes for s > ((t-s)+17)/7, exhaustively
    // over t <= 80 via the minimal-degree growth of the underlying
    // resolution.
    auto a1 = AlgebraSlice::finite(1);
    DerivedObject h14{builtin_module("H1", a1), ConeSpec{4, 12}, 0, 0};
    int s_cone = 28;
    ExtComputation comp = ext_of_object(h14, nullptr, s_cone, 92);
    bool pass = true;
    std::string detail;

    // every computed entry obeys the line
    int total = 0;
    for (const auto& [st, d] : comp.table.dims) {
        if (st.second <= 92) {
            total += d;
            if (7 * st.first > (st.second - st.first) + 17)
                pass = false;
        }
    }
    // finiteness + exhaustiveness: beyond the computed stages both long
    // exact sequence contributions vanish for t <= 80
    auto m1 = min_gen_degree(comp.base_resolution, s_cone + 1);
    auto m2 = min_gen_degree(comp.base_resolution, std::max(0, s_cone - 2));
    if (m1.has_value() && *m1 <= 80)
        pass = false;
    if (m2.has_value() && *m2 <= 68)
        pass = false;
    // all Ext classes of the cone sit in finitely many spots: report count
    detail = "total dim " + std::to_string(total);
    report(7, "Ext_{A(1)}(H(1,4)) finite below the 1/7 line (t<=80)", pass, sw, detail);
}

// ---------------------------------------------------------------------------
// criterion 8: vanishing recurrences and audits on stems <= 40.

struct EntryAudit {
    ExtTable table;       /* [-n]-shifted entry table */
    bool exhaustive = false;
    int s_used = 0;
};

// Ext_{A(2)}(W (x) H(1,4)) with the [-n] shift, computed on a window wide
// enough that the audit over stems <= cap is exhaustive: beyond the last
// computed stage, both LES contributions vanish by minimal-stem growth.
EntryAudit h14_entry_for_audit(const GradedModule* w, int n_shift, int stem_cap)
{
    auto a2 = AlgebraSlice::finite(2);
    DerivedObject h14{builtin_module("H1", a2), ConeSpec{4, 12}, 0, 0};
    int unshifted_cap = stem_cap + n_shift;
    for (int s_cone = 10; s_cone <= 26; s_cone += 4) {
        ExtComputation comp = ext_of_object(h14, w, s_cone, s_cone + unshifted_cap + 1);
        auto st1 = min_gen_stem(comp.base_resolution, s_cone + 1);
        auto st2 = min_gen_stem(comp.base_resolution, std::max(0, s_cone - 2));
        bool ok1 = !st1.has_value() || *st1 > unshifted_cap;
        bool ok2 = !st2.has_value() || *st2 > unshifted_cap - 9;
        if (ok1 && ok2) {
            EntryAudit out;
            out.table = shift_table(comp.table, 0, -n_shift);
            out.exhaustive = true;
            out.s_used = s_cone;
            return out;
        }
    }
    EntryAudit out;
    out.exhaustive = false;
    return out;
}

void criterion_8()
{
    Stopwatch sw;
    bool pass = true;
    std::string detail;

    // recurrences: exact integers for j <= 64, anchored at (21, 9)
    if (van::profile(0).a != 21 || van::profile(0).b != 9)
        pass = false;
    for (int j = 1; j <= 31; ++j) {
        if (van::profile(2 * j + 1).a != van::profile(j).a - 8 * j)
            pass = false;
        if (van::profile(2 * j + 1).b != van::profile(j).b - 8 * j)
            pass = false;
    }

    auto a2 = AlgebraSlice::finite(2);
    auto check = [&](const char* name, const EntryAudit& entry,
                     const std::function<van::AuditReport(const ExtTable&)>& auditor) {
        if (!entry.exhaustive) {
            pass = false;
            detail = std::string(name) + ": window not exhaustive";
            return;
        }
        ExtTable in_window;
        for (const auto& [st, d] : entry.table.dims)
            if (st.second - st.first <= 40)
                in_window.set(st.first, st.second, d);
        van::AuditReport rep = auditor(in_window);
        if (!rep.pass) {
            pass = false;
            if (detail.empty())
                detail = rep.text();
        }
    };

    // 7.3 j = 0: Ext_{A(2)}(H(1,4))
    check("7.3 j=0", h14_entry_for_audit(nullptr, 0, 40),
          [](const ExtTable& t) { return van::audit_73(t, 0); });
    // 7.3 j = 1: Ext_{A(2)}(N_1(1) (x) H(1,4))
    GradedModule n11 = dual_module_of_comodule(bg::n_comodule(1, 1).pres, a2);
    check("7.3 j=1", h14_entry_for_audit(&n11, 0, 40),
          [](const ExtTable& t) { return van::audit_73(t, 1); });
    // 7.4 tuple (2): Ext_{A(2)}(M_2(2)[-1] (x) H(1,4))
    GradedModule m22 = dual_module_of_comodule(bg::m_comodule(2, 2).pres, a2);
    check("7.4 (2)", h14_entry_for_audit(&m22, 1, 40),
          [](const ExtTable& t) { return van::audit_74(t); });
    // 7.5 tuple (1,1,1): Ext_{A(2)}(M_2(1)^{(x)3}[-3] (x) H(1,4))
    GradedModule m21 = builtin_module("M21", a2);
    GradedModule m21_cubed = tensor(tensor(m21, m21), m21);
    check("7.5 (1,1,1)", h14_entry_for_audit(&m21_cubed, 3, 40),
          [](const ExtTable& t) { return van::audit_75(t); });

    report(8, "vanishing recurrences and audits", pass, sw, detail);
}

// ---------------------------------------------------------------------------
// criterion 9: change of rings, t <= 20.

void criterion_9()
{
    Stopwatch sw;
    ComodulePresentation f2c;
    f2c.labels = {"1"};
    f2c.degrees = {0};
    f2c.monomials = {XiMonomial()};
    f2c.coaction = {{CoactionTerm{XiMonomial(), 0}}};
    tmf::ChangeOfRingsReport r1 = tmf::change_of_rings_check(f2c, "F2", 20);
    tmf::ChangeOfRingsReport r2 = tmf::change_of_rings_check(bg::n_comodule(1, 1).pres, "N11", 20);
    std::string detail;
    if (!r1.pass)
        detail = r1.failures.front();
    else if (!r2.pass)
        detail = r2.failures.front();
    report(9, "change of rings", r1.pass && r2.pass, sw, detail);
}

// ---------------------------------------------------------------------------
// criterion 10: determinism and formats.

void criterion_10()
{
    Stopwatch sw;
    namespace fs = std::filesystem;
    fs::path tmp = fs::temp_directory_path() / "extcharts_acceptance";
    fs::create_directories(tmp);
    auto file = [&](const char* name) { return (tmp / name).string(); };
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    bool pass = true;

    using cli::run_cli;
    // every CLI pipeline twice, byte-compare
    for (const char* suffix : {"1", "2"}) {
        std::string tag(suffix);
        pass = pass && run_cli({"ext", "--algebra", "A2", "--module", "F2", "--smax", "8",
                                "--tmax", "24", "--out", file(("ext" + tag + ".tsv").c_str()),
                                "--products-out", file(("prod" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"chart", "--table", file(("ext" + tag + ".tsv").c_str()),
                                "--products", file(("prod" + tag + ".tsv").c_str()), "--format",
                                "svg", "--out", file(("chart" + tag + ".svg").c_str())}) == 0;
        pass = pass && run_cli({"chart", "--table", file(("ext" + tag + ".tsv").c_str()),
                                "--format", "ascii", "--out",
                                file(("chart" + tag + ".txt").c_str())}) == 0;
        pass = pass && run_cli({"bg", "dump", "--i", "2", "--dmax", "24", "--out",
                                file(("bg" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"oracle", "--algebra", "A1", "--module", "H1", "--smax", "8",
                                "--tmax", "12", "--out", file(("orc" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"tmf-e1", "--x", "F2", "--nmax", "1", "--smax", "5", "--tmax",
                                "16", "--out", file(("e1" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"cone", "--class", "v1^4", "--on", "H1", "--algebra", "A1",
                                "--smax", "10", "--tmax", "40", "--out",
                                file(("cone" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"vanish", "--lemma", "7.3", "--j", "0", "--table",
                                file(("cone" + tag + ".tsv").c_str()), "--out",
                                file(("van" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"ext-between", "--algebra", "A1", "--module", "H1", "--target",
                                "H1", "--smax", "5", "--tmax", "13", "--out",
                                file(("eb" + tag + ".tsv").c_str())}) == 0;
        pass = pass && run_cli({"product", "--algebra", "A", "--smax", "4", "--tmax", "10",
                                "--classes", "h1,h1,h1", "--out",
                                file(("pr" + tag + ".tsv").c_str())}) == 0;
    }
    for (const char* base : {"ext", "prod", "chart", "bg", "orc", "e1", "cone", "van", "eb", "pr"}) {
        std::string ext_name = std::string(base) == "chart" ? ".svg" : ".tsv";
        std::string a = slurp(file((std::string(base) + "1" + ext_name).c_str()));
        std::string b = slurp(file((std::string(base) + "2" + ext_name).c_str()));
        if (a.empty() || a != b)
            pass = false;
    }
    pass = pass && slurp(file("chart1.txt")) == slurp(file("chart2.txt"));

    // TSV round trip at the chart level
    ExtTable t = ExtTable::from_tsv(slurp(file("ext1.tsv")));
    chart::ChartSpec spec = chart::chart_from_ext(t);
    chart::ChartSpec back = chart::parse_tsv(chart::emit_tsv(spec));
    pass = pass && back.dots == spec.dots;
    // and at the table level
    pass = pass && ExtTable::from_tsv(t.to_tsv()) == t;

    fs::remove_all(tmp);
    report(10, "determinism and formats", pass, sw);
}

}  // namespace

int main(int argc, char** argv)
{
    int which = argc > 1 ? std::atoi(argv[1]) : 0;
    auto want = [&](int k) { return which == 0 || which == k; };
    auto guarded = [&](int k, void (*fn)()) {
        try {
            fn();
        }
        catch (const std::exception& e) {
            std::printf("criterion %2d: FAIL (exception: %s)\n", k, e.what());
            ++failures;
        }
    };

    if (want(1))
        guarded(1, criterion_1);
    if (want(2))
        guarded(2, criterion_2);
    if (want(3))
        guarded(3, criterion_3);
    if (want(4)) {
        guarded(4, criterion_4a);
        guarded(4, criterion_4b);
        guarded(4, criterion_4c);
    }
    if (want(5))
        guarded(5, criterion_5);
    if (want(6))
        guarded(6, criterion_6);
    if (want(7)) {
        guarded(7, criterion_7a);
        guarded(7, criterion_7b);
    }
    if (want(8))
        guarded(8, criterion_8);
    if (want(9))
        guarded(9, criterion_9);
    if (want(10))
        guarded(10, criterion_10);
    return failures ? 1 : 0;
}
