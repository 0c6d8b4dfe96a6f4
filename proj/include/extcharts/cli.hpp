#pragma once

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "brown_gitler.hpp"
#include "chart.hpp"
#include "cobar.hpp"
#include "derived.hpp"
#include "tmf.hpp"
#include "vanishing.hpp"

// Command-line surface.  Subcommands: ext, ext-between, cone, product,
// oracle, bg, tmf-e1, vanish, chart, facts43.  Exit status: 0 success,
// 1 computation failure, 2 usage error.

namespace extcharts::cli {

using mod::DerivedObject;
using mod::GradedModule;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ComputeError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_output(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ComputeError("cannot write " + path);
    out << content;
}

inline alg::SlicePtr make_slice(const std::string& algebra, int degree_cap)
{
    if (algebra == "A0")
        return alg::AlgebraSlice::finite(0);
    if (algebra == "A1")
        return alg::AlgebraSlice::finite(1);
    if (algebra == "A2")
        return alg::AlgebraSlice::finite(2);
    if (algebra == "A")
        return alg::AlgebraSlice::truncated(degree_cap);
    throw ComputeError("unknown algebra '" + algebra + "' (use A0, A1, A2 or A)");
}

// module grammar: builtin names, N1(j)/M2(j) families, @file, and '*'
// tensor products, e.g. "N11*H1".
inline GradedModule resolve_module(const std::string& spec, alg::SlicePtr slice)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == '*') {
            parts.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    parts.push_back(cur);
    std::optional<GradedModule> acc;
    for (const std::string& name : parts) {
        GradedModule m;
        if (!name.empty() && name[0] == '@')
            m = mod::load_module(read_file(name.substr(1)), slice);
        else if (name.size() > 1 && name[0] == 'N' && isdigit((unsigned char)name[1]) &&
                 name.size() >= 3) {
            int i = name[1] - '0';
            int j = std::stoi(name.substr(2));
            m = mod::dual_module_of_comodule(bg::n_comodule(i, j).pres, slice);
        }
        else if (name.size() > 1 && name[0] == 'M' && isdigit((unsigned char)name[1]) &&
                 name.size() >= 3 && name != "M21") {
            int i = name[1] - '0';
            int j = std::stoi(name.substr(2));
            m = mod::dual_module_of_comodule(bg::m_comodule(i, j).pres, slice);
        }
        else
            m = mod::builtin_module(name, slice);
        acc = acc.has_value() ? mod::tensor(*acc, m) : m;
    }
    return *acc;
}

struct CommonWindow {
    int s_max = 20;
    int t_max = 40;
};

inline void add_window(CLI::App* cmd, CommonWindow& w)
{
    cmd->add_option("--smax", w.s_max, "maximal homological degree s");
    cmd->add_option("--tmax", w.t_max, "maximal internal degree t");
}

inline int run_cli(std::vector<std::string> args);

namespace detail {

struct ExtArgs {
    std::string algebra = "A2";
    std::string module = "F2";
    std::string out;
    std::string products_out;
    CommonWindow window;
};

inline int cmd_ext(const ExtArgs& a)
{
    bool is_cone = a.module == "H14" || a.module == "DH14";
    int cone_extra = a.module == "DH14" ? 25 : (a.module == "H14" ? 12 : 0);
    alg::SlicePtr slice = make_slice(a.algebra, a.window.t_max + cone_extra + 1);
    res::ExtTable table;
    res::FreeChainComplex complex;
    if (is_cone) {
        DerivedObject obj = std::get<DerivedObject>(mod::builtin(a.module, slice));
        res::ExtComputation comp = res::ext_of_object(obj, nullptr, a.window.s_max, a.window.t_max);
        table = comp.table;
        complex = std::move(comp.complex);
    }
    else {
        GradedModule m = resolve_module(a.module, slice);
        complex = res::resolve_with_cache(m, a.window.s_max, a.window.t_max);
        table = res::ext_dims(complex);
    }
    res::register_named_classes(table, *slice, a.module);
    write_output(a.out, table.to_tsv());
    if (!a.products_out.empty()) {
        GradedModule f2m = mod::builtin_module("F2", slice);
        res::FreeChainComplex res_f2 = res::minimal_resolution(f2m, 2, complex.t_limit);
        auto ledger = res::hi_products(complex, res_f2, 2);
        table.products = ledger;
        std::ostringstream ps;
        ps << "op\ts\tt\tindex\ttarget\n";
        for (const auto& e : ledger)
            for (uint32_t k : e.targets)
                ps << e.op << "\t" << e.s << "\t" << e.t << "\t" << e.index << "\t" << k << "\n";
        write_output(a.products_out, ps.str());
    }
    return 0;
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args)
{
    CLI::App app{"Ext charts over the mod-2 Steenrod algebra and its subalgebras"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "plain key=value file with default windows");
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (default: hardware)");

    detail::ExtArgs ext_args;
    CLI::App* ext = app.add_subcommand("ext", "minimal-resolution Ext table of a module");
    ext->add_option("--algebra", ext_args.algebra, "A0, A1, A2 or A (degree-truncated)");
    ext->add_option("--module", ext_args.module, "builtin name, Nij/Mij, @file, or '*' product");
    ext->add_option("--out", ext_args.out, "output TSV path ('-' for stdout)");
    ext->add_option("--products-out", ext_args.products_out, "optionally write the h_i ledger");
    add_window(ext, ext_args.window);

    struct {
        std::string algebra = "A2", module = "F2", target = "F2", out;
        CommonWindow window;
    } extb;
    CLI::App* eb = app.add_subcommand("ext-between", "Ext(m, n) table");
    eb->add_option("--algebra", extb.algebra);
    eb->add_option("--module", extb.module);
    eb->add_option("--target", extb.target);
    eb->add_option("--out", extb.out);
    add_window(eb, extb.window);

    struct {
        std::string algebra = "A1", cls = "v1^4", on = "H1", out;
        bool les_check = false;
        CommonWindow window;
    } cone;
    CLI::App* cn = app.add_subcommand("cone", "Ext of the cofiber of a class");
    cn->add_option("--class", cone.cls, "h0 or v1^4");
    cn->add_option("--on", cone.on, "base module (grammar as --module)");
    cn->add_option("--algebra", cone.algebra);
    cn->add_option("--out", cone.out);
    cn->add_flag("--les-check", cone.les_check, "verify the cone long exact sequence");
    add_window(cn, cone.window);

    struct {
        std::string algebra = "A", classes = "h0,h1";
        std::string kill_by;
        std::string out;
        CommonWindow window{8, 45};
    } prod;
    CLI::App* pr = app.add_subcommand("product", "Yoneda products of h-classes over F2");
    pr->add_option("--algebra", prod.algebra);
    pr->add_option("--classes", prod.classes, "comma list, e.g. h0,h0,h0,h3,h5");
    pr->add_option("--kill-by", prod.kill_by, "check that this class annihilates the product");
    pr->add_option("--out", prod.out);
    add_window(pr, prod.window);

    struct {
        std::string algebra = "A1", module = "F2", out;
        CommonWindow window{10, 14};
    } oracle;
    CLI::App* orc = app.add_subcommand("oracle", "cobar-complex Ext (independent oracle)");
    orc->add_option("--algebra", oracle.algebra);
    orc->add_option("--module", oracle.module);
    orc->add_option("--out", oracle.out);
    add_window(orc, oracle.window);

    struct {
        std::string action = "dump";
        int i = 2, j = 1, dmax = 32;
        std::string monomial = "xi1^4 xi2^2";
        std::string out;
    } bgargs;
    CLI::App* bgc = app.add_subcommand("bg", "Brown-Gitler comodules");
    bgc->add_option("action", bgargs.action, "dump | split | tau | seq | coact")->required();
    bgc->add_option("--i", bgargs.i, "level");
    bgc->add_option("--j", bgargs.j, "weight index");
    bgc->add_option("--dmax", bgargs.dmax, "degree cap");
    bgc->add_option("--monomial", bgargs.monomial, "xi-monomial for coact, e.g. 'xi1^4 xi2^2'");
    bgc->add_option("--out", bgargs.out);

    struct {
        std::string x = "H14", entry, out;
        int n_max = 3;
        bool crosscheck = false;
        CommonWindow window{14, 48};
    } tmfa;
    CLI::App* te = app.add_subcommand("tmf-e1", "E1 page of the algebraic tmf-resolution");
    te->add_option("--x", tmfa.x, "object: module grammar or H14/DH14");
    te->add_option("--nmax", tmfa.n_max);
    te->add_option("--entry", tmfa.entry, "restrict to one tuple, e.g. 1,1,1 (plain TSV out)");
    te->add_flag("--crosscheck", tmfa.crosscheck, "audit entries against the vanishing lemmas");
    te->add_option("--out", tmfa.out);
    add_window(te, tmfa.window);

    struct {
        std::string lemma = "7.3", table;
        int j = 0;
        std::string out;
    } van_args;
    CLI::App* vn = app.add_subcommand("vanish", "audit a TSV Ext table against a vanishing lemma");
    vn->add_option("--lemma", van_args.lemma, "7.3, 7.4 or 7.5");
    vn->add_option("--j", van_args.j, "index for lemma 7.3");
    vn->add_option("--table", van_args.table)->required();
    vn->add_option("--out", van_args.out);

    struct {
        std::string table, products, markers, diffs, format = "svg", out;
        int rebase = 0;
    } ch;
    CLI::App* chc = app.add_subcommand("chart", "emit an Adams chart from a TSV table");
    chc->add_option("--table", ch.table)->required();
    chc->add_option("--products", ch.products, "h_i ledger TSV");
    chc->add_option("--markers", ch.markers, "marker overrides: stem s index marker");
    chc->add_option("--diffs", ch.diffs, "differential annotations (chart TSV diff records)");
    chc->add_option("--format", ch.format, "svg | tsv | ascii");
    chc->add_option("--rebase", ch.rebase, "subtract this from internal degrees");
    chc->add_option("--out", ch.out);

    struct {
        CommonWindow window{10, 58};
        std::string out;
    } f43;
    CLI::App* fc = app.add_subcommand("facts43", "the three deep Ext facts over the full algebra");
    add_window(fc, f43.window);
    fc->add_option("--out", f43.out);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    }
    catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return 0; /* --help */
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    thread_cap() = threads;

    if (!config_path.empty()) {
        std::map<std::string, int> cfg;
        try {
            std::istringstream in(read_file(config_path));
            std::string line;
            while (std::getline(in, line)) {
                size_t hash = line.find('#');
                if (hash != std::string::npos)
                    line = line.substr(0, hash);
                size_t eq = line.find('=');
                if (eq == std::string::npos)
                    continue;
                std::string key = line.substr(0, eq);
                key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
                if (!key.empty())
                    cfg[key] = std::stoi(line.substr(eq + 1));
            }
        }
        catch (const std::exception& e) {
            std::cerr << "usage error: bad config: " << e.what() << "\n";
            return 2;
        }
        auto apply = [&](CLI::App* cmd, CommonWindow& w) {
            if (!cmd->parsed())
                return;
            if (!cmd->count("--smax") && cfg.count("smax"))
                w.s_max = cfg["smax"];
            if (!cmd->count("--tmax") && cfg.count("tmax"))
                w.t_max = cfg["tmax"];
        };
        apply(ext, ext_args.window);
        apply(eb, extb.window);
        apply(cn, cone.window);
        apply(pr, prod.window);
        apply(orc, oracle.window);
        apply(te, tmfa.window);
        apply(fc, f43.window);
    }

    try {
        if (*ext)
            return detail::cmd_ext(ext_args);

        if (*eb) {
            alg::SlicePtr slice = make_slice(extb.algebra, extb.window.t_max + 2);
            GradedModule m = resolve_module(extb.module, slice);
            GradedModule n = resolve_module(extb.target, slice);
            res::ExtBetween r = res::ext_between(m, n, extb.window.s_max, extb.window.t_max);
            write_output(extb.out, r.table.to_tsv());
            return 0;
        }

        if (*cn) {
            mod::ConeSpec spec;
            if (cone.cls == "h0")
                spec = mod::ConeSpec{1, 1};
            else if (cone.cls == "v1^4")
                spec = mod::ConeSpec{4, 12};
            else
                throw ComputeError("unknown class '" + cone.cls + "' (use h0 or v1^4)");
            alg::SlicePtr slice = make_slice(cone.algebra, cone.window.t_max + spec.t + 1);
            GradedModule base = resolve_module(cone.on, slice);
            // the cone lives over the base 'H1'-part: tensor factors beyond it
            // ride along through the W slot
            DerivedObject obj{base, spec, 0, 0};
            res::ExtComputation comp =
                res::ext_of_object(obj, nullptr, cone.window.s_max, cone.window.t_max);
            write_output(cone.out, comp.table.to_tsv());
            if (cone.les_check) {
                res::ConeLesReport rep = res::verify_cone_les(comp);
                for (const auto& f : rep.failures)
                    std::cerr << f << "\n";
                std::cout << (rep.pass ? "cone LES: pass\n" : "cone LES: FAIL\n");
                if (!rep.pass)
                    return 1;
            }
            return 0;
        }

        if (*pr) {
            alg::SlicePtr slice = make_slice(prod.algebra, prod.window.t_max);
            GradedModule f2m = mod::builtin_module("F2", slice);
            res::FreeChainComplex c =
                res::resolve_with_cache(f2m, prod.window.s_max, prod.window.t_max);
            auto lookup = [&](const std::string& name) -> res::ExtClass {
                if (name.size() < 2 || name[0] != 'h')
                    throw ComputeError("class names are h0..h6");
                auto cls = res::h_class(c, std::stoi(name.substr(1)));
                if (!cls.has_value())
                    throw ComputeError("class " + name + " not present in the window");
                return *cls;
            };
            std::vector<std::string> names;
            std::string cur;
            for (char chr : prod.classes) {
                if (chr == ',') {
                    names.push_back(cur);
                    cur.clear();
                }
                else
                    cur += chr;
            }
            names.push_back(cur);
            if (names.empty())
                throw ComputeError("no classes given");
            res::ExtClass acc = lookup(names.back());
            for (int i = (int)names.size() - 2; i >= 0; --i)
                acc = res::yoneda_product(lookup(names[i]), acc, c, c);
            std::ostringstream outs;
            outs << "product " << prod.classes << " at (s,t)=(" << acc.s << "," << acc.t << ") "
                 << (acc.is_zero() ? "= 0" : "!= 0");
            if (!acc.is_zero()) {
                outs << " components";
                for (uint32_t k : acc.gens)
                    outs << " " << k;
            }
            outs << "\n";
            if (!prod.kill_by.empty() && !acc.is_zero()) {
                res::ExtClass killed = res::yoneda_product(lookup(prod.kill_by), acc, c, c);
                outs << prod.kill_by << " * product "
                     << (killed.is_zero() ? "= 0" : "!= 0 (NOT annihilated)") << "\n";
            }
            write_output(prod.out, outs.str());
            return 0;
        }

        if (*orc) {
            alg::SlicePtr slice = make_slice(oracle.algebra, oracle.window.t_max);
            GradedModule m = resolve_module(oracle.module, slice);
            int level = slice->is_finite() ? slice->level() : -1;
            res::ExtTable t = res::cobar_ext_oracle(mod::comodule_of_module(m), level,
                                                    oracle.window.s_max, oracle.window.t_max);
            write_output(oracle.out, t.to_tsv());
            return 0;
        }

        if (*bgc) {
            if (bgargs.action == "dump") {
                bg::BGComodule c = bg::a_mod_a(bgargs.i, bgargs.dmax);
                write_output(bgargs.out, bg::dump_tsv(c));
                return 0;
            }
            if (bgargs.action == "split") {
                bg::SplittingReport rep = bg::verify_splitting(bgargs.i, bgargs.dmax);
                std::ostringstream outs;
                outs << "splitting i=" << bgargs.i << " dmax=" << bgargs.dmax << ": "
                     << (rep.pass ? "pass" : "FAIL") << "\n";
                for (const auto& f : rep.failures)
                    outs << "  " << f << "\n";
                write_output(bgargs.out, outs.str());
                return rep.pass ? 0 : 1;
            }
            if (bgargs.action == "tau") {
                bg::TauReport rep = bg::tau_quotients(bgargs.j, bgargs.dmax);
                std::ostringstream outs;
                outs << "tau filtration j=" << bgargs.j << ": " << (rep.pass ? "pass" : "FAIL")
                     << "\n";
                for (const auto& f : rep.failures)
                    outs << "  " << f << "\n";
                write_output(bgargs.out, outs.str());
                return rep.pass ? 0 : 1;
            }
            if (bgargs.action == "coact") {
                auto m = alg::parse_xi(bgargs.monomial);
                if (!m.has_value())
                    throw ComputeError("bad monomial: " + bgargs.monomial);
                alg::TensorSum psi = alg::coproduct_monomial(*m, bgargs.i);
                std::ostringstream outs;
                outs << "psi(" << m->text() << ") in (A//A(" << bgargs.i << "))_* =";
                bool first = true;
                for (const auto& [l, r] : psi) {
                    outs << (first ? " " : " + ") << l.text() << " (x) " << r.text();
                    first = false;
                }
                outs << "\n";
                write_output(bgargs.out, outs.str());
                return 0;
            }
            if (bgargs.action == "seq") {
                bg::SequenceCertificate odd = bg::odd_sequence(bgargs.j);
                bg::SequenceCertificate even = bg::even_sequence(bgargs.j);
                std::ostringstream outs;
                for (const auto* cert : {&odd, &even}) {
                    outs << cert->name << ": " << (cert->pass ? "pass" : "FAIL") << " dims";
                    for (size_t d : cert->object_dims)
                        outs << " " << d;
                    outs << "\n";
                    for (const auto& f : cert->failures)
                        outs << "  " << f << "\n";
                }
                write_output(bgargs.out, outs.str());
                return odd.pass && even.pass ? 0 : 1;
            }
            throw ComputeError("unknown bg action: " + bgargs.action);
        }

        if (*te) {
            alg::SlicePtr a2 = alg::AlgebraSlice::finite(2);
            DerivedObject obj;
            if (tmfa.x == "H14" || tmfa.x == "DH14")
                obj = std::get<DerivedObject>(mod::builtin(tmfa.x, a2));
            else
                obj = DerivedObject{resolve_module(tmfa.x, a2), std::nullopt, 0, 0};
            if (!tmfa.entry.empty()) {
                std::vector<int> tuple;
                std::string cur;
                for (char chr : tmfa.entry + ",") {
                    if (chr == ',') {
                        if (!cur.empty())
                            tuple.push_back(std::stoi(cur));
                        cur.clear();
                    }
                    else
                        cur += chr;
                }
                res::ExtTable t = tmf::e1_entry(obj, tuple, tmfa.window.s_max, tmfa.window.t_max);
                write_output(tmfa.out, t.to_tsv());
                return 0;
            }
            tmf::E1Page page =
                tmf::e1_page(obj, tmfa.x, tmfa.n_max, tmfa.window.s_max, tmfa.window.t_max);
            write_output(tmfa.out, page.to_tsv());
            if (tmfa.crosscheck) {
                tmf::CrosscheckReport rep = tmf::vanishing_crosscheck(page);
                for (const auto& f : rep.failures)
                    std::cerr << f << "\n";
                std::cout << (rep.pass ? "vanishing crosscheck: pass\n"
                                       : "vanishing crosscheck: FAIL\n");
                if (!rep.pass)
                    return 1;
            }
            return 0;
        }

        if (*vn) {
            res::ExtTable t = res::ExtTable::from_tsv(read_file(van_args.table));
            van::AuditReport rep;
            if (van_args.lemma == "7.3")
                rep = van::audit_73(t, van_args.j);
            else if (van_args.lemma == "7.4")
                rep = van::audit_74(t);
            else if (van_args.lemma == "7.5")
                rep = van::audit_75(t);
            else
                throw ComputeError("unknown lemma: " + van_args.lemma);
            write_output(van_args.out, rep.text() + "\n");
            return rep.pass ? 0 : 1;
        }

        if (*chc) {
            res::ExtTable t = res::ExtTable::from_tsv(read_file(ch.table));
            std::vector<res::ExtProductEntry> ledger;
            if (!ch.products.empty()) {
                std::istringstream in(read_file(ch.products));
                std::string line;
                bool first = true;
                while (std::getline(in, line)) {
                    if (line.empty() || (first && line.substr(0, 3) == "op\t")) {
                        first = false;
                        continue;
                    }
                    first = false;
                    std::istringstream ls(line);
                    res::ExtProductEntry e;
                    uint32_t target;
                    if (!(ls >> e.op >> e.s >> e.t >> e.index >> target))
                        throw ComputeError("bad products line: " + line);
                    e.targets = {target};
                    ledger.push_back(e);
                }
            }
            std::map<chart::DotRef, chart::Marker> markers;
            if (!ch.markers.empty()) {
                std::istringstream in(read_file(ch.markers));
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty() || line[0] == '#')
                        continue;
                    std::istringstream ls(line);
                    chart::DotRef r;
                    std::string mk;
                    if (!(ls >> r.stem >> r.s >> r.index >> mk))
                        throw ComputeError("bad markers line: " + line);
                    auto m = chart::parse_marker(mk);
                    if (!m.has_value())
                        throw ComputeError("bad marker: " + mk);
                    markers[r] = *m;
                }
            }
            chart::ChartSpec spec = chart::chart_from_ext(t, ledger.empty() ? nullptr : &ledger,
                                                          markers.empty() ? nullptr : &markers,
                                                          ch.rebase);
            if (!ch.diffs.empty()) {
                chart::ChartSpec ann = chart::parse_tsv(read_file(ch.diffs));
                for (const auto& d : ann.differentials)
                    spec.differentials.push_back(d);
                spec.normalize();
                spec.validate();
            }
            write_output(ch.out, chart::emit(spec, ch.format));
            return 0;
        }

        if (*fc) {
            alg::SlicePtr slice = alg::AlgebraSlice::truncated(f43.window.t_max);
            GradedModule h1 = mod::builtin_module("H1", slice);
            GradedModule f2m = mod::builtin_module("F2", slice);
            res::FreeChainComplex res_h1 =
                res::resolve_with_cache(h1, f43.window.s_max, f43.window.t_max);
            res::FreeChainComplex res_f2 = res::minimal_resolution(f2m, 2, 20);
            res::Facts43Report rep = res::prop43_facts(res_h1, res_f2);
            std::ostringstream outs;
            outs << "fact (1) Ext^{9,56}(H(1)) = 0: " << (rep.fact1 ? "pass" : "FAIL")
                 << " (dim " << rep.dim_9_56 << ")\n";
            outs << "fact (2) h0 * Ext^{5,44}(H(1)) = 0: " << (rep.fact2 ? "pass" : "FAIL")
                 << " (dim " << rep.dim_5_44 << ")\n";
            outs << "fact (3) h0 surjects onto Ext^{9,57}(H(1)): "
                 << (rep.fact3 ? "pass" : "FAIL") << " (dims " << rep.dim_8_56 << " -> "
                 << rep.dim_9_57 << ")\n";
            write_output(f43.out, outs.str());
            return rep.pass() ? 0 : 1;
        }
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace extcharts::cli
