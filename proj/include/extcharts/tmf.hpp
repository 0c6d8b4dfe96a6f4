#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "brown_gitler.hpp"
#include "derived.hpp"
#include "vanishing.hpp"

// The E1-page of the algebraic A//A(2)-resolution for an object X: entries
//   E_1^{s,t,n} = Ext^{s,t}_{A(2)_*}(M_2(j_1) (x) ... (x) M_2(j_n) (x) X[-n])
// over tuples j_1, ..., j_n >= 1, the homological shift [-n] folded into the
// reported (s,t).  The d1 differentials of the resolution are not computed.

namespace extcharts::tmf {

using mod::DerivedObject;
using mod::GradedModule;
using res::ExtTable;

struct E1Key {
    int n = 0;
    std::vector<int> tuple;
    bool operator<(const E1Key& o) const
    {
        return n < o.n || (n == o.n && tuple < o.tuple);
    }
};

struct E1Page {
    std::string x_name;
    int n_max = 0, s_max = 0, t_max = 0;
    std::map<E1Key, ExtTable> entries; /* tables already [-n]-shifted */

    int dim(const E1Key& k, int s, int t) const
    {
        auto it = entries.find(k);
        return it == entries.end() ? 0 : it->second.dim(s, t);
    }

    std::string to_tsv() const
    {
        std::ostringstream out;
        out << "n\tj-tuple\ts\tt\tdim\n";
        for (const auto& [key, table] : entries) {
            std::string tup;
            for (size_t i = 0; i < key.tuple.size(); ++i)
                tup += (i ? "," : "") + std::to_string(key.tuple[i]);
            if (tup.empty())
                tup = "-";
            for (const auto& [st, d] : table.dims)
                out << key.n << "\t" << tup << "\t" << st.first << "\t" << st.second << "\t" << d
                    << "\n";
        }
        return out.str();
    }
};

inline std::vector<std::vector<int>> tuples_for(int n, int j_sum_max)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 1);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n) {
            out.push_back(cur);
            return;
        }
        for (int j = 1; j <= left - (n - pos - 1); ++j) {
            cur[pos] = j;
            rec(pos + 1, left - j);
        }
    };
    if (n == 0)
        out.push_back({});
    else if (j_sum_max >= n)
        rec(0, j_sum_max);
    return out;
}

inline GradedModule m2_dual_module(int j, alg::SlicePtr slice)
{
    return mod::dual_module_of_comodule(bg::m_comodule(2, j).pres, slice);
}

// Ext of M_2(j_1) (x) ... (x) M_2(j_n) (x) X with the [-n] shift applied:
// the reported table places Ext^{s',t} at s = s' + n.
inline ExtTable e1_entry(const DerivedObject& x, const std::vector<int>& tuple, int s_max,
                         int t_max)
{
    auto a2 = alg::AlgebraSlice::finite(2);
    int n = (int)tuple.size();
    ExtTable inner;
    if (n == 0) {
        inner = res::ext_of_object(x, nullptr, s_max, t_max).table;
    }
    else {
        GradedModule w = m2_dual_module(tuple[0], a2);
        for (int k = 1; k < n; ++k)
            w = mod::tensor(w, m2_dual_module(tuple[k], a2));
        inner = res::ext_of_object(x, &w, std::max(0, s_max - n), t_max).table;
    }
    return res::shift_table(inner, 0, -n);
}

// The full E1 page.  Tuple enumeration is bounded by connectivity: the
// bottom of M_2(j_1) (x) ... (x) M_2(j_n) sits in degree 8(j_1+...+j_n), so
// tuples with 8 sum > t_max contribute nothing.
inline E1Page e1_page(const DerivedObject& x, const std::string& x_name, int n_max, int s_max,
                      int t_max)
{
    E1Page page;
    page.x_name = x_name;
    page.n_max = n_max;
    page.s_max = s_max;
    page.t_max = t_max;
    int x_bottom = x.base.dim() ? x.base.bottom_degree() : 0;
    for (int n = 0; n <= n_max; ++n)
        for (const auto& tuple : tuples_for(n, (t_max - x_bottom) / 8)) {
            ExtTable t = e1_entry(x, tuple, s_max, t_max);
            // trim to the window
            ExtTable clipped;
            clipped.s_max = s_max;
            clipped.t_max = t_max;
            for (const auto& [st, d] : t.dims)
                if (st.first <= s_max && st.second <= t_max)
                    clipped.set(st.first, st.second, d);
            page.entries[E1Key{n, tuple}] = std::move(clipped);
        }
    return page;
}

// ---------------------------------------------------------------------------
// change of rings: Ext_A((A//A(2))_* (x) W) = Ext_{A(2)}(W) in the window.

struct ChangeOfRingsReport {
    bool pass = false;
    std::vector<std::string> failures;
};

inline ChangeOfRingsReport change_of_rings_check(const mod::ComodulePresentation& w_comodule,
                                                 const std::string& w_name, int t_max)
{
    ChangeOfRingsReport rep;
    auto a2 = alg::AlgebraSlice::finite(2);
    auto a_full = alg::AlgebraSlice::truncated(t_max);
    int s_max = t_max;

    // right side: Ext_{A(2)}(W)
    GradedModule w2 = mod::dual_module_of_comodule(w_comodule, a2);
    ExtTable rhs = res::ext_dims(res::minimal_resolution(w2, s_max, t_max));

    // left side: Ext_A of the degree-truncated (A//A(2))_* (x) W
    bg::BGComodule amod = bg::a_mod_a(2, t_max);
    mod::ComodulePresentation big = mod::comodule_tensor(amod.pres, w_comodule);
    // drop basis elements above the cap; they cannot affect t <= t_max
    mod::ComodulePresentation cut;
    cut.coaction_level = -1;
    std::vector<uint32_t> keep(big.dim(), ~uint32_t(0));
    for (uint32_t i = 0; i < big.dim(); ++i)
        if (big.degrees[i] <= t_max) {
            keep[i] = (uint32_t)cut.labels.size();
            cut.labels.push_back(big.labels[i]);
            cut.degrees.push_back(big.degrees[i]);
            cut.monomials.push_back(big.monomials[i]);
        }
    cut.coaction.resize(cut.labels.size());
    for (uint32_t i = 0; i < big.dim(); ++i) {
        if (keep[i] == ~uint32_t(0))
            continue;
        mod::Coaction terms;
        for (const auto& t : big.coaction[i]) {
            if (keep[t.idx] == ~uint32_t(0))
                throw ComputeError("truncation dropped a coaction target below the cap");
            terms.push_back(mod::CoactionTerm{t.left, keep[t.idx]});
        }
        cut.coaction[keep[i]] = std::move(terms);
    }
    GradedModule lhs_mod = mod::dual_module_of_comodule(cut, a_full);
    ExtTable lhs = res::ext_dims(res::minimal_resolution(lhs_mod, s_max, t_max));

    for (int s = 0; s <= s_max; ++s)
        for (int t = 0; t <= t_max; ++t)
            if (lhs.dim(s, t) != rhs.dim(s, t))
                rep.failures.push_back("W=" + w_name + " mismatch at (s,t)=(" + std::to_string(s) +
                                       "," + std::to_string(t) + "): " +
                                       std::to_string(lhs.dim(s, t)) + " vs " +
                                       std::to_string(rhs.dim(s, t)));
    rep.pass = rep.failures.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// vanishing crosscheck of a computed page against the applicable lemma.

struct CrosscheckReport {
    bool pass = false;
    std::vector<std::string> failures;
    std::vector<std::string> audited;
};

inline CrosscheckReport vanishing_crosscheck(const E1Page& page)
{
    CrosscheckReport rep;
    for (const auto& [key, table] : page.entries) {
        const auto& tuple = key.tuple;
        bool all_ones = true;
        for (int j : tuple)
            if (j != 1)
                all_ones = false;
        std::string tag = "n=" + std::to_string(key.n);
        if (key.n == 0) {
            van::AuditReport a = van::audit_73(table, 0);
            rep.audited.push_back(tag + " via 7.3 j=0");
            if (!a.pass)
                rep.failures.push_back(a.text());
        }
        else if (key.n == 1) {
            int j = tuple[0];
            // M_2(j) = Sigma^{8j} N_1(j): translate into the 7.3 region
            ExtTable shifted = res::shift_table(table, -8 * j, 1);
            van::AuditReport a = van::audit_73(shifted, j);
            rep.audited.push_back(tag + " j=" + std::to_string(j) + " via 7.3");
            if (!a.pass)
                rep.failures.push_back(a.text());
            if (j >= 2) {
                van::AuditReport b = van::audit_74(table);
                rep.audited.push_back(tag + " via 7.4");
                if (!b.pass)
                    rep.failures.push_back(b.text());
            }
        }
        else if (!all_ones) {
            van::AuditReport a = van::audit_74(table);
            rep.audited.push_back(tag + " via 7.4");
            if (!a.pass)
                rep.failures.push_back(a.text());
        }
        else if (key.n >= 3) {
            van::AuditReport a = van::audit_75(table);
            rep.audited.push_back(tag + " via 7.5");
            if (!a.pass)
                rep.failures.push_back(a.text());
        }
        /* all-ones n = 2 has no applicable lemma */
    }
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace extcharts::tmf
