#pragma once

#include <map>
#include <vector>

#include "resolution.hpp"

// The reduced cobar complex C^s(F2, Gamma, M) = Gammabar^{(x) s} (x) M for
// Gamma = A(n)_* or the degree-truncated dual Steenrod algebra.  Its
// cohomology is comodule Ext, computed by raw rank bookkeeping; this is the
// independent oracle against the minimal-resolution path and never feeds
// back into it.

namespace extcharts::res {

using alg::XiMonomial;
using mod::ComodulePresentation;

namespace cobar_detail {

struct Gamma {
    int level;   /* n for A(n)_*, -1 for truncated A_* */
    int t_cap;
    std::vector<std::vector<XiMonomial>> by_degree; /* degree >= 1 */
    std::vector<uint32_t> offset;                   /* global id = offset[d] + idx */
    uint32_t count = 0;
    /* reduced coproducts, indexed by global id: pairs of global ids */
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> red_coproduct;

    uint32_t id(const XiMonomial& m) const
    {
        int d = m.degree();
        const auto& basis = by_degree[d];
        auto it = std::lower_bound(basis.begin(), basis.end(), m);
        if (it == basis.end() || !(*it == m))
            throw ComputeError("cobar: monomial outside Gamma");
        return offset[d] + (uint32_t)(it - basis.begin());
    }

    int degree_of(uint32_t gid) const
    {
        int d = 1;
        while ((size_t)(d + 1) < offset.size() && offset[d + 1] <= gid)
            ++d;
        return d;
    }
};

inline Gamma build_gamma(int level, int t_cap)
{
    Gamma g;
    g.level = level;
    g.t_cap = t_cap;
    alg::SlicePtr slice = level >= 0 ? alg::AlgebraSlice::finite(level) : alg::AlgebraSlice::truncated(t_cap);
    int top = std::min(t_cap, slice->t_max());
    g.by_degree.resize(top + 1);
    g.offset.resize(top + 2, 0);
    for (int d = 1; d <= top; ++d) {
        for (const auto& m : slice->basis(d))
            g.by_degree[d].push_back(XiMonomial{alg::Expo(m.r)});
        std::sort(g.by_degree[d].begin(), g.by_degree[d].end());
        g.offset[d] = g.count;
        g.count += (uint32_t)g.by_degree[d].size();
    }
    g.offset[top + 1] = g.count;
    // offsets must be monotone lookups by id; rebuild as prefix sums
    uint32_t run = 0;
    for (int d = 1; d <= top; ++d) {
        g.offset[d] = run;
        run += (uint32_t)g.by_degree[d].size();
    }
    g.offset[top + 1] = run;
    g.red_coproduct.resize(g.count);
    for (int d = 1; d <= top; ++d)
        for (uint32_t i = 0; i < g.by_degree[d].size(); ++i) {
            std::vector<std::pair<uint32_t, uint32_t>> terms;
            for (const auto& [l, r] : alg::coproduct(g.by_degree[d][i])) {
                if (l.is_unit() || r.is_unit())
                    continue;
                if (level >= 0 &&
                    !(alg::in_dual_subalgebra(l, level) && alg::in_dual_subalgebra(r, level)))
                    continue;
                terms.emplace_back(g.id(l), g.id(r));
            }
            sort_reduce_mod2(terms);
            g.red_coproduct[g.offset[d] + i] = std::move(terms);
        }
    return g;
}

// a cobar cochain basis element: gamma ids then the comodule index
using Word = std::vector<uint32_t>;

struct SliceBasis {
    std::vector<Word> words;
    std::map<Word, uint32_t> index;
};

inline void enumerate_words(const Gamma& g, const ComodulePresentation& m, int s, int t,
                            SliceBasis& out, size_t dim_cap)
{
    int m_bottom = 0;
    for (int d : m.degrees)
        m_bottom = std::min(m_bottom, d);
    Word cur(s + 1);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == s) {
            for (uint32_t v = 0; v < m.dim(); ++v)
                if (m.degrees[v] == left) {
                    cur[s] = v;
                    out.index.emplace(cur, (uint32_t)out.words.size());
                    out.words.push_back(cur);
                    if (out.words.size() > dim_cap)
                        throw ComputeError("cobar cap exceeded at C^" + std::to_string(s) + "," +
                                           std::to_string(t));
                }
            return;
        }
        for (int d = 1; d <= left - (s - pos - 1) - m_bottom; ++d) {
            if ((size_t)d >= g.by_degree.size())
                break;
            for (uint32_t i = 0; i < g.by_degree[d].size(); ++i) {
                cur[pos] = g.offset[d] + i;
                rec(pos + 1, left - d);
            }
        }
    };
    rec(0, t);
}

}  // namespace cobar_detail

// Ext over Gamma of the comodule m by direct cochain cohomology.  The
// comodule's left coaction factors are reduced to Gamma.  A hard cap on the
// cochain dimension guards against runaway windows.
inline ExtTable cobar_ext_oracle(const ComodulePresentation& m, int level, int s_max, int t_max,
                                 size_t dim_cap = 2000000)
{
    m.require_valid_shape();
    cobar_detail::Gamma g = cobar_detail::build_gamma(level, t_max);
    ExtTable table;
    table.s_max = s_max;
    table.t_max = t_max;

    // reduced coaction of m in gamma ids
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> coact(m.dim());
    for (uint32_t v = 0; v < m.dim(); ++v) {
        std::vector<std::pair<uint32_t, uint32_t>> terms;
        for (const auto& term : m.reduced_coaction(v, level)) {
            if (term.left.is_unit())
                continue;
            if (term.left.degree() > g.t_cap)
                continue;
            terms.emplace_back(g.id(term.left), term.idx);
        }
        sort_reduce_mod2(terms);
        coact[v] = std::move(terms);
    }

    int m_bottom = 0;
    for (int d : m.degrees)
        m_bottom = std::min(m_bottom, d);

    std::vector<int> ts;
    for (int t = m_bottom; t <= t_max; ++t)
        ts.push_back(t);
    std::vector<std::map<int, int>> results(ts.size());
    parallel_for(ts.size(), [&](size_t ti) {
        int t = ts[ti];
        cobar_detail::SliceBasis cur, next;
        cobar_detail::enumerate_words(g, m, 0, t, cur, dim_cap);
        size_t prev_rank = 0;
        for (int s = 0; s <= std::min(s_max, t - m_bottom); ++s) {
            next = cobar_detail::SliceBasis{};
            cobar_detail::enumerate_words(g, m, s + 1, t, next, dim_cap);
            // differential C^s -> C^{s+1}
            f2::BitMatrix d(cur.words.size(), next.words.size());
            for (uint32_t row = 0; row < cur.words.size(); ++row) {
                const cobar_detail::Word& w = cur.words[row];
                cobar_detail::Word probe(w.size() + 1);
                // insert the reduced coproduct of entry i
                for (int i = 0; i < s; ++i) {
                    for (int k = 0; k < (int)w.size(); ++k)
                        probe[k < i ? k : k + 1] = w[k];
                    for (const auto& [g1, g2] : g.red_coproduct[w[i]]) {
                        probe[i] = g1;
                        probe[i + 1] = g2;
                        auto it = next.index.find(probe);
                        if (it != next.index.end())
                            d.flip(row, it->second);
                    }
                }
                // coaction on the comodule entry
                for (int k = 0; k + 1 < (int)w.size(); ++k)
                    probe[k] = w[k];
                for (const auto& [g1, v] : coact[w.back()]) {
                    probe[s] = g1;
                    probe[s + 1] = v;
                    auto it = next.index.find(probe);
                    if (it != next.index.end())
                        d.flip(row, it->second);
                }
            }
            size_t r = f2::rank(d);
            int h = (int)cur.words.size() - (int)r - (int)prev_rank;
            if (h < 0)
                throw ComputeError("cobar rank bookkeeping failed");
            if (h > 0)
                results[ti][s] = h;
            prev_rank = r;
            cur = std::move(next);
        }
    });
    for (size_t ti = 0; ti < ts.size(); ++ti)
        for (auto [s, h] : results[ti])
            table.set(s, ts[ti], h);
    return table;
}

// Class of a concatenation word [w1 | w2 | ... | ws] in the cobar complex of
// (F2, Gamma, F2): returns whether the cocycle is nonzero in cohomology.
// Each letter must be primitive (the words used here are xi1-powers).
inline bool cobar_word_nonzero(int level, const std::vector<XiMonomial>& word, int t_cap)
{
    int t = 0;
    for (const auto& w : word)
        t += w.degree();
    if (t > t_cap)
        throw ComputeError("cobar word exceeds cap");
    cobar_detail::Gamma g = cobar_detail::build_gamma(level, t);
    ComodulePresentation f2c;
    f2c.labels = {"1"};
    f2c.degrees = {0};
    f2c.monomials = {XiMonomial()};
    f2c.coaction = {{mod::CoactionTerm{XiMonomial(), 0}}};

    int s = (int)word.size();
    cobar_detail::SliceBasis cs, cnext;
    cobar_detail::enumerate_words(g, f2c, s, t, cs, 10000000);
    cobar_detail::enumerate_words(g, f2c, s + 1, t, cnext, 10000000);
    cobar_detail::SliceBasis below;
    if (s >= 1)
        cobar_detail::enumerate_words(g, f2c, s - 1, t, below, 10000000);

    cobar_detail::Word target(s + 1);
    for (int i = 0; i < s; ++i) {
        if (!g.red_coproduct[g.id(word[i])].empty())
            throw ComputeError("cobar word letter is not primitive: " + word[i].text());
        target[i] = g.id(word[i]);
    }
    target[s] = 0;
    auto it = cs.index.find(target);
    if (it == cs.index.end())
        throw ComputeError("cobar word not a basis cochain");

    // image of d_{s-1}
    f2::EchelonBasis image(cs.words.size());
    if (s >= 1) {
        for (uint32_t row = 0; row < below.words.size(); ++row) {
            const cobar_detail::Word& w = below.words[row];
            f2::BitVector img(cs.words.size());
            cobar_detail::Word probe(w.size() + 1);
            for (int i = 0; i + 1 < (int)w.size(); ++i) {
                for (int k = 0; k < (int)w.size(); ++k)
                    probe[k < i ? k : k + 1] = w[k];
                for (const auto& [g1, g2] : g.red_coproduct[w[i]]) {
                    probe[i] = g1;
                    probe[i + 1] = g2;
                    auto jt = cs.index.find(probe);
                    if (jt != cs.index.end())
                        img.flip(jt->second);
                }
            }
            image.insert(img);
        }
    }
    f2::BitVector probe_vec(cs.words.size());
    probe_vec.set(it->second);
    return !image.contains(probe_vec);
}

}  // namespace extcharts::res
