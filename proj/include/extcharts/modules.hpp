#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "f2linalg.hpp"
#include "steenrod.hpp"

// Finite-dimensional graded modules over an algebra slice, their comodule
// presentations, and the named objects of the artifact.  A module stores the
// action of every Milnor basis element of the slice whose degree fits inside
// the module's degree spread; Sq(0) acts as the identity and is never stored.

namespace extcharts::mod {

using alg::AlgebraSlice;
using alg::Expo;
using alg::MilnorElement;
using alg::SlicePtr;
using alg::TensorSum;
using alg::XiMonomial;

using IndexSum = std::vector<uint32_t>; /* sorted mod-2 sum of basis indices */

class GradedModule {
public:
    GradedModule() = default;
    GradedModule(SlicePtr slice, std::vector<std::string> labels, std::vector<int> degrees)
        : slice_(std::move(slice)), labels_(std::move(labels)), degrees_(std::move(degrees))
    {
        if (labels_.size() != degrees_.size())
            throw ComputeError("labels/degrees size mismatch");
    }

    const AlgebraSlice& slice() const { return *slice_; }
    SlicePtr slice_ptr() const { return slice_; }
    size_t dim() const { return degrees_.size(); }
    int degree(size_t i) const { return degrees_[i]; }
    const std::string& label(size_t i) const { return labels_[i]; }
    const std::vector<int>& degrees() const { return degrees_; }
    const std::vector<std::string>& labels() const { return labels_; }

    int bottom_degree() const
    {
        int b = 0;
        bool first = true;
        for (int d : degrees_) {
            if (first || d < b)
                b = d;
            first = false;
        }
        return b;
    }
    int top_degree() const
    {
        int t = 0;
        bool first = true;
        for (int d : degrees_) {
            if (first || d > t)
                t = d;
            first = false;
        }
        return t;
    }
    int spread() const { return dim() ? top_degree() - bottom_degree() : 0; }

    std::vector<uint32_t> indices_in_degree(int d) const
    {
        std::vector<uint32_t> out;
        for (uint32_t i = 0; i < degrees_.size(); ++i)
            if (degrees_[i] == d)
                out.push_back(i);
        return out;
    }

    // Action of a basis element on a basis vector; empty when zero.  The
    // unit Sq(0) is handled by the caller (identity).
    const IndexSum& act(const MilnorElement& a, uint32_t src) const
    {
        static const IndexSum zero;
        if (a.is_unit())
            throw ComputeError("act: pass non-unit elements only");
        auto it = action_.find(a.r);
        if (it == action_.end())
            return zero;
        const auto& rows = it->second;
        return src < rows.size() && !rows[src].empty() ? rows[src] : zero;
    }

    IndexSum act_sum(const MilnorElement& a, const IndexSum& v) const
    {
        if (a.is_unit())
            return v;
        IndexSum out;
        for (uint32_t i : v)
            out = add_mod2(out, act(a, i));
        return out;
    }

    void set_action(const MilnorElement& a, uint32_t src, IndexSum targets)
    {
        if (a.is_unit())
            throw ComputeError("set_action: unit acts as identity");
        for (uint32_t t : targets)
            if (degrees_[t] != degrees_[src] + a.degree())
                throw ComputeError("set_action: degree mismatch on " + a.text());
        auto& rows = action_[a.r];
        rows.resize(dim());
        rows[src] = std::move(targets);
    }

    // Unit, degree-compatibility and associativity checks.  Exhaustive over
    // finite slices; sampled pairs for a truncated slice.
    void validate(int sample_pairs = 400) const
    {
        for (const auto& [re, rows] : action_) {
            MilnorElement a{Expo(re)};
            if (!slice_->contains(a))
                throw ComputeError("action of element outside slice: " + a.text());
            for (uint32_t s = 0; s < rows.size(); ++s)
                for (uint32_t t : rows[s])
                    if (degrees_[t] != degrees_[s] + a.degree())
                        throw ComputeError("degree-incompatible action: " + a.text());
        }
        auto check_pair = [&](const MilnorElement& a, const MilnorElement& b) {
            alg::MilnorSum ab = alg::milnor_product(a, b, *slice_);
            for (uint32_t v = 0; v < dim(); ++v) {
                IndexSum lhs;
                for (const auto& m : ab)
                    lhs = add_mod2(lhs, m.is_unit() ? IndexSum{v} : act(m, v));
                IndexSum rhs = act_sum(a, act(b, v));
                if (lhs != rhs)
                    throw ComputeError("associativity failure: " + a.text() + " * " + b.text());
            }
        };
        int sp = spread();
        if (slice_->is_finite()) {
            for (int da = 1; da <= std::min(slice_->t_max(), sp); ++da)
                for (int db = 1; da + db <= std::min(slice_->t_max(), sp); ++db)
                    for (const auto& a : slice_->basis(da))
                        for (const auto& b : slice_->basis(db))
                            check_pair(a, b);
        }
        else {
            uint64_t state = 0x9e3779b97f4a7c15ull;
            auto rnd = [&state]() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                return state;
            };
            for (int k = 0; k < sample_pairs; ++k) {
                int da = 1 + (int)(rnd() % (uint64_t)std::max(1, sp));
                int db = 1 + (int)(rnd() % (uint64_t)std::max(1, sp - da + 1));
                if (da + db > sp)
                    continue;
                const auto& ba = slice_->basis(da);
                const auto& bb = slice_->basis(db);
                if (ba.empty() || bb.empty())
                    continue;
                check_pair(ba[rnd() % ba.size()], bb[rnd() % bb.size()]);
            }
        }
    }

    bool same_table(const GradedModule& o) const
    {
        if (degrees_ != o.degrees_)
            return false;
        auto strip = [](const std::map<Expo, std::vector<IndexSum>>& a) {
            std::map<Expo, std::vector<IndexSum>> out;
            for (const auto& [k, rows] : a) {
                bool nonzero = false;
                for (const auto& r : rows)
                    if (!r.empty())
                        nonzero = true;
                if (nonzero) {
                    auto padded = rows;
                    out.emplace(k, padded);
                }
            }
            return out;
        };
        auto a = strip(action_), b = strip(o.action_);
        if (a.size() != b.size())
            return false;
        for (auto ita = a.begin(), itb = b.begin(); ita != a.end(); ++ita, ++itb) {
            if (ita->first != itb->first)
                return false;
            auto ra = ita->second, rb = itb->second;
            ra.resize(degrees_.size());
            rb.resize(degrees_.size());
            if (ra != rb)
                return false;
        }
        return true;
    }

    const std::map<Expo, std::vector<IndexSum>>& raw_action() const { return action_; }

private:
    SlicePtr slice_;
    std::vector<std::string> labels_;
    std::vector<int> degrees_;
    std::map<Expo, std::vector<IndexSum>> action_;
};

// ---------------------------------------------------------------------------
// Comodule presentations.  Left tensor factors of the coaction live in A_*
// (coaction_level = -1) or, for objects that are only comodules over a
// quotient, in A(n)_* (coaction_level = n).

struct CoactionTerm {
    XiMonomial left;
    uint32_t idx;
    bool operator<(const CoactionTerm& o) const
    {
        return left < o.left || (left == o.left && idx < o.idx);
    }
    bool operator==(const CoactionTerm& o) const { return left == o.left && idx == o.idx; }
};

using Coaction = std::vector<CoactionTerm>; /* sorted mod-2 */

class ComodulePresentation {
public:
    std::vector<std::string> labels;
    std::vector<int> degrees;
    std::vector<std::optional<XiMonomial>> monomials; /* set for monomial-basis comodules */
    std::vector<Coaction> coaction;                   /* counit term included */
    int coaction_level = -1;                          /* -1: left factors in A_* */

    size_t dim() const { return degrees.size(); }

    void require_valid_shape() const
    {
        if (labels.size() != dim() || coaction.size() != dim())
            throw ComputeError("comodule: ragged presentation");
    }

    // Coaction with left factors reduced to A(n)_*.
    Coaction reduced_coaction(uint32_t i, int n) const
    {
        if (coaction_level >= 0 && n > coaction_level)
            throw ComputeError("comodule is only defined over A(" + std::to_string(coaction_level) + ")_*");
        Coaction out;
        for (const auto& t : coaction[i])
            if (n < 0 || alg::in_dual_subalgebra(t.left, n))
                out.push_back(t);
        return out;
    }

    void check_counit() const
    {
        for (uint32_t i = 0; i < dim(); ++i) {
            bool seen = false;
            for (const auto& t : coaction[i])
                if (t.left.is_unit()) {
                    if (t.idx != i)
                        throw ComputeError("counit failure at " + labels[i]);
                    seen = true;
                }
            if (!seen)
                throw ComputeError("missing counit term at " + labels[i]);
            for (const auto& t : coaction[i])
                if (t.left.degree() + degrees[t.idx] != degrees[i])
                    throw ComputeError("coaction degree mismatch at " + labels[i]);
        }
    }

    // (Delta (x) 1) psi = (1 (x) psi) psi, with all algebra factors reduced
    // to the comodule's level (or capped by degree for the full dual).
    void check_coassociative() const
    {
        int n = coaction_level;
        for (uint32_t i = 0; i < dim(); ++i) {
            std::vector<std::tuple<XiMonomial, XiMonomial, uint32_t>> lhs, rhs;
            for (const auto& t : coaction[i]) {
                for (const auto& u : alg::coproduct(t.left)) {
                    if (n >= 0 && !(alg::in_dual_subalgebra(u.first, n) && alg::in_dual_subalgebra(u.second, n)))
                        continue;
                    lhs.emplace_back(u.first, u.second, t.idx);
                }
                for (const auto& u : coaction[t.idx]) {
                    if (n >= 0 && !alg::in_dual_subalgebra(u.left, n))
                        continue;
                    rhs.emplace_back(t.left, u.left, u.idx);
                }
            }
            sort_reduce_mod2(lhs);
            sort_reduce_mod2(rhs);
            if (lhs != rhs)
                throw ComputeError("coassociativity failure at basis " + labels[i]);
        }
    }
};

inline ComodulePresentation comodule_tensor(const ComodulePresentation& a, const ComodulePresentation& b)
{
    ComodulePresentation out;
    out.coaction_level = (a.coaction_level < 0) ? b.coaction_level
                         : (b.coaction_level < 0 ? a.coaction_level
                                                 : std::min(a.coaction_level, b.coaction_level));
    for (uint32_t i = 0; i < a.dim(); ++i)
        for (uint32_t j = 0; j < b.dim(); ++j) {
            out.labels.push_back(a.labels[i] + "*" + b.labels[j]);
            out.degrees.push_back(a.degrees[i] + b.degrees[j]);
            out.monomials.push_back(std::nullopt);
        }
    out.coaction.resize(out.dim());
    for (uint32_t i = 0; i < a.dim(); ++i)
        for (uint32_t j = 0; j < b.dim(); ++j) {
            Coaction terms;
            for (const auto& ta : a.coaction[i])
                for (const auto& tb : b.coaction[j])
                    terms.push_back(CoactionTerm{alg::xi_mul(ta.left, tb.left),
                                                 ta.idx * (uint32_t)b.dim() + tb.idx});
            sort_reduce_mod2(terms);
            out.coaction[i * b.dim() + j] = std::move(terms);
        }
    return out;
}

inline ComodulePresentation comodule_suspend(const ComodulePresentation& c, int t)
{
    ComodulePresentation out = c;
    for (auto& d : out.degrees)
        d += t;
    for (auto& m : out.monomials)
        m = std::nullopt;
    return out;
}

// Dual module of a finite comodule, graded so that degrees are kept:
// <a . f_w, c_v> = <a (x) f_w, psi(c_v)>.
inline GradedModule dual_module_of_comodule(const ComodulePresentation& c, SlicePtr slice)
{
    c.require_valid_shape();
    if (slice->is_finite() && c.coaction_level >= 0 && slice->level() > c.coaction_level)
        throw ComputeError("comodule level too small for requested slice");
    if (!slice->is_finite() && c.coaction_level >= 0)
        throw ComputeError("quotient-level comodule cannot be dualized over the full algebra");
    GradedModule m(slice, c.labels, c.degrees);
    std::map<Expo, std::vector<IndexSum>> table;
    for (uint32_t v = 0; v < c.dim(); ++v)
        for (const auto& t : c.coaction[v]) {
            if (t.left.is_unit())
                continue;
            MilnorElement a{Expo(t.left.e)};
            if (!slice->contains(a))
                continue;
            auto& rows = table[a.r];
            rows.resize(c.dim());
            rows[t.idx].push_back(v);
        }
    for (auto& [re, rows] : table)
        for (uint32_t w = 0; w < rows.size(); ++w)
            if (!rows[w].empty()) {
                sort_reduce_mod2(rows[w]);
                if (!rows[w].empty())
                    m.set_action(MilnorElement{Expo(re)}, w, rows[w]);
            }
    return m;
}

// Comodule presentation of a module (inverse of the above, degree-capped by
// the module spread for truncated slices).
inline ComodulePresentation comodule_of_module(const GradedModule& m)
{
    ComodulePresentation c;
    c.labels = m.labels();
    c.degrees = m.degrees();
    c.monomials.assign(m.dim(), std::nullopt);
    c.coaction.resize(m.dim());
    c.coaction_level = m.slice().is_finite() ? m.slice().level() : -1;
    for (uint32_t i = 0; i < m.dim(); ++i)
        c.coaction[i].push_back(CoactionTerm{XiMonomial(), i});
    for (const auto& [re, rows] : m.raw_action()) {
        XiMonomial x{Expo(re)};
        for (uint32_t src = 0; src < rows.size(); ++src)
            for (uint32_t tgt : rows[src])
                c.coaction[tgt].push_back(CoactionTerm{x, src});
    }
    for (auto& co : c.coaction)
        sort_reduce_mod2(co);
    return c;
}

// ---------------------------------------------------------------------------
// Operations on modules.

inline GradedModule dualize(const GradedModule& m)
{
    std::vector<std::string> labels;
    std::vector<int> degrees;
    for (uint32_t i = 0; i < m.dim(); ++i) {
        labels.push_back("D" + m.label(i));
        degrees.push_back(-m.degree(i));
    }
    GradedModule d(m.slice_ptr(), std::move(labels), std::move(degrees));
    for (const auto& [re, rows] : m.raw_action()) {
        std::vector<IndexSum> transposed(m.dim());
        for (uint32_t src = 0; src < rows.size(); ++src)
            for (uint32_t tgt : rows[src])
                transposed[tgt].push_back(src);
        for (uint32_t w = 0; w < m.dim(); ++w)
            if (!transposed[w].empty()) {
                sort_reduce_mod2(transposed[w]);
                d.set_action(MilnorElement{Expo(re)}, w, transposed[w]);
            }
    }
    return d;
}

inline GradedModule tensor(const GradedModule& a, const GradedModule& b)
{
    if (!a.slice().same(b.slice()))
        throw ComputeError("tensor: slices differ");
    size_t nb = b.dim();
    std::vector<std::string> labels;
    std::vector<int> degrees;
    for (uint32_t i = 0; i < a.dim(); ++i)
        for (uint32_t j = 0; j < nb; ++j) {
            labels.push_back(a.label(i) + "*" + b.label(j));
            degrees.push_back(a.degree(i) + b.degree(j));
        }
    GradedModule out(a.slice_ptr(), std::move(labels), std::move(degrees));

    int sp = out.spread();
    for (int d = 1; d <= std::min(sp, a.slice().t_max()); ++d)
        for (const auto& op : a.slice().basis(d)) {
            // Cartan: op acts through all splittings op = op' + op''.
            auto splittings = alg::milnor_coproduct(op);
            bool any = false;
            std::vector<IndexSum> rows(out.dim());
            for (uint32_t i = 0; i < a.dim(); ++i)
                for (uint32_t j = 0; j < nb; ++j) {
                    IndexSum acc;
                    for (const auto& [l, r] : splittings) {
                        IndexSum ai = l.is_unit() ? IndexSum{i} : a.act(l, i);
                        if (ai.empty())
                            continue;
                        IndexSum bj = r.is_unit() ? IndexSum{j} : b.act(r, j);
                        if (bj.empty())
                            continue;
                        IndexSum term;
                        for (uint32_t x : ai)
                            for (uint32_t y : bj)
                                term.push_back(x * (uint32_t)nb + y);
                        sort_reduce_mod2(term);
                        acc = add_mod2(acc, term);
                    }
                    if (!acc.empty()) {
                        rows[i * nb + j] = std::move(acc);
                        any = true;
                    }
                }
            if (any)
                for (uint32_t s = 0; s < rows.size(); ++s)
                    if (!rows[s].empty())
                        out.set_action(op, s, std::move(rows[s]));
        }
    return out;
}

// Quotient by the span of basis elements above the cap (a submodule, since
// the action raises degree); Ext is unchanged in internal degrees <= cap.
struct TruncatedModule {
    GradedModule module;
    std::vector<uint32_t> full_index;    /* new -> old */
    std::vector<uint32_t> new_index;     /* old -> new, ~0 when dropped */
};

inline TruncatedModule truncate_module_above(const GradedModule& m, int cap)
{
    TruncatedModule out;
    out.new_index.assign(m.dim(), ~uint32_t(0));
    std::vector<std::string> labels;
    std::vector<int> degrees;
    for (uint32_t i = 0; i < m.dim(); ++i)
        if (m.degree(i) <= cap) {
            out.new_index[i] = (uint32_t)labels.size();
            out.full_index.push_back(i);
            labels.push_back(m.label(i));
            degrees.push_back(m.degree(i));
        }
    GradedModule t(m.slice_ptr(), std::move(labels), std::move(degrees));
    for (const auto& [re, rows] : m.raw_action()) {
        MilnorElement a{Expo(re)};
        for (uint32_t src = 0; src < rows.size(); ++src) {
            if (out.new_index[src] == ~uint32_t(0))
                continue;
            IndexSum mapped;
            for (uint32_t tgt : rows[src])
                if (out.new_index[tgt] != ~uint32_t(0))
                    mapped.push_back(out.new_index[tgt]);
            if (!mapped.empty())
                t.set_action(a, out.new_index[src], std::move(mapped));
        }
    }
    out.module = std::move(t);
    return out;
}

inline GradedModule restrict_module(const GradedModule& m, SlicePtr target)
{
    if (!target->sub_slice_of(m.slice()))
        throw ComputeError("restrict: target slice not contained in source");
    if (m.dim() && m.spread() > m.slice().t_max())
        throw ComputeError("restrict: module spread exceeds the source degree cap");
    GradedModule out(target, m.labels(), m.degrees());
    for (const auto& [re, rows] : m.raw_action()) {
        MilnorElement a{Expo(re)};
        if (!target->contains(a))
            continue;
        for (uint32_t s = 0; s < rows.size(); ++s)
            if (!rows[s].empty())
                out.set_action(a, s, rows[s]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Module definition files: `gen <label> <degree>` and
// `act Sq^<2^k> <label> = <label> [+ <label> ...]`, with `#` comments.
// The loader names actions only on the Sq(2^k) generators and completes the
// table degree by degree; inconsistent input surfaces as a validation
// failure.

namespace detail {

inline bool is_power_of_two(uint32_t v)
{
    return v && !(v & (v - 1));
}

// Completes the action table: every basis element of positive degree within
// the module spread is expressed through products of Sq(2^k) with lower
// basis elements, and its action is derived accordingly.
inline void complete_action_table(GradedModule& m,
                                  const std::map<uint32_t, std::vector<IndexSum>>& gen_action)
{
    const AlgebraSlice& slice = m.slice();
    int sp = m.spread();
    auto gen_act = [&](uint32_t k, uint32_t src) -> IndexSum {
        auto it = gen_action.find(k);
        if (it == gen_action.end() || src >= it->second.size())
            return {};
        return it->second[src];
    };
    for (int d = 1; d <= std::min(sp, slice.t_max()); ++d) {
        const auto& basis = slice.basis(d);
        if (basis.empty())
            continue;
        // Domain: pairs (2^k, c) with c in degree d - 2^k, plus Sq(d) itself
        // when d is a power of two.
        struct Piece {
            uint32_t k;                      /* Sq(2^k)... */
            std::optional<MilnorElement> c;  /* ...times c; nullopt = Sq(d) alone */
        };
        std::vector<Piece> pieces;
        for (uint32_t k = 0; (1u << k) <= (uint32_t)d; ++k) {
            uint32_t sq = 1u << k;
            if ((int)sq == d) {
                MilnorElement self{Expo{sq}};
                if (slice.contains(self))
                    pieces.push_back(Piece{sq, std::nullopt});
                continue;
            }
            for (const auto& c : slice.basis(d - (int)sq)) {
                MilnorElement sqk{Expo{sq}};
                if (!slice.contains(sqk))
                    continue;
                pieces.push_back(Piece{sq, c});
            }
        }
        f2::SolveContext ctx(pieces.size(), basis.size());
        for (const auto& p : pieces) {
            f2::BitVector img((uint32_t)basis.size());
            if (!p.c.has_value()) {
                MilnorElement self{Expo{p.k}};
                img.set(slice.index_of(self));
            }
            else {
                for (const auto& prod : alg::milnor_product(MilnorElement{Expo{p.k}}, *p.c, slice))
                    img.flip(slice.index_of(prod));
            }
            ctx.add_generator(std::move(img));
        }
        for (const auto& b : basis) {
            f2::BitVector target((uint32_t)basis.size());
            target.set(slice.index_of(b));
            auto expr = ctx.solve(std::move(target));
            if (!expr.has_value())
                throw ComputeError("slice not generated by Sq(2^k) in degree " + std::to_string(d));
            // action(b) = sum of Sq(2^k) . (c . -) over selected pieces
            std::vector<IndexSum> rows_b(m.dim());
            bool any = false;
            for (size_t pi = 0; pi < pieces.size(); ++pi) {
                if (!expr->get(pi))
                    continue;
                const Piece& p = pieces[pi];
                for (uint32_t v = 0; v < m.dim(); ++v) {
                    IndexSum inner = p.c.has_value()
                                         ? (p.c->is_unit() ? IndexSum{v} : m.act(*p.c, v))
                                         : IndexSum{v};
                    IndexSum res;
                    for (uint32_t w : inner)
                        res = add_mod2(res, gen_act(p.k, w));
                    if (!res.empty()) {
                        rows_b[v] = add_mod2(rows_b[v], res);
                        any = true;
                    }
                }
            }
            if (any)
                for (uint32_t v = 0; v < m.dim(); ++v)
                    if (!rows_b[v].empty())
                        m.set_action(b, v, std::move(rows_b[v]));
        }
    }
}

}  // namespace detail

inline GradedModule load_module(const std::string& text, SlicePtr slice)
{
    std::vector<std::string> labels;
    std::vector<int> degrees;
    std::map<std::string, uint32_t> index;
    struct ActLine {
        uint32_t sq;
        uint32_t src;
        IndexSum targets;
    };
    std::vector<ActLine> acts;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word))
            continue;
        if (word == "gen") {
            std::string label;
            int deg;
            if (!(ls >> label >> deg))
                throw ComputeError("bad gen line " + std::to_string(lineno));
            if (index.count(label))
                throw ComputeError("duplicate generator " + label);
            index[label] = (uint32_t)labels.size();
            labels.push_back(label);
            degrees.push_back(deg);
        }
        else if (word == "act") {
            std::string op, src, eq;
            if (!(ls >> op >> src >> eq) || eq != "=")
                throw ComputeError("bad act line " + std::to_string(lineno));
            if (op.substr(0, 3) != "Sq^")
                throw ComputeError("act operator must be Sq^<2^k>, line " + std::to_string(lineno));
            uint32_t sq = (uint32_t)std::stoul(op.substr(3));
            if (!detail::is_power_of_two(sq))
                throw ComputeError("act operator exponent must be a power of two, line " +
                                   std::to_string(lineno));
            if (!index.count(src))
                throw ComputeError("unknown generator " + src);
            ActLine a;
            a.sq = sq;
            a.src = index[src];
            std::string tok;
            bool expect_term = true;
            while (ls >> tok) {
                if (tok == "+") {
                    expect_term = true;
                    continue;
                }
                if (!expect_term)
                    throw ComputeError("missing + in act line " + std::to_string(lineno));
                if (!index.count(tok))
                    throw ComputeError("unknown generator " + tok);
                a.targets.push_back(index[tok]);
                expect_term = false;
            }
            if (a.targets.empty())
                throw ComputeError("empty act right-hand side, line " + std::to_string(lineno));
            sort_reduce_mod2(a.targets);
            acts.push_back(std::move(a));
        }
        else
            throw ComputeError("unknown directive '" + word + "' on line " + std::to_string(lineno));
    }
    GradedModule m(slice, labels, degrees);
    std::map<uint32_t, std::vector<IndexSum>> gen_action;
    for (const auto& a : acts) {
        auto& rows = gen_action[a.sq];
        rows.resize(m.dim());
        if (!rows[a.src].empty())
            throw ComputeError("duplicate act line for Sq^" + std::to_string(a.sq) + " " +
                               labels[a.src]);
        rows[a.src] = a.targets;
        for (uint32_t t : a.targets)
            if (degrees[t] != degrees[a.src] + (int)a.sq)
                throw ComputeError("act degree mismatch for " + labels[a.src]);
    }
    detail::complete_action_table(m, gen_action);
    m.validate();
    return m;
}

inline std::string save_module(const GradedModule& m)
{
    std::ostringstream out;
    for (uint32_t i = 0; i < m.dim(); ++i)
        out << "gen " << m.label(i) << " " << m.degree(i) << "\n";
    // Emit only the Sq(2^k) action lines, ordered by exponent then source.
    std::vector<uint32_t> sqs;
    for (const auto& [re, rows] : m.raw_action())
        if (re.size() == 1 && detail::is_power_of_two(re[0]))
            sqs.push_back(re[0]);
    std::sort(sqs.begin(), sqs.end());
    for (uint32_t sq : sqs) {
        auto it = m.raw_action().find(Expo{sq});
        for (uint32_t src = 0; src < it->second.size(); ++src) {
            const IndexSum& targets = it->second[src];
            if (targets.empty())
                continue;
            out << "act Sq^" << sq << " " << m.label(src) << " =";
            for (size_t k = 0; k < targets.size(); ++k)
                out << (k ? " + " : " ") << m.label(targets[k]);
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Derived objects: a module with shift bookkeeping, or the cone on the
// unique Ext class at a stated (s,t) position of Ext(base, base).  H(1,4)
// exists only in this form.

struct ConeSpec {
    int s = 0, t = 0; /* class position in Ext^{s,t}(base, base); must be 1-dimensional */
    bool operator==(const ConeSpec& o) const { return s == o.s && t == o.t; }
};

struct DerivedObject {
    GradedModule base;
    std::optional<ConeSpec> cone;
    int t_shift = 0; /* Sigma^t */
    int s_shift = 0; /* [s] */

    bool is_plain() const { return !cone.has_value(); }
};

inline DerivedObject suspend_shift(DerivedObject x, int t, int s)
{
    x.t_shift += t;
    x.s_shift += s;
    return x;
}

// Re-indexing rule: Ext^{s,t}(Sigma^a X[b]) = Ext^{s+b, t-a}(X).
inline std::pair<int, int> unshift_bidegree(const DerivedObject& x, int s, int t)
{
    return {s + x.s_shift, t - x.t_shift};
}

// ---------------------------------------------------------------------------
// Built-in objects.

using Builtin = std::variant<GradedModule, DerivedObject>;

inline GradedModule builtin_module(const std::string& name, SlicePtr slice);

inline ComodulePresentation m21_comodule_presentation()
{
    // The weight-8 slice of (A//A(2))_*: xi1^8, xi2^4, xi3^2, xi4; an
    // A(2)_*-comodule.
    ComodulePresentation c;
    std::vector<XiMonomial> basis = {XiMonomial{Expo{8}}, XiMonomial{Expo{0, 4}},
                                     XiMonomial{Expo{0, 0, 2}}, XiMonomial{Expo{0, 0, 0, 1}}};
    std::sort(basis.begin(), basis.end(), alg::deg_lex_less);
    c.coaction_level = 2;
    for (const auto& m : basis) {
        c.labels.push_back(m.text());
        c.degrees.push_back(m.degree());
        c.monomials.push_back(m);
    }
    c.coaction.resize(basis.size());
    for (uint32_t i = 0; i < basis.size(); ++i) {
        Coaction terms;
        for (const auto& [l, r] : alg::coproduct_monomial(basis[i], 2)) {
            if (!alg::in_dual_subalgebra(l, 2))
                continue;
            auto it = std::lower_bound(basis.begin(), basis.end(), r, alg::deg_lex_less);
            if (it == basis.end() || !(*it == r))
                throw ComputeError("M_2(1) coaction escapes the weight-8 slice");
            terms.push_back(CoactionTerm{l, (uint32_t)(it - basis.begin())});
        }
        sort_reduce_mod2(terms);
        c.coaction[i] = std::move(terms);
    }
    return c;
}

inline GradedModule builtin_module(const std::string& name, SlicePtr slice)
{
    auto simple = [&](std::vector<std::string> labels, std::vector<int> degrees,
                      std::vector<std::tuple<uint32_t, uint32_t, IndexSum>> acts) {
        GradedModule m(slice, std::move(labels), std::move(degrees));
        std::map<uint32_t, std::vector<IndexSum>> gen_action;
        for (auto& [sq, src, tg] : acts) {
            auto& rows = gen_action[sq];
            rows.resize(m.dim());
            rows[src] = tg;
        }
        detail::complete_action_table(m, gen_action);
        return m;
    };
    if (name == "F2")
        return simple({"e0"}, {0}, {});
    if (name == "H1")
        return simple({"e0", "e1"}, {0, 1}, {{1u, 0u, IndexSum{1}}});
    if (name == "DH1")
        return simple({"e-1", "e0"}, {-1, 0}, {{1u, 0u, IndexSum{1}}});
    if (name == "Ceta")
        return simple({"e0", "e2"}, {0, 2}, {{2u, 0u, IndexSum{1}}});
    if (name == "H1xDH1")
        return tensor(builtin_module("H1", slice), builtin_module("DH1", slice));
    if (name == "M21") {
        if (!slice->is_finite())
            throw ComputeError("M21 is a comodule over A(2)_* only; use slice A0, A1 or A2");
        return dual_module_of_comodule(m21_comodule_presentation(), slice);
    }
    throw ComputeError("unknown module name: " + name);
}

inline Builtin builtin(const std::string& name, SlicePtr slice)
{
    if (name == "H14")
        return DerivedObject{builtin_module("H1", slice), ConeSpec{4, 12}, 0, 0};
    if (name == "DH14")
        return DerivedObject{builtin_module("H1", slice), ConeSpec{4, 12}, -13, 3};
    return builtin_module(name, slice);
}

}  // namespace extcharts::mod
