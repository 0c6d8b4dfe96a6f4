#pragma once

#include "modules.hpp"
#include "resolution.hpp"

// Ext of derived objects: plain modules with shift bookkeeping, cones over
// a stated Ext class (the H(1,4) construction), and their tensor products
// with a module.  Also the h_i product ledger and the deep Ext facts used
// in the v_2^8 lifting argument.

namespace extcharts::res {

using mod::DerivedObject;
using mod::GradedModule;

// Re-index a table: the table of Sigma^a Y[b] evaluated from the table of Y,
// i.e. out(s, t) = in(s + b, t - a).
inline ExtTable shift_table(const ExtTable& in, int a, int b)
{
    ExtTable out;
    out.s_max = in.s_max - b;
    out.t_max = in.t_max + a;
    for (const auto& [st, d] : in.dims)
        out.set(st.first - b, st.second + a, d);
    return out;
}

// The unique class at Ext^{s,t}(base, base); throws when the dimension is
// not 1 (the construction depends on uniqueness).
inline CocycleInto unique_self_class(const FreeChainComplex& p, const GradedModule& base, int s,
                                     int t)
{
    ExtBetween eb = ext_between_complex(p, base, s, t);
    int d = eb.table.dim(s, t);
    if (d != 1)
        throw ComputeError("Ext^{" + std::to_string(s) + "," + std::to_string(t) +
                           "}(base,base) has dimension " + std::to_string(d) +
                           ", expected 1; aborting cone construction");
    return eb.reps.at({s, t}).front();
}

namespace detail {

// W (x) Q viewed as a resolution of W (x) base, with explicit per-degree
// bases (w, gen, algebra element).  Used to transport a self-class of the
// base to the tensor product.
class TensorView {
public:
    TensorView(const GradedModule& w, const FreeChainComplex& q) : w_(w), q_(q) {}

    struct Layout {
        std::vector<uint32_t> wv, gen;
        std::vector<int> alg_degree;
        std::vector<uint32_t> offset;
        uint32_t dim = 0;
    };

    Layout layout(int i, int t) const
    {
        Layout lay;
        for (uint32_t wv = 0; wv < w_.dim(); ++wv) {
            FreeChainComplex::Layout ql = q_.layout(i, t - w_.degree(wv));
            for (size_t blk = 0; blk < ql.gen.size(); ++blk) {
                lay.wv.push_back(wv);
                lay.gen.push_back(ql.gen[blk]);
                lay.alg_degree.push_back(ql.alg_degree[blk]);
                lay.offset.push_back(lay.dim);
                lay.dim += (uint32_t)q_.slice->dim(ql.alg_degree[blk]);
            }
        }
        return lay;
    }

    uint32_t index_in(const Layout& lay, uint32_t wv, uint32_t gen, int alg_degree,
                      uint32_t alg_idx) const
    {
        for (size_t b = 0; b < lay.wv.size(); ++b)
            if (lay.wv[b] == wv && lay.gen[b] == gen && lay.alg_degree[b] == alg_degree)
                return lay.offset[b] + alg_idx;
        throw ComputeError("TensorView: block not found");
    }

    // 1 (x) d_Q on a basis element, expanded over the stage-(i-1) layout; at
    // i = 0 the augmentation into W (x) base (module coordinates of
    // mod::tensor(w, base)).
    f2::BitVector diff_row(int i, uint32_t wv, uint32_t gen, const alg::MilnorElement& b, int t,
                           const Layout& cod) const
    {
        if (i == 0) {
            const GradedModule& base = *q_.module;
            f2::BitVector out((uint32_t)(w_.dim() * base.dim()));
            IndexSum img = b.is_unit() ? q_.aug[0][gen] : base.act_sum(b, q_.aug[0][gen]);
            for (uint32_t v : img)
                out.flip(wv * (uint32_t)base.dim() + v);
            return out;
        }
        f2::BitVector out(cod.dim);
        for (const auto& [tgt, entry] : q_.diff[i][gen])
            for (const auto& a : entry) {
                alg::MilnorSum prod = q_.slice->multiply(b, a);
                for (const auto& pm : prod)
                    out.flip(index_in(cod, wv, tgt, pm.degree(), q_.slice->index_of(pm)));
            }
        return out;
    }

    // action of an algebra element on a vector in the (i, t) layout (Cartan
    // through the W factor).
    f2::BitVector act(const alg::MilnorElement& a, int i, int t, const Layout& dom,
                      const f2::BitVector& v) const
    {
        Layout cod = layout(i, t + a.degree());
        f2::BitVector out(cod.dim);
        auto splittings = alg::milnor_coproduct(a);
        for (size_t blk = 0; blk < dom.wv.size(); ++blk) {
            const auto& basis = q_.slice->basis(dom.alg_degree[blk]);
            for (uint32_t bi = 0; bi < basis.size(); ++bi) {
                if (!v.get(dom.offset[blk] + bi))
                    continue;
                for (const auto& [a1, a2] : splittings) {
                    IndexSum wimg = a1.is_unit() ? IndexSum{dom.wv[blk]} : w_.act(a1, dom.wv[blk]);
                    if (wimg.empty())
                        continue;
                    alg::MilnorSum bimg = a2.is_unit() ? alg::MilnorSum{basis[bi]}
                                                       : q_.slice->multiply(a2, basis[bi]);
                    for (uint32_t wv2 : wimg)
                        for (const auto& pm : bimg)
                            out.flip(index_in(cod, wv2, dom.gen[blk], pm.degree(),
                                              q_.slice->index_of(pm)));
                }
            }
        }
        return out;
    }

    f2::SolveContext& solver(int i, int t)
    {
        auto key = std::make_pair(i, t);
        auto it = solvers_.find(key);
        if (it != solvers_.end())
            return it->second;
        Layout dom = layout(i, t);
        Layout cod = i == 0 ? Layout{} : layout(i - 1, t);
        uint32_t cod_dim = i == 0 ? (uint32_t)(w_.dim() * q_.module->dim()) : cod.dim;
        f2::SolveContext ctx(dom.dim, cod_dim);
        for (size_t blk = 0; blk < dom.wv.size(); ++blk) {
            const auto& basis = q_.slice->basis(dom.alg_degree[blk]);
            for (const auto& b : basis)
                ctx.add_generator(diff_row(i, dom.wv[blk], dom.gen[blk], b, t, cod));
        }
        return solvers_.emplace(key, std::move(ctx)).first->second;
    }

    const GradedModule& w() const { return w_; }
    const FreeChainComplex& q() const { return q_; }

private:
    const GradedModule& w_;
    const FreeChainComplex& q_;
    std::map<std::pair<int, int>, f2::SolveContext> solvers_;
};

}  // namespace detail

// Cocycle of (1_W (x) v) on a minimal resolution P of W (x) base, where v is
// a self-class of the base with resolution Q.  Computed through a
// comparison map P -> W (x) Q covering the identity.
// full_of_p / new_of_full translate between the (possibly degree-truncated)
// module resolved by p and the full tensor W (x) base.
inline CocycleInto transport_self_class(const FreeChainComplex& p, const GradedModule& w,
                                        const FreeChainComplex& q, const CocycleInto& v,
                                        const std::vector<uint32_t>& full_of_p,
                                        const std::vector<uint32_t>& new_of_full)
{
    detail::TensorView view(w, q);
    const GradedModule& base = *q.module;
    int sx = v.s, tx = v.t;

    // comparison psi_i : P_i -> W (x) Q_i for i = 0..sx, stored as plain
    // vectors per generator
    std::vector<std::vector<f2::BitVector>> psi(sx + 1);
    for (int i = 0; i <= sx; ++i) {
        psi[i].resize(p.gens_at(i));
        for (uint32_t g = 0; g < (uint32_t)p.gens_at(i); ++g) {
            int t = p.gen_degrees[i][g];
            f2::BitVector rhs;
            if (i == 0) {
                rhs = f2::BitVector((uint32_t)(w.dim() * base.dim()));
                for (uint32_t v0 : p.aug[0][g])
                    rhs.flip(full_of_p[v0]);
            }
            else {
                detail::TensorView::Layout cod = view.layout(i - 1, t);
                rhs = f2::BitVector(cod.dim);
                for (const auto& [tgt, entry] : p.diff[i][g]) {
                    int t_tgt = p.gen_degrees[i - 1][tgt];
                    detail::TensorView::Layout dom_prev = view.layout(i - 1, t_tgt);
                    for (const auto& a : entry)
                        rhs ^= view.act(a, i - 1, t_tgt, dom_prev, psi[i - 1][tgt]);
                }
            }
            auto x = view.solver(i, t).solve(rhs);
            if (!x.has_value())
                throw ComputeError("comparison map: no lift at stage " + std::to_string(i));
            psi[i][g] = *x;
        }
    }

    // compose with 1 (x) v: (wv, q-gen, b) -> wv (x) b.(v values)
    CocycleInto out;
    out.s = sx;
    out.t = tx;
    out.values.resize(p.gens_at(sx));
    for (uint32_t g = 0; g < (uint32_t)p.gens_at(sx); ++g) {
        int t = p.gen_degrees[sx][g];
        detail::TensorView::Layout lay = view.layout(sx, t);
        IndexSum val;
        for (size_t blk = 0; blk < lay.wv.size(); ++blk) {
            const auto& basis = q.slice->basis(lay.alg_degree[blk]);
            for (uint32_t bi = 0; bi < basis.size(); ++bi) {
                if (!psi[sx][g].get(lay.offset[blk] + bi))
                    continue;
                const IndexSum& vv = v.values[lay.gen[blk]];
                IndexSum img = basis[bi].is_unit() ? vv : base.act_sum(basis[bi], vv);
                for (uint32_t b2 : img) {
                    uint32_t full = lay.wv[blk] * (uint32_t)base.dim() + b2;
                    if (new_of_full[full] == ~uint32_t(0))
                        throw ComputeError("transport: cocycle value above the truncation cap");
                    val = add_mod2(val, IndexSum{new_of_full[full]});
                }
            }
        }
        out.values[g] = std::move(val);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full Ext computation of W (x) X for a derived object X.

struct ExtComputation {
    FreeChainComplex complex;            /* minimal complex whose generators are the Ext basis */
    ExtTable table;                      /* after shift re-indexing */
    std::optional<ChainMap> cone_lift;   /* the lifted self-map, when X is a cone */
    FreeChainComplex base_resolution;    /* resolution of W (x) base */
};

// windows are for the unshifted object: the cone table is valid on
// (s_max, t_max); the underlying resolution extends by the class bidegree.
inline ExtComputation ext_of_object(const DerivedObject& x, const GradedModule* w, int s_max,
                                    int t_max)
{
    ExtComputation out;
    const GradedModule& base = x.base;
    int sx = x.cone ? x.cone->s : 0;
    int tx = x.cone ? x.cone->t : 0;
    // the final table re-indexes by the object's shifts; size the unshifted
    // window accordingly
    int s_w = s_max + x.s_shift, t_w = t_max - x.t_shift;
    int sp = s_w + sx, tp = t_w + tx;
    if (base.dim() && base.top_degree() > tp)
        throw ComputeError("window too small for the cone base");
    GradedModule m_full = w ? mod::tensor(*w, base) : base;
    mod::TruncatedModule tr = mod::truncate_module_above(m_full, tp);
    const GradedModule& m = tr.module;
    out.base_resolution = resolve_with_cache(m, sp, tp);
    const FreeChainComplex& p = out.base_resolution;

    if (!x.cone) {
        out.complex = p;
        out.table = shift_table(ext_dims(p), x.t_shift, x.s_shift);
        return out;
    }

    CocycleInto coc;
    if (!w) {
        coc = unique_self_class(p, base, sx, tx);
    }
    else {
        // the comparison map evaluates Q at degrees reaching tp minus the
        // connectivity of W
        int t_q = std::max(tx + std::max(0, base.top_degree()), tp - w->bottom_degree());
        FreeChainComplex q = resolve_with_cache(base, sx + 1, t_q);
        CocycleInto v = unique_self_class(q, base, sx, tx);
        coc = transport_self_class(p, *w, q, v, tr.full_index, tr.new_index);
    }
    ChainMap lift = lift_cocycle(p, coc, p, p.stages() - 1 - sx);
    FreeChainComplex cone = mapping_cone(lift);
    minimize(cone);
    out.cone_lift = std::move(lift);
    out.complex = std::move(cone);
    out.table = shift_table(ext_dims(out.complex), x.t_shift, x.s_shift);
    return out;
}

// Long exact sequence audit for a computed cone: for every (s,t) in the
// window, dim Ext^{s,t}(cone) = dim coker(x.) + dim ker(x.) where x. is
// Yoneda multiplication by the class, computed from the stored lift.
struct ConeLesReport {
    bool pass = false;
    std::vector<std::string> failures;
};

inline ConeLesReport verify_cone_les(const ExtComputation& comp)
{
    ConeLesReport rep;
    if (!comp.cone_lift.has_value()) {
        rep.failures.push_back("not a cone");
        return rep;
    }
    const ChainMap& f = *comp.cone_lift;
    const FreeChainComplex& p = comp.base_resolution;
    int sx = f.sigma, tx = f.tau;
    ExtTable base = ext_dims(p);
    ExtTable cone = ext_dims(comp.complex);

    // multiplication matrices: class basis at (s,t) -> (s+sx, t+tx)
    auto mult_rank = [&](int s, int t) -> std::pair<int, int> {
        int dom = base.dim(s, t);
        int cod = base.dim(s + sx, t + tx);
        if (!dom)
            return {0, 0};
        if (!cod)
            return {0, dom};
        f2::BitMatrix m(dom, cod);
        for (int i = 0; i < dom; ++i) {
            ExtClass y;
            y.s = s;
            y.t = t;
            y.gens = {(uint32_t)i};
            ExtClass prod = compose_class(y, f);
            for (uint32_t k : prod.gens)
                m.set(i, k);
        }
        return {(int)f2::rank(m), dom};
    };

    for (int s = 0; s <= comp.complex.s_limit; ++s)
        for (int t = 0; t <= comp.complex.t_limit; ++t) {
            int want = cone.dim(s, t);
            // coker of mult into (s,t) and ker of mult out of (s-sx+1,t-tx)
            auto [rk_in, dom_in] = mult_rank(s - sx, t - tx);
            (void)dom_in;
            int coker = base.dim(s, t) - rk_in;
            auto [rk_out, dom_out] = mult_rank(s - sx + 1, t - tx);
            int ker = dom_out - rk_out;
            if (want != coker + ker)
                rep.failures.push_back("LES mismatch at (s,t)=(" + std::to_string(s) + "," +
                                       std::to_string(t) + "): cone " + std::to_string(want) +
                                       " vs coker " + std::to_string(coker) + " + ker " +
                                       std::to_string(ker));
        }
    rep.pass = rep.failures.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// h_i products and the named-class ledger.

// Classes h_i = the stage-1 generators of the F2 resolution in degree 2^i.
inline std::optional<ExtClass> h_class(const FreeChainComplex& res_f2, int i)
{
    int want = 1 << i;
    if (res_f2.stages() < 2)
        return std::nullopt;
    for (int d : res_f2.gen_degrees[1])
        if (d == want)
            return ExtClass{1, want, {0}};
    return std::nullopt;
}

// Product ledger: h_i multiplications out of every generator of the table.
inline std::vector<ExtProductEntry> hi_products(const FreeChainComplex& p,
                                                const FreeChainComplex& res_f2, int i_max = 2)
{
    std::vector<ExtProductEntry> ledger;
    for (int s = 0; s + 1 < p.stages(); ++s) {
        std::map<int, int> seen;
        for (uint32_t g = 0; g < p.gen_degrees[s].size(); ++g) {
            int t = p.gen_degrees[s][g];
            int idx = seen[t]++;
            if (t > p.t_limit || s > p.s_limit)
                continue;
            ExtClass cls{s, t, {(uint32_t)idx}};
            ChainMap lift = lift_cocycle(p, cocycle_of_class(p, cls), res_f2, 1);
            for (int i = 0; i <= i_max; ++i) {
                auto hi = h_class(res_f2, i);
                if (!hi.has_value())
                    continue;
                if (t + hi->t > p.t_limit || s + 1 > p.s_limit)
                    continue;
                ExtClass prod = compose_class(*hi, lift);
                if (prod.is_zero())
                    continue;
                ExtProductEntry e;
                e.op = "h" + std::to_string(i);
                e.s = s;
                e.t = t;
                e.index = (uint32_t)idx;
                e.targets = prod.gens;
                ledger.push_back(std::move(e));
            }
        }
    }
    return ledger;
}

// ---------------------------------------------------------------------------
// Named-class ledger.  Classes the literature names via May-spectral-sequence
// provenance are identified here by bidegree only and tagged as candidates;
// an empty bidegree simply yields no label.  The v2-power positions are
// recorded relative to H(1,4) over A(2).

inline void register_named_classes(ExtTable& table, const AlgebraSlice& slice,
                                   const std::string& object)
{
    auto tag = [&](const std::string& name, int s, int t) {
        if (table.dim(s, t) > 0)
            table.named[name] = {{s, t}, 0};
    };
    if (object == "F2") {
        for (int i = 0; i <= 6; ++i)
            if ((1 << i) <= table.t_max && (slice.kind() == alg::SliceKind::Truncated || i <= slice.level()))
                tag("h" + std::to_string(i), 1, 1 << i);
        if (slice.is_finite() && slice.level() == 2) {
            tag("candidate-g", 4, 24);
            tag("candidate-h21", 1, 6); /* expected absent: a May-only name */
        }
        if (!slice.is_finite())
            tag("candidate-e0r", 10, 57);
    }
    if (object == "H14" && slice.is_finite() && slice.level() == 2)
        for (int k : {1, 2, 4})
            tag("v2^" + std::to_string(8 * k), 8 * k, 56 * k);
}

// ---------------------------------------------------------------------------
// The three Ext facts over the full algebra feeding the v2^8 argument:
//   (1) Ext^{9,56}(H(1)) = 0
//   (2) h_0 annihilates Ext^{5,44}(H(1))
//   (3) h_0 : Ext^{8,56}(H(1)) -> Ext^{9,57}(H(1)) is surjective.

struct Facts43Report {
    bool fact1 = false, fact2 = false, fact3 = false;
    int dim_9_56 = -1, dim_5_44 = -1, dim_8_56 = -1, dim_9_57 = -1;
    bool pass() const { return fact1 && fact2 && fact3; }
};

inline Facts43Report prop43_facts(const FreeChainComplex& res_h1, const FreeChainComplex& res_f2)
{
    if (res_h1.s_limit < 10 || res_h1.t_limit < 58)
        throw ComputeError("prop43_facts needs the H(1) resolution to (10,58)");
    Facts43Report rep;
    ExtTable tab = ext_dims(res_h1);
    rep.dim_9_56 = tab.dim(9, 56);
    rep.dim_5_44 = tab.dim(5, 44);
    rep.dim_8_56 = tab.dim(8, 56);
    rep.dim_9_57 = tab.dim(9, 57);
    rep.fact1 = rep.dim_9_56 == 0;

    auto h0 = h_class(res_f2, 0);
    if (!h0.has_value())
        throw ComputeError("h0 missing from the F2 resolution");

    rep.fact2 = true;
    for (int i = 0; i < rep.dim_5_44; ++i) {
        ExtClass x{5, 44, {(uint32_t)i}};
        ChainMap lift = lift_cocycle(res_h1, cocycle_of_class(res_h1, x), res_f2, 1);
        if (!compose_class(*h0, lift).is_zero())
            rep.fact2 = false;
    }

    f2::BitMatrix mult(rep.dim_8_56, rep.dim_9_57);
    for (int i = 0; i < rep.dim_8_56; ++i) {
        ExtClass x{8, 56, {(uint32_t)i}};
        ChainMap lift = lift_cocycle(res_h1, cocycle_of_class(res_h1, x), res_f2, 1);
        ExtClass prod = compose_class(*h0, lift);
        for (uint32_t k : prod.gens)
            mult.set(i, k);
    }
    rep.fact3 = (int)f2::rank(mult) == rep.dim_9_57;
    return rep;
}

}  // namespace extcharts::res
