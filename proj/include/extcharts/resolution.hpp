#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "f2linalg.hpp"
#include "modules.hpp"

// Minimal free resolutions over an algebra slice, Ext tables, chain-map
// lifting, Yoneda products and mapping cones.  Differentials are stored as
// matrices with formal-sum entries; a resolution is minimal when every
// entry lies in the augmentation ideal, so stage-s generators in internal
// degree t biject with a basis of Ext^{s,t}.

namespace extcharts::res {

using alg::AlgebraSlice;
using alg::Expo;
using alg::MilnorElement;
using alg::MilnorSum;
using alg::SlicePtr;
using mod::GradedModule;
using mod::IndexSum;

// one differential row: sorted by target generator index
using Row = std::vector<std::pair<uint32_t, MilnorSum>>;

inline void row_add_term(Row& row, uint32_t tgt, const MilnorSum& sum)
{
    if (sum.empty())
        return;
    auto it = std::lower_bound(row.begin(), row.end(), tgt,
                               [](const auto& p, uint32_t v) { return p.first < v; });
    if (it != row.end() && it->first == tgt) {
        it->second = add_mod2(it->second, sum);
        if (it->second.empty())
            row.erase(it);
    }
    else
        row.insert(it, {tgt, sum});
}

class FreeChainComplex {
public:
    SlicePtr slice;
    std::optional<GradedModule> module;        /* resolved module; nullopt for cones */
    std::vector<std::vector<int>> gen_degrees; /* per stage */
    std::vector<std::vector<IndexSum>> aug;    /* stage-0 images in module coordinates */
    std::vector<std::vector<Row>> diff;        /* diff[s][g], s >= 1 */
    int s_limit = 0, t_limit = 0;              /* valid window */

    int stages() const { return (int)gen_degrees.size(); }
    int gens_at(int s) const { return s < stages() ? (int)gen_degrees[s].size() : 0; }

    int gens_at(int s, int t) const
    {
        if (s >= stages())
            return 0;
        int c = 0;
        for (int d : gen_degrees[s])
            if (d == t)
                ++c;
        return c;
    }

    // Free-module slice F_{s,t}: pairs (generator, algebra basis element).
    struct Layout {
        std::vector<uint32_t> gen;     /* per block */
        std::vector<int> alg_degree;   /* per block */
        std::vector<uint32_t> offset;  /* per block */
        uint32_t dim = 0;

        uint32_t index(uint32_t block, uint32_t alg_idx) const { return offset[block] + alg_idx; }
    };

    Layout layout(int s, int t) const
    {
        Layout lay;
        if (s < 0 || s >= stages())
            return lay;
        for (uint32_t g = 0; g < gen_degrees[s].size(); ++g) {
            int ad = t - gen_degrees[s][g];
            if (ad < 0)
                continue;
            int dim = slice->dim(ad);
            if (!dim)
                continue;
            lay.gen.push_back(g);
            lay.alg_degree.push_back(ad);
            lay.offset.push_back(lay.dim);
            lay.dim += (uint32_t)dim;
        }
        return lay;
    }

    // block lookup for generator g in a layout
    static int find_block(const Layout& lay, uint32_t g)
    {
        for (size_t b = 0; b < lay.gen.size(); ++b)
            if (lay.gen[b] == g)
                return (int)b;
        return -1;
    }

    // d(b * g) expanded over the stage-(s-1) layout (or over module
    // coordinates in the given degree when s == 0).
    f2::BitVector apply_diff(int s, uint32_t g, const MilnorElement& b, int t,
                             const Layout& cod) const
    {
        if (s == 0) {
            f2::BitVector img_vec(module_dim(t));
            IndexSum img = b.is_unit() ? aug[0][g] : module->act_sum(b, aug[0][g]);
            for (uint32_t v : img)
                img_vec.flip(module_index(t, v));
            return img_vec;
        }
        f2::BitVector out(cod.dim);
        int bd = b.degree();
        uint32_t bi = b.is_unit() ? 0 : slice->index_of(b);
        for (const auto& [tgt, entry] : diff[s][g]) {
            int block = find_block(cod, tgt);
            if (block < 0)
                continue; /* the slice is zero in that degree, so is the product */
            for (const auto& m : entry) {
                if (b.is_unit()) {
                    out.flip(cod.index((uint32_t)block, slice->index_of(m)));
                    continue;
                }
                int md = m.degree();
                uint32_t mi = slice->index_of(m);
                for (uint32_t p : slice->product(bd, bi, md, mi))
                    out.flip(cod.index((uint32_t)block, p));
            }
        }
        return out;
    }

    // Matrix of d_s at internal degree t; rows follow the F_{s,t} layout.
    f2::BitMatrix matrix(int s, int t) const
    {
        Layout dom = layout(s, t);
        Layout cod = s == 0 ? Layout{} : layout(s - 1, t);
        uint32_t cod_dim = s == 0 ? module_dim(t) : cod.dim;
        f2::BitMatrix m(dom.dim, cod_dim);
        for (size_t blk = 0; blk < dom.gen.size(); ++blk) {
            const auto& basis = slice->basis(dom.alg_degree[blk]);
            for (uint32_t bi = 0; bi < basis.size(); ++bi) {
                f2::BitVector img = apply_diff(s, dom.gen[blk], basis[bi], t, cod);
                m.set_row(dom.offset[blk] + bi, img);
            }
        }
        return m;
    }

    uint32_t module_dim(int t) const
    {
        uint32_t c = 0;
        for (uint32_t i = 0; i < module->dim(); ++i)
            if (module->degree(i) == t)
                ++c;
        return c;
    }

    uint32_t module_index(int t, uint32_t v) const
    {
        uint32_t c = 0;
        for (uint32_t i = 0; i < module->dim(); ++i) {
            if (module->degree(i) == t) {
                if (i == v)
                    return c;
                ++c;
            }
        }
        throw ComputeError("module_index: basis element not in degree");
    }

    // entries must avoid the unit: minimality
    void require_minimal() const
    {
        for (int s = 1; s < stages(); ++s)
            for (const auto& row : diff[s])
                for (const auto& [tgt, entry] : row)
                    for (const auto& m : entry)
                        if (m.is_unit())
                            throw ComputeError("minimality violated at stage " + std::to_string(s));
    }

    // d . d = 0 over the whole window, checked symbolically.
    void require_differential_squares_to_zero() const
    {
        for (int s = 2; s < stages(); ++s)
            for (uint32_t g = 0; g < diff[s].size(); ++g) {
                Row acc;
                for (const auto& [mid, entry] : diff[s][g])
                    for (const auto& a : entry)
                        for (const auto& [tgt, entry2] : diff[s - 1][mid]) {
                            MilnorSum prod;
                            for (const auto& b : entry2)
                                prod = add_mod2(prod, slice->multiply(a, b));
                            row_add_term(acc, tgt, prod);
                        }
                if (!acc.empty())
                    throw ComputeError("d.d != 0 at stage " + std::to_string(s) + ", generator " +
                                       std::to_string(g));
            }
        if (module.has_value() && stages() >= 2) {
            for (uint32_t g = 0; g < diff[1].size(); ++g) {
                IndexSum acc;
                for (const auto& [tgt, entry] : diff[1][g])
                    for (const auto& a : entry)
                        acc = add_mod2(acc, a.is_unit() ? aug[0][tgt] : module->act_sum(a, aug[0][tgt]));
                if (!acc.empty())
                    throw ComputeError("aug . d_1 != 0 at generator " + std::to_string(g));
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Ext tables.

struct ExtProductEntry {
    std::string op;      /* "h0", "h1", "h2" */
    int s, t;
    uint32_t index;      /* source generator (s,t,index) */
    std::vector<uint32_t> targets; /* indices at (s+1, t+|op|) */
};

struct ExtTable {
    int s_max = 0, t_max = 0;
    std::map<std::pair<int, int>, int> dims;
    std::vector<ExtProductEntry> products;
    std::map<std::string, std::pair<std::pair<int, int>, uint32_t>> named; /* name -> ((s,t),idx) */

    int dim(int s, int t) const
    {
        auto it = dims.find({s, t});
        return it == dims.end() ? 0 : it->second;
    }

    void set(int s, int t, int d)
    {
        if (d)
            dims[{s, t}] = d;
    }

    bool operator==(const ExtTable& o) const { return dims == o.dims; }

    std::string to_tsv() const
    {
        std::ostringstream out;
        out << "s\tt\tdim\n";
        for (const auto& [st, d] : dims)
            out << st.first << "\t" << st.second << "\t" << d << "\n";
        return out.str();
    }

    static ExtTable from_tsv(const std::string& text)
    {
        ExtTable t;
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            if (first && line.substr(0, 2) == "s\t") {
                first = false;
                continue;
            }
            first = false;
            std::istringstream ls(line);
            int s, tt, d;
            if (!(ls >> s >> tt >> d))
                throw ComputeError("bad ext tsv line: " + line);
            t.set(s, tt, d);
            t.s_max = std::max(t.s_max, s);
            t.t_max = std::max(t.t_max, tt);
        }
        return t;
    }
};

inline ExtTable ext_dims(const FreeChainComplex& c)
{
    ExtTable t;
    t.s_max = c.s_limit;
    t.t_max = c.t_limit;
    for (int s = 0; s < c.stages(); ++s) {
        std::map<int, int> per_t;
        for (int d : c.gen_degrees[s])
            per_t[d]++;
        for (auto [deg, n] : per_t)
            if (deg <= c.t_limit && s <= c.s_limit)
                t.set(s, deg, n);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Minimal resolution.

inline FreeChainComplex minimal_resolution(const GradedModule& m, int s_max, int t_max)
{
    if (m.dim() && m.top_degree() > t_max)
        throw ComputeError("window too small to present the module: top degree " +
                           std::to_string(m.top_degree()) + " exceeds t_max " +
                           std::to_string(t_max));
    if (!m.slice().is_finite() && m.slice().t_max() < t_max)
        throw ComputeError("slice degree cap below resolution window");
    FreeChainComplex c;
    c.slice = m.slice_ptr();
    c.module = m;
    c.s_limit = s_max;
    c.t_limit = t_max;
    c.gen_degrees.resize(s_max + 1);
    c.diff.resize(s_max + 1);
    c.aug.resize(1);

    int bottom = m.dim() ? m.bottom_degree() : 0;

    // stage 0: minimal generators of m
    for (int t = bottom; t <= t_max; ++t) {
        uint32_t mdim = c.module_dim(t);
        if (!mdim)
            continue;
        f2::EchelonBasis covered(mdim);
        FreeChainComplex::Layout lay0 = c.layout(0, t);
        for (size_t blk = 0; blk < lay0.gen.size(); ++blk) {
            if (lay0.alg_degree[blk] == 0)
                continue; /* unit multiples of generators are the generators */
            const auto& basis = c.slice->basis(lay0.alg_degree[blk]);
            for (const auto& b : basis)
                covered.insert(c.apply_diff(0, lay0.gen[blk], b, t, FreeChainComplex::Layout{}));
        }
        for (uint32_t v = 0; v < m.dim(); ++v) {
            if (m.degree(v) != t)
                continue;
            f2::BitVector e(mdim);
            e.set(c.module_index(t, v));
            if (covered.insert(e)) {
                c.gen_degrees[0].push_back(t);
                c.aug[0].push_back(IndexSum{v});
            }
        }
    }

    // stages s >= 1: minimal generators of ker d_{s-1}
    for (int s = 1; s <= s_max; ++s) {
        if (c.gen_degrees[s - 1].empty())
            break;
        int t_min = *std::min_element(c.gen_degrees[s - 1].begin(), c.gen_degrees[s - 1].end()) + 1;
        std::vector<int> ts;
        for (int t = t_min; t <= t_max; ++t)
            ts.push_back(t);
        std::vector<f2::BitMatrix> kernels(ts.size());
        parallel_for(ts.size(), [&](size_t i) {
            f2::BitMatrix d = c.matrix(s - 1, ts[i]);
            kernels[i] = f2::kernel_basis(d.transposed());
        });
        for (size_t i = 0; i < ts.size(); ++i) {
            int t = ts[i];
            const f2::BitMatrix& ker = kernels[i];
            if (!ker.n_rows())
                continue;
            FreeChainComplex::Layout dom = c.layout(s - 1, t);
            f2::EchelonBasis covered(dom.dim);
            FreeChainComplex::Layout lay_s = c.layout(s, t);
            for (size_t blk = 0; blk < lay_s.gen.size(); ++blk) {
                if (lay_s.alg_degree[blk] == 0)
                    continue;
                for (const auto& b : c.slice->basis(lay_s.alg_degree[blk]))
                    covered.insert(c.apply_diff(s, lay_s.gen[blk], b, t, dom));
            }
            for (size_t k = 0; k < ker.n_rows(); ++k) {
                f2::BitVector v = ker.row(k);
                if (!covered.insert(v))
                    continue;
                // new generator: convert kernel vector to a differential row
                Row row;
                for (size_t blk = 0; blk < dom.gen.size(); ++blk) {
                    const auto& basis = c.slice->basis(dom.alg_degree[blk]);
                    MilnorSum entry;
                    for (uint32_t bi = 0; bi < basis.size(); ++bi)
                        if (v.get(dom.offset[blk] + bi))
                            entry.push_back(basis[bi]);
                    if (!entry.empty())
                        row_add_term(row, dom.gen[blk], entry);
                }
                c.gen_degrees[s].push_back(t);
                c.diff[s].push_back(std::move(row));
            }
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Ext classes and chain maps.

// A class in Ext^{s,t}(M, F2): a functional on stage-s generators (all of
// internal degree t).  In a minimal resolution every functional is a cocycle
// and none is a coboundary.
struct ExtClass {
    int s = 0, t = 0;
    std::vector<uint32_t> gens; /* sorted support */

    bool is_zero() const { return gens.empty(); }
    bool operator==(const ExtClass& o) const { return s == o.s && t == o.t && gens == o.gens; }
};

// A cocycle representing a class of Ext^{s,t}(M, N): values in N on the
// stage-s generators of res(M).
struct CocycleInto {
    int s = 0, t = 0;
    std::vector<IndexSum> values; /* per stage-s generator, in N coordinates */
};

struct ChainMap {
    const FreeChainComplex* source = nullptr;
    const FreeChainComplex* target = nullptr;
    int sigma = 0; /* stage shift: maps source stage j+sigma into target stage j */
    int tau = 0;   /* internal shift: target viewed as Sigma^tau */
    std::vector<std::vector<Row>> maps; /* maps[j][g]: over target stage-j generators */

    int lifted_stages() const { return (int)maps.size(); } /* j ranges over [0, lifted) */
};

namespace detail {

// Solve-context cache for the differentials (and augmentation) of a complex.
class ComplexSolver {
public:
    explicit ComplexSolver(const FreeChainComplex& c) : c_(c) {}

    // Solves d_s(x) = w at internal degree t (w over the stage s-1 layout;
    // s = 0 solves through the augmentation).  Returns coordinates over the
    // stage-s layout.
    std::optional<f2::BitVector> solve(int s, int t, const f2::BitVector& w)
    {
        auto key = std::make_pair(s, t);
        auto it = ctx_.find(key);
        if (it == ctx_.end()) {
            f2::BitMatrix m = c_.matrix(s, t);
            it = ctx_.emplace(key, f2::SolveContext::from_rows(m)).first;
        }
        return it->second.solve(w);
    }

    const FreeChainComplex& complex() const { return c_; }

private:
    const FreeChainComplex& c_;
    std::map<std::pair<int, int>, f2::SolveContext> ctx_;
};

inline Row vector_to_row(const FreeChainComplex& c, int s, int t, const f2::BitVector& v)
{
    FreeChainComplex::Layout lay = c.layout(s, t);
    Row row;
    for (size_t blk = 0; blk < lay.gen.size(); ++blk) {
        const auto& basis = c.slice->basis(lay.alg_degree[blk]);
        MilnorSum entry;
        for (uint32_t bi = 0; bi < basis.size(); ++bi)
            if (v.get(lay.offset[blk] + bi))
                entry.push_back(basis[bi]);
        if (!entry.empty())
            row_add_term(row, lay.gen[blk], entry);
    }
    return row;
}

// Applies a row-valued map to d(g): sum over entries of d(g) of
// (algebra element) * (map of target), landing in the target layout.
inline f2::BitVector push_row_through(const FreeChainComplex& src, int s_src, uint32_t g,
                                      const std::vector<Row>& phi_prev,
                                      const FreeChainComplex& tgt, int s_tgt, int t_tgt)
{
    FreeChainComplex::Layout cod = tgt.layout(s_tgt, t_tgt);
    f2::BitVector out(cod.dim);
    for (const auto& [mid, entry] : src.diff[s_src][g]) {
        const Row& img = phi_prev[mid];
        for (const auto& a : entry)
            for (const auto& [tg, ms] : img) {
                int block = FreeChainComplex::find_block(cod, tg);
                if (block < 0)
                    continue;
                for (const auto& b : ms) {
                    if (a.is_unit()) {
                        out.flip(cod.index((uint32_t)block, tgt.slice->index_of(b)));
                        continue;
                    }
                    if (b.is_unit()) {
                        out.flip(cod.index((uint32_t)block, tgt.slice->index_of(a)));
                        continue;
                    }
                    for (uint32_t p : tgt.slice->product(a.degree(), tgt.slice->index_of(a),
                                                         b.degree(), tgt.slice->index_of(b)))
                        out.flip(cod.index((uint32_t)block, p));
                }
            }
    }
    return out;
}

}  // namespace detail

// Lifts a cocycle (values in the target's module) to a chain map
// phi_j : source_{s+j} -> Sigma^t target_j for j = 0..up_to.
inline ChainMap lift_cocycle(const FreeChainComplex& src, const CocycleInto& coc,
                             const FreeChainComplex& tgt, int up_to,
                             detail::ComplexSolver* solver = nullptr)
{
    if (!tgt.module.has_value())
        throw ComputeError("lift_cocycle: target must resolve a module");
    ChainMap f;
    f.source = &src;
    f.target = &tgt;
    f.sigma = coc.s;
    f.tau = coc.t;
    detail::ComplexSolver local(tgt);
    detail::ComplexSolver& sol = solver ? *solver : local;

    // stage 0: solve through the augmentation
    {
        std::vector<Row> phi0(src.gens_at(coc.s));
        for (uint32_t g = 0; g < phi0.size(); ++g) {
            const IndexSum& val = coc.values[g];
            if (val.empty())
                continue;
            int t0 = src.gen_degrees[coc.s][g] - coc.t;
            if (t0 > tgt.t_limit)
                throw ComputeError("lift window exhausted at stage 0, degree " + std::to_string(t0));
            uint32_t mdim = tgt.module_dim(t0);
            f2::BitVector w(mdim);
            for (uint32_t v : val)
                w.flip(tgt.module_index(t0, v));
            auto x = sol.solve(0, t0, w);
            if (!x.has_value())
                throw ComputeError("lift_cocycle: augmentation not surjective onto value");
            phi0[g] = detail::vector_to_row(tgt, 0, t0, *x);
        }
        f.maps.push_back(std::move(phi0));
    }

    for (int j = 1; j <= up_to; ++j) {
        int s_src = coc.s + j;
        if (s_src >= src.stages())
            break;
        if (j >= (int)tgt.diff.size())
            throw ComputeError("lift window exhausted at target stage " + std::to_string(j));
        std::vector<Row> phij(src.gens_at(s_src));
        for (uint32_t g = 0; g < phij.size(); ++g) {
            int t0 = src.gen_degrees[s_src][g] - coc.t;
            if (t0 < 0)
                continue;
            if (t0 > tgt.t_limit)
                throw ComputeError("lift window exhausted at stage " + std::to_string(j) +
                                   ", degree " + std::to_string(t0));
            f2::BitVector w = detail::push_row_through(src, s_src, g, f.maps[j - 1], tgt, j - 1, t0);
            if (w.is_zero())
                continue;
            auto x = sol.solve(j, t0, w);
            if (!x.has_value())
                throw ComputeError("lift_cocycle: no solution at stage " + std::to_string(j));
            phij[g] = detail::vector_to_row(tgt, j, t0, *x);
        }
        f.maps.push_back(std::move(phij));
    }
    return f;
}

// A module map f: M -> Sigma^t N as lift input: its values on the stage-0
// generators of res(M).
inline CocycleInto cocycle_of_module_map(const FreeChainComplex& src,
                                         const std::function<IndexSum(const IndexSum&)>& f, int t)
{
    CocycleInto c;
    c.s = 0;
    c.t = t;
    for (const IndexSum& img : src.aug[0])
        c.values.push_back(f(img));
    return c;
}

inline ChainMap lift_module_map(const FreeChainComplex& src,
                                const std::function<IndexSum(const IndexSum&)>& f, int t,
                                const FreeChainComplex& tgt, int up_to)
{
    return lift_cocycle(src, cocycle_of_module_map(src, f, t), tgt, up_to);
}

inline CocycleInto cocycle_of_class(const FreeChainComplex& src, const ExtClass& x)
{
    CocycleInto c;
    c.s = x.s;
    c.t = x.t;
    c.values.resize(src.gens_at(x.s));
    std::vector<uint32_t> at_t;
    for (uint32_t g = 0; g < src.gen_degrees[x.s].size(); ++g)
        if (src.gen_degrees[x.s][g] == x.t)
            at_t.push_back(g);
    for (uint32_t idx : x.gens) {
        if (idx >= at_t.size())
            throw ComputeError("class index out of range");
        c.values[at_t[idx]] = IndexSum{0}; /* the F2 generator */
    }
    return c;
}

// Index of a generator among same-degree generators of its stage (the
// (s,t,index) convention used by Ext tables).
inline std::optional<uint32_t> class_index(const FreeChainComplex& c, int s, int t, uint32_t gen)
{
    uint32_t k = 0;
    for (uint32_t g = 0; g < c.gen_degrees[s].size(); ++g) {
        if (c.gen_degrees[s][g] != t)
            continue;
        if (g == gen)
            return k;
        ++k;
    }
    return std::nullopt;
}

// Yoneda product x . y: compose a class x in Ext^{sx,tx}(F2-valued, over the
// lift's target complex) with a lifted class y (chain map res(M) ->
// res(N)): the result lives over res(M).
inline ExtClass compose_class(const ExtClass& x, const ChainMap& y)
{
    const FreeChainComplex& src = *y.source;
    ExtClass out;
    out.s = x.s + y.sigma;
    out.t = x.t + y.tau;
    if (x.s >= y.lifted_stages())
        throw ComputeError("compose_class: lift too short");
    std::vector<uint32_t> xt;
    for (uint32_t g = 0; g < y.target->gen_degrees[x.s].size(); ++g)
        if (y.target->gen_degrees[x.s][g] == x.t)
            xt.push_back(g);
    std::vector<char> hit(y.target->gens_at(x.s), 0);
    for (uint32_t idx : x.gens)
        hit[xt[idx]] = 1;
    uint32_t k = 0;
    for (uint32_t g = 0; g < src.gen_degrees[out.s].size(); ++g) {
        if (src.gen_degrees[out.s][g] != out.t)
            continue;
        // pair x with phi_{x.s}(g): only unit coefficients contribute
        int parity = 0;
        const Row& row = y.maps[x.s][g];
        for (const auto& [tg, ms] : row)
            if (hit[tg])
                for (const auto& m : ms)
                    if (m.is_unit())
                        parity ^= 1;
        if (parity)
            out.gens.push_back(k);
        ++k;
    }
    return out;
}

// Product of two classes over the same resolution of F2 (or of classes
// x in Ext(N), y in Ext(M -> N)); lifts y through x.s stages.
inline ExtClass yoneda_product(const ExtClass& x, const ExtClass& y, const FreeChainComplex& res_m,
                               const FreeChainComplex& res_n)
{
    ChainMap lift = lift_cocycle(res_m, cocycle_of_class(res_m, y), res_n, x.s);
    return compose_class(x, lift);
}

// ---------------------------------------------------------------------------
// Mapping cones.  For a chain self-map phi lifting a class of
// Ext^{sx,tx}(M, M), the cone complex C_i = P_i (+) Sigma^{tx} P_{i-sx+1}
// computes Ext of the cofiber; Gaussian cancellation of unit entries
// restores minimality so generators biject with Ext classes again.

inline FreeChainComplex mapping_cone(const ChainMap& f)
{
    const FreeChainComplex& p = *f.source;
    if (f.source != f.target)
        throw ComputeError("mapping_cone expects a self-map lift");
    int sx = f.sigma, tx = f.tau;
    FreeChainComplex c;
    c.slice = p.slice;
    c.module.reset();
    c.s_limit = p.s_limit - sx;
    c.t_limit = p.t_limit - tx;
    int stages = std::min(p.stages(), f.lifted_stages() + sx);
    c.gen_degrees.resize(stages);
    c.diff.resize(stages);

    // index maps: first summand (p-part), second summand (q-part = shifted P)
    std::vector<std::vector<uint32_t>> p_index(stages), q_index(stages);
    for (int i = 0; i < stages; ++i) {
        p_index[i].resize(p.gens_at(i));
        for (uint32_t g = 0; g < p_index[i].size(); ++g) {
            p_index[i][g] = (uint32_t)c.gen_degrees[i].size();
            c.gen_degrees[i].push_back(p.gen_degrees[i][g]);
        }
        int pq = i - sx + 1; /* q-part carries P stage i-sx+1 */
        if (pq >= 0 && pq < p.stages()) {
            q_index[i].resize(p.gens_at(pq));
            for (uint32_t g = 0; g < q_index[i].size(); ++g) {
                q_index[i][g] = (uint32_t)c.gen_degrees[i].size();
                c.gen_degrees[i].push_back(p.gen_degrees[pq][g] + tx);
            }
        }
    }
    for (int i = 1; i < stages; ++i) {
        c.diff[i].resize(c.gen_degrees[i].size());
        // p-part: d_P plus phi into the q-part of stage i-1
        for (uint32_t g = 0; g < p_index[i].size(); ++g) {
            Row row;
            if (i >= 1 && i < (int)p.diff.size())
                for (const auto& [tgt, e] : p.diff[i][g])
                    row_add_term(row, p_index[i - 1][tgt], e);
            int j = i - sx; /* phi_j : P_i -> Sigma^tx P_j, q-part of stage i-1 */
            if (j >= 0 && j < f.lifted_stages())
                for (const auto& [tgt, e] : f.maps[j][g])
                    row_add_term(row, q_index[i - 1][tgt], e);
            c.diff[i][p_index[i][g]] = std::move(row);
        }
        // q-part: d_P within the shifted copy
        int pq = i - sx + 1;
        if (pq >= 1 && pq < (int)p.diff.size())
            for (uint32_t g = 0; g < q_index[i].size(); ++g) {
                Row row;
                for (const auto& [tgt, e] : p.diff[pq][g])
                    row_add_term(row, q_index[i - 1][tgt], e);
                c.diff[i][q_index[i][g]] = std::move(row);
            }
    }
    return c;
}

// Gaussian cancellation of unit entries (degree-0 identity components).
// Repeats until the complex is minimal.
inline void minimize(FreeChainComplex& c)
{
    int stages = c.stages();
    std::vector<std::vector<char>> alive(stages);
    for (int s = 0; s < stages; ++s)
        alive[s].assign(c.gen_degrees[s].size(), 1);

    auto find_unit = [&](int s) -> std::optional<std::pair<uint32_t, uint32_t>> {
        for (uint32_t g = 0; g < c.diff[s].size(); ++g) {
            if (!alive[s][g])
                continue;
            for (const auto& [tgt, e] : c.diff[s][g])
                if (alive[s - 1][tgt])
                    for (const auto& m : e)
                        if (m.is_unit())
                            return std::make_pair(g, tgt);
        }
        return std::nullopt;
    };

    for (int s = 1; s < stages; ++s) {
        for (;;) {
            auto hit = find_unit(s);
            if (!hit.has_value())
                break;
            auto [g, gp] = *hit;
            // r = d(g) without the unit term on gp
            Row r;
            MilnorSum self;
            for (const auto& [tgt, e] : c.diff[s][g]) {
                if (tgt == gp) {
                    MilnorSum rest;
                    for (const auto& m : e)
                        if (!m.is_unit())
                            rest.push_back(m);
                    self = rest;
                    if (!rest.empty())
                        row_add_term(r, tgt, rest);
                }
                else
                    row_add_term(r, tgt, e);
            }
            if (!self.empty())
                throw ComputeError("minimize: non-unit self coefficient in cancelling pair");
            // update other rows at stage s: d(h) += c_h * r
            for (uint32_t h = 0; h < c.diff[s].size(); ++h) {
                if (h == g || !alive[s][h])
                    continue;
                MilnorSum ch;
                for (const auto& [tgt, e] : c.diff[s][h])
                    if (tgt == gp)
                        ch = e;
                if (ch.empty())
                    continue;
                // remove the gp term
                Row& row = c.diff[s][h];
                for (auto it = row.begin(); it != row.end(); ++it)
                    if (it->first == gp) {
                        row.erase(it);
                        break;
                    }
                for (const auto& [tgt, e] : r) {
                    MilnorSum prod;
                    for (const auto& a : ch)
                        for (const auto& b : e)
                            prod = add_mod2(prod, c.slice->multiply(a, b));
                    row_add_term(row, tgt, prod);
                }
            }
            // drop g-components from stage s+1 rows
            if (s + 1 < stages)
                for (uint32_t k = 0; k < c.diff[s + 1].size(); ++k) {
                    Row& row = c.diff[s + 1][k];
                    for (auto it = row.begin(); it != row.end(); ++it)
                        if (it->first == g) {
                            row.erase(it);
                            break;
                        }
                }
            alive[s][g] = 0;
            alive[s - 1][gp] = 0;
        }
    }

    // compact: drop dead generators, reindex
    FreeChainComplex out;
    out.slice = c.slice;
    out.module = c.module;
    out.s_limit = c.s_limit;
    out.t_limit = c.t_limit;
    out.gen_degrees.resize(stages);
    out.diff.resize(stages);
    std::vector<std::vector<uint32_t>> remap(stages);
    for (int s = 0; s < stages; ++s) {
        remap[s].assign(c.gen_degrees[s].size(), ~uint32_t(0));
        for (uint32_t g = 0; g < c.gen_degrees[s].size(); ++g)
            if (alive[s][g]) {
                remap[s][g] = (uint32_t)out.gen_degrees[s].size();
                out.gen_degrees[s].push_back(c.gen_degrees[s][g]);
            }
    }
    for (int s = 1; s < stages; ++s) {
        out.diff[s].resize(out.gen_degrees[s].size());
        for (uint32_t g = 0; g < c.gen_degrees[s].size(); ++g) {
            if (!alive[s][g])
                continue;
            Row row;
            for (const auto& [tgt, e] : c.diff[s][g]) {
                if (remap[s - 1][tgt] == ~uint32_t(0)) {
                    if (!e.empty())
                        throw ComputeError("minimize: entry to dead generator survived");
                    continue;
                }
                row_add_term(row, remap[s - 1][tgt], e);
            }
            out.diff[s][remap[s][g]] = std::move(row);
        }
    }
    if (!c.aug.empty() && c.module.has_value()) {
        out.aug.resize(1);
        for (uint32_t g = 0; g < c.gen_degrees[0].size(); ++g)
            if (alive[0][g])
                out.aug[0].push_back(c.aug[0][g]);
    }
    c = std::move(out);
    c.require_minimal();
}

// ---------------------------------------------------------------------------
// Ext between objects: H(Hom(res(m), n)).

struct ExtBetween {
    ExtTable table;
    // deterministic representative cocycles for each (s,t): values in n
    std::map<std::pair<int, int>, std::vector<CocycleInto>> reps;
};

inline ExtBetween ext_between_complex(const FreeChainComplex& p, const GradedModule& n, int s_max,
                                      int t_max)
{
    ExtBetween out;
    out.table.s_max = std::min(s_max, p.s_limit);
    out.table.t_max = std::min(t_max, p.t_limit);
    // Hom^t(P_s, n) has basis (g, v) with deg v = t_g - t.
    auto hom_basis = [&](int s, int t) {
        std::vector<std::pair<uint32_t, uint32_t>> basis;
        if (s >= p.stages())
            return basis;
        for (uint32_t g = 0; g < p.gen_degrees[s].size(); ++g)
            for (uint32_t v = 0; v < n.dim(); ++v)
                if (n.degree(v) == p.gen_degrees[s][g] - t)
                    basis.emplace_back(g, v);
        return basis;
    };
    auto delta = [&](int s, int t) {
        auto dom = hom_basis(s, t);
        auto cod = hom_basis(s + 1, t);
        std::map<std::pair<uint32_t, uint32_t>, uint32_t> cod_index;
        for (uint32_t i = 0; i < cod.size(); ++i)
            cod_index[cod[i]] = i;
        f2::BitMatrix mat(dom.size(), cod.size());
        if (s + 1 >= p.stages())
            return mat;
        for (uint32_t i = 0; i < dom.size(); ++i) {
            auto [g, v] = dom[i];
            // (delta f)(k) = f(d k): for each k with entry (g, a): a . f(g)
            for (uint32_t k = 0; k < p.diff[s + 1].size(); ++k)
                for (const auto& [tgt, e] : p.diff[s + 1][k]) {
                    if (tgt != g)
                        continue;
                    for (const auto& a : e) {
                        IndexSum img = a.is_unit() ? IndexSum{v} : n.act(a, v);
                        for (uint32_t w : img) {
                            auto it = cod_index.find({k, w});
                            if (it != cod_index.end())
                                mat.flip(i, it->second);
                        }
                    }
                }
        }
        return mat;
    };
    int gen_min = 0, gen_max = 0;
    bool any_gen = false;
    for (const auto& degs : p.gen_degrees)
        for (int d : degs) {
            gen_min = any_gen ? std::min(gen_min, d) : d;
            gen_max = any_gen ? std::max(gen_max, d) : d;
            any_gen = true;
        }
    if (!any_gen || !n.dim())
        return out;
    int t_lo = gen_min - n.top_degree();
    for (int t = t_lo; t <= out.table.t_max; ++t) {
        for (int s = 0; s <= out.table.s_max; ++s) {
            auto dom = hom_basis(s, t);
            if (dom.empty())
                continue;
            f2::BitMatrix din = s ? delta(s - 1, t) : f2::BitMatrix(0, dom.size());
            f2::BitMatrix dout = delta(s, t);
            f2::BitMatrix ker = f2::kernel_basis(dout.transposed());
            f2::EchelonBasis image(dom.size());
            for (size_t r = 0; r < din.n_rows(); ++r)
                image.insert(din.row(r));
            int dim = 0;
            std::vector<CocycleInto> reps;
            for (size_t r = 0; r < ker.n_rows(); ++r) {
                f2::BitVector v = ker.row(r);
                if (image.insert(v)) {
                    ++dim;
                    CocycleInto coc;
                    coc.s = s;
                    coc.t = t;
                    coc.values.resize(p.gens_at(s));
                    f2::BitVector w = ker.row(r);
                    for (uint32_t i = 0; i < dom.size(); ++i)
                        if (w.get(i))
                            coc.values[dom[i].first] = add_mod2(coc.values[dom[i].first],
                                                                IndexSum{dom[i].second});
                    reps.push_back(std::move(coc));
                }
            }
            if (dim) {
                out.table.set(s, t, dim);
                out.reps[{s, t}] = std::move(reps);
            }
        }
    }
    return out;
}

inline ExtBetween ext_between(const GradedModule& m, const GradedModule& n, int s_max, int t_max)
{
    FreeChainComplex p = minimal_resolution(m, s_max + 1, t_max + std::max(0, n.top_degree()));
    return ext_between_complex(p, n, s_max, t_max);
}

// ---------------------------------------------------------------------------
// Resolution export (line oriented) and the content-addressed cache.

inline std::string save_resolution(const FreeChainComplex& c)
{
    std::ostringstream out;
    out << "slice " << c.slice->name();
    if (!c.slice->is_finite())
        out << " tmax " << c.slice->t_max();
    out << "\nwindow " << c.s_limit << " " << c.t_limit << "\n";
    out << "stages " << c.stages() << "\n";
    for (int s = 0; s < c.stages(); ++s) {
        for (uint32_t g = 0; g < c.gen_degrees[s].size(); ++g) {
            out << "gen " << s << " " << g << " " << c.gen_degrees[s][g] << "\n";
            if (s == 0 && c.module.has_value()) {
                out << "aug " << s << " " << g << " =";
                for (uint32_t v : c.aug[0][g])
                    out << " " << v;
                out << "\n";
            }
            else if (s >= 1) {
                out << "d " << s << " " << g << " =";
                bool first = true;
                for (const auto& [tgt, e] : c.diff[s][g])
                    for (const auto& m : e) {
                        out << (first ? " " : " + ") << m.text() << "*g[" << (s - 1) << ","
                            << tgt << "]";
                        first = false;
                    }
                if (first)
                    out << " 0";
                out << "\n";
            }
        }
    }
    return out.str();
}

inline uint64_t fnv1a(const std::string& s)
{
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::optional<std::string> cache_dir()
{
    const char* dir = std::getenv("EXTCHARTS_CACHE_DIR");
    if (!dir || !*dir)
        return std::nullopt;
    return std::string(dir);
}

// Cache key for a module resolution: slice + canonical module text + window.
inline std::string resolution_cache_key(const GradedModule& m, int s_max, int t_max)
{
    std::ostringstream id;
    id << m.slice().name() << ":" << m.slice().t_max() << ":" << s_max << ":" << t_max << "\n"
       << mod::save_module(m);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(id.str()));
    return std::string(buf);
}

inline bool load_resolution_text(const std::string& text, FreeChainComplex& c);

inline FreeChainComplex resolve_with_cache(const GradedModule& m, int s_max, int t_max)
{
    auto dir = cache_dir();
    std::string path;
    if (dir.has_value()) {
        std::filesystem::create_directories(*dir);
        path = *dir + "/" + resolution_cache_key(m, s_max, t_max) + ".res";
        std::ifstream in(path);
        if (in) {
            std::stringstream buf;
            buf << in.rdbuf();
            FreeChainComplex c;
            c.slice = m.slice_ptr();
            c.module = m;
            if (load_resolution_text(buf.str(), c))
                return c;
        }
    }
    FreeChainComplex c = minimal_resolution(m, s_max, t_max);
    if (dir.has_value()) {
        std::ofstream out(path);
        out << save_resolution(c);
    }
    return c;
}

inline bool load_resolution_text(const std::string& text, FreeChainComplex& c)
{
    std::istringstream in(text);
    std::string line;
    c.gen_degrees.clear();
    c.diff.clear();
    c.aug.assign(1, {});
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word))
            continue;
        if (word == "slice")
            continue;
        if (word == "stages") {
            int n = 0;
            ls >> n;
            if (n > (int)c.gen_degrees.size()) {
                c.gen_degrees.resize(n);
                c.diff.resize(n);
            }
            continue;
        }
        if (word == "window") {
            ls >> c.s_limit >> c.t_limit;
            continue;
        }
        if (word == "gen") {
            int s, g, t;
            if (!(ls >> s >> g >> t))
                return false;
            if ((int)c.gen_degrees.size() <= s)
                return false;
            if ((int)c.gen_degrees[s].size() != g)
                return false;
            c.gen_degrees[s].push_back(t);
            if (s >= 1)
                c.diff[s].emplace_back();
            continue;
        }
        if (word == "aug") {
            int s, g;
            std::string eq;
            if (!(ls >> s >> g >> eq) || s != 0)
                return false;
            IndexSum v;
            uint32_t x;
            while (ls >> x)
                v.push_back(x);
            if ((int)c.aug[0].size() != g)
                return false;
            c.aug[0].push_back(v);
            continue;
        }
        if (word == "d") {
            int s, g;
            std::string eq;
            if (!(ls >> s >> g >> eq))
                return false;
            std::string tok;
            Row row;
            while (ls >> tok) {
                if (tok == "+" || tok == "0")
                    continue;
                size_t star = tok.find("*g[");
                if (star == std::string::npos || tok.back() != ']')
                    return false;
                auto elt = alg::parse_milnor(tok.substr(0, star));
                if (!elt.has_value())
                    return false;
                std::string idx = tok.substr(star + 3, tok.size() - star - 4);
                size_t comma = idx.find(',');
                if (comma == std::string::npos)
                    return false;
                uint32_t tgt = (uint32_t)std::stoul(idx.substr(comma + 1));
                row_add_term(row, tgt, MilnorSum{*elt});
            }
            if (g >= (int)c.diff[s].size())
                return false;
            c.diff[s][g] = std::move(row);
            continue;
        }
        return false;
    }
    return !c.gen_degrees.empty();
}

}  // namespace extcharts::res
