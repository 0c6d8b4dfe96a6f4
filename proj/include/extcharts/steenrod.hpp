#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"

// Milnor-basis arithmetic for the mod-2 Steenrod algebra, its finite
// subalgebras A(n), and the dual quotients, all in conjugate-generator
// coordinates: the monomial basis of the dual is written in the xi-bar
// generators, and Sq(r1,r2,...) denotes the dual basis element of
// xibar_1^r1 xibar_2^r2 ....  The coproduct is
//     psi(xibar_k) = sum_{k1+k2=k} xibar_{k1} (x) xibar_{k2}^{2^{k1}}
// and the product on the algebra side is the one dual to it.

namespace extcharts::alg {

using Expo = std::vector<uint32_t>;

inline void trim(Expo& e)
{
    while (!e.empty() && e.back() == 0)
        e.pop_back();
}

inline int expo_degree(const Expo& e)
{
    long d = 0;
    for (size_t i = 0; i < e.size(); ++i)
        d += (long)e[i] * ((1L << (i + 1)) - 1);
    return (int)d;
}

inline long expo_weight(const Expo& e)
{
    long w = 0;
    for (size_t i = 0; i < e.size(); ++i)
        w += (long)e[i] * (1L << i);
    return w;
}

inline Expo expo_add(const Expo& a, const Expo& b)
{
    Expo out(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i)
        out[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i)
        out[i] += b[i];
    return out;
}

// A Milnor basis element Sq(r1,r2,...); the unit is Sq(0) with empty
// exponent sequence.
struct MilnorElement {
    Expo r;

    MilnorElement() = default;
    explicit MilnorElement(Expo e) : r(std::move(e)) { trim(r); }

    int degree() const { return expo_degree(r); }
    bool is_unit() const { return r.empty(); }

    bool operator<(const MilnorElement& o) const { return r < o.r; }
    bool operator==(const MilnorElement& o) const { return r == o.r; }

    std::string text() const
    {
        if (r.empty())
            return "Sq(0)";
        std::string s = "Sq(";
        for (size_t i = 0; i < r.size(); ++i) {
            if (i)
                s += ',';
            s += std::to_string(r[i]);
        }
        return s + ")";
    }
};

// A monomial xibar_1^e1 xibar_2^e2 ... in the dual; weight is the
// Brown-Gitler filtration grading |xibar_j| = 2^{j-1}.
struct XiMonomial {
    Expo e;

    XiMonomial() = default;
    explicit XiMonomial(Expo ex) : e(std::move(ex)) { trim(e); }

    int degree() const { return expo_degree(e); }
    long weight() const { return expo_weight(e); }
    bool is_unit() const { return e.empty(); }

    bool operator<(const XiMonomial& o) const { return e < o.e; }
    bool operator==(const XiMonomial& o) const { return e == o.e; }

    std::string text() const
    {
        if (e.empty())
            return "1";
        std::string s;
        for (size_t i = 0; i < e.size(); ++i) {
            if (!e[i])
                continue;
            if (!s.empty())
                s += ' ';
            s += "xi" + std::to_string(i + 1);
            if (e[i] != 1)
                s += "^" + std::to_string(e[i]);
        }
        return s;
    }
};

inline XiMonomial xi_mul(const XiMonomial& a, const XiMonomial& b)
{
    return XiMonomial(expo_add(a.e, b.e));
}

// degree-major order, lexicographic within a degree
inline bool deg_lex_less(const XiMonomial& a, const XiMonomial& b)
{
    int da = a.degree(), db = b.degree();
    return da < db || (da == db && a.e < b.e);
}

inline std::optional<MilnorElement> parse_milnor(const std::string& s)
{
    if (s.size() < 5 || s.substr(0, 3) != "Sq(" || s.back() != ')')
        return std::nullopt;
    Expo r;
    uint32_t cur = 0;
    bool have = false;
    for (size_t i = 3; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            cur = cur * 10 + (uint32_t)(c - '0');
            have = true;
        }
        else if (c == ',') {
            if (!have)
                return std::nullopt;
            r.push_back(cur);
            cur = 0;
            have = false;
        }
        else
            return std::nullopt;
    }
    if (!have)
        return std::nullopt;
    r.push_back(cur);
    return MilnorElement(std::move(r));
}

inline std::optional<XiMonomial> parse_xi(const std::string& s)
{
    if (s == "1")
        return XiMonomial();
    Expo e;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        if (tok.substr(0, 2) != "xi")
            return std::nullopt;
        size_t caret = tok.find('^');
        std::string idx_s = tok.substr(2, caret == std::string::npos ? std::string::npos : caret - 2);
        if (idx_s.empty())
            return std::nullopt;
        size_t k = (size_t)std::stoul(idx_s);
        uint32_t ex = 1;
        if (caret != std::string::npos)
            ex = (uint32_t)std::stoul(tok.substr(caret + 1));
        if (k == 0)
            return std::nullopt;
        if (e.size() < k)
            e.resize(k, 0);
        e[k - 1] += ex;
    }
    return XiMonomial(std::move(e));
}

using MilnorSum = std::vector<MilnorElement>;

// ---------------------------------------------------------------------------
// Milnor product, dual to the coproduct above.  Enumerates matrices
// (x_{ij})_{i,j>=0} with plain row sums equal to the left factor and
// 2^i-weighted column sums equal to the right factor; diagonal sums give the
// result monomial and the coefficient is a product of multinomials mod 2.

namespace detail {

struct MilnorMatrixEnum {
    const Expo& r;
    const Expo& s;
    std::vector<long> col_budget;          /* remaining weighted budget per column j>=1 */
    std::vector<std::vector<uint32_t>> x;  /* x[i][j], i = 1..R rows, j = 0..S */
    MilnorSum out;

    MilnorMatrixEnum(const Expo& r_, const Expo& s_) : r(r_), s(s_)
    {
        col_budget.assign(s.size() + 1, 0);
        for (size_t j = 1; j <= s.size(); ++j)
            col_budget[j] = s[j - 1];
        x.assign(r.size() + 1, std::vector<uint32_t>(s.size() + 1, 0));
    }

    void emit()
    {
        // x[0][j] is the leftover column budget (weight 2^0 = 1 each).
        size_t top = r.size() + s.size();
        Expo u(top, 0);
        for (size_t n = 1; n <= top; ++n) {
            uint32_t total = 0, acc = 0;
            // i + j = n with 0 <= i <= R, 0 <= j <= S
            for (size_t i = 0; i <= r.size() && i <= n; ++i) {
                size_t j = n - i;
                if (j > s.size())
                    continue;
                uint32_t v = (i == 0) ? (uint32_t)col_budget[j] : x[i][j];
                if (v == 0)
                    continue;
                if (acc & v)
                    return; /* binary carry => even multinomial */
                acc |= v;
                total += v;
            }
            u[n - 1] = total;
        }
        out.push_back(MilnorElement(std::move(u)));
    }

    // Fill row i (1-based), then recurse.
    void fill_row(size_t i)
    {
        if (i > r.size()) {
            emit();
            return;
        }
        fill_cell(i, s.size(), r[i - 1]);
    }

    void fill_cell(size_t i, size_t j, uint32_t row_left)
    {
        if (j == 0) {
            x[i][0] = row_left;
            fill_row(i + 1);
            return;
        }
        long wt = 1L << i;
        uint32_t vmax = (uint32_t)std::min<long>(row_left, col_budget[j] / wt);
        for (uint32_t v = 0; v <= vmax; ++v) {
            x[i][j] = v;
            col_budget[j] -= (long)v * wt;
            fill_cell(i, j - 1, row_left - v);
            col_budget[j] += (long)v * wt;
        }
        x[i][j] = 0;
    }
};

}  // namespace detail

inline MilnorSum milnor_multiply_raw(const MilnorElement& a, const MilnorElement& b)
{
    detail::MilnorMatrixEnum en(a.r, b.r);
    en.fill_row(1);
    sort_reduce_mod2(en.out);
    return en.out;
}

// Coproduct on the algebra side, dual to multiplication of monomials:
// all splittings r = r' + r''.
inline std::vector<std::pair<MilnorElement, MilnorElement>> milnor_coproduct(const MilnorElement& a)
{
    std::vector<std::pair<MilnorElement, MilnorElement>> out;
    Expo left(a.r.size(), 0);
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == a.r.size()) {
            Expo right(a.r.size(), 0);
            for (size_t k = 0; k < a.r.size(); ++k)
                right[k] = a.r[k] - left[k];
            out.emplace_back(MilnorElement(left), MilnorElement(std::move(right)));
            return;
        }
        for (uint32_t v = 0; v <= a.r[i]; ++v) {
            left[i] = v;
            rec(i + 1);
        }
        left[i] = 0;
    };
    rec(0);
    sort_reduce_mod2(out);
    return out;
}

// ---------------------------------------------------------------------------
// Algebra slices: A(0), A(1), A(2) and the full algebra truncated at an
// explicit internal-degree cap.  Slices are immutable and shared; basis
// enumeration and basis-pair products are memoized behind a mutex, so
// concurrent first-requests agree.

enum class SliceKind { FiniteSub, Truncated };

class AlgebraSlice;
using SlicePtr = std::shared_ptr<const AlgebraSlice>;

class AlgebraSlice {
public:
    static SlicePtr finite(int n);
    static SlicePtr truncated(int t_max);

    SliceKind kind() const { return kind_; }
    int level() const { return n_; }         /* n for A(n), -1 for truncated A */
    int t_max() const { return t_max_; }     /* degree cap (top degree for finite) */
    bool is_finite() const { return kind_ == SliceKind::FiniteSub; }

    std::string name() const
    {
        if (kind_ == SliceKind::FiniteSub)
            return "A" + std::to_string(n_);
        return "A";
    }

    // Exponent bound for r_i (1-based); exponents must be < bound.
    uint32_t profile_bound(size_t i) const
    {
        if (kind_ == SliceKind::Truncated)
            return ~uint32_t(0);
        if ((int)i > n_ + 1)
            return 1;
        return uint32_t(1) << (n_ + 2 - (int)i);
    }

    bool contains(const MilnorElement& m) const
    {
        if (m.degree() > t_max_)
            return false;
        for (size_t i = 0; i < m.r.size(); ++i)
            if (m.r[i] >= profile_bound(i + 1))
                return false;
        return true;
    }

    // All exponent sequences of the given degree within the profile, in
    // lexicographic order.
    const std::vector<MilnorElement>& basis(int degree) const
    {
        if (degree < 0 || degree > t_max_) {
            static const std::vector<MilnorElement> empty;
            return empty;
        }
        std::lock_guard<std::mutex> lock(mu_);
        auto it = basis_.find(degree);
        if (it != basis_.end())
            return it->second;
        std::vector<MilnorElement> list;
        Expo cur;
        enumerate(degree, 1, cur, list);
        std::sort(list.begin(), list.end());
        return basis_.emplace(degree, std::move(list)).first->second;
    }

    int dim(int degree) const { return (int)basis(degree).size(); }

    // Index of m within basis(m.degree()); m must be in the slice.
    uint32_t index_of(const MilnorElement& m) const
    {
        const auto& b = basis(m.degree());
        auto it = std::lower_bound(b.begin(), b.end(), m);
        if (it == b.end() || !(*it == m))
            throw ComputeError("element not in slice basis: " + m.text());
        return (uint32_t)(it - b.begin());
    }

    // Product of basis elements, memoized; result encoded as indices in
    // degree d1+d2.
    const std::vector<uint32_t>& product(int d1, uint32_t i1, int d2, uint32_t i2) const
    {
        uint64_t key = ((uint64_t)(uint16_t)d1 << 48) | ((uint64_t)(uint16_t)i1 << 32) |
                       ((uint64_t)(uint16_t)d2 << 16) | (uint64_t)(uint16_t)i2;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = prod_.find(key);
            if (it != prod_.end())
                return it->second;
        }
        MilnorElement a = basis(d1)[i1];
        MilnorElement b = basis(d2)[i2];
        MilnorSum raw = milnor_multiply_raw(a, b);
        std::vector<uint32_t> enc;
        for (const auto& m : raw) {
            if (!contains(m))
                continue; /* outside profile: only possible for truncation overflow */
            enc.push_back(index_of(m));
        }
        std::sort(enc.begin(), enc.end());
        std::lock_guard<std::mutex> lock(mu_);
        return prod_.emplace(key, std::move(enc)).first->second;
    }

    // Memoized product of two slice elements, returned as elements.
    MilnorSum multiply(const MilnorElement& a, const MilnorElement& b) const
    {
        if (a.is_unit())
            return {b};
        if (b.is_unit())
            return {a};
        int da = a.degree(), db = b.degree();
        const auto& enc = product(da, index_of(a), db, index_of(b));
        MilnorSum out;
        const auto& target = basis(da + db);
        for (uint32_t i : enc)
            out.push_back(target[i]);
        return out;
    }

    int total_dimension() const
    {
        if (kind_ != SliceKind::FiniteSub)
            throw ComputeError("total_dimension only defined for finite slices");
        int total = 0;
        for (int d = 0; d <= t_max_; ++d)
            total += dim(d);
        return total;
    }

    bool same(const AlgebraSlice& o) const
    {
        return kind_ == o.kind_ && n_ == o.n_ && (kind_ == SliceKind::FiniteSub || t_max_ == o.t_max_);
    }

    // True when this slice's profile is contained in the other's (the
    // degree cap of a truncated slice is a window, not a profile bound).
    bool sub_slice_of(const AlgebraSlice& o) const
    {
        if (kind_ == SliceKind::FiniteSub)
            return o.kind_ == SliceKind::Truncated || n_ <= o.n_;
        return o.kind_ == SliceKind::Truncated && t_max_ <= o.t_max_;
    }

    AlgebraSlice(SliceKind k, int n, int t_max) : kind_(k), n_(n), t_max_(t_max) {}

private:
    void enumerate(int degree, size_t gen, Expo& cur, std::vector<MilnorElement>& out) const
    {
        if (degree == 0) {
            Expo e = cur;
            out.push_back(MilnorElement(std::move(e)));
            return;
        }
        long gen_deg = (1L << gen) - 1;
        if (gen_deg > degree)
            return;
        uint32_t bound = profile_bound(gen);
        long vmax = std::min<long>(bound ? bound - 1 : 0, degree / gen_deg);
        if (cur.size() < gen)
            cur.resize(gen, 0);
        for (long v = 0; v <= vmax; ++v) {
            cur[gen - 1] = (uint32_t)v;
            enumerate(degree - (int)(v * gen_deg), gen + 1, cur, out);
        }
        cur[gen - 1] = 0;
    }

    SliceKind kind_;
    int n_;
    int t_max_;
    mutable std::mutex mu_;
    mutable std::map<int, std::vector<MilnorElement>> basis_;
    mutable std::unordered_map<uint64_t, std::vector<uint32_t>> prod_;
};

inline SlicePtr AlgebraSlice::finite(int n)
{
    if (n < 0 || n > 2)
        throw ComputeError("finite slice level must be 0, 1 or 2");
    static std::mutex mu;
    static std::map<int, SlicePtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    int top = 0;
    for (int i = 1; i <= n + 1; ++i)
        top += ((1 << (n + 2 - i)) - 1) * ((1 << i) - 1);
    auto p = std::make_shared<AlgebraSlice>(SliceKind::FiniteSub, n, top);
    cache.emplace(n, p);
    return p;
}

inline SlicePtr AlgebraSlice::truncated(int t_max)
{
    if (t_max < 0)
        throw ComputeError("degree cap must be non-negative");
    static std::mutex mu;
    static std::map<int, SlicePtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(t_max);
    if (it != cache.end())
        return it->second;
    auto p = std::make_shared<AlgebraSlice>(SliceKind::Truncated, -1, t_max);
    cache.emplace(t_max, p);
    return p;
}

inline const std::vector<MilnorElement>& milnor_basis(const AlgebraSlice& slice, int degree)
{
    return slice.basis(degree);
}

// Product reduced by the slice profile; preconditions: both factors in the
// slice, degree sum within bounds.
inline MilnorSum milnor_product(const MilnorElement& a, const MilnorElement& b, const AlgebraSlice& slice)
{
    if (!slice.contains(a) || !slice.contains(b))
        throw ComputeError("milnor_product: factor outside slice");
    if (a.degree() + b.degree() > slice.t_max())
        throw ComputeError("milnor_product: degree exceeds slice cap");
    MilnorSum raw = milnor_multiply_raw(a, b);
    MilnorSum out;
    for (auto& m : raw)
        if (slice.contains(m))
            out.push_back(std::move(m));
    return out;
}

// ---------------------------------------------------------------------------
// Coproduct of xi-bar monomials in A_* (x) A_*.

using TensorTerm = std::pair<XiMonomial, XiMonomial>;
using TensorSum = std::vector<TensorTerm>; /* sorted, mod-2 reduced */

inline TensorSum tensor_multiply(const TensorSum& a, const TensorSum& b)
{
    TensorSum out;
    out.reserve(a.size() * b.size());
    for (const auto& ta : a)
        for (const auto& tb : b)
            out.emplace_back(xi_mul(ta.first, tb.first), xi_mul(ta.second, tb.second));
    sort_reduce_mod2(out);
    return out;
}

namespace detail {

inline TensorSum coproduct_generator(size_t k)
{
    // psi(xibar_k) = sum_{k1+k2=k} xibar_{k1} (x) xibar_{k2}^{2^{k1}}
    TensorSum out;
    for (size_t k1 = 0; k1 <= k; ++k1) {
        size_t k2 = k - k1;
        Expo left, right;
        if (k1 > 0) {
            left.assign(k1, 0);
            left[k1 - 1] = 1;
        }
        if (k2 > 0) {
            right.assign(k2, 0);
            right[k2 - 1] = uint32_t(1) << k1;
        }
        out.emplace_back(XiMonomial(std::move(left)), XiMonomial(std::move(right)));
    }
    sort_reduce_mod2(out);
    return out;
}

inline TensorSum tensor_power(TensorSum base, uint32_t e)
{
    TensorSum result;
    result.emplace_back(XiMonomial(), XiMonomial());
    while (e) {
        if (e & 1)
            result = tensor_multiply(result, base);
        e >>= 1;
        if (e)
            base = tensor_multiply(base, base);
    }
    return result;
}

}  // namespace detail

inline const TensorSum& coproduct(const XiMonomial& m)
{
    static std::mutex mu;
    static std::map<Expo, TensorSum> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(m.e);
        if (it != cache.end())
            return it->second;
    }
    TensorSum result;
    result.emplace_back(XiMonomial(), XiMonomial());
    for (size_t k = 1; k <= m.e.size(); ++k)
        if (m.e[k - 1])
            result = tensor_multiply(result, detail::tensor_power(detail::coproduct_generator(k), m.e[k - 1]));
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(m.e, std::move(result)).first->second;
}

// Membership in (A // A(i))_*: e_j = 0 mod 2^{i+2-j} for j <= i+1.
inline bool in_a_mod_a(const XiMonomial& m, int i)
{
    for (int j = 1; j <= i + 1; ++j) {
        uint32_t e = (size_t)(j - 1) < m.e.size() ? m.e[j - 1] : 0;
        if (e % (uint32_t(1) << (i + 2 - j)))
            return false;
    }
    return true;
}

// Membership in the quotient A(n)_*: e_j < 2^{n+2-j}, zero beyond n+1.
inline bool in_dual_subalgebra(const XiMonomial& m, int n)
{
    for (size_t j = 1; j <= m.e.size(); ++j) {
        uint32_t e = m.e[j - 1];
        if (!e)
            continue;
        if ((int)j > n + 1)
            return false;
        if (e >= (uint32_t(1) << (n + 2 - (int)j)))
            return false;
    }
    return true;
}

// Membership in (A(n) // A(m))_* for m < n: within the A(n)_* profile and
// divisible per the A(m) congruences.
inline bool in_sub_mod_sub(const XiMonomial& m, int n, int sub)
{
    return in_dual_subalgebra(m, n) && in_a_mod_a(m, sub);
}

// Coaction of a monomial of the comodule algebra (A // A(i))_*: the full
// coproduct, with every left tensor factor in A_* and every right factor
// automatically inside the target.
inline TensorSum coproduct_monomial(const XiMonomial& m, int target_i)
{
    if (!in_a_mod_a(m, target_i))
        throw ComputeError("monomial violates the (A//A(" + std::to_string(target_i) +
                           "))_* exponent congruences: " + m.text());
    return coproduct(m);
}

// Drops terms whose left factor dies in A(n)_*.
inline TensorSum reduce_left_to_dual_subalgebra(const TensorSum& sum, int n)
{
    TensorSum out;
    for (const auto& t : sum)
        if (in_dual_subalgebra(t.first, n))
            out.push_back(t);
    return out;
}

}  // namespace extcharts::alg
