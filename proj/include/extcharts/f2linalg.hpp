#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"

// Exact linear algebra over F2 with bit-packed rows: column j of a row lives
// in word j/64, bit j%64.  Row reduction is fully deterministic (leftmost
// pivot column, topmost row), so everything downstream that derives labels
// from pivot choices is reproducible run to run.

namespace extcharts::f2 {

using Word = std::uint64_t;

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    size_t size() const { return n_; }
    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v = true)
    {
        if (v)
            words_[i >> 6] |= Word(1) << (i & 63);
        else
            words_[i >> 6] &= ~(Word(1) << (i & 63));
    }
    void flip(size_t i) { words_[i >> 6] ^= Word(1) << (i & 63); }

    void operator^=(const BitVector& o)
    {
        assert(o.n_ == n_);
        for (size_t w = 0; w < words_.size(); ++w)
            words_[w] ^= o.words_[w];
    }

    bool is_zero() const
    {
        for (Word w : words_)
            if (w)
                return false;
        return true;
    }

    // Index of the lowest set bit, or size() if zero.
    size_t first_set() const
    {
        for (size_t w = 0; w < words_.size(); ++w)
            if (words_[w])
                return (w << 6) + (size_t)__builtin_ctzll(words_[w]);
        return n_;
    }

    size_t popcount() const
    {
        size_t c = 0;
        for (Word w : words_)
            c += (size_t)__builtin_popcountll(w);
        return c;
    }

    bool operator==(const BitVector& o) const { return n_ == o.n_ && words_ == o.words_; }

    const std::vector<Word>& words() const { return words_; }
    std::vector<Word>& words() { return words_; }

private:
    size_t n_ = 0;
    std::vector<Word> words_;
};

inline bool dot(const BitVector& a, const BitVector& b)
{
    assert(a.size() == b.size());
    Word acc = 0;
    for (size_t w = 0; w < a.words().size(); ++w)
        acc ^= a.words()[w] & b.words()[w];
    return __builtin_popcountll(acc) & 1;
}

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols)
        : n_rows_(rows), n_cols_(cols), wpr_((cols + 63) / 64), data_(rows * ((cols + 63) / 64), 0)
    {
    }

    size_t n_rows() const { return n_rows_; }
    size_t n_cols() const { return n_cols_; }
    size_t words_per_row() const { return wpr_; }

    bool get(size_t r, size_t c) const { return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1; }
    void set(size_t r, size_t c, bool v = true)
    {
        if (v)
            data_[r * wpr_ + (c >> 6)] |= Word(1) << (c & 63);
        else
            data_[r * wpr_ + (c >> 6)] &= ~(Word(1) << (c & 63));
    }
    void flip(size_t r, size_t c) { data_[r * wpr_ + (c >> 6)] ^= Word(1) << (c & 63); }

    Word* row_words(size_t r) { return data_.data() + r * wpr_; }
    const Word* row_words(size_t r) const { return data_.data() + r * wpr_; }

    void row_xor(size_t dst, size_t src)
    {
        Word* d = row_words(dst);
        const Word* s = row_words(src);
        for (size_t w = 0; w < wpr_; ++w)
            d[w] ^= s[w];
    }

    void xor_row_from(size_t dst, const BitVector& v)
    {
        assert(v.size() == n_cols_);
        Word* d = row_words(dst);
        for (size_t w = 0; w < wpr_; ++w)
            d[w] ^= v.words()[w];
    }

    void swap_rows(size_t a, size_t b)
    {
        if (a == b)
            return;
        Word* pa = row_words(a);
        Word* pb = row_words(b);
        for (size_t w = 0; w < wpr_; ++w)
            std::swap(pa[w], pb[w]);
    }

    bool row_is_zero(size_t r) const
    {
        const Word* p = row_words(r);
        for (size_t w = 0; w < wpr_; ++w)
            if (p[w])
                return false;
        return true;
    }

    BitVector row(size_t r) const
    {
        BitVector v(n_cols_);
        const Word* p = row_words(r);
        for (size_t w = 0; w < wpr_; ++w)
            v.words()[w] = p[w];
        return v;
    }

    void set_row(size_t r, const BitVector& v)
    {
        assert(v.size() == n_cols_);
        Word* p = row_words(r);
        for (size_t w = 0; w < wpr_; ++w)
            p[w] = v.words()[w];
    }

    // First set column of row r at position >= from, or n_cols if none.
    size_t row_first_set(size_t r, size_t from = 0) const
    {
        const Word* p = row_words(r);
        size_t w0 = from >> 6;
        if (w0 >= wpr_)
            return n_cols_;
        Word first = p[w0] & (~Word(0) << (from & 63));
        if (first)
            return (w0 << 6) + (size_t)__builtin_ctzll(first);
        for (size_t w = w0 + 1; w < wpr_; ++w)
            if (p[w])
                return (w << 6) + (size_t)__builtin_ctzll(p[w]);
        return n_cols_;
    }

    BitMatrix transposed() const
    {
        BitMatrix t(n_cols_, n_rows_);
        for (size_t r = 0; r < n_rows_; ++r) {
            const Word* p = row_words(r);
            for (size_t w = 0; w < wpr_; ++w) {
                Word x = p[w];
                while (x) {
                    size_t c = (w << 6) + (size_t)__builtin_ctzll(x);
                    x &= x - 1;
                    t.set(c, r);
                }
            }
        }
        return t;
    }

    // m * x for a column vector x of length n_cols; result has length n_rows.
    BitVector apply(const BitVector& x) const
    {
        assert(x.size() == n_cols_);
        BitVector y(n_rows_);
        for (size_t r = 0; r < n_rows_; ++r) {
            Word acc = 0;
            const Word* p = row_words(r);
            for (size_t w = 0; w < wpr_; ++w)
                acc ^= p[w] & x.words()[w];
            if (__builtin_popcountll(acc) & 1)
                y.set(r);
        }
        return y;
    }

    // v * m for a row vector v of length n_rows; result has length n_cols.
    BitVector apply_left(const BitVector& v) const
    {
        assert(v.size() == n_rows_);
        BitVector y(n_cols_);
        for (size_t r = 0; r < n_rows_; ++r)
            if (v.get(r))
                y ^= row(r);
        return y;
    }

    bool operator==(const BitMatrix& o) const
    {
        return n_rows_ == o.n_rows_ && n_cols_ == o.n_cols_ && data_ == o.data_;
    }

private:
    size_t n_rows_ = 0, n_cols_ = 0, wpr_ = 0;
    std::vector<Word> data_;
};

inline BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b)
{
    assert(a.n_cols() == b.n_rows());
    BitMatrix c(a.n_rows(), b.n_cols());
    for (size_t i = 0; i < a.n_rows(); ++i) {
        Word* ci = c.row_words(i);
        for (size_t k = 0; k < a.n_cols(); ++k)
            if (a.get(i, k)) {
                const Word* bk = b.row_words(k);
                for (size_t w = 0; w < b.words_per_row(); ++w)
                    ci[w] ^= bk[w];
            }
    }
    return c;
}

struct RrefResult {
    size_t rank = 0;
    BitMatrix reduced;
    std::vector<size_t> pivot_cols;
};

// Reduced row echelon form.  Pivots are the leftmost nonzero columns taken
// with the topmost available row; zero rows sink to the bottom.
inline RrefResult rref(BitMatrix m)
{
    size_t pr = 0;
    std::vector<size_t> pivots;
    for (size_t c = 0; c < m.n_cols() && pr < m.n_rows(); ++c) {
        size_t sel = m.n_rows();
        for (size_t r = pr; r < m.n_rows(); ++r)
            if (m.get(r, c)) {
                sel = r;
                break;
            }
        if (sel == m.n_rows())
            continue;
        m.swap_rows(pr, sel);
        for (size_t r = 0; r < m.n_rows(); ++r)
            if (r != pr && m.get(r, c))
                m.row_xor(r, pr);
        pivots.push_back(c);
        ++pr;
    }
    RrefResult res;
    res.rank = pivots.size();
    res.reduced = std::move(m);
    res.pivot_cols = std::move(pivots);
    return res;
}

inline size_t rank(const BitMatrix& m)
{
    return rref(m).rank;
}

// Basis of {x : m * x = 0}, one solution per row, ordered by free column.
inline BitMatrix kernel_basis(const BitMatrix& m)
{
    RrefResult r = rref(m);
    std::vector<char> is_pivot(m.n_cols(), 0);
    for (size_t c : r.pivot_cols)
        is_pivot[c] = 1;
    std::vector<size_t> free_cols;
    for (size_t c = 0; c < m.n_cols(); ++c)
        if (!is_pivot[c])
            free_cols.push_back(c);
    BitMatrix basis(free_cols.size(), m.n_cols());
    for (size_t k = 0; k < free_cols.size(); ++k) {
        size_t f = free_cols[k];
        basis.set(k, f);
        for (size_t i = 0; i < r.pivot_cols.size(); ++i)
            if (r.reduced.get(i, f))
                basis.set(k, r.pivot_cols[i]);
    }
    return basis;
}

// Solves m * x = rhs; absent result means rhs is outside the column space.
// Free variables are set to zero, so the solution is deterministic.
inline std::optional<BitVector> solve(const BitMatrix& m, const BitVector& rhs)
{
    assert(rhs.size() == m.n_rows());
    BitMatrix aug(m.n_rows(), m.n_cols() + 1);
    for (size_t r = 0; r < m.n_rows(); ++r) {
        const Word* src = m.row_words(r);
        Word* dst = aug.row_words(r);
        for (size_t w = 0; w < m.words_per_row(); ++w)
            dst[w] = src[w];
        if (rhs.get(r))
            aug.set(r, m.n_cols());
    }
    RrefResult r = rref(std::move(aug));
    BitVector x(m.n_cols());
    for (size_t i = 0; i < r.pivot_cols.size(); ++i) {
        size_t c = r.pivot_cols[i];
        if (c == m.n_cols())
            return std::nullopt; /* pivot in the rhs column: inconsistent */
        if (r.reduced.get(i, m.n_cols()))
            x.set(c);
    }
    return x;
}

// Incrementally maintained row space in echelon form, used for membership
// tests and minimal-generator selection.
class EchelonBasis {
public:
    explicit EchelonBasis(size_t width) : width_(width) {}

    size_t width() const { return width_; }
    size_t rank() const { return rows_.size(); }

    // Reduces v against the basis in place; returns the residue's pivot or
    // width() if v lies in the span.
    size_t reduce(BitVector& v) const
    {
        for (;;) {
            size_t p = v.first_set();
            if (p >= width_)
                return width_;
            auto it = find_pivot(p);
            if (it == rows_.size())
                return p;
            v ^= rows_[it].vec;
        }
    }

    bool contains(const BitVector& v) const
    {
        BitVector tmp = v;
        return reduce(tmp) >= width_;
    }

    // Inserts v if independent; returns true when the rank grew.
    bool insert(BitVector v)
    {
        size_t p = reduce(v);
        if (p >= width_)
            return false;
        size_t pos = 0;
        while (pos < rows_.size() && rows_[pos].pivot < p)
            ++pos;
        rows_.insert(rows_.begin() + (long)pos, Row{p, std::move(v)});
        return true;
    }

private:
    struct Row {
        size_t pivot;
        BitVector vec;
    };
    size_t find_pivot(size_t p) const
    {
        size_t lo = 0, hi = rows_.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (rows_[mid].pivot < p)
                lo = mid + 1;
            else
                hi = mid;
        }
        return (lo < rows_.size() && rows_[lo].pivot == p) ? lo : rows_.size();
    }
    size_t width_;
    std::vector<Row> rows_;
};

// Repeated-solve context for a fixed linear map.  Rows of the matrix are the
// images of the domain basis vectors; solving expresses a target vector as a
// combination of domain basis vectors.
class SolveContext {
public:
    SolveContext(size_t domain_dim, size_t codomain_dim)
        : dom_(domain_dim), cod_(codomain_dim), pivot_row_(codomain_dim, kNone)
    {
    }

    // Build from a matrix whose row r is the image of domain basis vector r.
    static SolveContext from_rows(const BitMatrix& rows)
    {
        SolveContext ctx(rows.n_rows(), rows.n_cols());
        for (size_t r = 0; r < rows.n_rows(); ++r)
            ctx.add_generator(rows.row(r));
        return ctx;
    }

    // Appends the image of the next domain basis vector.
    void add_generator(BitVector image)
    {
        assert(image.size() == cod_);
        BitVector coords(dom_);
        coords.set(n_added_);
        ++n_added_;
        reduce_pair(image, coords);
        size_t p = image.first_set();
        if (p < cod_) {
            pivot_row_[p] = (uint32_t)rows_.size();
            rows_.push_back(Row{std::move(image), std::move(coords)});
        }
    }

    // Returns x with (x * rows) = target, or nullopt.
    std::optional<BitVector> solve(BitVector target) const
    {
        BitVector coords(dom_);
        if (!reduce_pair(target, coords))
            return std::nullopt;
        return coords;
    }

    size_t rank() const { return rows_.size(); }

private:
    static constexpr uint32_t kNone = ~uint32_t(0);
    struct Row {
        BitVector image;
        BitVector coords;
    };
    // Reduces image (and coords along with it); returns true when image
    // lands on zero.
    bool reduce_pair(BitVector& image, BitVector& coords) const
    {
        for (;;) {
            size_t p = image.first_set();
            if (p >= cod_)
                return true;
            uint32_t r = pivot_row_[p];
            if (r == kNone)
                return false;
            image ^= rows_[r].image;
            coords ^= rows_[r].coords;
        }
    }
    size_t dom_, cod_;
    size_t n_added_ = 0;
    std::vector<Row> rows_;
    std::vector<uint32_t> pivot_row_;
};

}  // namespace extcharts::f2
