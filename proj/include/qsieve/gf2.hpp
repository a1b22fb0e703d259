#pragma once

// Dense bit matrices over GF(2) and left-nullspace extraction, used to turn
// relation exponent parities into congruence-of-squares dependencies.

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qsieve {

/// Fixed-length vector over GF(2), packed into 64-bit words.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t size)
        : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const {
        return (words_[i / 64] >> (i % 64)) & 1u;
    }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t(1) << (i % 64);
        if (v) words_[i / 64] |= mask; else words_[i / 64] &= ~mask;
    }
    void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t(1) << (i % 64); }

    void xor_with(const BitVec& other) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    }

    bool any() const {
        for (auto w : words_) if (w) return true;
        return false;
    }

    /// Index of the lowest set bit; size() when empty.
    std::size_t lowest_set() const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            if (words_[w]) {
                std::uint64_t v = words_[w];
                std::size_t bit = 0;
                while (!(v & 1)) { v >>= 1; ++bit; }
                return w * 64 + bit;
            }
        }
        return size_;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < size_; ++i) c += get(i);
        return c;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }
    friend bool operator<(const BitVec& a, const BitVec& b) {
        if (a.size_ != b.size_) return a.size_ < b.size_;
        return a.words_ < b.words_;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense GF(2) matrix; row i holds the mod-2 exponent vector of relation i.
class Gf2Matrix {
public:
    Gf2Matrix(std::size_t rows, std::size_t cols)
        : cols_(cols), rows_(rows, BitVec(cols)) {}

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    BitVec& row(std::size_t r) { return rows_[r]; }
    const BitVec& row(std::size_t r) const { return rows_[r]; }

    bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v) { rows_[r].set(c, v); }

private:
    std::size_t cols_;
    std::vector<BitVec> rows_;
};

/// Basis of the left null space: every returned s (one bit per matrix row)
/// satisfies s.M = 0 over GF(2), s != 0.  Empty when the rows are
/// independent.
///
/// Row reduction with provenance tracking: each working row is an XOR of
/// original rows, remembered in a companion selection vector.  Rows are
/// reduced against earlier pivots (lowest set column becomes the pivot);
/// a row that cancels completely yields its selection vector as a basis
/// element.  Processing rows in ascending index order makes the output
/// deterministic: basis vector k has its highest set bit at the k-th
/// dependent row.
inline std::vector<BitVec> gf2_nullspace(const Gf2Matrix& m) {
    if (m.rows() == 0) throw std::invalid_argument("empty matrix");
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();

    struct Pivot {
        BitVec row;
        BitVec track;
    };
    std::vector<Pivot> pivot_of(cols);
    std::vector<bool> has_pivot(cols, false);
    std::vector<BitVec> basis;

    for (std::size_t i = 0; i < rows; ++i) {
        BitVec r = m.row(i);
        BitVec t(rows);
        t.set(i, true);
        for (;;) {
            const std::size_t c = r.lowest_set();
            if (c == cols) {
                basis.push_back(t);
                break;
            }
            if (has_pivot[c]) {
                r.xor_with(pivot_of[c].row);
                t.xor_with(pivot_of[c].track);
            } else {
                has_pivot[c] = true;
                pivot_of[c] = Pivot{std::move(r), std::move(t)};
                break;
            }
        }
    }
    return basis;
}

}  // namespace qsieve
