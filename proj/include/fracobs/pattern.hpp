#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracobs/errors.hpp"

namespace fracobs {

using Entry = std::pair<std::size_t, std::size_t>;

/**
 * Zero/nonzero skeleton of an nrows x ncols matrix.
 *
 * Stored as one packed bit row per matrix row, so boolean products and
 * unions run a word at a time. Indices are 0-based.
 */
class Pattern {
public:
    Pattern() = default;

    Pattern(std::size_t nrows, std::size_t ncols)
        : rows_(nrows), cols_(ncols), words_((ncols + 63) / 64), bits_(nrows * words_, 0) {}

    static Pattern from_entries(std::size_t nrows, std::size_t ncols, std::span<const Entry> entries) {
        Pattern p(nrows, ncols);
        for (auto [r, c] : entries) {
            if (r >= nrows || c >= ncols) {
                throw DimensionError("pattern entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                     ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
            }
            p.set(r, c);
        }
        return p;
    }

    static Pattern from_entries(std::size_t nrows, std::size_t ncols, std::initializer_list<Entry> entries) {
        return from_entries(nrows, ncols, std::span<const Entry>(entries.begin(), entries.size()));
    }

    static Pattern identity(std::size_t n) {
        Pattern p(n, n);
        for (std::size_t i = 0; i < n; ++i) p.set(i, i);
        return p;
    }

    static Pattern full(std::size_t nrows, std::size_t ncols) {
        Pattern p(nrows, ncols);
        for (std::size_t r = 0; r < nrows; ++r)
            for (std::size_t c = 0; c < ncols; ++c) p.set(r, c);
        return p;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    bool test(std::size_t r, std::size_t c) const noexcept {
        return (bits_[r * words_ + c / 64] >> (c % 64)) & 1U;
    }
    void set(std::size_t r, std::size_t c) noexcept { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
    void reset(std::size_t r, std::size_t c) noexcept {
        bits_[r * words_ + c / 64] &= ~(std::uint64_t{1} << (c % 64));
    }

    std::span<const std::uint64_t> row_words(std::size_t r) const noexcept {
        return {bits_.data() + r * words_, words_};
    }
    std::span<std::uint64_t> row_words(std::size_t r) noexcept { return {bits_.data() + r * words_, words_}; }

    bool row_empty(std::size_t r) const noexcept {
        auto w = row_words(r);
        return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
    }

    /// Column indices set in row r, ascending.
    std::vector<std::size_t> row_indices(std::size_t r) const {
        std::vector<std::size_t> out;
        auto w = row_words(r);
        for (std::size_t k = 0; k < w.size(); ++k) {
            std::uint64_t x = w[k];
            while (x) {
                out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(x)));
                x &= x - 1;
            }
        }
        return out;
    }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto x : bits_) n += static_cast<std::size_t>(std::popcount(x));
        return n;
    }
    bool empty() const noexcept { return count() == 0; }

    /// Row-major list of set positions.
    std::vector<Entry> entries() const {
        std::vector<Entry> out;
        for (std::size_t r = 0; r < rows_; ++r)
            for (auto c : row_indices(r)) out.emplace_back(r, c);
        return out;
    }

    Pattern transposed() const {
        Pattern t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (auto c : row_indices(r)) t.set(c, r);
        return t;
    }

    Pattern& operator|=(const Pattern& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
        return *this;
    }
    friend Pattern operator|(Pattern a, const Pattern& b) { return a |= b; }

    /// True when every entry of this pattern is also set in `other`.
    bool subset_of(const Pattern& other) const {
        require_same_shape(other);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & ~other.bits_[i]) return false;
        return true;
    }

    /// OR the bits of `src` row into row r of this pattern (same column count).
    void or_row(std::size_t r, std::span<const std::uint64_t> src) noexcept {
        auto dst = row_words(r);
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] |= src[k];
    }

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    void require_same_shape(const Pattern& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("pattern shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Boolean matrix product: (a ⊙ b)(i, j) = OR_k a(i, k) AND b(k, j).
inline Pattern boolean_product(const Pattern& a, const Pattern& b) {
    if (a.cols() != b.rows()) throw DimensionError("boolean_product: inner dimensions differ");
    Pattern out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (auto k : a.row_indices(i)) out.or_row(i, b.row_words(k));
    return out;
}

/// Horizontal concatenation [p_1 | p_2 | ...]; all parts share the row count.
inline Pattern hconcat(std::span<const Pattern> parts) {
    if (parts.empty()) return {};
    const std::size_t rows = parts.front().rows();
    std::size_t cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows) throw DimensionError("hconcat: row counts differ");
        cols += p.cols();
    }
    Pattern out(rows, cols);
    std::size_t offset = 0;
    for (const auto& p : parts) {
        for (auto [r, c] : p.entries()) out.set(r, offset + c);
        offset += p.cols();
    }
    return out;
}

} // namespace fracobs
