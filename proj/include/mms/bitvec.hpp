#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mms/errors.hpp"

namespace mms {

/// Fixed-length bit vector; a point of the hypercube {0,1}^d.
///
/// Bit i lives in word i / 64 at position i % 64. Bits past size() are kept zero so
/// that word-wise comparisons and popcounts never need masking.
class BitVector
{
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_(word_count(size), 0) {}

    /// Parses a string over {0,1}; character j is bit j.
    static BitVector from_string(std::string_view s)
    {
        BitVector v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                v.set(i, true);
            else if (s[i] != '0')
                throw ParseError("bit string contains a character other than 0/1");
        }
        return v;
    }

    std::string to_string() const
    {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool get(std::size_t i) const noexcept { return (words_[i / word_bits] >> (i % word_bits)) & 1u; }
    bool operator[](std::size_t i) const noexcept { return get(i); }

    void set(std::size_t i, bool value) noexcept
    {
        const word_type mask = word_type{1} << (i % word_bits);
        if (value)
            words_[i / word_bits] |= mask;
        else
            words_[i / word_bits] &= ~mask;
    }

    void flip(std::size_t i) noexcept { words_[i / word_bits] ^= word_type{1} << (i % word_bits); }

    void push_back(bool value)
    {
        if (size_ % word_bits == 0) words_.push_back(0);
        ++size_;
        set(size_ - 1, value);
    }

    /// First `length` bits as a new vector.
    BitVector prefix(std::size_t length) const
    {
        BitVector p(length);
        std::copy_n(words_.begin(), p.words_.size(), p.words_.begin());
        p.clear_tail();
        return p;
    }

    /// Same bits, extended with zeros (or truncated) to `length`.
    BitVector resized(std::size_t length) const
    {
        if (length <= size_) return prefix(length);
        BitVector p(length);
        std::copy(words_.begin(), words_.end(), p.words_.begin());
        return p;
    }

    BitVector& operator^=(const BitVector& other)
    {
        require_same_size(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    std::size_t popcount() const noexcept
    {
        std::size_t c = 0;
        for (word_type w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    /// Number of set bits with index in [begin, end).
    std::size_t popcount_range(std::size_t begin, std::size_t end) const noexcept
    {
        if (begin >= end) return 0;
        std::size_t c = 0;
        std::size_t first = begin / word_bits;
        std::size_t last = (end - 1) / word_bits;
        for (std::size_t w = first; w <= last; ++w) {
            word_type word = words_[w];
            if (w == first) word &= ~word_type{0} << (begin % word_bits);
            if (w == last && end % word_bits != 0) word &= (word_type{1} << (end % word_bits)) - 1;
            c += static_cast<std::size_t>(std::popcount(word));
        }
        return c;
    }

    std::span<const word_type> words() const noexcept { return words_; }
    std::span<word_type> mutable_words() noexcept { return words_; }

    /// Zeroes the unused bits of the last word; call after writing raw words.
    void clear_tail() noexcept
    {
        if (size_ % word_bits != 0 && !words_.empty())
            words_.back() &= (word_type{1} << (size_ % word_bits)) - 1;
    }

    friend bool operator==(const BitVector& a, const BitVector& b) noexcept
    {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

    /// Lexicographic order of the bit strings (bit 0 most significant, 0 < 1);
    /// a proper prefix sorts first.
    friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) noexcept
    {
        const std::size_t common = std::min(a.words_.size(), b.words_.size());
        for (std::size_t w = 0; w < common; ++w) {
            word_type diff = a.words_[w] ^ b.words_[w];
            if (diff == 0) continue;
            std::size_t bit = w * word_bits + static_cast<std::size_t>(std::countr_zero(diff));
            if (bit >= std::min(a.size_, b.size_)) break;
            return a.get(bit) ? std::strong_ordering::greater : std::strong_ordering::less;
        }
        return a.size_ <=> b.size_;
    }

    std::size_t hash() const noexcept
    {
        std::size_t h = std::hash<std::size_t>{}(size_);
        for (word_type w : words_) h ^= std::hash<word_type>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

private:
    static std::size_t word_count(std::size_t bits) { return (bits + word_bits - 1) / word_bits; }

    void require_same_size(const BitVector& other) const
    {
        if (other.size_ != size_) throw DimensionMismatch("bit vectors differ in length");
    }

    std::size_t size_ = 0;
    std::vector<word_type> words_;
};

using BinaryPoint = BitVector;

inline std::size_t hamming_distance(const BitVector& a, const BitVector& b)
{
    if (a.size() != b.size()) throw DimensionMismatch("hamming distance of vectors with different lengths");
    auto wa = a.words();
    auto wb = b.words();
    std::size_t c = 0;
    for (std::size_t w = 0; w < wa.size(); ++w) c += static_cast<std::size_t>(std::popcount(wa[w] ^ wb[w]));
    return c;
}

/// Mismatches between x and `pattern` on the first pattern.size() coordinates.
inline std::size_t prefix_distance(const BitVector& x, const BitVector& pattern)
{
    if (pattern.size() > x.size()) throw DimensionMismatch("prefix longer than the point");
    auto wx = x.words();
    auto wp = pattern.words();
    std::size_t c = 0;
    const std::size_t full = pattern.size() / BitVector::word_bits;
    for (std::size_t w = 0; w < full; ++w) c += static_cast<std::size_t>(std::popcount(wx[w] ^ wp[w]));
    if (std::size_t rem = pattern.size() % BitVector::word_bits; rem != 0) {
        const auto mask = (BitVector::word_type{1} << rem) - 1;
        c += static_cast<std::size_t>(std::popcount((wx[full] ^ wp[full]) & mask));
    }
    return c;
}

struct BitVectorHash
{
    std::size_t operator()(const BitVector& v) const noexcept { return v.hash(); }
};

} // namespace mms
