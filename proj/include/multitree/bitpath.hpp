// Bit-path representation of a dyadic interval.
//
// A vertex of the dyadic tree T is the interval [i*2^-d, (i+1)*2^-d]; we
// store the d bits of i (most significant first) packed into 64-bit words.
// The empty path is the root [0,1]. Nesting of intervals is exactly the
// prefix relation on paths, so containment, join (longest common prefix)
// and ancestor enumeration are all word-wise bit operations. Paths of
// several thousand bits are routine (deep constructions append long runs
// of zeros), hence the word-packed layout: comparisons and hashes over
// all-zero tails touch one word per 64 bits.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace multitree {

class BitPath {
public:
    BitPath() = default;

    // Path of `n` zero bits: the interval [0, 2^-n].
    static BitPath zeros(std::size_t n) {
        BitPath p;
        p.len_ = n;
        p.words_.assign(word_count(n), 0u);
        return p;
    }

    // Low `bits` bits of `value`, most significant first.
    static BitPath from_index(std::uint64_t value, std::size_t bits) {
        if (bits > 64) throw std::invalid_argument("BitPath::from_index: bits > 64");
        if (bits < 64 && value >> bits)
            throw std::invalid_argument("BitPath::from_index: value does not fit");
        BitPath p;
        for (std::size_t i = 0; i < bits; ++i)
            p.push_back((value >> (bits - 1 - i)) & 1u);
        return p;
    }

    static BitPath parse(std::string_view text) {
        if (text == "e") return BitPath{};
        BitPath p;
        for (char c : text) {
            if (c == '0') p.push_back(0);
            else if (c == '1') p.push_back(1);
            else throw std::invalid_argument("BitPath::parse: bad character in path");
        }
        return p;
    }

    std::size_t depth() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool bit(std::size_t i) const {
        return (words_[i >> 6] >> (63 - (i & 63))) & 1u;
    }

    void push_back(bool b) {
        if ((len_ & 63) == 0) words_.push_back(0);
        if (b) words_[len_ >> 6] |= std::uint64_t{1} << (63 - (len_ & 63));
        ++len_;
    }

    // Appends `n` zero bits (cheap: grows the word vector only).
    void append_zeros(std::size_t n) {
        len_ += n;
        words_.resize(word_count(len_), 0u);
    }

    // Truncates to the first `n` bits; bits past the end stay zeroed so that
    // whole-word comparison and hashing remain valid.
    BitPath prefix(std::size_t n) const {
        if (n > len_) throw std::invalid_argument("BitPath::prefix: longer than path");
        BitPath p;
        p.len_ = n;
        p.words_.assign(words_.begin(), words_.begin() + word_count(n));
        if (n & 63) p.words_.back() &= ~std::uint64_t{0} << (64 - (n & 63));
        return p;
    }

    BitPath parent() const {
        if (len_ == 0) throw std::invalid_argument("BitPath::parent: root has no parent");
        return prefix(len_ - 1);
    }

    bool is_prefix_of(const BitPath& other) const {
        if (len_ > other.len_) return false;
        return lcp(*this, other) == len_;
    }

    // Length of the longest common prefix.
    static std::size_t lcp(const BitPath& a, const BitPath& b) {
        const std::size_t bound = std::min(a.len_, b.len_);
        const std::size_t nw = word_count(bound);
        for (std::size_t w = 0; w < nw; ++w) {
            const std::uint64_t x = a.words_[w] ^ b.words_[w];
            if (x) {
                const std::size_t at = w * 64 + static_cast<std::size_t>(__builtin_clzll(x));
                return std::min(at, bound);
            }
        }
        return bound;
    }

    friend bool operator==(const BitPath& a, const BitPath& b) {
        return a.len_ == b.len_ && a.words_ == b.words_;
    }

    // Lexicographic on bits, with a strict prefix ordered first. Packing is
    // MSB-first, so word comparison agrees with bit comparison.
    friend bool operator<(const BitPath& a, const BitPath& b) {
        const std::size_t nw = std::min(a.words_.size(), b.words_.size());
        for (std::size_t w = 0; w < nw; ++w)
            if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
        return a.len_ < b.len_;
    }

    std::size_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        for (std::uint64_t w : words_) mix(w);
        mix(len_);
        return static_cast<std::size_t>(h);
    }

    // Serialized form: the bits, or "e" for the root.
    std::string str() const {
        if (len_ == 0) return "e";
        std::string s;
        s.reserve(len_);
        for (std::size_t i = 0; i < len_; ++i) s.push_back(bit(i) ? '1' : '0');
        return s;
    }

    // Integer value of the path read as a binary number (depth <= 63 only);
    // used to address dense truncated lattices.
    std::uint64_t index() const {
        if (len_ > 63) throw std::invalid_argument("BitPath::index: path too deep");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < len_; ++i) v = (v << 1) | (bit(i) ? 1u : 0u);
        return v;
    }

private:
    static std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace multitree

template <>
struct std::hash<multitree::BitPath> {
    std::size_t operator()(const multitree::BitPath& p) const { return p.hash(); }
};
