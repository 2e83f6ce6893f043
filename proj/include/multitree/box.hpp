// Dyadic boxes: vertices of T^d for d in {1,2,3}.
//
// A box is a d-tuple of dyadic intervals. The partial order is inclusion,
// which holds iff the paths are nested prefix-wise on every axis. The
// number of boxes containing a box with axis depths (d_1,...,d_d) is
// prod (d_t + 1); the smallest box containing two boxes (their join in the
// inclusion order) takes the longest common prefix per axis.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "multitree/bitpath.hpp"

namespace multitree {

class DyadicBox {
public:
    DyadicBox() : dim_(1) {}

    explicit DyadicBox(std::vector<BitPath> axes) : dim_(static_cast<int>(axes.size())) {
        if (dim_ < 1 || dim_ > 3)
            throw std::invalid_argument("DyadicBox: dimension must be 1, 2 or 3");
        for (int t = 0; t < dim_; ++t) axes_[t] = std::move(axes[t]);
    }

    static DyadicBox root(int dim) {
        if (dim < 1 || dim > 3)
            throw std::invalid_argument("DyadicBox::root: dimension must be 1, 2 or 3");
        DyadicBox b;
        b.dim_ = dim;
        return b;
    }

    static DyadicBox interval(BitPath p) {
        DyadicBox b;
        b.dim_ = 1;
        b.axes_[0] = std::move(p);
        return b;
    }

    static DyadicBox rect(BitPath x, BitPath y) {
        DyadicBox b;
        b.dim_ = 2;
        b.axes_[0] = std::move(x);
        b.axes_[1] = std::move(y);
        return b;
    }

    int dim() const { return dim_; }
    const BitPath& axis(int t) const { return axes_[t]; }
    std::size_t axis_depth(int t) const { return axes_[t].depth(); }

    std::size_t depth_sum() const {
        std::size_t s = 0;
        for (int t = 0; t < dim_; ++t) s += axes_[t].depth();
        return s;
    }

    bool is_root() const { return depth_sum() == 0; }

    // Number of boxes containing this one, the root and the box included.
    std::uint64_t ancestor_count() const {
        std::uint64_t n = 1;
        for (int t = 0; t < dim_; ++t) n *= axes_[t].depth() + 1;
        return n;
    }

    friend bool operator==(const DyadicBox& a, const DyadicBox& b) {
        if (a.dim_ != b.dim_) return false;
        for (int t = 0; t < a.dim_; ++t)
            if (!(a.axes_[t] == b.axes_[t])) return false;
        return true;
    }

    // Canonical ordering: per-axis path order; used wherever a deterministic
    // traversal or reduction order is required.
    friend bool operator<(const DyadicBox& a, const DyadicBox& b) {
        if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
        for (int t = 0; t < a.dim_; ++t) {
            if (a.axes_[t] < b.axes_[t]) return true;
            if (b.axes_[t] < a.axes_[t]) return false;
        }
        return false;
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(dim_) * 0x9e3779b97f4a7c15ull;
        for (int t = 0; t < dim_; ++t)
            h = h * 0x100000001b3ull ^ axes_[t].hash();
        return h;
    }

    // Axes joined by 'x', each axis a bit string or "e" for the root
    // interval, e.g. "0010x01".
    std::string str() const {
        std::string s = axes_[0].str();
        for (int t = 1; t < dim_; ++t) {
            s.push_back('x');
            s += axes_[t].str();
        }
        return s;
    }

    static DyadicBox parse(std::string_view text) {
        std::vector<BitPath> axes;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = text.find('x', start);
            axes.push_back(BitPath::parse(text.substr(start, pos == std::string_view::npos
                                                                 ? std::string_view::npos
                                                                 : pos - start)));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        return DyadicBox(std::move(axes));
    }

private:
    int dim_;
    std::array<BitPath, 3> axes_;
};

inline void check_same_dim(const DyadicBox& a, const DyadicBox& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("dimension mismatch between boxes");
}

// b subseteq a: a's path is a prefix of b's path on every axis.
inline bool contains(const DyadicBox& a, const DyadicBox& b) {
    check_same_dim(a, b);
    for (int t = 0; t < a.dim(); ++t)
        if (!a.axis(t).is_prefix_of(b.axis(t))) return false;
    return true;
}

// Per-axis lengths of the longest common prefixes, i.e. the axis depths of
// join(a, b). Kept separate from join() because potential/energy kernels
// only need the depths, not the box itself.
inline std::array<std::size_t, 3> join_depths(const DyadicBox& a, const DyadicBox& b) {
    check_same_dim(a, b);
    std::array<std::size_t, 3> d{0, 0, 0};
    for (int t = 0; t < a.dim(); ++t) d[t] = BitPath::lcp(a.axis(t), b.axis(t));
    return d;
}

// Number of common ancestors of a and b: prod (lcp_t + 1). This is the
// energy kernel K(a, b).
inline std::uint64_t common_ancestor_count(const DyadicBox& a, const DyadicBox& b) {
    const auto d = join_depths(a, b);
    std::uint64_t n = 1;
    for (int t = 0; t < a.dim(); ++t) n *= d[t] + 1;
    return n;
}

// Smallest box containing both a and b.
inline DyadicBox join(const DyadicBox& a, const DyadicBox& b) {
    const auto d = join_depths(a, b);
    std::vector<BitPath> axes;
    axes.reserve(a.dim());
    for (int t = 0; t < a.dim(); ++t) axes.push_back(a.axis(t).prefix(d[t]));
    return DyadicBox(std::move(axes));
}

// Box whose axis t is the prefix of b's axis t of length lens[t].
inline DyadicBox prefix_box(const DyadicBox& b, const std::array<std::size_t, 3>& lens) {
    std::vector<BitPath> axes;
    axes.reserve(b.dim());
    for (int t = 0; t < b.dim(); ++t) axes.push_back(b.axis(t).prefix(lens[t]));
    return DyadicBox(std::move(axes));
}

// Calls fn for every box containing b (b and the root included), exactly
// once each: the grid of per-axis prefix lengths.
template <typename Fn>
void visit_ancestors(const DyadicBox& b, Fn&& fn) {
    const int d = b.dim();
    std::array<std::size_t, 3> lens{0, 0, 0};
    if (d == 1) {
        for (lens[0] = 0; lens[0] <= b.axis_depth(0); ++lens[0]) fn(prefix_box(b, lens));
    } else if (d == 2) {
        for (lens[0] = 0; lens[0] <= b.axis_depth(0); ++lens[0])
            for (lens[1] = 0; lens[1] <= b.axis_depth(1); ++lens[1]) fn(prefix_box(b, lens));
    } else {
        for (lens[0] = 0; lens[0] <= b.axis_depth(0); ++lens[0])
            for (lens[1] = 0; lens[1] <= b.axis_depth(1); ++lens[1])
                for (lens[2] = 0; lens[2] <= b.axis_depth(2); ++lens[2])
                    fn(prefix_box(b, lens));
    }
}

inline std::vector<DyadicBox> ancestors(const DyadicBox& b) {
    std::vector<DyadicBox> out;
    out.reserve(b.ancestor_count());
    visit_ancestors(b, [&out](const DyadicBox& a) { out.push_back(a); });
    return out;
}

}  // namespace multitree

template <>
struct std::hash<multitree::DyadicBox> {
    std::size_t operator()(const multitree::DyadicBox& b) const { return b.hash(); }
};
