// Dense functions on the full truncated lattice and the Hardy operators.
//
// Oracle-side machinery: everything here materializes the whole lattice of
// depth <= N (heap indexing per axis), so it is only usable at small N, and
// that is the point: the sparse closed-form production paths are checked
// against these exhaustive computations. The Hardy operator I sums toward
// the root, its adjoint I* sums away from it; both factor per axis on a
// product lattice, so the full-lattice transforms are d passes of the
// one-dimensional recursion.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "multitree/box.hpp"
#include "multitree/kahan.hpp"
#include "multitree/measure.hpp"

namespace multitree {

namespace lattice {

// Heap index of an interval: 2^depth + path value; the root is 1.
inline std::size_t node_of(const BitPath& p) {
    return (std::size_t{1} << p.depth()) | p.index();
}

inline std::size_t depth_of(std::size_t h) {
    return 63 - static_cast<std::size_t>(__builtin_clzll(h));
}

inline BitPath path_of(std::size_t h) {
    const std::size_t d = depth_of(h);
    BitPath p;
    for (std::size_t i = 0; i < d; ++i) p.push_back((h >> (d - 1 - i)) & 1u);
    return p;
}

}  // namespace lattice

class DenseFunction {
public:
    static constexpr std::size_t kMaxDepth1d = 14;
    static constexpr std::size_t kMaxDepth2d = 7;

    DenseFunction(int dim, std::size_t max_depth) : dim_(dim), depth_(max_depth) {
        if (dim != 1 && dim != 2)
            throw std::invalid_argument("DenseFunction: dimension must be 1 or 2");
        if ((dim == 1 && max_depth > kMaxDepth1d) || (dim == 2 && max_depth > kMaxDepth2d))
            throw std::invalid_argument("DenseFunction: depth exceeds the dense budget");
        axis_nodes_ = (std::size_t{2} << depth_) - 1;  // nodes 1 .. axis_nodes_
        values_.assign(dim == 1 ? axis_nodes_ + 1 : (axis_nodes_ + 1) * (axis_nodes_ + 1),
                       0.0);
    }

    int dim() const { return dim_; }
    std::size_t max_depth() const { return depth_; }
    std::size_t axis_nodes() const { return axis_nodes_; }

    double& at(std::size_t h1, std::size_t h2 = 1) {
        return values_[dim_ == 1 ? h1 : h1 * (axis_nodes_ + 1) + h2];
    }
    double at(std::size_t h1, std::size_t h2 = 1) const {
        return values_[dim_ == 1 ? h1 : h1 * (axis_nodes_ + 1) + h2];
    }

    void check_box(const DyadicBox& b) const {
        if (b.dim() != dim_)
            throw std::invalid_argument("DenseFunction: box dimension mismatch");
        for (int t = 0; t < dim_; ++t)
            if (b.axis_depth(t) > depth_)
                throw std::invalid_argument("DenseFunction: box deeper than the lattice");
    }

    double value(const DyadicBox& b) const {
        check_box(b);
        return dim_ == 1 ? at(lattice::node_of(b.axis(0)))
                         : at(lattice::node_of(b.axis(0)), lattice::node_of(b.axis(1)));
    }

    void set(const DyadicBox& b, double v) {
        check_box(b);
        (dim_ == 1 ? at(lattice::node_of(b.axis(0)))
                   : at(lattice::node_of(b.axis(0)), lattice::node_of(b.axis(1)))) = v;
    }

    void add(const DyadicBox& b, double v) {
        check_box(b);
        (dim_ == 1 ? at(lattice::node_of(b.axis(0)))
                   : at(lattice::node_of(b.axis(0)), lattice::node_of(b.axis(1)))) += v;
    }

    // Visits every vertex of the truncated lattice.
    template <typename Fn>
    void for_each_node(Fn&& fn) const {
        if (dim_ == 1) {
            for (std::size_t h = 1; h <= axis_nodes_; ++h) fn(h, std::size_t{1});
        } else {
            for (std::size_t h1 = 1; h1 <= axis_nodes_; ++h1)
                for (std::size_t h2 = 1; h2 <= axis_nodes_; ++h2) fn(h1, h2);
        }
    }

    DyadicBox box_at(std::size_t h1, std::size_t h2) const {
        return dim_ == 1 ? DyadicBox::interval(lattice::path_of(h1))
                         : DyadicBox::rect(lattice::path_of(h1), lattice::path_of(h2));
    }

private:
    int dim_;
    std::size_t depth_;
    std::size_t axis_nodes_;
    std::vector<double> values_;
};

// I f(alpha): sum of f over boxes containing alpha.
inline double hardy_up(const DenseFunction& f, const DyadicBox& alpha) {
    f.check_box(alpha);
    KahanSum s;
    visit_ancestors(alpha, [&](const DyadicBox& a) { s += f.value(a); });
    return s.value();
}

// I* f(alpha): sum of f over boxes contained in alpha (within the lattice).
inline double hardy_down(const DenseFunction& f, const DyadicBox& alpha) {
    f.check_box(alpha);
    KahanSum s;
    if (f.dim() == 1) {
        const std::size_t h0 = lattice::node_of(alpha.axis(0));
        std::vector<std::size_t> stack{h0};
        while (!stack.empty()) {
            const std::size_t h = stack.back();
            stack.pop_back();
            s += f.at(h);
            if (2 * h <= f.axis_nodes()) {
                stack.push_back(2 * h);
                stack.push_back(2 * h + 1);
            }
        }
    } else {
        // descendants form the product of the two axis subtrees
        std::vector<std::size_t> xs{lattice::node_of(alpha.axis(0))};
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (2 * xs[i] <= f.axis_nodes()) {
                xs.push_back(2 * xs[i]);
                xs.push_back(2 * xs[i] + 1);
            }
        std::vector<std::size_t> ys{lattice::node_of(alpha.axis(1))};
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (2 * ys[i] <= f.axis_nodes()) {
                ys.push_back(2 * ys[i]);
                ys.push_back(2 * ys[i] + 1);
            }
        for (std::size_t hx : xs)
            for (std::size_t hy : ys) s += f.at(hx, hy);
    }
    return s.value();
}

// Full-lattice I f: one top-down prefix-sum pass per axis.
inline DenseFunction hardy_up_all(const DenseFunction& f) {
    DenseFunction g = f;
    const std::size_t n = g.axis_nodes();
    if (g.dim() == 1) {
        for (std::size_t h = 2; h <= n; ++h) g.at(h) += g.at(h / 2);
    } else {
        for (std::size_t h1 = 2; h1 <= n; ++h1)
            for (std::size_t h2 = 1; h2 <= n; ++h2) g.at(h1, h2) += g.at(h1 / 2, h2);
        for (std::size_t h2 = 2; h2 <= n; ++h2)
            for (std::size_t h1 = 1; h1 <= n; ++h1) g.at(h1, h2) += g.at(h1, h2 / 2);
    }
    return g;
}

// Full-lattice I* f: one bottom-up pass per axis.
inline DenseFunction hardy_down_all(const DenseFunction& f) {
    DenseFunction g = f;
    const std::size_t n = g.axis_nodes();
    if (g.dim() == 1) {
        for (std::size_t h = n; h >= 2; --h) g.at(h / 2) += g.at(h);
    } else {
        for (std::size_t h1 = n; h1 >= 2; --h1)
            for (std::size_t h2 = 1; h2 <= n; ++h2) g.at(h1 / 2, h2) += g.at(h1, h2);
        for (std::size_t h2 = n; h2 >= 2; --h2)
            for (std::size_t h1 = 1; h1 <= n; ++h1) g.at(h1, h2 / 2) += g.at(h1, h2);
    }
    return g;
}

inline double dense_sum(const DenseFunction& f) {
    KahanSum s;
    f.for_each_node([&](std::size_t h1, std::size_t h2) { s += f.at(h1, h2); });
    return s.value();
}

inline double dense_dot(const DenseFunction& f, const DenseFunction& g) {
    KahanSum s;
    f.for_each_node([&](std::size_t h1, std::size_t h2) { s += f.at(h1, h2) * g.at(h1, h2); });
    return s.value();
}

// Places the atoms of nu on the lattice (all atoms must fit the depth).
inline DenseFunction densify(const AtomicMeasure& nu, std::size_t max_depth) {
    DenseFunction f(nu.dim(), max_depth);
    for (const auto& a : nu.atoms()) f.add(a.box, a.mass);
    return f;
}

// Potential of nu on the whole truncated lattice: V = I(I* nu).
inline DenseFunction dense_potential(const AtomicMeasure& nu, std::size_t max_depth) {
    return hardy_up_all(hardy_down_all(densify(nu, max_depth)));
}

// g(parent) >= sum of g over children, per axis (two axis-children per
// axis on the bi-tree); every I* nu satisfies this.
inline bool is_superadditive(const DenseFunction& g) {
    const std::size_t n = g.axis_nodes();
    bool ok = true;
    if (g.dim() == 1) {
        for (std::size_t h = 1; 2 * h + 1 <= n && ok; ++h)
            ok = g.at(h) >= g.at(2 * h) + g.at(2 * h + 1);
        return ok;
    }
    for (std::size_t h1 = 1; h1 <= n && ok; ++h1)
        for (std::size_t h2 = 1; h2 <= n && ok; ++h2) {
            if (2 * h1 + 1 <= n && g.at(h1, h2) < g.at(2 * h1, h2) + g.at(2 * h1 + 1, h2))
                ok = false;
            if (2 * h2 + 1 <= n && g.at(h1, h2) < g.at(h1, 2 * h2) + g.at(h1, 2 * h2 + 1))
                ok = false;
        }
    return ok;
}

}  // namespace multitree
