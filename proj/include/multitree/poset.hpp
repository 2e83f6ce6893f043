// The relevant poset of a measure: ancestor-closure of the support.
//
// Only boxes containing at least one atom carry positive box mass, so
// every global sum over the lattice (energy, partial energy, truncated
// potentials, level sets on T) restricts to this finite set. Nodes are
// stored parents-before-children (depth sum, then serialization order),
// which makes the inclusion-exclusion potential recursion a single forward
// pass and keeps every reduction deterministic.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "multitree/box.hpp"
#include "multitree/kahan.hpp"
#include "multitree/measure.hpp"

namespace multitree {

struct PosetNode {
    DyadicBox box;
    double nu = 0.0;  // box mass nu(R)
    double pot = 0.0; // potential V(R)
};

class RelevantPoset {
public:
    // Construction refuses instances whose raw ancestor enumeration exceeds
    // the budget; larger experiments must go through the closed-form and
    // symmetry paths instead of materializing the closure.
    static constexpr std::uint64_t kMaxBoxes = std::uint64_t{1} << 28;

    enum class Fill { kClosedForm, kRecursion };

    explicit RelevantPoset(const AtomicMeasure& nu, Fill fill = Fill::kClosedForm)
        : dim_(nu.dim()) {
        std::uint64_t raw = 0;
        for (const auto& a : nu.atoms()) raw += a.box.ancestor_count();
        if (raw > kMaxBoxes)
            throw std::length_error("RelevantPoset: ancestor closure exceeds the memory budget");

        std::unordered_map<DyadicBox, double> mass;
        mass.reserve(static_cast<std::size_t>(raw));
        for (const auto& a : nu.atoms())
            visit_ancestors(a.box, [&](const DyadicBox& r) { mass[r] += a.mass; });

        nodes_.reserve(mass.size());
        for (auto& [box, m] : mass) nodes_.push_back({box, m, 0.0});
        std::sort(nodes_.begin(), nodes_.end(), [](const PosetNode& a, const PosetNode& b) {
            if (a.box.depth_sum() != b.box.depth_sum())
                return a.box.depth_sum() < b.box.depth_sum();
            return a.box < b.box;
        });
        index_.reserve(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i].box] = i;

        if (fill == Fill::kClosedForm)
            fill_closed_form(nu);
        else
            fill_recursion();
    }

    int dim() const { return dim_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<PosetNode>& nodes() const { return nodes_; }

    const PosetNode* find(const DyadicBox& box) const {
        const auto it = index_.find(box);
        return it == index_.end() ? nullptr : &nodes_[it->second];
    }

    // Total mass = nu(root); the root is always a member.
    double total_mass() const { return nodes_.front().nu; }

    // E[nu] = sum over the poset of nu(R)^2.
    double energy() const {
        KahanSum s;
        for (const auto& n : nodes_) s += n.nu * n.nu;
        return s.value();
    }

    // E_eps[nu] = sum over boxes with V(R) <= eps of nu(R)^2; ties at
    // V = eps are included.
    double partial_energy(double eps) const {
        KahanSum s;
        for (const auto& n : nodes_)
            if (n.pot <= eps) s += n.nu * n.nu;
        return s.value();
    }

    // V_eps(alpha) = sum over R containing alpha with V(R) <= eps of nu(R).
    double truncated_potential(double eps, const DyadicBox& alpha) const {
        KahanSum s;
        visit_ancestors(alpha, [&](const DyadicBox& r) {
            if (const PosetNode* n = find(r); n && n->pot <= eps) s += n->nu;
        });
        return s.value();
    }

    double max_potential() const {
        double m = 0.0;
        for (const auto& n : nodes_) m = std::max(m, n.pot);
        return m;
    }

    double min_potential() const {
        double m = nodes_.empty() ? 0.0 : nodes_.front().pot;
        for (const auto& n : nodes_) m = std::min(m, n.pot);
        return m;
    }

    // Maximal elements of the level set D_x = {V >= x} on T. On the simple
    // tree the potential changes only across poset members, so the maximal
    // boxes of D_x are poset nodes whose parent is below the threshold (or
    // the root when V(root) = |nu| >= x already).
    std::vector<DyadicBox> level_set_maximal(double x) const {
        if (dim_ != 1)
            throw std::invalid_argument("level_set_maximal: exhaustive level sets only on T");
        std::vector<DyadicBox> out;
        if (total_mass() >= x) {
            out.push_back(DyadicBox::root(1));
            return out;
        }
        for (const auto& n : nodes_) {
            if (n.pot < x || n.box.is_root()) continue;
            const PosetNode* parent = find(DyadicBox::interval(n.box.axis(0).parent()));
            const double parent_pot = parent ? parent->pot : 0.0;
            if (parent_pot < x) out.push_back(n.box);
        }
        return out;
    }

private:
    void fill_closed_form(const AtomicMeasure& nu) {
        for (auto& n : nodes_) n.pot = potential(nu, n.box);
    }

    // V(R) = sum over nonempty axis subsets S of (-1)^{|S|+1} V(parent_S R)
    // plus nu(R); the root starts the recursion at V = |nu|. Kept as an
    // independent route: tests require it to agree with the closed form.
    void fill_recursion() {
        for (auto& n : nodes_) {
            std::vector<std::size_t> droppable;
            for (int t = 0; t < dim_; ++t)
                if (n.box.axis_depth(t) > 0) droppable.push_back(t);
            double v = n.nu;
            for (std::uint32_t mask = 1; mask < (1u << droppable.size()); ++mask) {
                std::array<std::size_t, 3> lens{n.box.axis_depth(0), n.box.axis_depth(1),
                                                n.box.axis_depth(2)};
                for (std::size_t i = 0; i < droppable.size(); ++i)
                    if (mask & (1u << i)) --lens[droppable[i]];
                const PosetNode* p = find(prefix_box(n.box, lens));
                if (!p) throw std::logic_error("RelevantPoset: closure misses a parent");
                v += (__builtin_popcount(mask) % 2 == 1) ? p->pot : -p->pot;
            }
            n.pot = v;
        }
    }

    int dim_;
    std::vector<PosetNode> nodes_;
    std::unordered_map<DyadicBox, std::size_t> index_;
};

// E_eps[nu] through a freshly built poset.
inline double partial_energy(const AtomicMeasure& nu, double eps) {
    if (eps < 0) throw std::invalid_argument("partial_energy: eps must be nonnegative");
    return RelevantPoset(nu).partial_energy(eps);
}

// V_eps(alpha) through a freshly built poset.
inline double truncated_potential(const AtomicMeasure& nu, double eps, const DyadicBox& alpha) {
    return RelevantPoset(nu).truncated_potential(eps, alpha);
}

}  // namespace multitree
