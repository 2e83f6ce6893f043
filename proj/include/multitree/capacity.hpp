// Capacities, equilibrium measures and minimal-energy majorants.
//
//   cap(E) = min sum f^2  over f >= 0 with If >= 1 on E.
//
// Two independent routes compute it:
//
//  * tree_capacity_exact — series-parallel effective conductance on T.
//    Every vertex is a unit resistor; grounding the maximal elements of E
//    and applying unit voltage at the root gives cap = 1/R(root), and the
//    current arriving at each element is the equilibrium measure.
//
//  * dual_capacity — on any T^d, maximize the concave dual
//    2|nu| - E[nu] over nu >= 0 supported on reduce_to_maximal(E), by
//    cyclic coordinate ascent with exact per-coordinate line search over
//    the join kernel K(a,b) = common_ancestor_count(a,b). At the optimum
//    cap = |nu| = E[nu], V = 1 on supp nu and V >= 1 on E.
//
// min_energy_majorant generalizes the dual to targets t(a) >= 0
// (maximize 2 sum t_a nu_a - E[nu]); with t == 1 it is the capacity again.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "multitree/boxset.hpp"
#include "multitree/kahan.hpp"
#include "multitree/measure.hpp"
#include "multitree/poset.hpp"

namespace multitree {

struct SolverOptions {
    double rel_gain_tol = 1e-12;  // stop when a sweep gains less than this, relatively
    double kkt_tol = 2.5e-7;      // and the KKT residual is below this
    int max_sweeps = 100000;
    int matrix_free = -1;         // -1 auto (cache while k <= cache_limit), 0 cached, 1 free
    std::size_t cache_limit = 20000;
    bool record_trace = false;
};

struct CapacityCertificate {
    double cap_value = 0.0;
    AtomicMeasure equilibrium{1};
    double primal_energy = 0.0;            // E[equilibrium] = integral of phi^2 for phi = I*nu
    double duality_gap = 0.0;              // primal_energy - (2|nu| - E[nu])
    double min_potential_on_E = 0.0;
    double max_potential_on_support = 0.0;
    bool lower_bound_only = false;
    bool converged = true;
    int sweeps = 0;
    std::size_t constraint_count = 0;
};

namespace detail {

struct QpResult {
    std::vector<double> nu;
    double objective = 0.0;    // 2 sum t nu - E[nu] at the final iterate
    double total_mass = 0.0;
    double energy = 0.0;
    double min_potential = 0.0;             // over all constraints
    double max_support_potential = 0.0;     // over nu_a > 0
    double min_support_potential = 0.0;
    bool converged = false;
    bool monotone = true;
    int sweeps = 0;
    std::vector<std::pair<double, double>> trace;  // (dual lower, primal upper) per sweep
};

// Cyclic coordinate ascent for  max 2 t.nu - nu^T K nu,  nu >= 0.
// The kernel is positive definite on an antichain (each element owns the
// kernel coordinate at itself), so exact line search per coordinate is a
// scalar quadratic and the objective never decreases.
template <typename KernelFn>
QpResult coordinate_ascent(std::size_t k, const std::vector<double>& targets, KernelFn kernel,
                           const SolverOptions& opts) {
    QpResult res;
    if (k == 0) return res;

    const bool cache = opts.matrix_free == 0 ||
                       (opts.matrix_free < 0 && k <= opts.cache_limit);
    std::vector<float> kmat;  // kernel values are integer counts < 2^24: float is exact
    if (cache) {
        kmat.resize(k * k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j)
                kmat[i * k + j] = kmat[j * k + i] = static_cast<float>(kernel(i, j));
    }
    auto kat = [&](std::size_t i, std::size_t j) -> double {
        return cache ? static_cast<double>(kmat[i * k + j])
                     : static_cast<double>(kernel(i, j));
    };

    std::vector<double> diag(k);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        diag[i] = kat(i, i);
        max_diag = std::max(max_diag, diag[i]);
    }

    // uniform start: V <= k * max_diag * mass <= 1
    std::vector<double> nu(k, 1.0 / (static_cast<double>(k) * max_diag));
    std::vector<double> pot(k, 0.0);  // pot[i] = sum_j K(i,j) nu[j]
    for (std::size_t i = 0; i < k; ++i) {
        KahanSum s;
        for (std::size_t j = 0; j < k; ++j) s += kat(i, j) * nu[j];
        pot[i] = s.value();
    }

    auto objective = [&]() {
        KahanSum s;
        for (std::size_t i = 0; i < k; ++i) s += nu[i] * (2.0 * targets[i] - pot[i]);
        return s.value();
    };

    const double target_scale =
        std::max(1e-300, *std::max_element(targets.begin(), targets.end()));
    double obj = objective();
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < k; ++i) {
            const double r = targets[i] - pot[i];
            const double next = std::max(0.0, nu[i] + r / diag[i]);
            const double delta = next - nu[i];
            if (delta == 0.0) continue;
            nu[i] = next;
            if (cache) {
                const float* row = &kmat[i * k];
                for (std::size_t j = 0; j < k; ++j) pot[j] += delta * row[j];
            } else {
                for (std::size_t j = 0; j < k; ++j) pot[j] += delta * kat(i, j);
            }
        }

        const double new_obj = objective();
        if (new_obj < obj - 1e-13 * std::max(1.0, std::abs(obj))) res.monotone = false;

        double kkt = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double r = targets[i] - pot[i];
            kkt = std::max(kkt, nu[i] > 0.0 ? std::abs(r) : std::max(0.0, r));
        }

        if (opts.record_trace) {
            double min_ratio = std::numeric_limits<double>::infinity();
            KahanSum e;
            for (std::size_t i = 0; i < k; ++i) {
                e += nu[i] * pot[i];
                if (targets[i] > 0.0) min_ratio = std::min(min_ratio, pot[i] / targets[i]);
            }
            const double upper = (min_ratio > 0.0 && std::isfinite(min_ratio))
                                     ? e.value() / (min_ratio * min_ratio)
                                     : std::numeric_limits<double>::infinity();
            res.trace.emplace_back(new_obj, upper);
        }

        const bool stalled = new_obj - obj < opts.rel_gain_tol * std::max(std::abs(new_obj), 1e-300);
        obj = new_obj;
        if (stalled && kkt <= opts.kkt_tol * target_scale) {
            res.converged = true;
            ++sweep;
            break;
        }
    }
    res.sweeps = sweep;

    // exact refresh of the potentials for the certificate
    for (std::size_t i = 0; i < k; ++i) {
        KahanSum s;
        for (std::size_t j = 0; j < k; ++j) s += kat(i, j) * nu[j];
        pot[i] = s.value();
    }

    KahanSum mass, en;
    double min_pot = std::numeric_limits<double>::infinity();
    double max_supp = 0.0;
    double min_supp = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        mass += nu[i];
        en += nu[i] * pot[i];
        min_pot = std::min(min_pot, pot[i]);
        if (nu[i] > 0.0) {
            max_supp = std::max(max_supp, pot[i]);
            min_supp = std::min(min_supp, pot[i]);
        }
    }
    res.nu = std::move(nu);
    res.total_mass = mass.value();
    res.energy = en.value();
    res.objective = obj;
    res.min_potential = min_pot;
    res.max_support_potential = max_supp;
    res.min_support_potential = std::isfinite(min_supp) ? min_supp : 0.0;
    return res;
}

inline CapacityCertificate certificate_from(const BoxSet& constraints, const QpResult& qp) {
    CapacityCertificate cert;
    cert.equilibrium = AtomicMeasure(constraints.dim());
    for (std::size_t i = 0; i < qp.nu.size(); ++i)
        if (qp.nu[i] > 0.0) cert.equilibrium.add(constraints[i], qp.nu[i]);
    cert.equilibrium.normalize();
    cert.cap_value = qp.total_mass;
    cert.primal_energy = qp.energy;
    cert.duality_gap = cert.primal_energy - (2.0 * qp.total_mass - qp.energy);
    cert.min_potential_on_E = qp.min_potential;
    cert.max_potential_on_support = qp.max_support_potential;
    cert.converged = qp.converged;
    cert.sweeps = qp.sweeps;
    cert.constraint_count = qp.nu.size();
    return cert;
}

}  // namespace detail

// --- exact capacity on T -------------------------------------------------

namespace detail {

struct TrieNode {
    std::size_t depth = 0;
    bool is_constraint = false;
    std::size_t leaf_index = 0;  // into the reduced antichain when is_constraint
    std::vector<int> children;
};

// Compressed trie over the sorted antichain: the node set is the closure of
// the paths under pairwise joins. Sorted order makes each split a
// contiguous range.
class PathTrie {
public:
    explicit PathTrie(const std::vector<BitPath>& sorted_paths) : paths_(sorted_paths) {
        root_ = build(0, paths_.size(), nullptr);
    }

    const TrieNode& node(int i) const { return nodes_[i]; }
    int root() const { return root_; }

private:
    int build(std::size_t lo, std::size_t hi, const std::size_t* parent_depth) {
        if (hi - lo == 1) {
            nodes_.push_back({paths_[lo].depth(), true, lo, {}});
            return static_cast<int>(nodes_.size() - 1);
        }
        const std::size_t shared = BitPath::lcp(paths_[lo], paths_[hi - 1]);
        (void)parent_depth;
        // first path whose bit at `shared` is 1
        std::size_t split = lo;
        while (split < hi && !paths_[split].bit(shared)) ++split;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({shared, false, 0, {}});
        const int left = build(lo, split, &shared);
        const int right = build(split, hi, &shared);
        nodes_[id].children = {left, right};
        return id;
    }

    const std::vector<BitPath>& paths_;
    std::vector<TrieNode> nodes_;
    int root_;
};

}  // namespace detail

// Exact capacity of a nonempty box set on T with the equilibrium measure
// read off from the current flow.
inline CapacityCertificate tree_capacity_exact(const BoxSet& e, bool reduce = true) {
    if (e.dim() != 1)
        throw std::invalid_argument("tree_capacity_exact: defined on T only");
    if (e.empty()) throw std::invalid_argument("tree_capacity_exact: empty constraint set");

    BoxSet reduced = reduce ? reduce_to_maximal(e) : e;
    std::vector<BitPath> paths;
    paths.reserve(reduced.size());
    for (const auto& b : reduced.boxes()) paths.push_back(b.axis(0));
    std::sort(paths.begin(), paths.end());

    CapacityCertificate cert;
    cert.constraint_count = paths.size();
    cert.equilibrium = AtomicMeasure(1);

    if (paths.front().empty()) {
        // root constraint short-circuits everything else
        cert.cap_value = 1.0;
        cert.equilibrium.add(DyadicBox::root(1), 1.0);
        cert.equilibrium.normalize();
        cert.primal_energy = 1.0;
        cert.duality_gap = 0.0;
        cert.min_potential_on_E = 1.0;
        cert.max_potential_on_support = 1.0;
        return cert;
    }

    detail::PathTrie trie(paths);

    // below_r: resistance of everything strictly below a node's own
    // resistor (0 at a grounded constraint, parallel of the child branches
    // otherwise); a branch from parent depth p into node n then costs
    // (n.depth - p) unit resistors plus below_r(n).
    std::unordered_map<int, double> below_r;
    std::function<double(int)> compute_below = [&](int id) -> double {
        const auto& n = trie.node(id);
        double r = 0.0;
        if (!n.is_constraint) {
            double inv = 0.0;
            for (int c : n.children)
                inv += 1.0 / (static_cast<double>(trie.node(c).depth - n.depth) +
                              compute_below(c));
            r = 1.0 / inv;
        }
        below_r[id] = r;
        return r;
    };
    compute_below(trie.root());

    // unit voltage between a source above the root and the grounded
    // constraints: the arriving currents are the equilibrium masses
    std::vector<double> eq_mass(paths.size(), 0.0);
    std::function<void(int, double)> push_current = [&](int id, double current) {
        const auto& n = trie.node(id);
        if (n.is_constraint) {
            eq_mass[n.leaf_index] = current;
            return;
        }
        double inv = 0.0;
        std::vector<double> child_inv(n.children.size());
        for (std::size_t c = 0; c < n.children.size(); ++c) {
            child_inv[c] = 1.0 / (static_cast<double>(trie.node(n.children[c]).depth - n.depth) +
                                  below_r[n.children[c]]);
            inv += child_inv[c];
        }
        for (std::size_t c = 0; c < n.children.size(); ++c)
            push_current(n.children[c], current * child_inv[c] / inv);
    };

    const auto& top = trie.node(trie.root());
    const double total_r = static_cast<double>(top.depth) + 1.0 + below_r[trie.root()];
    const double cap = 1.0 / total_r;
    push_current(trie.root(), cap);

    for (std::size_t i = 0; i < paths.size(); ++i)
        cert.equilibrium.add(DyadicBox::interval(paths[i]), eq_mass[i]);
    cert.equilibrium.normalize();

    cert.cap_value = cap;
    cert.primal_energy = energy(cert.equilibrium);
    cert.duality_gap =
        cert.primal_energy - (2.0 * cert.equilibrium.total_mass() - cert.primal_energy);
    double min_e = std::numeric_limits<double>::infinity();
    double max_s = 0.0;
    for (const auto& p : paths) {
        const double v = potential(cert.equilibrium, DyadicBox::interval(p));
        min_e = std::min(min_e, v);
        max_s = std::max(max_s, v);
    }
    cert.min_potential_on_E = min_e;
    cert.max_potential_on_support = max_s;
    return cert;
}

// --- dual QP on T^d -------------------------------------------------------

inline CapacityCertificate dual_capacity(const BoxSet& e, const SolverOptions& opts = {}) {
    if (e.empty()) throw std::invalid_argument("dual_capacity: empty constraint set");
    BoxSet reduced = reduce_to_maximal(e);
    for (const auto& b : reduced.boxes()) {
        if (b.is_root()) {
            CapacityCertificate cert;
            cert.cap_value = 1.0;
            cert.equilibrium = AtomicMeasure(e.dim());
            cert.equilibrium.add(DyadicBox::root(e.dim()), 1.0);
            cert.equilibrium.normalize();
            cert.primal_energy = 1.0;
            cert.duality_gap = 0.0;
            cert.min_potential_on_E = 1.0;
            cert.max_potential_on_support = 1.0;
            cert.constraint_count = 1;
            return cert;
        }
    }

    const auto& boxes = reduced.boxes();
    std::vector<double> targets(boxes.size(), 1.0);
    auto qp = detail::coordinate_ascent(
        boxes.size(), targets,
        [&](std::size_t i, std::size_t j) {
            return static_cast<double>(common_ancestor_count(boxes[i], boxes[j]));
        },
        opts);
    return detail::certificate_from(reduced, qp);
}

// Variational lower bound from any candidate measure supported inside the
// down-set of E: max(|nu|^2 / E[nu], 2|nu| - E[nu]) <= cap(E).
inline double capacity_lower_bound(const AtomicMeasure& nu, const BoxSet& e) {
    if (nu.dim() != e.dim())
        throw std::invalid_argument("capacity_lower_bound: dimension mismatch");
    for (const auto& a : nu.atoms()) {
        bool inside = false;
        for (const auto& box : e.boxes())
            if (contains(box, a.box)) {
                inside = true;
                break;
            }
        if (!inside)
            throw std::invalid_argument(
                "capacity_lower_bound: an atom lies outside the down-set of E");
    }
    const double mass = nu.total_mass();
    if (mass == 0.0) return 0.0;
    const double en = energy(nu);
    return std::max(mass * mass / en, 2.0 * mass - en);
}

// --- generalized majorant QP ----------------------------------------------

struct MajorantProblem {
    BoxSet constraints;            // the set S
    std::vector<double> targets;   // t(alpha) >= 0, aligned with constraints
};

struct MajorantSolution {
    AtomicMeasure dual_measure{1};  // optimal phi is I* of this measure
    double objective = 0.0;         // min sum phi^2 = E[dual_measure]
    double dual_lower = 0.0;        // 2 sum t nu - E[nu], <= objective at optimum
    double max_constraint_violation = 0.0;  // max over S of t - V
    bool converged = true;
    int sweeps = 0;
};

// phi(R) for the optimal majorant: the box mass of the dual measure.
inline double majorant_value(const MajorantSolution& sol, const DyadicBox& r) {
    return box_mass(sol.dual_measure, r);
}

inline MajorantSolution min_energy_majorant(const MajorantProblem& problem,
                                            const SolverOptions& opts = {}) {
    const auto& s = problem.constraints;
    if (s.size() != problem.targets.size())
        throw std::invalid_argument("min_energy_majorant: targets misaligned");
    for (double t : problem.targets)
        if (t < 0) throw std::invalid_argument("min_energy_majorant: negative target");

    // Drop dominated rows: a constraint is implied by one at a containing
    // box with an equal-or-larger target, since If only grows downward.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (problem.targets[i] == 0.0) continue;
        bool dominated = false;
        for (std::size_t j = 0; j < s.size() && !dominated; ++j) {
            if (i == j) continue;
            if (problem.targets[j] >= problem.targets[i] && contains(s[j], s[i]) &&
                !(s[j] == s[i] && j > i))
                dominated = true;
        }
        if (!dominated) keep.push_back(i);
    }

    MajorantSolution sol;
    sol.dual_measure = AtomicMeasure(s.dim());
    if (keep.empty()) return sol;  // t == 0 everywhere: phi == 0

    BoxSet active(s.dim());
    std::vector<double> targets;
    for (std::size_t i : keep) {
        active.add(s[i]);
        targets.push_back(problem.targets[i]);
    }

    const auto& boxes = active.boxes();
    auto qp = detail::coordinate_ascent(
        boxes.size(), targets,
        [&](std::size_t i, std::size_t j) {
            return static_cast<double>(common_ancestor_count(boxes[i], boxes[j]));
        },
        opts);

    for (std::size_t i = 0; i < boxes.size(); ++i)
        if (qp.nu[i] > 0.0) sol.dual_measure.add(boxes[i], qp.nu[i]);
    sol.dual_measure.normalize();
    sol.objective = qp.energy;
    sol.dual_lower = qp.objective;
    sol.converged = qp.converged;
    sol.sweeps = qp.sweeps;

    double viol = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        viol = std::max(viol, problem.targets[i] - potential(sol.dual_measure, s[i]));
    sol.max_constraint_violation = viol;
    return sol;
}

// --- level sets -------------------------------------------------------------

// Exact C(x) = cap(D_x) on T: the maximal elements of D_x sit in the
// relevant poset, and the tree recursion finishes the job. x <= |nu| puts
// the root inside D_x, so C(x) = 1 immediately.
inline CapacityCertificate level_set_capacity_tree(const AtomicMeasure& nu, double x) {
    if (nu.dim() != 1)
        throw std::invalid_argument("level_set_capacity_tree: defined on T only");
    RelevantPoset poset(nu);
    // one-ulp slack: |nu| reaches the caller through a different summation
    // order than the poset accumulation
    if (x <= poset.total_mass() * (1.0 + 1e-12)) {
        BoxSet root_only(1);
        root_only.add(DyadicBox::root(1));
        return tree_capacity_exact(root_only);
    }
    const auto maximal = poset.level_set_maximal(x);
    if (maximal.empty()) {
        CapacityCertificate cert;  // empty level set: nothing to majorize
        cert.equilibrium = AtomicMeasure(1);
        return cert;
    }
    return tree_capacity_exact(BoxSet(maximal), /*reduce=*/false);
}

// Certified lower bound for cap(D_x) on T^d via a witness family: members
// of the witness with V >= x form a subset of D_x, and the dual QP value on
// them bounds cap(D_x) from below.
inline CapacityCertificate level_set_capacity_witness(const AtomicMeasure& nu, double x,
                                                      const BoxSet& witness,
                                                      const SolverOptions& opts = {}) {
    BoxSet inside(witness.dim());
    for (const auto& w : witness.boxes())
        if (potential(nu, w) >= x) inside.add(w);
    CapacityCertificate cert;
    if (x <= nu.total_mass() * (1.0 + 1e-12)) {
        BoxSet root_only(witness.dim());
        root_only.add(DyadicBox::root(witness.dim()));
        cert = dual_capacity(root_only, opts);
        return cert;
    }
    if (inside.empty()) {
        cert.equilibrium = AtomicMeasure(witness.dim());
        cert.lower_bound_only = true;
        return cert;
    }
    cert = dual_capacity(inside, opts);
    cert.lower_bound_only = true;
    return cert;
}

}  // namespace multitree
