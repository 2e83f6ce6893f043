// The explicit bi-tree constructions driving the experiments.
//
// Small-energy family (SemParams): log n = 2^s, n = 2^{log n},
// 2^Mexp = n / log n. The unit square carries 2^Mexp diagonal squares Q_j
// of side 2^-Mexp; omega_j is the South-West corner square of side
// 2^{-n-Mexp} inside Q_j; nu charges each omega_j with 1/n^2, so
// |nu| = 1/(n log n). The family F consists of the corner-anchored boxes
// q_{jk} inside Q_j with relative depths (n/2^k, 2^k), k = 0..log n - 1.
//
// Nazarov family (NazarovParams): the same picture with M free and
// x = n 2^-M >= 4; atoms carry mass 2^-M so |mu| = 1, and the disjoint
// box families F_{ji} below each q_{ji} make the restricted partial energy
// grow like x (log x + M), unbounded in M at fixed x.
//
// All quantities that the big experiments need (potentials at q-boxes,
// energies of j-symmetric profiles, family sums) have exact closed forms
// grouped by symmetry orbit; the generic engine checks them at small
// scale. Everything is anchored at South-West (all-zero) corners and the
// diagonal placement of Q_j uses the binary of j on both axes.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "multitree/boxset.hpp"
#include "multitree/capacity.hpp"
#include "multitree/measure.hpp"

namespace multitree {

// --- parameters -------------------------------------------------------------

struct SemParams {
    int s;
    std::uint64_t logn;   // 2^s
    std::uint64_t n;      // 2^{2^s}
    std::uint64_t mexp;   // 2^Mexp = n / log n
    double delta;         // |nu| = 1/(n log n)

    explicit SemParams(int s_) : s(s_) {
        if (s < 2) throw std::invalid_argument("SemParams: s must be at least 2");
        if (s > 5) throw std::invalid_argument("SemParams: s above closed-form range");
        logn = std::uint64_t{1} << s;
        if (logn >= 63) throw std::invalid_argument("SemParams: n overflows");
        n = std::uint64_t{1} << logn;
        mexp = logn - static_cast<std::uint64_t>(s);
        delta = 1.0 / (static_cast<double>(n) * static_cast<double>(logn));
    }

    // paths get materialized only up to here (s=4 already means 65k-bit paths)
    static constexpr int kMaxBuildS = 4;
};

struct NazarovParams {
    std::uint64_t n;  // power of two
    std::uint64_t m;  // atom count 2^M, masses 2^-M
    double x;         // n 2^-M, must be >= 4

    NazarovParams(std::uint64_t n_, std::uint64_t m_) : n(n_), m(m_) {
        if (n == 0 || (n & (n - 1)) != 0)
            throw std::invalid_argument("NazarovParams: n must be a power of two");
        if (m == 0 || m >= 60) throw std::invalid_argument("NazarovParams: bad M");
        if (n < (std::uint64_t{4} << m))
            throw std::invalid_argument("NazarovParams: x = n 2^-M must be at least 4");
        x = static_cast<double>(n) / static_cast<double>(std::uint64_t{1} << m);
    }

    std::uint64_t logn() const {
        std::uint64_t v = n, l = 0;
        while (v > 1) {
            v >>= 1;
            ++l;
        }
        return l;
    }
};

// Per-box masses of a j-symmetric measure charging rho_k on every q_{jk}.
struct SymmetricProfile {
    std::vector<double> rho;  // indexed by k
};

// --- shared geometry --------------------------------------------------------

namespace corner {

// x-axis path of a box anchored at Q_j's South-West corner with relative
// depth `rel`: binary of j in `mbits` bits followed by `rel` zeros.
inline BitPath anchored_path(std::uint64_t j, std::uint64_t mbits, std::uint64_t rel) {
    BitPath p = BitPath::from_index(j, static_cast<std::size_t>(mbits));
    p.append_zeros(static_cast<std::size_t>(rel));
    return p;
}

inline DyadicBox anchored_box(std::uint64_t j, std::uint64_t mbits, std::uint64_t rel_x,
                              std::uint64_t rel_y) {
    return DyadicBox::rect(anchored_path(j, mbits, rel_x), anchored_path(j, mbits, rel_y));
}

// sum over j' != j of (lcp(j, j') + 1)^2 for M-bit indices; independent of
// j: exactly 2^{M-1-L} indices agree with j in the first L bits and differ
// at bit L.
inline double cross_diagonal_sum(std::uint64_t mbits) {
    double s = 0.0;
    for (std::uint64_t l = 0; l < mbits; ++l)
        s += static_cast<double>(std::uint64_t{1} << (mbits - 1 - l)) *
             static_cast<double>((l + 1) * (l + 1));
    return s;
}

}  // namespace corner

// --- small-energy construction ----------------------------------------------

// The measure nu: n/log n corner atoms of mass 1/n^2 at depth (n+Mexp, n+Mexp).
inline AtomicMeasure build_nu(const SemParams& p) {
    if (p.s > SemParams::kMaxBuildS)
        throw std::invalid_argument("build_nu: s too large to materialize paths");
    AtomicMeasure nu(2);
    const double mass = 1.0 / (static_cast<double>(p.n) * static_cast<double>(p.n));
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.mexp); ++j)
        nu.add(corner::anchored_box(j, p.mexp, p.n, p.n), mass);
    nu.normalize();
    return nu;
}

// q_{jk}: the box inside Q_j with relative depths (n/2^k, 2^k), anchored at
// the corner; contains omega_j, contained in Q_j.
inline DyadicBox q_box(const SemParams& p, std::uint64_t j, std::uint64_t k) {
    return corner::anchored_box(j, p.mexp, p.n >> k, std::uint64_t{1} << k);
}

// F = union of the q_{jk}, k = 0..log n - 1 (the k = 0 member uses the
// general-term side 2^{-2^k}, see the report headers), |F| = n.
inline BoxSet build_F(const SemParams& p) {
    if (p.s > SemParams::kMaxBuildS)
        throw std::invalid_argument("build_F: s too large to materialize paths");
    BoxSet f(2);
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.mexp); ++j)
        for (std::uint64_t k = 0; k < p.logn; ++k) f.add(q_box(p, j, k));
    f.normalize();
    return f;
}

// V^nu(q_{jk}) for nu = build_nu, same value for every j: the atom below
// contributes the full ancestor grid of q_{jk}, the other atoms contribute
// through the diagonal joins.
inline double corner_potential_at_q(const SemParams& p, std::uint64_t k) {
    const double m = static_cast<double>(p.mexp);
    const double own = (m + static_cast<double>(p.n >> k) + 1.0) *
                       (m + static_cast<double>(std::uint64_t{1} << k) + 1.0);
    const double mass = 1.0 / (static_cast<double>(p.n) * static_cast<double>(p.n));
    return mass * (own + corner::cross_diagonal_sum(p.mexp));
}

// Recorded Lemma-g interval [c1, c2]: the range of n * V^nu(q_{jk}) over k.
struct LemmaGInterval {
    double lo;
    double hi;
    double mid() const { return 0.5 * (lo + hi); }
};

inline LemmaGInterval lemma_g_interval(const SemParams& p) {
    LemmaGInterval iv{0.0, 0.0};
    for (std::uint64_t k = 0; k < p.logn; ++k) {
        const double v = static_cast<double>(p.n) * corner_potential_at_q(p, k);
        if (k == 0) {
            iv.lo = iv.hi = v;
        } else {
            iv.lo = std::min(iv.lo, v);
            iv.hi = std::max(iv.hi, v);
        }
    }
    return iv;
}

// One-dimensional control measure: the same corner atoms projected on T.
inline AtomicMeasure build_nu_tree(const SemParams& p) {
    if (p.s > SemParams::kMaxBuildS)
        throw std::invalid_argument("build_nu_tree: s too large to materialize paths");
    AtomicMeasure nu(1);
    const double mass = 1.0 / (static_cast<double>(p.n) * static_cast<double>(p.n));
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.mexp); ++j)
        nu.add(DyadicBox::interval(corner::anchored_path(j, p.mexp, p.n)), mass);
    nu.normalize();
    return nu;
}

// --- j-symmetric closed forms -----------------------------------------------

// Join kernel between q_{jk} and q_{j'i} summed over one orbit:
// same j gives (M + n/2^max + 1)(M + 2^min + 1), different j the diagonal
// cross sum.
inline double sym_q_kernel_same(const SemParams& p, std::uint64_t k, std::uint64_t i) {
    const double m = static_cast<double>(p.mexp);
    const std::uint64_t kmax = std::max(k, i), kmin = std::min(k, i);
    return (m + static_cast<double>(p.n >> kmax) + 1.0) *
           (m + static_cast<double>(std::uint64_t{1} << kmin) + 1.0);
}

struct SymmetricEvaluation {
    double energy = 0.0;
    std::vector<double> potential_at_q;  // V at q_{jk}, independent of j
    double total_mass = 0.0;
};

// Exact energy and potentials of the measure charging rho_k on every q_{jk},
// in O(log^2 n) independent of the 2^Mexp orbit size.
inline SymmetricEvaluation symmetric_energy_and_potential(const SemParams& p,
                                                          const SymmetricProfile& profile) {
    if (profile.rho.size() != p.logn)
        throw std::invalid_argument("symmetric_energy_and_potential: profile length != log n");
    for (double r : profile.rho)
        if (r < 0) throw std::invalid_argument("symmetric_energy_and_potential: negative mass");

    const double orbit = static_cast<double>(std::uint64_t{1} << p.mexp);
    const double cross = corner::cross_diagonal_sum(p.mexp);
    SymmetricEvaluation out;
    out.potential_at_q.resize(p.logn, 0.0);
    KahanSum total, en;
    for (std::uint64_t k = 0; k < p.logn; ++k) {
        KahanSum v;
        for (std::uint64_t i = 0; i < p.logn; ++i)
            v += profile.rho[i] * (sym_q_kernel_same(p, k, i) + cross);
        out.potential_at_q[k] = v.value();
        en += profile.rho[k] * v.value();
        total += profile.rho[k];
    }
    out.energy = orbit * en.value();
    out.total_mass = orbit * total.value();
    return out;
}

// Exact cap(F) through the j-symmetric reduction: the capacity QP is
// invariant under the transitive bit-flip group on j and strictly concave
// on the antichain F, so its optimum is j-symmetric and the log n orbit
// masses solve the reduced problem with kernel K_same + cross.
struct SymmetricCapacity {
    double cap = 0.0;
    std::vector<double> rho;
    double duality_gap = 0.0;
    bool converged = true;
};

inline SymmetricCapacity symmetric_capacity_F(const SemParams& p,
                                              const SolverOptions& opts = {}) {
    const double cross = corner::cross_diagonal_sum(p.mexp);
    std::vector<double> targets(p.logn, 1.0);
    auto qp = detail::coordinate_ascent(
        p.logn, targets,
        [&](std::size_t k, std::size_t i) { return sym_q_kernel_same(p, k, i) + cross; },
        opts);
    const double orbit = static_cast<double>(std::uint64_t{1} << p.mexp);
    SymmetricCapacity out;
    out.rho = qp.nu;
    out.cap = orbit * qp.total_mass;
    out.duality_gap = orbit * (qp.energy - (2.0 * qp.total_mass - qp.energy));
    out.converged = qp.converged;
    return out;
}

// --- Nazarov construction -----------------------------------------------------

// mu: 2^M corner atoms of mass 2^-M at depth (n+M, n+M); |mu| = 1.
inline AtomicMeasure build_nazarov_measure(const NazarovParams& p) {
    AtomicMeasure mu(2);
    const double mass = 1.0 / static_cast<double>(std::uint64_t{1} << p.m);
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.m); ++j)
        mu.add(corner::anchored_box(j, p.m, p.n, p.n), mass);
    mu.normalize();
    return mu;
}

inline DyadicBox nazarov_q_box(const NazarovParams& p, std::uint64_t j, std::uint64_t i) {
    return corner::anchored_box(j, p.m, p.n >> i, std::uint64_t{1} << i);
}

inline BoxSet build_nazarov_q(const NazarovParams& p) {
    BoxSet q(2);
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.m); ++j)
        for (std::uint64_t i = 0; i < p.logn(); ++i) q.add(nazarov_q_box(p, j, i));
    q.normalize();
    return q;
}

// V^mu at a corner-anchored box inside Q_j with relative depths (a, b):
// exact, independent of j.
inline double nazarov_potential_rel(const NazarovParams& p, std::uint64_t rel_x,
                                    std::uint64_t rel_y) {
    const double m = static_cast<double>(p.m);
    const double mass = 1.0 / static_cast<double>(std::uint64_t{1} << p.m);
    const double own =
        (m + static_cast<double>(rel_x) + 1.0) * (m + static_cast<double>(rel_y) + 1.0);
    return mass * (own + corner::cross_diagonal_sum(p.m));
}

inline double nazarov_potential_at_q(const NazarovParams& p, std::uint64_t i) {
    return nazarov_potential_rel(p, p.n >> i, std::uint64_t{1} << i);
}

// Trimmed family F_{ji}: corner-anchored boxes between q_{ji} and Q_j whose
// relative x-depth lies in (n/2^{i+1}, n/2^i]; the depth windows make the
// families disjoint across i and the anchoring across j.
inline std::uint64_t nazarov_family_size(const NazarovParams& p, std::uint64_t i) {
    return (p.n >> (i + 1)) * ((std::uint64_t{1} << i) + 1);
}

// Grid count before trimming: all boxes between q_{ji} and Q_j.
inline std::uint64_t nazarov_family_size_full(const NazarovParams& p, std::uint64_t i) {
    return ((p.n >> i) + 1) * ((std::uint64_t{1} << i) + 1);
}

template <typename Fn>
void visit_nazarov_family(const NazarovParams& p, std::uint64_t j, std::uint64_t i, Fn&& fn) {
    for (std::uint64_t a = (p.n >> (i + 1)) + 1; a <= (p.n >> i); ++a)
        for (std::uint64_t b = 0; b <= (std::uint64_t{1} << i); ++b)
            fn(corner::anchored_box(j, p.m, a, b), a, b);
}

// Restricted partial energy S(M): the sum of mu(R)^2 over the union of the
// F_{ji} with V^mu(R) <= threshold. Every family box contains exactly one
// atom, so mu(R)^2 = 2^-2M; the j orbit contributes a factor 2^M and the
// (i, a, b) grid is walked directly.
struct NazarovRestrictedSum {
    double sum = 0.0;
    std::uint64_t boxes_counted = 0;   // per orbit member
    std::uint64_t boxes_skipped = 0;   // V above the threshold
};

inline NazarovRestrictedSum nazarov_restricted_energy(const NazarovParams& p, double threshold) {
    NazarovRestrictedSum out;
    const double orbit = static_cast<double>(std::uint64_t{1} << p.m);
    const double mass2 = 1.0 / (orbit * orbit);
    KahanSum s;
    for (std::uint64_t i = 0; i < p.logn(); ++i) {
        for (std::uint64_t a = (p.n >> (i + 1)) + 1; a <= (p.n >> i); ++a)
            for (std::uint64_t b = 0; b <= (std::uint64_t{1} << i); ++b) {
                if (nazarov_potential_rel(p, a, b) <= threshold) {
                    s += mass2;
                    ++out.boxes_counted;
                } else {
                    ++out.boxes_skipped;
                }
            }
    }
    out.sum = orbit * s.value();
    return out;
}

// One-dimensional control for the Nazarov pipeline.
inline AtomicMeasure build_nazarov_measure_tree(const NazarovParams& p) {
    AtomicMeasure mu(1);
    const double mass = 1.0 / static_cast<double>(std::uint64_t{1} << p.m);
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << p.m); ++j)
        mu.add(DyadicBox::interval(corner::anchored_path(j, p.m, p.n)), mass);
    mu.normalize();
    return mu;
}

// Corner-anchored witness for the level set D_x = {V^nu >= x} of a corner
// measure: per diagonal square, the staircase of minimal (a, b) depth pairs
// whose anchored box still carries potential >= x. The potential grows with
// either depth, so the minimal points of the up-set form an antichain; the
// union over j (shared shallow boxes deduplicated) is a subset of D_x and
// its capacity certifies a lower bound on cap(D_x).
inline BoxSet corner_level_set_witness(const AtomicMeasure& nu, std::uint64_t mbits,
                                       std::uint64_t n, double x) {
    BoxSet witness(2);
    const std::uint64_t max_depth = n + mbits;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << mbits); ++j) {
        std::uint64_t b = max_depth + 1;  // b_min is nonincreasing in a
        std::uint64_t last_emitted = max_depth + 2;
        for (std::uint64_t a = 0; a <= max_depth; ++a) {
            if (b == 0) break;  // deeper a cannot improve on (a', 0)
            const std::uint64_t start = std::min(b, max_depth);
            if (potential(nu, corner::anchored_box(j, mbits, a, start)) < x) continue;
            std::uint64_t lo = start;
            while (lo > 0 && potential(nu, corner::anchored_box(j, mbits, a, lo - 1)) >= x)
                --lo;
            b = lo;
            if (b < last_emitted) {
                witness.add(corner::anchored_box(j, mbits, a, b));
                last_emitted = b;
            }
        }
    }
    witness.normalize();
    return witness;
}

// --- side rectangle bookkeeping ----------------------------------------------

// The three auxiliary classes of rectangles containing q_{0i} besides the
// main between-q-and-Q grid:
//   tall:    x-exponent n/2^{i'}, i <= i' <= log n, sticking out above Q_0
//            by 2^m, 1 <= m <= M;
//   long:    mirror image with y-exponent 2^{j'}, 0 <= j' <= i;
//   m-large: containing the corner square of side 2^{m-M} but not the next
//            one, m = 2..M.
struct SideRectangleCounts {
    std::uint64_t tall = 0;
    std::uint64_t long_ = 0;
    std::uint64_t mlarge = 0;
    double tall_contribution = 0.0;    // each tall/long box holds one atom
    double long_contribution = 0.0;
    double mlarge_contribution = 0.0;  // class m holds 2^{m-M} of the mass per box
};

inline SideRectangleCounts count_side_rectangles(const NazarovParams& p, std::uint64_t i) {
    if (i >= p.logn()) throw std::invalid_argument("count_side_rectangles: bad index");
    SideRectangleCounts c;
    const double atom_mass = 1.0 / static_cast<double>(std::uint64_t{1} << p.m);
    c.tall = p.m * (p.logn() - i + 1);
    c.long_ = p.m * (i + 1);
    c.tall_contribution = static_cast<double>(c.tall) * atom_mass;
    c.long_contribution = static_cast<double>(c.long_) * atom_mass;
    for (std::uint64_t m = 2; m <= p.m; ++m) {
        const std::uint64_t in_class = 2 * (p.m - m) + 1;
        c.mlarge += in_class;
        c.mlarge_contribution += static_cast<double>(in_class) *
                                 std::ldexp(1.0, static_cast<int>(m) - static_cast<int>(p.m));
    }
    return c;
}

}  // namespace multitree
