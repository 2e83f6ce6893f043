// Atomic measures on T^d and their potentials and energies.
//
// A measure is a finite nonnegative mass assignment on vertices; atoms may
// sit on any vertex, not only leaves. The three basic quantities:
//
//   box mass   nu(R)   = sum of masses of atoms contained in R,
//   potential  V(a)    = sum of nu(R) over boxes R containing a,
//   energy     E[nu]   = sum over all boxes of nu(R)^2.
//
// Both the potential and the energy reduce to the join kernel
// K(a, b) = common_ancestor_count(a, b): a box R picks up the mass of atom
// a with R containing alpha exactly when R contains join(alpha, box_a), so
//
//   V(alpha) = sum_a m_a K(alpha, a),     E = sum_{a,b} m_a m_b K(a, b).
//
// These identities are exact at any depth and cost O(#atoms) resp.
// O(#atoms^2); the dense and poset-enumeration routes exist as independent
// oracles of the same values.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multitree/box.hpp"
#include "multitree/kahan.hpp"

namespace multitree {

struct Atom {
    DyadicBox box;
    double mass;
};

class AtomicMeasure {
public:
    explicit AtomicMeasure(int dim = 1) : dim_(dim) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("AtomicMeasure: bad dimension");
    }

    int dim() const { return dim_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t atom_count() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    void add(DyadicBox box, double mass) {
        if (box.dim() != dim_)
            throw std::invalid_argument("AtomicMeasure::add: dimension mismatch");
        if (mass < 0) throw std::invalid_argument("AtomicMeasure::add: negative mass");
        if (mass == 0) return;
        atoms_.push_back({std::move(box), mass});
        normalized_ = false;
    }

    // Sorts atoms in box serialization order and merges duplicates; all
    // reductions then run in a deterministic order.
    void normalize() {
        if (normalized_) return;
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.box < b.box; });
        std::vector<Atom> merged;
        merged.reserve(atoms_.size());
        for (auto& a : atoms_) {
            if (!merged.empty() && merged.back().box == a.box)
                merged.back().mass += a.mass;
            else
                merged.push_back(std::move(a));
        }
        atoms_ = std::move(merged);
        normalized_ = true;
    }

    AtomicMeasure scaled(double t) const {
        if (t < 0) throw std::invalid_argument("AtomicMeasure::scaled: negative factor");
        AtomicMeasure m(dim_);
        for (const auto& a : atoms_) m.add(a.box, a.mass * t);
        m.normalize();
        return m;
    }

    double total_mass() const {
        KahanSum s;
        for (const auto& a : atoms_) s += a.mass;
        return s.value();
    }

private:
    int dim_;
    std::vector<Atom> atoms_;
    bool normalized_ = false;
};

// nu(R): total mass of atoms contained in R.
inline double box_mass(const AtomicMeasure& nu, const DyadicBox& r) {
    KahanSum s;
    for (const auto& a : nu.atoms())
        if (contains(r, a.box)) s += a.mass;
    return s.value();
}

// V(alpha) = sum over R containing alpha of nu(R), via the join kernel.
inline double potential(const AtomicMeasure& nu, const DyadicBox& alpha) {
    KahanSum s;
    for (const auto& a : nu.atoms())
        s += a.mass * static_cast<double>(common_ancestor_count(alpha, a.box));
    return s.value();
}

// E[nu] = sum over all boxes of nu(R)^2, via the pairwise join kernel.
inline double energy(const AtomicMeasure& nu) {
    const auto& atoms = nu.atoms();
    KahanSum s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        s += atoms[i].mass * atoms[i].mass *
             static_cast<double>(atoms[i].box.ancestor_count());
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            s += 2.0 * atoms[i].mass * atoms[j].mass *
                 static_cast<double>(common_ancestor_count(atoms[i].box, atoms[j].box));
    }
    return s.value();
}

// --- measure file format ----------------------------------------------
//
// Line-oriented text, one atom per line:
//   <box-serialization> <mass>
// where the mass is a decimal or the exact power form 2^-k; '#' starts a
// comment. Example:
//   # two atoms
//   0010x01 2^-8
//   exe 0.5

inline double parse_mass(const std::string& text) {
    if (text.rfind("2^", 0) == 0) {
        const long k = std::stol(text.substr(2));
        return std::ldexp(1.0, static_cast<int>(k));
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("bad mass literal: " + text);
    return v;
}

inline std::string format_mass(double mass) {
    int exp2 = 0;
    const double frac = std::frexp(mass, &exp2);
    if (frac == 0.5 && exp2 <= 0 && exp2 > -1000) {
        // exact power of two at or below 1: write the 2^-k literal
        std::ostringstream os;
        os << "2^" << (exp2 - 1);
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << mass;
    return os.str();
}

inline AtomicMeasure read_measure(std::istream& in) {
    std::vector<std::pair<DyadicBox, double>> parsed;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string box_text, mass_text;
        if (!(ls >> box_text)) continue;
        if (!(ls >> mass_text))
            throw std::invalid_argument("measure line missing mass: " + line);
        parsed.emplace_back(DyadicBox::parse(box_text), parse_mass(mass_text));
    }
    if (parsed.empty()) throw std::invalid_argument("empty measure file");
    AtomicMeasure nu(parsed[0].first.dim());
    for (auto& [box, mass] : parsed) nu.add(std::move(box), mass);
    nu.normalize();
    return nu;
}

inline void write_measure(std::ostream& out, const AtomicMeasure& nu) {
    for (const auto& a : nu.atoms()) out << a.box.str() << ' ' << format_mass(a.mass) << '\n';
}

}  // namespace multitree
