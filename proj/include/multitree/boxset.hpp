// Finite sets of dyadic boxes and reduction to the maximal antichain.
//
// Constraint sets for capacity problems: since the Hardy sum If only grows
// when a box shrinks, a constraint If >= 1 at a box implies it at every
// sub-box, so only the order-maximal (largest) elements of a set matter.

#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "multitree/box.hpp"

namespace multitree {

class BoxSet {
public:
    BoxSet() : dim_(1) {}

    explicit BoxSet(int dim) : dim_(dim) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("BoxSet: bad dimension");
    }

    explicit BoxSet(std::vector<DyadicBox> boxes) {
        if (boxes.empty()) throw std::invalid_argument("BoxSet: empty box list");
        dim_ = boxes[0].dim();
        for (const auto& b : boxes)
            if (b.dim() != dim_) throw std::invalid_argument("BoxSet: mixed dimensions");
        boxes_ = std::move(boxes);
    }

    int dim() const { return dim_; }
    bool empty() const { return boxes_.empty(); }
    std::size_t size() const { return boxes_.size(); }
    const std::vector<DyadicBox>& boxes() const { return boxes_; }
    const DyadicBox& operator[](std::size_t i) const { return boxes_[i]; }

    void add(DyadicBox b) {
        if (b.dim() != dim_) throw std::invalid_argument("BoxSet::add: dimension mismatch");
        boxes_.push_back(std::move(b));
    }

    // Deterministic canonical order (serialization order), duplicates removed.
    void normalize() {
        std::sort(boxes_.begin(), boxes_.end());
        boxes_.erase(std::unique(boxes_.begin(), boxes_.end()), boxes_.end());
    }

private:
    int dim_;
    std::vector<DyadicBox> boxes_;
};

// Text form: one box serialization per line, '#' comments.
inline BoxSet read_boxset(std::istream& in) {
    std::vector<DyadicBox> boxes;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string text;
        if (ls >> text) boxes.push_back(DyadicBox::parse(text));
    }
    if (boxes.empty()) throw std::invalid_argument("empty box set file");
    return BoxSet(std::move(boxes));
}

inline void write_boxset(std::ostream& out, const BoxSet& s) {
    for (const auto& b : s.boxes()) out << b.str() << '\n';
}

// Subset of S keeping only boxes with no strict container in S. Every
// element of S is contained in some retained element and retained elements
// are pairwise non-nested. Sorting by depth sum limits the containment
// scan to candidates that could actually be containers.
inline BoxSet reduce_to_maximal(const BoxSet& s) {
    std::vector<DyadicBox> sorted = s.boxes();
    std::sort(sorted.begin(), sorted.end(), [](const DyadicBox& a, const DyadicBox& b) {
        if (a.depth_sum() != b.depth_sum()) return a.depth_sum() < b.depth_sum();
        return a < b;
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    BoxSet out(s.dim());
    for (const auto& b : sorted) {
        bool covered = false;
        for (const auto& kept : out.boxes()) {
            if (kept.depth_sum() >= b.depth_sum()) break;
            if (contains(kept, b)) {
                covered = true;
                break;
            }
        }
        if (!covered) out.add(b);
    }
    return out;
}

}  // namespace multitree
