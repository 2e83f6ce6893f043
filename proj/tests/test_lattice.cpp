#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "multitree/boxset.hpp"
#include "multitree/rng.hpp"

using namespace multitree;

namespace {

DyadicBox box2(const char* x, const char* y) {
    return DyadicBox::rect(BitPath::parse(x), BitPath::parse(y));
}

DyadicBox random_box(Rng& rng, int dim, std::size_t max_depth) {
    std::vector<BitPath> axes;
    for (int t = 0; t < dim; ++t) {
        BitPath p;
        const std::size_t d = rng.in(0, max_depth);
        for (std::size_t i = 0; i < d; ++i) p.push_back(rng.coin());
        axes.push_back(std::move(p));
    }
    return DyadicBox(std::move(axes));
}

// Enumerates every box of the product lattice with axis depths bounded by
// `bound`; independent of the ancestor walk under test.
std::vector<DyadicBox> all_boxes_2d(std::size_t bx, std::size_t by) {
    std::vector<DyadicBox> out;
    for (std::size_t dx = 0; dx <= bx; ++dx)
        for (std::uint64_t ix = 0; ix < (std::uint64_t{1} << dx); ++ix)
            for (std::size_t dy = 0; dy <= by; ++dy)
                for (std::uint64_t iy = 0; iy < (std::uint64_t{1} << dy); ++iy)
                    out.push_back(DyadicBox::rect(BitPath::from_index(ix, dx),
                                                  BitPath::from_index(iy, dy)));
    return out;
}

}  // namespace

TEST_CASE("bit paths: prefixes, lcp, ordering") {
    const BitPath p = BitPath::parse("0010");
    CHECK(p.depth() == 4);
    CHECK(p.str() == "0010");
    CHECK(p.prefix(2).str() == "00");
    CHECK(p.parent().str() == "001");
    CHECK(BitPath::parse("e").empty());
    CHECK(BitPath::parse("e").str() == "e");

    CHECK(BitPath::lcp(BitPath::parse("101"), BitPath::parse("00")) == 0);
    CHECK(BitPath::lcp(BitPath::parse("00"), BitPath::parse("01")) == 1);
    CHECK(BitPath::lcp(p, p) == 4);
    CHECK(BitPath::parse("00").is_prefix_of(p));
    CHECK_FALSE(BitPath::parse("01").is_prefix_of(p));

    // long runs of zeros: the dominant workload
    BitPath deep = BitPath::from_index(5, 3);  // 101
    deep.append_zeros(1000);
    CHECK(deep.depth() == 1003);
    CHECK(deep.bit(2) == 1);
    CHECK(deep.bit(500) == 0);
    CHECK(BitPath::parse("101").is_prefix_of(deep));
    BitPath other = BitPath::from_index(5, 3);
    other.append_zeros(600);
    other.push_back(1);
    CHECK(BitPath::lcp(deep, other) == 603);
    CHECK(deep.prefix(603) == other.prefix(603));
}

TEST_CASE("from_index matches bit strings") {
    CHECK(BitPath::from_index(5, 3).str() == "101");
    CHECK(BitPath::from_index(0, 2).str() == "00");
    CHECK(BitPath::from_index(5, 3).index() == 5);
}

TEST_CASE("contains: spec cases") {
    const DyadicBox root = DyadicBox::root(2);
    CHECK(contains(root, box2("0010", "01")));
    CHECK(contains(root, root));

    // a = [0,1/4] x [0,1/2], b = [0,1/8] x [0,1/2]
    CHECK(contains(box2("00", "0"), box2("000", "0")));
    // b' = [1/4,1/2] x [0,1/4]: paths 00 vs 01 are not nested on axis 1
    CHECK_FALSE(contains(box2("00", "0"), box2("01", "00")));
    CHECK_FALSE(contains(box2("000", "0"), box2("00", "0")));

    CHECK_THROWS_AS(contains(DyadicBox::root(1), root), std::invalid_argument);
}

TEST_CASE("join: spec cases") {
    const DyadicBox b = box2("0010", "01");
    CHECK(join(b, b) == b);

    // axis case on T: join([0,1/4], [1/4,1/2]) = [0,1/2]
    const DyadicBox i1 = DyadicBox::interval(BitPath::parse("00"));
    const DyadicBox i2 = DyadicBox::interval(BitPath::parse("01"));
    CHECK(join(i1, i2) == DyadicBox::interval(BitPath::parse("0")));

    // join([5/8,3/4], [0,1/4]) = [0,1]: paths 101 vs 00 share no prefix
    const DyadicBox j1 = DyadicBox::interval(BitPath::parse("101"));
    const DyadicBox j2 = DyadicBox::interval(BitPath::parse("00"));
    CHECK(join(j1, j2) == DyadicBox::root(1));
}

TEST_CASE("ancestors: counts and enumeration") {
    CHECK(ancestors(DyadicBox::root(2)).size() == 1);
    CHECK(ancestors(DyadicBox::interval(BitPath::parse("010"))).size() == 4);

    // 2-D box at depths (3,2): 12 ancestors, checked against exhaustive
    // containment over the bounded lattice
    const DyadicBox b = box2("010", "11");
    CHECK(b.ancestor_count() == 12);
    const auto anc = ancestors(b);
    CHECK(anc.size() == 12);
    std::size_t brute = 0;
    for (const auto& c : all_boxes_2d(3, 2))
        if (contains(c, b)) ++brute;
    CHECK(brute == 12);
    std::set<DyadicBox> dedup(anc.begin(), anc.end());
    CHECK(dedup.size() == 12);  // each exactly once
    for (const auto& a : anc) CHECK(contains(a, b));
}

TEST_CASE("ancestor_count equals the stream length for all small boxes") {
    for (std::size_t d = 0; d <= 10; ++d)
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << d); ++i) {
            const DyadicBox b = DyadicBox::interval(BitPath::from_index(i, d));
            CHECK(b.ancestor_count() == d + 1);
            CHECK(ancestors(b).size() == d + 1);
        }
    for (const auto& b : all_boxes_2d(5, 5)) {
        if (b.depth_sum() > 10) continue;
        CHECK(ancestors(b).size() == b.ancestor_count());
    }
}

TEST_CASE("prefix law: transitivity and antisymmetry on random boxes") {
    Rng rng(2024);
    for (int iter = 0; iter < 500; ++iter) {
        const int dim = iter % 2 ? 1 : 2;
        const DyadicBox a = random_box(rng, dim, 8);
        const DyadicBox b = random_box(rng, dim, 8);
        const DyadicBox c = random_box(rng, dim, 8);
        if (contains(a, b) && contains(b, c)) CHECK(contains(a, c));
        if (contains(a, b) && contains(b, a)) CHECK(a == b);
    }
}

TEST_CASE("join is a semilattice operation") {
    Rng rng(7);
    for (int iter = 0; iter < 500; ++iter) {
        const int dim = iter % 2 ? 1 : 2;
        const DyadicBox a = random_box(rng, dim, 8);
        const DyadicBox b = random_box(rng, dim, 8);
        const DyadicBox c = random_box(rng, dim, 8);
        CHECK(join(a, b) == join(b, a));
        CHECK(join(a, a) == a);
        CHECK(join(join(a, b), c) == join(a, join(b, c)));
        CHECK(contains(join(a, b), a));
        CHECK(contains(join(a, b), b));
    }
}

TEST_CASE("reduce_to_maximal: spec cases and the brute-force oracle") {
    BoxSet s(2);
    s.add(DyadicBox::root(2));
    s.add(box2("0010", "01"));
    const BoxSet r = reduce_to_maximal(s);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == DyadicBox::root(2));

    BoxSet nested(2);
    nested.add(box2("0", "0"));
    nested.add(box2("00", "00"));
    const BoxSet rn = reduce_to_maximal(nested);
    REQUIRE(rn.size() == 1);
    CHECK(rn[0] == box2("0", "0"));

    Rng rng(99);
    for (int iter = 0; iter < 50; ++iter) {
        BoxSet random_set(2);
        for (int i = 0; i < 20; ++i) random_set.add(random_box(rng, 2, 4));
        random_set.normalize();
        const BoxSet reduced = reduce_to_maximal(random_set);

        // oracle: keep exactly the boxes with no strict container in the set
        std::vector<DyadicBox> expect;
        for (const auto& b : random_set.boxes()) {
            bool has_container = false;
            for (const auto& c : random_set.boxes())
                if (!(c == b) && contains(c, b)) has_container = true;
            if (!has_container) expect.push_back(b);
        }
        std::sort(expect.begin(), expect.end());
        std::vector<DyadicBox> got = reduced.boxes();
        std::sort(got.begin(), got.end());
        CHECK(got == expect);

        // every dropped element is covered by a retained one
        for (const auto& b : random_set.boxes()) {
            bool covered = false;
            for (const auto& k : reduced.boxes())
                if (contains(k, b)) covered = true;
            CHECK(covered);
        }
    }
}

TEST_CASE("box serialization round-trips") {
    const DyadicBox b = box2("0010", "01");
    CHECK(b.str() == "0010x01");
    CHECK(DyadicBox::parse("0010x01") == b);
    CHECK(DyadicBox::parse("exe") == DyadicBox::root(2));
    CHECK(DyadicBox::root(2).str() == "exe");
    CHECK(DyadicBox::parse("e") == DyadicBox::root(1));
    CHECK(DyadicBox::parse("010x1x11").dim() == 3);
}
