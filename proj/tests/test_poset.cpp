#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "multitree/constructions.hpp"
#include "multitree/dense.hpp"
#include "multitree/poset.hpp"
#include "multitree/rng.hpp"

using namespace multitree;
using Catch::Matchers::WithinRel;

namespace {

AtomicMeasure random_measure(Rng& rng, int dim, std::size_t max_depth, std::size_t atoms = 5) {
    AtomicMeasure nu(dim);
    const std::size_t count = rng.in(1, atoms);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<BitPath> axes;
        for (int t = 0; t < dim; ++t) {
            BitPath p;
            const std::size_t d = rng.in(0, max_depth);
            for (std::size_t k = 0; k < d; ++k) p.push_back(rng.coin());
            axes.push_back(std::move(p));
        }
        nu.add(DyadicBox(std::move(axes)), rng.dyadic_mass());
    }
    nu.normalize();
    return nu;
}

// Independent count of the boxes with positive mass: the set of per-atom
// prefix pairs, deduplicated through serialized strings.
std::size_t oracle_positive_mass_count(const AtomicMeasure& nu) {
    std::set<std::string> seen;
    for (const auto& a : nu.atoms())
        visit_ancestors(a.box, [&](const DyadicBox& r) { seen.insert(r.str()); });
    return seen.size();
}

}  // namespace

TEST_CASE("poset size: spec cases") {
    // single atom at depths (2,1): 3 * 2 ancestors
    AtomicMeasure single(2);
    single.add(DyadicBox::rect(BitPath::parse("01"), BitPath::parse("1")), 0.5);
    single.normalize();
    CHECK(RelevantPoset(single).size() == 6);

    // the s=2 corner measure: 4 atoms at depth (18,18); the closure has
    // 1435 boxes, matching the prefix-pair enumeration oracle
    const AtomicMeasure nu = build_nu(SemParams(2));
    const RelevantPoset poset(nu);
    CHECK(poset.size() == 1435);
    CHECK(oracle_positive_mass_count(nu) == 1435);

    // two atoms under one parent: inclusion-exclusion of the ancestor grids
    AtomicMeasure two(2);
    const DyadicBox a = DyadicBox::rect(BitPath::parse("000"), BitPath::parse("01"));
    const DyadicBox b = DyadicBox::rect(BitPath::parse("001"), BitPath::parse("011"));
    two.add(a, 0.25);
    two.add(b, 0.25);
    two.normalize();
    const std::uint64_t expect =
        a.ancestor_count() + b.ancestor_count() - common_ancestor_count(a, b);
    CHECK(RelevantPoset(two).size() == expect);
    CHECK(oracle_positive_mass_count(two) == expect);
}

TEST_CASE("poset masses and potentials match the direct evaluations") {
    Rng rng(61);
    for (int iter = 0; iter < 20; ++iter) {
        const int dim = iter % 2 ? 1 : 2;
        const AtomicMeasure nu = random_measure(rng, dim, 6);
        const RelevantPoset poset(nu);
        CHECK_THAT(poset.total_mass(), WithinRel(nu.total_mass(), 1e-12));
        for (const auto& node : poset.nodes()) {
            CHECK(node.nu > 0.0);
            CHECK_THAT(node.nu, WithinRel(box_mass(nu, node.box), 1e-12));
            CHECK_THAT(node.pot, WithinRel(potential(nu, node.box), 1e-12));
        }
    }
}

TEST_CASE("closed-form and recursion fills agree") {
    Rng rng(67);
    for (int iter = 0; iter < 15; ++iter) {
        const int dim = iter % 2 ? 1 : 2;
        const AtomicMeasure nu = random_measure(rng, dim, 5);
        const RelevantPoset closed(nu, RelevantPoset::Fill::kClosedForm);
        const RelevantPoset recur(nu, RelevantPoset::Fill::kRecursion);
        REQUIRE(closed.size() == recur.size());
        for (std::size_t i = 0; i < closed.size(); ++i) {
            CHECK(closed.nodes()[i].box == recur.nodes()[i].box);
            CHECK_THAT(closed.nodes()[i].pot, WithinRel(recur.nodes()[i].pot, 1e-11));
        }
    }
    // three-axis recursion as well
    AtomicMeasure three(3);
    three.add(DyadicBox::parse("010x1x11"), 0.5);
    three.add(DyadicBox::parse("01x10x1"), 0.25);
    three.normalize();
    const RelevantPoset c3(three, RelevantPoset::Fill::kClosedForm);
    const RelevantPoset r3(three, RelevantPoset::Fill::kRecursion);
    REQUIRE(c3.size() == r3.size());
    for (std::size_t i = 0; i < c3.size(); ++i)
        CHECK_THAT(c3.nodes()[i].pot, WithinRel(r3.nodes()[i].pot, 1e-12));
}

TEST_CASE("poset potentials are monotone along edges") {
    Rng rng(71);
    for (int iter = 0; iter < 20; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 6);
        const RelevantPoset poset(nu);
        for (const auto& node : poset.nodes()) {
            for (int t = 0; t < 2; ++t) {
                if (node.box.axis_depth(t) == 0) continue;
                std::array<std::size_t, 3> lens{node.box.axis_depth(0), node.box.axis_depth(1), 0};
                --lens[t];
                const PosetNode* parent = poset.find(prefix_box(node.box, lens));
                REQUIRE(parent != nullptr);
                CHECK(parent->pot <= node.pot * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("partial energy: spec cases") {
    Rng rng(73);
    for (int iter = 0; iter < 20; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 5);
        const RelevantPoset poset(nu);

        // eps above every potential: the whole energy
        CHECK_THAT(poset.partial_energy(poset.max_potential()), WithinRel(poset.energy(), 1e-12));
        CHECK(poset.partial_energy(poset.max_potential() * 2.0) == poset.energy());
        // eps below the minimum: nothing
        CHECK(poset.partial_energy(poset.min_potential() * 0.5) == 0.0);
        // ties at V = eps are included
        CHECK(poset.partial_energy(poset.min_potential()) > 0.0);
    }

    // on T: E_eps <= eps |nu| exactly, with constant 1
    Rng rng1(79);
    for (int iter = 0; iter < 50; ++iter) {
        const AtomicMeasure nu = random_measure(rng1, 1, 8);
        const RelevantPoset poset(nu);
        const double eps = static_cast<double>(rng1.in(1, 64)) * 0x1.0p-6 *
                           poset.max_potential();
        CHECK(poset.partial_energy(eps) <= eps * nu.total_mass());
    }
}

TEST_CASE("truncated potential: spec cases") {
    Rng rng(83);
    for (int iter = 0; iter < 20; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 5);
        const RelevantPoset poset(nu);
        const DyadicBox probe = nu.atoms()[0].box;
        // huge eps: the full potential
        CHECK_THAT(poset.truncated_potential(2.0 * poset.max_potential(), probe),
                   WithinRel(potential(nu, probe), 1e-12));
    }

    // on T: V_eps <= eps everywhere
    Rng rng1(89);
    for (int iter = 0; iter < 30; ++iter) {
        const AtomicMeasure nu = random_measure(rng1, 1, 8);
        const RelevantPoset poset(nu);
        const double eps = rng1.real() * poset.max_potential();
        for (const auto& node : poset.nodes())
            CHECK(poset.truncated_potential(eps, node.box) <= eps);
    }

    // on T^2 with the corner measure at s=2 and eps = c/n the bound fails
    const SemParams p(2);
    const AtomicMeasure nu = build_nu(p);
    const RelevantPoset poset(nu);
    const double eps = lemma_g_interval(p).mid() / static_cast<double>(p.n);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < p.logn; ++k)
        worst = std::max(worst, poset.truncated_potential(eps, q_box(p, 0, k)));
    for (const auto& a : nu.atoms())
        worst = std::max(worst, poset.truncated_potential(eps, a.box));
    INFO("max truncated potential " << worst << " vs eps " << eps);
    CHECK(worst > eps);
}

TEST_CASE("truncated potential through a dense oracle") {
    Rng rng(97);
    for (int iter = 0; iter < 10; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 3);
        const RelevantPoset poset(nu);
        const DenseFunction pot = dense_potential(nu, 3);
        const double eps = rng.real() * poset.max_potential();
        DenseFunction masked = hardy_down_all(densify(nu, 3));
        masked.for_each_node([&](std::size_t h1, std::size_t h2) {
            if (pot.at(h1, h2) > eps) masked.at(h1, h2) = 0.0;
        });
        const DenseFunction veps = hardy_up_all(masked);
        veps.for_each_node([&](std::size_t h1, std::size_t h2) {
            const DyadicBox b = veps.box_at(h1, h2);
            CHECK_THAT(poset.truncated_potential(eps, b) + 1.0,
                       WithinRel(veps.at(h1, h2) + 1.0, 1e-12));
        });
    }
}

TEST_CASE("memory budget is enforced before building") {
    AtomicMeasure huge(2);
    BitPath deep = BitPath::zeros(1 << 14);
    huge.add(DyadicBox::rect(deep, deep), 1.0);
    huge.normalize();
    CHECK_THROWS_AS(RelevantPoset(huge), std::length_error);
}

TEST_CASE("level-set maximal elements on T") {
    AtomicMeasure nu(1);
    nu.add(DyadicBox::interval(BitPath::parse("000")), 0.25);
    nu.add(DyadicBox::interval(BitPath::parse("01")), 0.5);
    nu.normalize();
    const RelevantPoset poset(nu);

    // x below the total mass: the root qualifies
    const auto at_root = poset.level_set_maximal(0.5);
    REQUIRE(at_root.size() == 1);
    CHECK(at_root[0].is_root());

    // generic threshold: maximal boxes are in D_x with parents outside
    const double x = 1.1;
    for (const auto& b : poset.level_set_maximal(x)) {
        CHECK(potential(nu, b) >= x);
        CHECK(potential(nu, DyadicBox::interval(b.axis(0).parent())) < x);
    }

    // above the maximum: empty
    CHECK(poset.level_set_maximal(poset.max_potential() + 1.0).empty());
}
