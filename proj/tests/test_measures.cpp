#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "multitree/constructions.hpp"
#include "multitree/dense.hpp"
#include "multitree/measure.hpp"
#include "multitree/rng.hpp"

using namespace multitree;
using Catch::Matchers::WithinRel;

namespace {

DyadicBox box2(const char* x, const char* y) {
    return DyadicBox::rect(BitPath::parse(x), BitPath::parse(y));
}

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

// Oracle potential: scan every box of the bounded dense lattice, summing
// box masses over the containing boxes; only containment is shared with
// the production path.
double oracle_potential_2d(const AtomicMeasure& nu, const DyadicBox& alpha, std::size_t bound) {
    double v = 0.0;
    for (std::size_t dx = 0; dx <= bound; ++dx)
        for (std::uint64_t ix = 0; ix < (std::uint64_t{1} << dx); ++ix)
            for (std::size_t dy = 0; dy <= bound; ++dy)
                for (std::uint64_t iy = 0; iy < (std::uint64_t{1} << dy); ++iy) {
                    const DyadicBox r =
                        DyadicBox::rect(BitPath::from_index(ix, dx), BitPath::from_index(iy, dy));
                    if (contains(r, alpha)) v += box_mass(nu, r);
                }
    return v;
}

}  // namespace

TEST_CASE("hardy_up: spec cases") {
    DenseFunction zero(2, 3);
    CHECK(hardy_up(zero, box2("01", "1")) == 0.0);

    // f = 1 at the root only: I f == 1 everywhere
    DenseFunction root_ind(2, 3);
    root_ind.set(DyadicBox::root(2), 1.0);
    const DenseFunction up = hardy_up_all(root_ind);
    up.for_each_node([&](std::size_t h1, std::size_t h2) { CHECK(up.at(h1, h2) == 1.0); });
    CHECK(hardy_up(root_ind, box2("011", "101")) == 1.0);

    // d=1, f == 1 on the full depth-2 tree, alpha a leaf: the path has 3 vertices
    DenseFunction ones(1, 2);
    ones.for_each_node([&](std::size_t h1, std::size_t h2) { ones.at(h1, h2) = 1.0; });
    CHECK(hardy_up(ones, DyadicBox::interval(BitPath::parse("10"))) == 3.0);

    CHECK_THROWS_AS(hardy_up(zero, box2("0101", "0")), std::invalid_argument);
}

TEST_CASE("hardy_down: spec cases") {
    DenseFunction zero(1, 3);
    CHECK(hardy_down(zero, DyadicBox::root(1)) == 0.0);

    // atomic masses on leaves: I* at the root is the total mass
    Rng rng(11);
    AtomicMeasure nu(2);
    for (int i = 0; i < 4; ++i) {
        nu.add(box2(i % 2 ? "010" : "001", "110"), rng.dyadic_mass());
    }
    nu.normalize();
    const DenseFunction f = densify(nu, 3);
    CHECK_THAT(hardy_down(f, DyadicBox::root(2)), WithinRel(nu.total_mass(), 1e-12));
}

TEST_CASE("adjointness of I and I* on random dense functions") {
    Rng rng(42);
    for (int dim = 1; dim <= 2; ++dim) {
        for (int iter = 0; iter < 20; ++iter) {
            const std::size_t depth = dim == 1 ? 6 : 3;
            DenseFunction f(dim, depth), g(dim, depth);
            f.for_each_node([&](std::size_t h1, std::size_t h2) { f.at(h1, h2) = rng.real(); });
            g.for_each_node([&](std::size_t h1, std::size_t h2) { g.at(h1, h2) = rng.real(); });
            const double lhs = dense_dot(hardy_up_all(f), g);
            const double rhs = dense_dot(f, hardy_down_all(g));
            CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
        }
    }
}

TEST_CASE("single-point hardy operators agree with the full transforms") {
    Rng rng(43);
    DenseFunction f(2, 3);
    f.for_each_node([&](std::size_t h1, std::size_t h2) { f.at(h1, h2) = rng.real(); });
    const DenseFunction up = hardy_up_all(f);
    const DenseFunction down = hardy_down_all(f);
    f.for_each_node([&](std::size_t h1, std::size_t h2) {
        const DyadicBox b = f.box_at(h1, h2);
        CHECK_THAT(hardy_up(f, b), WithinRel(up.at(h1, h2), 1e-12));
        CHECK_THAT(hardy_down(f, b), WithinRel(down.at(h1, h2), 1e-12));
    });
}

TEST_CASE("box_mass: spec cases") {
    const SemParams p(2);
    const AtomicMeasure nu = build_nu(p);
    CHECK(box_mass(nu, DyadicBox::root(2)) == nu.total_mass());
    CHECK(box_mass(nu, box2("1", "0")) == 0.0);  // off the diagonal

    // first diagonal square at depth (2,2) holds exactly one atom of 1/256
    CHECK(box_mass(nu, box2("00", "00")) == 1.0 / 256.0);
}

TEST_CASE("potential: spec cases") {
    const SemParams p(2);
    const AtomicMeasure nu = build_nu(p);
    CHECK(potential(nu, DyadicBox::root(2)) == nu.total_mass());
    CHECK(nu.total_mass() == 1.0 / 64.0);

    AtomicMeasure single(2);
    single.add(box2("010", "11"), 1.0);
    single.normalize();
    CHECK(potential(single, box2("010", "11")) == 12.0);
    // dense oracle over the bounded lattice agrees
    CHECK(oracle_potential_2d(single, box2("010", "11"), 3) == 12.0);
}

TEST_CASE("potential at the q-boxes stays within the recorded Lemma-g window") {
    // n V(q_{jk}) for s=2 and s=3 lies in one fixed interval; the closed
    // form is checked against the generic kernel evaluation for every j, k
    for (int s : {2, 3}) {
        const SemParams p(s);
        const AtomicMeasure nu = build_nu(p);
        for (std::uint64_t k = 0; k < p.logn; ++k) {
            const double closed = corner_potential_at_q(p, k);
            for (std::uint64_t j : {std::uint64_t{0}, (std::uint64_t{1} << p.mexp) - 1}) {
                CHECK_THAT(potential(nu, q_box(p, j, k)), WithinRel(closed, 1e-12));
            }
            const double scaled = static_cast<double>(p.n) * closed;
            CHECK(scaled >= 2.0);
            CHECK(scaled <= 8.0);
        }
        const LemmaGInterval iv = lemma_g_interval(p);
        CHECK(iv.hi / iv.lo <= 10.0);
    }
}

TEST_CASE("energy: spec cases") {
    AtomicMeasure empty(2);
    CHECK(energy(empty) == 0.0);

    AtomicMeasure single(2);
    const double m = 0.375;
    single.add(box2("010", "11"), m);
    single.normalize();
    CHECK(energy(single) == m * m * 12.0);

    // enumeration oracle: sum of nu(R)^2 over all boxes of a bounded lattice
    Rng rng(5);
    for (int iter = 0; iter < 10; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 3);
        double brute = 0.0;
        for (std::size_t dx = 0; dx <= 3; ++dx)
            for (std::uint64_t ix = 0; ix < (std::uint64_t{1} << dx); ++ix)
                for (std::size_t dy = 0; dy <= 3; ++dy)
                    for (std::uint64_t iy = 0; iy < (std::uint64_t{1} << dy); ++iy) {
                        const double bm = box_mass(nu, DyadicBox::rect(BitPath::from_index(ix, dx),
                                                                       BitPath::from_index(iy, dy)));
                        brute += bm * bm;
                    }
        CHECK_THAT(energy(nu), WithinRel(brute, 1e-9));
    }
}

TEST_CASE("energy consistency: kernel form, poset form, integral form") {
    Rng rng(17);
    for (int iter = 0; iter < 30; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 6);
        const double kernel = energy(nu);
        double integral = 0.0;
        for (const auto& a : nu.atoms()) integral += a.mass * potential(nu, a.box);
        CHECK_THAT(kernel, WithinRel(integral, 1e-9));
    }
}

TEST_CASE("potential monotonicity: V grows away from the root") {
    Rng rng(23);
    for (int iter = 0; iter < 20; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 4);
        const DenseFunction pot = dense_potential(nu, 4);
        const std::size_t n = pot.axis_nodes();
        for (std::size_t h1 = 1; h1 <= n; ++h1)
            for (std::size_t h2 = 1; h2 <= n; ++h2) {
                if (h1 > 1) CHECK(pot.at(h1, h2) >= pot.at(h1 / 2, h2) - 1e-15);
                if (h2 > 1) CHECK(pot.at(h1, h2) >= pot.at(h1, h2 / 2) - 1e-15);
            }
    }
}

TEST_CASE("scaling: V, E and E_eps are homogeneous") {
    Rng rng(31);
    for (int iter = 0; iter < 10; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 5);
        const double t = 0.25 + 3.0 * rng.real();
        const AtomicMeasure scaled = nu.scaled(t);
        const DyadicBox probe = box2("01", "001");
        CHECK_THAT(potential(scaled, probe), WithinRel(t * potential(nu, probe), 1e-12));
        CHECK_THAT(energy(scaled), WithinRel(t * t * energy(nu), 1e-12));
        const double eps = rng.real() * potential(nu, probe) + nu.total_mass();
        CHECK_THAT(partial_energy(scaled, t * eps), WithinRel(t * t * partial_energy(nu, eps), 1e-12));
    }
}

TEST_CASE("tree maximum principle holds exactly on the dense lattice") {
    Rng rng(37);
    for (int iter = 0; iter < 50; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 1, 6);
        const DenseFunction pot = dense_potential(nu, 6);
        double max_atoms = 0.0;
        for (const auto& a : nu.atoms()) max_atoms = std::max(max_atoms, pot.value(a.box));
        pot.for_each_node(
            [&](std::size_t h1, std::size_t h2) { CHECK(pot.at(h1, h2) <= max_atoms); });
    }
}

TEST_CASE("cut inequality: I(g 1_{Ig<=lambda}) >= Ig 1_{Ig<=lambda} pointwise on T^2") {
    Rng rng(41);
    for (int iter = 0; iter < 20; ++iter) {
        DenseFunction g(2, 3);
        g.for_each_node([&](std::size_t h1, std::size_t h2) { g.at(h1, h2) = rng.real(); });
        const DenseFunction ig = hardy_up_all(g);
        const double lambda = rng.real() * 4.0;
        DenseFunction masked = g;
        masked.for_each_node([&](std::size_t h1, std::size_t h2) {
            if (ig.at(h1, h2) > lambda) masked.at(h1, h2) = 0.0;
        });
        const DenseFunction cut = hardy_up_all(masked);
        ig.for_each_node([&](std::size_t h1, std::size_t h2) {
            const double rhs = ig.at(h1, h2) <= lambda ? ig.at(h1, h2) : 0.0;
            CHECK(cut.at(h1, h2) >= rhs - 1e-12);
        });
    }
}

TEST_CASE("tree cut bound: I(1_{Ig<=x} g) >= x/2 below the crossing edge") {
    Rng rng(47);
    for (int iter = 0; iter < 30; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 1, 6);
        const DenseFunction g = hardy_down_all(densify(nu, 6));
        const DenseFunction ig = hardy_up_all(g);
        const double x = nu.total_mass() + rng.real() * (ig.at(2) - nu.total_mass() + 1.0);
        DenseFunction masked = g;
        masked.for_each_node([&](std::size_t h1, std::size_t h2) {
            if (ig.at(h1, h2) > x) masked.at(h1, h2) = 0.0;
        });
        const DenseFunction cut = hardy_up_all(masked);
        const std::size_t n = ig.axis_nodes();
        for (std::size_t h = 2; h <= n; ++h) {
            if (ig.at(h) >= x && ig.at(h / 2) <= x) CHECK(cut.at(h) >= x / 2.0 - 1e-12);
        }
    }
}

TEST_CASE("is_superadditive: spec cases") {
    // g = I* nu is superadditive for any nonnegative measure
    Rng rng(53);
    for (int iter = 0; iter < 20; ++iter) {
        const AtomicMeasure nu = random_measure(rng, 2, 3);
        CHECK(is_superadditive(hardy_down_all(densify(nu, 3))));
    }
    Rng rng1(54);
    for (int iter = 0; iter < 20; ++iter) {
        const AtomicMeasure nu = random_measure(rng1, 1, 5);
        CHECK(is_superadditive(hardy_down_all(densify(nu, 5))));
    }

    // g == 1 fails on any tree of depth >= 1
    DenseFunction ones(1, 2);
    ones.for_each_node([&](std::size_t h1, std::size_t h2) { ones.at(h1, h2) = 1.0; });
    CHECK_FALSE(is_superadditive(ones));
    DenseFunction ones2(2, 2);
    ones2.for_each_node([&](std::size_t h1, std::size_t h2) { ones2.at(h1, h2) = 1.0; });
    CHECK_FALSE(is_superadditive(ones2));
}

TEST_CASE("measure files round-trip") {
    AtomicMeasure nu(2);
    nu.add(box2("0010", "01"), 0x1.0p-8);
    nu.add(DyadicBox::root(2), 0.3);
    nu.normalize();

    std::ostringstream os;
    write_measure(os, nu);
    CHECK(os.str().find("2^-8") != std::string::npos);

    std::istringstream is("# comment line\n" + os.str());
    const AtomicMeasure back = read_measure(is);
    REQUIRE(back.atom_count() == 2);
    CHECK(back.total_mass() == nu.total_mass());
    CHECK(back.atoms()[0].box == nu.atoms()[0].box);
    CHECK(back.atoms()[0].mass == nu.atoms()[0].mass);

    std::istringstream bad("0010x01");
    CHECK_THROWS_AS(read_measure(bad), std::invalid_argument);
}

TEST_CASE("zero masses are dropped and duplicates merge") {
    AtomicMeasure nu(1);
    nu.add(DyadicBox::interval(BitPath::parse("01")), 0.0);
    nu.add(DyadicBox::interval(BitPath::parse("01")), 0.25);
    nu.add(DyadicBox::interval(BitPath::parse("01")), 0.5);
    nu.normalize();
    REQUIRE(nu.atom_count() == 1);
    CHECK(nu.atoms()[0].mass == 0.75);
    CHECK_THROWS_AS(nu.add(DyadicBox::interval(BitPath::parse("0")), -1.0),
                    std::invalid_argument);
}
