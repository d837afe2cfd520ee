#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcollect/bounds.hpp"
#include "test_util.hpp"

using namespace qcollect;
using namespace qcollect::bounds;

TEST_CASE("r_bound at pure-state purity recovers N^-N") {
    const BoundResult res = r_bound(BoundQuery{4, 2, 1.0, 1.0});
    CHECK(res.r == doctest::Approx(0.25).epsilon(1e-12));
    // independent of the embedding dimension
    CHECK(r_bound(BoundQuery{16, 2, 1.0, 1.0}).r == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r_bound(BoundQuery{9, 3, 1.0, 1.0}).r == doctest::Approx(std::pow(3.0, -3.0)).epsilon(1e-12));
}

TEST_CASE("r_bound vanishes for the maximally mixed state") {
    CHECK(r_bound(BoundQuery{4, 2, 1.0, 0.25}).r == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("r_bound crosses 1/16 at the printed critical purity") {
    CHECK(r_bound(BoundQuery{4, 2, 1.0, 0.3456}).r == doctest::Approx(1.0 / 16.0).epsilon(1e-3));
}

TEST_CASE("r_bound respects trace scaling") {
    // r_N is homogeneous of degree N in the trace at fixed xi.
    const double base = r_bound(BoundQuery{8, 2, 1.0, 0.5}).r;
    const double scaled = r_bound(BoundQuery{8, 2, 2.0, 2.0}).r;
    CHECK(scaled == doctest::Approx(4.0 * base).epsilon(1e-12));
}

TEST_CASE("r_bound rejects xi outside [1/D, 1]") {
    CHECK_THROWS_AS(r_bound(BoundQuery{4, 2, 1.0, 0.2}), XiOutOfRange);
    CHECK_THROWS_AS(r_bound(BoundQuery{4, 2, 1.0, 1.1}), XiOutOfRange);
}

TEST_CASE("r_bound handles the full-block case N = D") {
    // D~ = 0: the quadratic degenerates to a linear equation.
    const BoundResult res = r_bound(BoundQuery{4, 4, 1.0, 1.0});
    CHECK(res.r == doctest::Approx(std::pow(4.0, -4.0)).epsilon(1e-12));
    CHECK_NOTHROW(r_bound(BoundQuery{4, 4, 1.0, 0.5}));
}

TEST_CASE("maximizer matrix saturates the bound on the anchor queries") {
    SUBCASE("pure-state query") {
        const MaximizerMatrix m = maximizer_matrix(BoundQuery{4, 2, 1.0, 1.0});
        CHECK(m.block_product_root() == doctest::Approx(0.25).epsilon(1e-9));
    }
    SUBCASE("maximally mixed query collapses the product") {
        const MaximizerMatrix m = maximizer_matrix(BoundQuery{4, 2, 1.0, 0.25});
        CHECK(m.block_product_root() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("qutrit critical query") {
        const MaximizerMatrix m = maximizer_matrix(BoundQuery{9, 3, 1.0, 0.1728});
        CHECK(m.block_product_root() == doctest::Approx(std::pow(3.0, -6.0)).epsilon(1e-3));
    }
}

TEST_CASE("maximizer matrix reproduces trace and purity, with any phases") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 3 + rng.next() % 10;
        const std::size_t n = 1 + rng.next() % d;
        const double trace = 0.5 + rng.uniform01();
        const double xi = 1.0 / static_cast<double>(d) +
                          rng.uniform01() * (1.0 - 1.0 / static_cast<double>(d));
        const BoundQuery q{d, n, trace, xi * trace * trace};

        std::optional<std::vector<double>> phases;
        if (trial % 2 == 0) {
            std::vector<double> ph(n * (n - 1) / 2);
            for (auto& p : ph) p = rng.uniform01() * 6.28;
            phases = ph;
        }
        const MaximizerMatrix m = maximizer_matrix(q, phases);
        CHECK(m.matrix.trace().real() == doctest::Approx(trace).epsilon(1e-10));
        CHECK(purity(m.matrix) == doctest::Approx(q.purity).epsilon(1e-10));
        CHECK(m.matrix.hermiticity_defect() == 0.0);

        // Attainability: the construction meets r_N.
        const BoundResult bound = r_bound(q);
        CHECK(m.block_product_root() == doctest::Approx(bound.r).epsilon(1e-9));
    }
}

TEST_CASE("block-product dominance: random matrices never beat r_N") {
    SplitMix64 rng(32);
    const TensorShape shapes[] = {TensorShape(2, 2), TensorShape(2, 3), TensorShape(4, 2), TensorShape(2, 4)};
    for (const TensorShape& shape : shapes) {
        const std::size_t d = shape.total_dim();
        for (int trial = 0; trial < 30; ++trial) {
            const DensityMatrix rho = testutil::random_density(shape, rng);
            const ComplexMatrix u = testutil::random_unitary(d, rng);
            const ComplexMatrix conj = u * rho.mat() * u.adjoint();
            const double pur = purity(rho);
            for (std::size_t n = 1; n <= d; ++n) {
                const double lhs = leading_block_product_root(conj, n);
                const double bound = r_bound(BoundQuery{d, n, 1.0, pur}).r;
                CHECK(lhs <= bound + 1e-9);
            }
        }
    }
}

TEST_CASE("r_bound is nondecreasing in purity") {
    SplitMix64 rng(33);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + rng.next() % 15;
        const std::size_t n = 1 + rng.next() % d;
        const double lo = 1.0 / static_cast<double>(d);
        double p1 = lo + rng.uniform01() * (1.0 - lo);
        double p2 = lo + rng.uniform01() * (1.0 - lo);
        if (p1 > p2) std::swap(p1, p2);
        const double r1 = r_bound(BoundQuery{d, n, 1.0, p1}).r;
        const double r2 = r_bound(BoundQuery{d, n, 1.0, p2}).r;
        CHECK(r1 <= r2 + 1e-12);
    }
}

TEST_CASE("ppt_bound values") {
    CHECK(ppt_bound(TensorShape(2, 2)) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(ppt_bound(TensorShape(3, 2)) == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
    CHECK(ppt_bound(TensorShape(2, 3)) == doctest::Approx(std::pow(3.0, -6.0)).epsilon(1e-12));
    CHECK_THROWS_AS(ppt_bound(TensorShape(3, 3)), Unsupported);
}

TEST_CASE("purity floors") {
    const PurityFloors f22 = purity_floors(TensorShape(2, 2));
    CHECK(f22.p_min == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(f22.p_ppt == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const PurityFloors f23 = purity_floors(TensorShape(2, 3));
    CHECK(f23.p_min == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(f23.p_ppt == doctest::Approx(0.125).epsilon(1e-12));

    const PurityFloors f42 = purity_floors(TensorShape(4, 2));
    CHECK(f42.p_min == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(f42.p_ppt == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("critical purities match the printed table") {
    CHECK(critical_purity(TensorShape(2, 2)) == doctest::Approx(0.3456).epsilon(2e-4));
    CHECK(critical_purity(TensorShape(2, 4)) == doctest::Approx(0.1033).epsilon(2e-3));
    CHECK(critical_purity(TensorShape(3, 2)) == doctest::Approx(0.1599).epsilon(2e-3));
}

TEST_CASE("critical purity sits above the PPT floor") {
    for (const TensorShape& shape :
         {TensorShape(2, 2), TensorShape(2, 3), TensorShape(2, 4), TensorShape(3, 2), TensorShape(4, 2)}) {
        const PurityFloors f = purity_floors(shape);
        const double crit = critical_purity(shape);
        CHECK(f.p_min < f.p_ppt);
        CHECK(f.p_ppt < crit);
        // the bound actually crosses the target there
        const double at_crit =
            r_bound(BoundQuery{shape.total_dim(), static_cast<std::size_t>(shape.local_dim), 1.0, crit}).r;
        CHECK(at_crit == doctest::Approx(ppt_bound(shape)).epsilon(1e-6));
    }
}
