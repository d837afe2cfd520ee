#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcollect/bounds.hpp"
#include "qcollect/collect.hpp"
#include "qcollect/werner.hpp"
#include "test_util.hpp"

using namespace qcollect;
using namespace qcollect::collect;

namespace {

PureState bell_state() {
    const TensorShape shape(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    return PureState(shape, {r, 0.0, 0.0, r});
}

// {|00>, |11>}: identity local unitaries on both sides.
SeparableBasisSet computational_basis(const TensorShape& shape) {
    std::vector<ComplexMatrix> locals(static_cast<std::size_t>(shape.subsystems),
                                      ComplexMatrix::identity(static_cast<std::size_t>(shape.local_dim)));
    return make_separable_basis(shape, std::move(locals));
}

OptimizerConfig fast_config(std::uint64_t seed = 7) {
    OptimizerConfig cfg;
    cfg.restarts = 8;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("unitary parameterization round-trips random unitaries") {
    SplitMix64 rng(41);
    for (int n : {2, 3, 4}) {
        for (int trial = 0; trial < 10; ++trial) {
            const ComplexMatrix u = testutil::random_unitary(static_cast<std::size_t>(n), rng);
            const std::vector<double> params = params_from_unitary(u);
            CHECK(params.size() == unitary_param_count(n));
            const ComplexMatrix rebuilt = unitary_from_params(params, n);
            CHECK(rebuilt.max_abs_diff(u) < 1e-12);
        }
    }
}

TEST_CASE("unitary_from_params always yields a unitary") {
    SplitMix64 rng(42);
    for (int n : {2, 3, 5}) {
        std::vector<double> params(unitary_param_count(n));
        for (auto& p : params) p = rng.uniform01() * 6.283;
        CHECK(unitary_from_params(params, n).is_unitary(1e-12));
    }
}

TEST_CASE("basis states are locally orthonormal products") {
    SplitMix64 rng(43);
    const TensorShape shape(3, 2);
    std::vector<ComplexMatrix> locals;
    for (int s = 0; s < 3; ++s) locals.push_back(testutil::random_unitary(2, rng));
    const SeparableBasisSet basis = make_separable_basis(shape, std::move(locals));
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const auto cj = basis.product_state(j);
            const auto ck = basis.product_state(k);
            cdouble ip = 0.0;
            for (std::size_t i = 0; i < cj.size(); ++i) ip += std::conj(cj[i]) * ck[i];
            CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-12);
        }
    }

    ComplexMatrix not_unitary = ComplexMatrix::identity(2);
    not_unitary(0, 0) = 2.0;
    CHECK_THROWS_AS(make_separable_basis(TensorShape(2, 2),
                                         {not_unitary, ComplexMatrix::identity(2)}),
                    NotUnitary);
}

TEST_CASE("product functional on pure states") {
    const PureState bell = bell_state();
    const SeparableBasisSet basis = computational_basis(bell.shape());
    CHECK(product_functional_pure(bell, basis) == doctest::Approx(0.25).epsilon(1e-12));

    const PureState zero = PureState::basis_state(bell.shape(), {0, 0});
    CHECK(product_functional_pure(zero, basis) == doctest::Approx(0.0));

    const TensorShape other(3, 2);
    CHECK_THROWS_AS(product_functional_pure(PureState::basis_state(other, {0, 0, 0}), basis),
                    ShapeMismatch);
}

TEST_CASE("product functional on mixed states") {
    const TensorShape shape(2, 2);
    const SeparableBasisSet basis = computational_basis(shape);

    SUBCASE("rank-N mixture of the basis itself vanishes") {
        ComplexMatrix m(4, 4);
        m(0, 0) = 0.5;  // |00><00|
        m(3, 3) = 0.5;  // |11><11|
        const DensityMatrix rho = validate_density(m, shape);
        CHECK(product_functional_mixed(rho, basis) == doctest::Approx(0.0));
    }
    SUBCASE("rank-one density matches the pure functional") {
        SplitMix64 rng(44);
        for (int trial = 0; trial < 10; ++trial) {
            const PureState psi = testutil::random_pure(shape, rng);
            const DensityMatrix rho = density_from_pure(psi);
            std::vector<ComplexMatrix> locals{testutil::random_unitary(2, rng),
                                              testutil::random_unitary(2, rng)};
            const SeparableBasisSet b = make_separable_basis(shape, std::move(locals));
            CHECK(product_functional_mixed(rho, b) ==
                  doctest::Approx(product_functional_pure(psi, b)).epsilon(1e-9));
        }
    }
    SUBCASE("maximally mixed state vanishes in every basis") {
        ComplexMatrix m(4, 4);
        for (int i = 0; i < 4; ++i) m(i, i) = 0.25;
        const DensityMatrix rho = validate_density(m, shape);
        SplitMix64 rng(45);
        std::vector<ComplexMatrix> locals{testutil::random_unitary(2, rng),
                                          testutil::random_unitary(2, rng)};
        const SeparableBasisSet b = make_separable_basis(shape, std::move(locals));
        CHECK(product_functional_mixed(rho, b) == doctest::Approx(0.0));
    }
}

TEST_CASE("collectibility_Ya closed form") {
    CHECK(collectibility_Ya(make_gram2(0.5, 0.5, 0.0)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(collectibility_Ya(make_gram2(0.5, 0.5, 0.25)) ==
          doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(collectibility_Ya(make_gram2(1.0, 0.0, 0.0)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(collectibility_Ya(GramMatrix2{0.1, 0.1, 0.5}), NegativeRadicand);
    // inside the clamp band
    CHECK(collectibility_Ya(GramMatrix2{0.5, 0.5, 0.25 + 1e-13}) ==
          doctest::Approx(1.0 / 16.0).epsilon(1e-9));
}

TEST_CASE("gram_from_pure on the named projections") {
    const TensorShape down_shape(1, 2);

    SUBCASE("Bell with the computational downstream basis") {
        const GramMatrix2 g = gram_from_pure(bell_state(), computational_basis(down_shape));
        CHECK(g.g11 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(g.g22 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(g.g12_abs2 == doctest::Approx(0.0));
    }
    SUBCASE("|00> with a Hadamard-rotated downstream basis") {
        ComplexMatrix h(2, 2);
        const double r = 1.0 / std::sqrt(2.0);
        h(0, 0) = r; h(0, 1) = r; h(1, 0) = r; h(1, 1) = -r;
        const SeparableBasisSet down = make_separable_basis(down_shape, {h});
        const GramMatrix2 g =
            gram_from_pure(PureState::basis_state(TensorShape(2, 2), {0, 0}), down);
        CHECK(g.g11 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(g.g22 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(g.g12_abs2 == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("|00> with the computational downstream basis") {
        const GramMatrix2 g = gram_from_pure(PureState::basis_state(TensorShape(2, 2), {0, 0}),
                                             computational_basis(down_shape));
        CHECK(g.g11 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.g22 == doctest::Approx(0.0));
        CHECK(g.g12_abs2 == doctest::Approx(0.0));
    }
    SUBCASE("qutrits are rejected") {
        const TensorShape qutrit(2, 3);
        CHECK_THROWS_AS(gram_from_pure(PureState::basis_state(qutrit, {0, 0}),
                                       computational_basis(TensorShape(1, 3))),
                        NotQubits);
    }
}

TEST_CASE("pure maximization anchors") {
    const CollectReport bell = collectibility_pure_max(bell_state(), fast_config());
    CHECK(bell.value == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(bell.verdict == Verdict::ENTANGLED_DETECTED);
    CHECK(bell.threshold == doctest::Approx(1.0 / 16.0).epsilon(1e-12));

    const CollectReport zero = collectibility_pure_max(
        PureState::basis_state(TensorShape(2, 2), {0, 0}), fast_config());
    CHECK(zero.value == doctest::Approx(1.0 / 16.0).epsilon(1e-7));
    CHECK(zero.verdict == Verdict::INCONCLUSIVE);
}

TEST_CASE("pure maximization reaches the bipartite closed form") {
    SplitMix64 rng(46);
    for (int n : {2, 3}) {
        const TensorShape shape(2, n);
        for (int trial = 0; trial < 5; ++trial) {
            const PureState psi = testutil::random_pure(shape, rng);
            const SchmidtData sd = schmidt(psi);
            const double expected = werner::pure_collectibility_of_lambda(sd.lambdas);
            const CollectReport rep = collectibility_pure_max(psi, fast_config());
            CHECK(rep.value == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("pure maximization respects the universal and separable bounds") {
    SplitMix64 rng(47);
    // The achieved value is a lower bound on the true maximum, so the <=
    // checks stay valid at any restart count; two restarts keep this quick.
    OptimizerConfig lean;
    lean.restarts = 2;
    for (const auto& [k, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
        const TensorShape shape(k, n);
        const double universal = std::pow(n, -static_cast<double>(n));
        for (int trial = 0; trial < 200; ++trial) {
            lean.seed = 100 + static_cast<std::uint64_t>(trial);
            const PureState psi = testutil::random_pure(shape, rng);
            const CollectReport rep = collectibility_pure_max(psi, lean);
            CHECK(rep.value <= universal + 1e-8);
        }
        for (int trial = 0; trial < 200; ++trial) {
            lean.seed = 9100 + static_cast<std::uint64_t>(trial);
            const PureState psi = testutil::random_product_pure(shape, rng);
            const CollectReport rep = collectibility_pure_max(psi, lean);
            CHECK(rep.value <= pure_detection_threshold(shape) + 1e-8);
            CHECK(rep.verdict == Verdict::INCONCLUSIVE);
        }
    }
}

TEST_CASE("collectibility is invariant under local unitaries") {
    SplitMix64 rng(48);
    for (const auto& [k, n] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}}) {
        const TensorShape shape(k, n);
        for (int trial = 0; trial < 3; ++trial) {
            const PureState psi = testutil::random_pure(shape, rng);
            ComplexMatrix rot = testutil::random_unitary(shape.total_dim(), rng);
            // build a product of local unitaries instead
            ComplexMatrix local = testutil::random_unitary(static_cast<std::size_t>(n), rng);
            ComplexMatrix prod = local;
            for (int s = 1; s < k; ++s)
                prod = kron(prod, testutil::random_unitary(static_cast<std::size_t>(n), rng));
            const PureState rotated(shape, prod.apply(psi.amplitudes()));

            OptimizerConfig cfg = fast_config(300 + trial);
            cfg.restarts = 16;
            const double a = collectibility_pure_max(psi, cfg).value;
            const double b = collectibility_pure_max(rotated, cfg).value;
            CHECK(a == doctest::Approx(b).epsilon(1e-6));
        }
    }
}

TEST_CASE("Y_a with a fixed downstream basis never beats the full maximum") {
    SplitMix64 rng(49);
    const TensorShape shape(2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const PureState psi = testutil::random_pure(shape, rng);
        const SeparableBasisSet down =
            make_separable_basis(TensorShape(1, 2), {testutil::random_unitary(2, rng)});
        const double ya = collectibility_Ya(gram_from_pure(psi, down));
        const double full = collectibility_pure_max(psi, fast_config(400 + trial)).value;
        CHECK(ya <= full + 1e-6);
    }
    // three qubits: the downstream basis covers two subsystems
    const TensorShape ghz_shape(3, 2);
    for (int trial = 0; trial < 5; ++trial) {
        const PureState psi = testutil::random_pure(ghz_shape, rng);
        const SeparableBasisSet down = make_separable_basis(
            TensorShape(2, 2),
            {testutil::random_unitary(2, rng), testutil::random_unitary(2, rng)});
        const double ya = collectibility_Ya(gram_from_pure(psi, down));
        OptimizerConfig cfg = fast_config(450 + trial);
        cfg.restarts = 16;
        CHECK(ya <= collectibility_pure_max(psi, cfg).value + 1e-6);
    }
}

TEST_CASE("outer Y_a maximization recovers the pure maximum for two qubits") {
    const YaMaxReport rep = collectibility_Ya_max(bell_state(), fast_config());
    CHECK(rep.value == doctest::Approx(0.25).epsilon(1e-6));

    SplitMix64 rng(50);
    const PureState psi = testutil::random_pure(TensorShape(2, 2), rng);
    const double full = collectibility_pure_max(psi, fast_config()).value;
    const double outer = collectibility_Ya_max(psi, fast_config()).value;
    CHECK(outer == doctest::Approx(full).epsilon(1e-6));
}

TEST_CASE("mixed maximization anchors") {
    SUBCASE("generalized Werner state at lambda=1/2, alpha=1/2") {
        werner::WernerSpec spec;
        spec.local_dim = 2;
        spec.lambdas = {0.5, 0.5};
        spec.alpha = 0.5;
        const DensityMatrix rho = werner::werner_state(spec);
        const CollectReport rep = collectibility_mixed_max(rho, fast_config());
        CHECK(rep.value == doctest::Approx(0.09375).epsilon(1e-6));
    }
    SUBCASE("maximally mixed state") {
        ComplexMatrix m(4, 4);
        for (int i = 0; i < 4; ++i) m(i, i) = 0.25;
        const DensityMatrix rho = validate_density(m, TensorShape(2, 2));
        const CollectReport rep = collectibility_mixed_max(rho, fast_config());
        CHECK(rep.value == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rep.verdict == Verdict::INCONCLUSIVE);
    }
    SUBCASE("rank-one Bell density recovers the pure value") {
        const DensityMatrix rho = density_from_pure(bell_state());
        const CollectReport rep = collectibility_mixed_max(rho, fast_config());
        CHECK(rep.value == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(rep.verdict == Verdict::ENTANGLED_DETECTED);
        CHECK(rep.threshold == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    }
}

TEST_CASE("mixed maximization respects PPT soundness and the purity bound") {
    SplitMix64 rng(51);
    OptimizerConfig cfg;
    cfg.restarts = 4;
    for (int trial = 0; trial < 200; ++trial) {
        cfg.seed = 500 + static_cast<std::uint64_t>(trial);
        const DensityMatrix rho = testutil::random_ppt_two_qubit(rng);
        const CollectReport rep = collectibility_mixed_max(rho, cfg);
        CHECK(rep.value <= 1.0 / 16.0 + 1e-6);
        CHECK(rep.verdict == Verdict::INCONCLUSIVE);

        const double rn = bounds::r_bound(bounds::BoundQuery{4, 2, 1.0, purity(rho)}).r;
        CHECK(rep.value <= rn + 1e-6);
    }
    // the r_N ceiling also holds for NPPT states
    for (int trial = 0; trial < 40; ++trial) {
        cfg.seed = 700 + static_cast<std::uint64_t>(trial);
        const DensityMatrix rho = testutil::random_density(TensorShape(2, 2), rng);
        const CollectReport rep = collectibility_mixed_max(rho, cfg);
        const double rn = bounds::r_bound(bounds::BoundQuery{4, 2, 1.0, purity(rho)}).r;
        CHECK(rep.value <= rn + 1e-6);
    }
}

TEST_CASE("mixed maximization uses the K-qubit threshold for three qubits") {
    const TensorShape shape(3, 2);
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cdouble> amps(8, 0.0);
    amps[0] = r;
    amps[7] = r;
    const DensityMatrix ghz = density_from_pure(PureState(shape, std::move(amps)));

    OptimizerConfig cfg = fast_config(60);
    cfg.restarts = 16;
    const CollectReport rep = collectibility_mixed_max(ghz, cfg);
    CHECK(rep.threshold == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
    CHECK(rep.value <= 0.25 + 1e-8);  // universal N^-N ceiling
    CHECK(rep.value > 1.0 / 48.0);    // the GHZ state clears the K-qubit bound
    CHECK(rep.verdict == Verdict::ENTANGLED_DETECTED);

    CHECK(mixed_detection_threshold(TensorShape(2, 3)).value() ==
          doctest::Approx(std::pow(3.0, -6.0)).epsilon(1e-12));
    CHECK_FALSE(mixed_detection_threshold(TensorShape(3, 3)).has_value());
}

TEST_CASE("restart merging is deterministic and thread-count independent") {
    SplitMix64 rng(52);
    const PureState psi = testutil::random_pure(TensorShape(2, 2), rng);
    OptimizerConfig cfg = fast_config(77);
    const CollectReport a = collectibility_pure_max(psi, cfg);
    cfg.threads = 2;
    const CollectReport b = collectibility_pure_max(psi, cfg);
    CHECK(a.value == b.value);
    for (std::size_t s = 0; s < 2; ++s)
        CHECK(a.basis.locals[s].max_abs_diff(b.basis.locals[s]) == 0.0);
}
