// collect.hpp
// Collectibility functionals and their maximization over locally
// orthonormal separable bases, plus the entanglement verdicts built on
// them. The basis manifold is parameterized by complex Givens rotations
// and diagonal phases (N^2 real parameters per local unitary) and searched
// with a multi-start Nelder-Mead simplex.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcollect/qcore.hpp"

namespace qcollect::collect {

// K local unitaries; basis state j is the tensor product of the j-th
// columns: |chi_j> = (x)_I U^(I) |j>.
struct SeparableBasisSet {
    TensorShape shape;
    std::vector<ComplexMatrix> locals;

    std::vector<cdouble> product_state(int j) const;
};

SeparableBasisSet make_separable_basis(const TensorShape& shape,
                                       std::vector<ComplexMatrix> locals,
                                       double tol = kDefaultTol);

// The 2x2 Gram data the two-qubit criteria consume.
struct GramMatrix2 {
    double g11 = 0.0;
    double g22 = 0.0;
    double g12_abs2 = 0.0;
};

GramMatrix2 make_gram2(double g11, double g22, double g12_abs2);

struct OptimizerConfig {
    int restarts = 32;
    int max_iters = 2000;
    double objective_tol = 1e-10;
    std::uint64_t seed = 0;
    int threads = 1;  // restart-level parallelism; results are thread-count independent
};

enum class Verdict { ENTANGLED_DETECTED, INCONCLUSIVE };

std::string to_string(Verdict v);

struct CollectReport {
    double value = 0.0;
    SeparableBasisSet basis;  // argmax found
    int restarts_converged = 0;
    Verdict verdict = Verdict::INCONCLUSIVE;
    double threshold = 0.0;        // detection threshold the verdict used (0 if none)
    std::string threshold_name;    // which bound it was
};

// --- unitary parameterization -------------------------------------------

// N(N-1)/2 Givens rotations (two angles each) followed by N diagonal
// phases; surjective onto U(N).
std::size_t unitary_param_count(int n);
ComplexMatrix unitary_from_params(std::span<const double> params, int n);
std::vector<double> params_from_unitary(const ComplexMatrix& u);

// --- functionals ----------------------------------------------------------

// prod_j |<Psi|chi_j>|^2, log-domain accumulation; 0 if any overlap vanishes.
double product_functional_pure(const PureState& psi, const SeparableBasisSet& basis);

// (prod_{j,k} <chi_j|rho|chi_k>)^(1/N) via the Hermitian factorization
// prod_j rho_jj * prod_{j<k} |rho_jk|^2; 0 when any factor vanishes.
double product_functional_mixed(const DensityMatrix& rho, const SeparableBasisSet& basis);

// (1/4)(sqrt(G11 G22) + sqrt(G11 G22 - |G12|^2))^2. The inner radicand is
// clamped at zero when within -1e-12, otherwise NegativeRadicand.
double collectibility_Ya(const GramMatrix2& gram);

// Conditional-state Gram matrix of a K-qubit pure state projected onto the
// first two basis states of the downstream (subsystems 2..K) basis.
GramMatrix2 gram_from_pure(const PureState& psi, const SeparableBasisSet& downstream);

// --- maximizations ---------------------------------------------------------

CollectReport collectibility_pure_max(const PureState& psi, const OptimizerConfig& cfg = {});
CollectReport collectibility_mixed_max(const DensityMatrix& rho, const OptimizerConfig& cfg = {});

// Outer maximization of Y_a over the downstream bases. Whether a K-qubit
// criterion should fix the downstream basis or search over it is left to
// the caller; both entry points are provided.
struct YaMaxReport {
    double value = 0.0;
    SeparableBasisSet downstream;
    int restarts_converged = 0;
};
YaMaxReport collectibility_Ya_max(const PureState& psi, const OptimizerConfig& cfg = {});

// Detection thresholds used by the verdicts (guard band 1e-8).
double pure_detection_threshold(const TensorShape& shape);                  // N^(-NK)
std::optional<double> mixed_detection_threshold(const TensorShape& shape);  // PPT bounds

inline constexpr double kVerdictGuard = 1e-8;

}  // namespace qcollect::collect
