// bounds.hpp
// Purity-constrained upper bound r_N on the N x N block product of a
// Hermitian matrix, the explicit matrix that saturates it, the PPT bounds
// on mixed-state collectibility, and the critical purities below which the
// NPPT property cannot be detected.

#pragma once

#include <optional>
#include <vector>

#include "qcollect/qcore.hpp"

namespace qcollect::bounds {

struct BoundQuery {
    std::size_t total_dim = 0;  // D
    std::size_t block_dim = 0;  // N <= D
    double trace = 1.0;
    double purity = 1.0;

    double xi() const { return purity / (trace * trace); }
};

struct BoundResult {
    double phi = 0.0;
    double r = 0.0;
};

struct MaximizerMatrix {
    double rho_a = 0.0;
    double rho_b = 0.0;
    double rho_c = 0.0;
    std::size_t block_dim = 0;
    ComplexMatrix matrix;

    // (prod_{i,j<=N} rho_ij)^(1/N) of the assembled matrix; the phases drop
    // out of the modulus.
    double block_product_root() const;
};

// Purity-constrained bound r_N(D, Tr rho, Tr rho^2); phi uses the minus
// branch of the quadratic root. Throws XiOutOfRange when purity/trace^2
// leaves [1/D, 1].
BoundResult r_bound(const BoundQuery& q);

// The saturating matrix: rho_a on the leading-block diagonal, rho_b e^{i phi}
// off the leading-block diagonal, rho_c on the trailing diagonal. `phases`
// (optional, row-major upper triangle of the N x N block) defaults to zero;
// the matrix is kept Hermitian by conjugating the lower triangle.
MaximizerMatrix maximizer_matrix(const BoundQuery& q,
                                 const std::optional<std::vector<double>>& phases = std::nullopt);

// N^(-2N) for bipartite systems, 1/(16(2^(K-1)-1)) for K qubits. The two
// agree for two qubits. Throws Unsupported elsewhere.
double ppt_bound(const TensorShape& shape);

// (P_min, P_PPT) = (N^-K, 1/(N^K - 1)).
struct PurityFloors {
    double p_min = 0.0;
    double p_ppt = 0.0;
};
PurityFloors purity_floors(const TensorShape& shape);

// Solves r_N(N^K, 1, P) = ppt_bound(shape) for P by bisection on [P_min, 1]
// (r_N is nondecreasing in purity); absolute tolerance 1e-10.
double critical_purity(const TensorShape& shape);

// Brute-force left side of the bound for an arbitrary matrix: the N x N
// leading-block product (prod_{i,j<=N} m_ij)^(1/N). Used as the independent
// check of r_bound; the off-diagonal pairs combine to |m_ij|^2 for
// Hermitian input.
double leading_block_product_root(const ComplexMatrix& m, std::size_t block_dim);

}  // namespace qcollect::bounds
