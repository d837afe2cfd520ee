// werner.hpp
// Generalized Werner states: construction, the closed-form mixed-state
// collectibility, separability/detection thresholds for two qubits, the
// negativity identity for bipartite pure states, and the Schur-concavity
// machinery behind the closed form.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qcollect/qcore.hpp"

namespace qcollect::werner {

struct WernerSpec {
    int local_dim = 2;                    // N
    std::vector<double> lambdas;          // Schmidt vector, sum 1
    double alpha = 1.0;                   // pure-state weight in [0, 1]
    std::optional<ComplexMatrix> local_u; // default identity
    std::optional<ComplexMatrix> local_v;
};

struct WernerThresholds {
    double omega = 0.0;    // sqrt(lambda (1 - lambda)), N = 2 only
    double alpha_t = 1.0;  // separability threshold
    double alpha_c = 1.0;  // collectibility-detection threshold
};

// alpha (U (x) V) |psi_lambda><psi_lambda| (U (x) V)^dagger + (1-alpha)/N^2 I.
DensityMatrix werner_state(const WernerSpec& spec);

// The weighted Schmidt vector sum_i sqrt(lambda_i) |ii>, rotated by U (x) V.
PureState werner_pure_state(const WernerSpec& spec);

// y(lambda) = ((sum_i sqrt(lambda_i)) / N)^(2N): the pure-state collectibility
// of psi_lambda.
double pure_collectibility_of_lambda(const std::vector<double>& lambdas);

// Closed-form mixed-state collectibility of the generalized Werner state:
// alpha^(N-1) y (alpha + (1-alpha)/N^2 y^(-1/N)).
double werner_collectibility(const WernerSpec& spec);

// Renyi entropy of order 1/2: H_1/2 = 2 log(sum_i sqrt(lambda_i)).
double renyi_half(const std::vector<double>& lambdas);

// Two-qubit thresholds as functions of the single Schmidt number lambda.
WernerThresholds thresholds_two_qubit(double lambda);

// (1 + (N-1) negativity)^N / N^(2N); equals y(lambda) for bipartite pure
// states.
double negativity_collectibility(const PureState& psi);

// Theta[h] = (x_j - x_k)(dh/dx_j - dh/dx_k) for h(x) = prod_i (x_i^2 + b) x_i^q,
// evaluated in closed form; nonpositive for q >= 1 (Schur concavity).
double schur_theta(const std::vector<double>& x, double b, double q, std::size_t j,
                   std::size_t k);

// U with |u_in| = 1/sqrt(N) (Fourier) and V = conj(U); feeding the pair as
// the separable basis saturates the Werner-state collectibility.
std::pair<ComplexMatrix, ComplexMatrix> saturating_basis(int local_dim);

}  // namespace qcollect::werner
