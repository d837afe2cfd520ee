// pseudopure.hpp
// Two-qubit entanglement test built from two complementary Alice
// measurements: conditional Bob states, remote purities and the noise
// budget eta, the separability inequality and its dual, the Y_a criterion
// with the eta-relaxed threshold, and a seeded Monte-Carlo simulator of
// the two-copy coincidence experiment.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "qcollect/collect.hpp"
#include "qcollect/qcore.hpp"

namespace qcollect::pseudopure {

using collect::Verdict;

inline constexpr double kExactGuard = 1e-9;
inline constexpr double kDegenerateP = 1e-12;

// Bloch versor n(theta, phi); the measurement projects onto its +/-
// eigenstates.
struct MeasurementAxis {
    double theta = 0.0;
    double phi = 0.0;

    std::array<double, 3> unit() const;
    // +1 or -1 eigenprojector of n.sigma, as a 2x2 matrix.
    ComplexMatrix projector(int sign) const;

    static MeasurementAxis z() { return MeasurementAxis{0.0, 0.0}; }
    static MeasurementAxis x() { return MeasurementAxis{1.5707963267948966, 0.0}; }
};

double axis_dot(const MeasurementAxis& a, const MeasurementAxis& b);

struct ConditionalDecomposition {
    MeasurementAxis axis;
    double p_plus = 0.0;
    double p_minus = 0.0;
    bool plus_defined = false;
    bool minus_defined = false;

    // Throw DegenerateBranch when the branch probability vanished.
    const ComplexMatrix& sigma_plus() const;
    const ComplexMatrix& sigma_minus() const;

    double purity_plus() const;   // Tr(sigma_+^2), 0 for an undefined branch
    double purity_minus() const;
    double overlap() const;       // Tr(sigma_+ sigma_-), 0 if either undefined

    ComplexMatrix sigma_plus_raw;   // valid only when the branch is defined
    ComplexMatrix sigma_minus_raw;
};

struct PurityBudget {
    double eps_plus = 0.0;
    double eps_minus = 0.0;
    double eps_plus_prime = 0.0;
    double eps_minus_prime = 0.0;
    double eps_prime_max = 0.0;
    double eta = 0.0;  // 8 p+ p- sqrt(eps+ eps-) + 2 eps', at most 2
};

struct GramObservables {
    double g_pp = 0.0;       // G_++ = p_+ sqrt(Tr sigma_+^2)
    double g_mm = 0.0;       // G_--
    double g_pm_abs2 = 0.0;  // |G_+-|^2 = p_+ p_- Tr(sigma_+ sigma_-)
    double overlap = 0.0;    // Tr(sigma_+ sigma_-)
};

struct ClickRecord {
    std::string axis_label;
    std::int64_t shots = 0;
    std::int64_t marginal1_plus = 0;  // "+" clicks, copy 1
    std::int64_t marginal2_plus = 0;  // "+" clicks, copy 2
    std::int64_t coinc_pp = 0;        // double clicks, both copies "+"
    std::int64_t coinc_mm = 0;        // double clicks, both copies "-"
    std::int64_t coinc_pm = 0;        // double clicks, mixed outcomes (pooled)
};

// One directed evaluation of the separability inequality: Gram data on the
// primary axis, eta fed by both axes.
struct AxisWitness {
    GramObservables gram;
    double p_plus = 0.0;
    double p_minus = 0.0;
    double eta = 0.0;
    double lhs = 0.0;       // G++ G-- - |G+-|^2
    double rhs = 0.0;       // (eta + (G++ + G--)^2 - 1)/2
    double w = 0.0;         // rhs - lhs; negative beyond guard = violation
    double ya_bound = 0.0;  // (sqrt(2 G++ G--) + sqrt(eta + (G+++G--)^2 - 1))^2 / 8
    double lhs_se = 0.0;    // binomial standard errors (click-based runs only)
    double rhs_se = 0.0;
    double w_se = 0.0;
    bool branch_degenerate = false;
};

struct WitnessReport {
    AxisWitness primal;  // Gram on the first axis
    AxisWitness dual;    // Gram on the second axis, roles of the axes swapped
    PurityBudget budget;
    Verdict verdict = Verdict::INCONCLUSIVE;
    double guard = kExactGuard;
    bool from_counts = false;
    bool clamped_estimates = false;  // some count-based estimate left [0,1]
};

struct YaCriteria {
    double value = 0.0;
    double threshold = 0.0;  // 1/16 + (eta/2 + sqrt(eta/2))/4
    Verdict verdict = Verdict::INCONCLUSIVE;
};

// p_+/- = Tr[(P_+/- (x) I) rho]; conditional Bob states via the partial
// trace of the projected state. Branches below kDegenerateP are flagged.
ConditionalDecomposition condition_on_axis(const DensityMatrix& rho,
                                           const MeasurementAxis& axis);

// eps from the unprimed axis, eps' from the primed one; axes must be
// orthogonal Bloch vectors.
PurityBudget remote_purities(const ConditionalDecomposition& dec,
                             const ConditionalDecomposition& dec_prime);

GramObservables gram_observables(const ConditionalDecomposition& dec);

WitnessReport witness(const DensityMatrix& rho, const MeasurementAxis& axis,
                      const MeasurementAxis& axis_prime);

YaCriteria criteria_Ya_mixed(const WitnessReport& report);

struct BobPurityBound {
    double lhs = 0.0;  // Tr(rho_B^2)
    double rhs = 0.0;  // 1 - eta
    bool holds = false;
};
BobPurityBound bob_purity_bound(const DensityMatrix& rho, const MeasurementAxis& axis,
                                const MeasurementAxis& axis_prime);

// Samples the two-copy experiment on one axis: both Alice outcomes per
// shot, then a coincidence Bernoulli with p_ij(+,+) = (1 - Tr(sigma_i
// sigma_j))/2. Deterministic for a fixed seed.
ClickRecord simulate_clicks(const DensityMatrix& rho, const MeasurementAxis& axis,
                            std::int64_t shots, std::uint64_t seed);

// Estimates probabilities, purities and overlaps from two records taken on
// orthogonal axes, then evaluates the witness with 3-standard-error guards.
WitnessReport witness_from_clicks(const ClickRecord& record, const MeasurementAxis& axis,
                                  const ClickRecord& record_prime,
                                  const MeasurementAxis& axis_prime);

ComplexMatrix reduced_bob(const DensityMatrix& rho);

}  // namespace qcollect::pseudopure
