#include "qcollect/pseudopure.hpp"

#include "qcollect/rng.hpp"

#include <algorithm>
#include <cmath>

namespace qcollect::pseudopure {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_two_qubits(const DensityMatrix& rho) {
    if (rho.shape().subsystems != 2 || rho.shape().local_dim != 2)
        throw NotTwoQubits("this test is defined for two-qubit states");
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    cdouble acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
    return acc.real();
}

// The exact and count-based paths share the inequality algebra below; only
// the source of the per-axis estimates differs.
struct AxisEstimates {
    double p_plus = 0.0;
    double p_minus = 0.0;
    double t_pp = 0.0;  // Tr(sigma_+^2)
    double t_mm = 0.0;  // Tr(sigma_-^2)
    double t_pm = 0.0;  // Tr(sigma_+ sigma_-)
    bool plus_defined = true;
    bool minus_defined = true;
};

AxisEstimates estimates_from_decomposition(const ConditionalDecomposition& dec) {
    AxisEstimates e;
    e.p_plus = dec.p_plus;
    e.p_minus = dec.p_minus;
    e.plus_defined = dec.plus_defined;
    e.minus_defined = dec.minus_defined;
    e.t_pp = dec.purity_plus();
    e.t_mm = dec.purity_minus();
    e.t_pm = dec.overlap();
    return e;
}

GramObservables gram_from_estimates(const AxisEstimates& e) {
    GramObservables g;
    g.g_pp = e.plus_defined ? e.p_plus * std::sqrt(clamp01(e.t_pp)) : 0.0;
    g.g_mm = e.minus_defined ? e.p_minus * std::sqrt(clamp01(e.t_mm)) : 0.0;
    g.overlap = (e.plus_defined && e.minus_defined) ? e.t_pm : 0.0;
    g.g_pm_abs2 = e.p_plus * e.p_minus * g.overlap;
    return g;
}

PurityBudget budget_from_estimates(const AxisEstimates& a, const AxisEstimates& b) {
    PurityBudget out;
    out.eps_plus = a.plus_defined ? clamp01(1.0 - a.t_pp) : 0.0;
    out.eps_minus = a.minus_defined ? clamp01(1.0 - a.t_mm) : 0.0;
    out.eps_plus_prime = b.plus_defined ? clamp01(1.0 - b.t_pp) : 0.0;
    out.eps_minus_prime = b.minus_defined ? clamp01(1.0 - b.t_mm) : 0.0;
    out.eps_prime_max = std::max(out.eps_plus_prime, out.eps_minus_prime);
    // Capped at the mathematical maximum 2; count-based estimates can
    // otherwise drift above it.
    out.eta = std::min(2.0, 8.0 * a.p_plus * a.p_minus *
                                std::sqrt(out.eps_plus * out.eps_minus) +
                            2.0 * out.eps_prime_max);
    return out;
}

AxisWitness axis_witness(const AxisEstimates& e, double eta) {
    AxisWitness w;
    w.gram = gram_from_estimates(e);
    w.p_plus = e.p_plus;
    w.p_minus = e.p_minus;
    w.eta = eta;
    w.lhs = w.gram.g_pp * w.gram.g_mm - w.gram.g_pm_abs2;
    const double sum = w.gram.g_pp + w.gram.g_mm;
    w.rhs = 0.5 * (eta + sum * sum - 1.0);
    w.w = w.rhs - w.lhs;
    const double radicand = std::max(0.0, eta + sum * sum - 1.0);
    const double root = std::sqrt(2.0 * w.gram.g_pp * w.gram.g_mm) + std::sqrt(radicand);
    w.ya_bound = root * root / 8.0;
    w.branch_degenerate = !(e.plus_defined && e.minus_defined);
    return w;
}

struct WitnessCore {
    AxisWitness primal;
    AxisWitness dual;
    PurityBudget budget;
};

WitnessCore witness_core(const AxisEstimates& a, const AxisEstimates& b) {
    WitnessCore out;
    out.budget = budget_from_estimates(a, b);
    out.primal = axis_witness(a, out.budget.eta);
    // Swapping the axes primes every quantity except eps', which becomes
    // eps = max(eps_+, eps_-).
    const double eps_max = std::max(out.budget.eps_plus, out.budget.eps_minus);
    const double eta_dual =
        std::min(2.0, 8.0 * b.p_plus * b.p_minus *
                          std::sqrt(out.budget.eps_plus_prime * out.budget.eps_minus_prime) +
                      2.0 * eps_max);
    out.dual = axis_witness(b, eta_dual);
    return out;
}

}  // namespace

// --- measurement geometry ---------------------------------------------------

std::array<double, 3> MeasurementAxis::unit() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

ComplexMatrix MeasurementAxis::projector(int sign) const {
    const double half = 0.5 * theta;
    std::vector<cdouble> v(2);
    if (sign >= 0) {
        v[0] = std::cos(half);
        v[1] = cdouble(std::cos(phi), std::sin(phi)) * std::sin(half);
    } else {
        v[0] = -cdouble(std::cos(phi), -std::sin(phi)) * std::sin(half);
        v[1] = std::cos(half);
    }
    return outer(v, v);
}

double axis_dot(const MeasurementAxis& a, const MeasurementAxis& b) {
    const auto u = a.unit();
    const auto v = b.unit();
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

// --- conditional decompositions ----------------------------------------------

const ComplexMatrix& ConditionalDecomposition::sigma_plus() const {
    if (!plus_defined) throw DegenerateBranch(p_plus);
    return sigma_plus_raw;
}

const ComplexMatrix& ConditionalDecomposition::sigma_minus() const {
    if (!minus_defined) throw DegenerateBranch(p_minus);
    return sigma_minus_raw;
}

double ConditionalDecomposition::purity_plus() const {
    return plus_defined ? sigma_plus_raw.frobenius_sq() : 0.0;
}

double ConditionalDecomposition::purity_minus() const {
    return minus_defined ? sigma_minus_raw.frobenius_sq() : 0.0;
}

double ConditionalDecomposition::overlap() const {
    if (!plus_defined || !minus_defined) return 0.0;
    return trace_product(sigma_plus_raw, sigma_minus_raw);
}

ConditionalDecomposition condition_on_axis(const DensityMatrix& rho,
                                           const MeasurementAxis& axis) {
    require_two_qubits(rho);

    ConditionalDecomposition dec;
    dec.axis = axis;

    for (int sign : {+1, -1}) {
        const ComplexMatrix proj = axis.projector(sign);
        // Eigenvector of the projector with eigenvalue 1.
        // A_s[i][j] = <v (x) i| rho |v (x) j>.
        std::vector<cdouble> v(2);
        // recover v from the rank-one projector columns
        if (std::abs(proj(0, 0)) > std::abs(proj(1, 1))) {
            const double norm = std::sqrt(proj(0, 0).real());
            v[0] = norm;
            v[1] = proj(1, 0) / norm;
        } else {
            const double norm = std::sqrt(proj(1, 1).real());
            v[1] = norm;
            v[0] = proj(0, 1) / norm;
        }

        ComplexMatrix a(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                cdouble acc = 0.0;
                for (std::size_t r = 0; r < 2; ++r)
                    for (std::size_t c = 0; c < 2; ++c)
                        acc += std::conj(v[r]) * rho.mat()(r * 2 + i, c * 2 + j) * v[c];
                a(i, j) = acc;
            }
        const double p = a.trace().real();
        const bool defined = p >= kDegenerateP;
        ComplexMatrix sigma(2, 2);
        if (defined) sigma = a.scaled(1.0 / p);
        if (sign > 0) {
            dec.p_plus = std::max(0.0, p);
            dec.plus_defined = defined;
            dec.sigma_plus_raw = sigma;
        } else {
            dec.p_minus = std::max(0.0, p);
            dec.minus_defined = defined;
            dec.sigma_minus_raw = sigma;
        }
    }
    return dec;
}

PurityBudget remote_purities(const ConditionalDecomposition& dec,
                             const ConditionalDecomposition& dec_prime) {
    if (std::abs(axis_dot(dec.axis, dec_prime.axis)) > 1e-9)
        throw AxesNotComplementary("measurement axes are not orthogonal");
    return budget_from_estimates(estimates_from_decomposition(dec),
                                 estimates_from_decomposition(dec_prime));
}

GramObservables gram_observables(const ConditionalDecomposition& dec) {
    return gram_from_estimates(estimates_from_decomposition(dec));
}

// --- the witness ---------------------------------------------------------------

WitnessReport witness(const DensityMatrix& rho, const MeasurementAxis& axis,
                      const MeasurementAxis& axis_prime) {
    require_two_qubits(rho);
    if (std::abs(axis_dot(axis, axis_prime)) > 1e-9)
        throw AxesNotComplementary("measurement axes are not orthogonal");

    const ConditionalDecomposition dec = condition_on_axis(rho, axis);
    const ConditionalDecomposition dec_prime = condition_on_axis(rho, axis_prime);

    const WitnessCore core =
        witness_core(estimates_from_decomposition(dec), estimates_from_decomposition(dec_prime));

    WitnessReport report;
    report.primal = core.primal;
    report.dual = core.dual;
    report.budget = core.budget;
    report.guard = kExactGuard;
    report.from_counts = false;
    report.verdict = (report.primal.w < -kExactGuard || report.dual.w < -kExactGuard)
                         ? Verdict::ENTANGLED_DETECTED
                         : Verdict::INCONCLUSIVE;
    return report;
}

YaCriteria criteria_Ya_mixed(const WitnessReport& report) {
    YaCriteria out;
    const GramObservables& g = report.primal.gram;
    // Statistical noise can push |G+-|^2 past G++ G--; evaluate on the
    // admissible projection.
    const double g12 = std::min(g.g_pm_abs2, g.g_pp * g.g_mm);
    out.value = collect::collectibility_Ya(collect::make_gram2(g.g_pp, g.g_mm, g12));
    const double half_eta = 0.5 * report.primal.eta;
    out.threshold = 1.0 / 16.0 + 0.25 * (half_eta + std::sqrt(half_eta));
    out.verdict = (out.value > out.threshold + kExactGuard) ? Verdict::ENTANGLED_DETECTED
                                                            : Verdict::INCONCLUSIVE;
    return out;
}

ComplexMatrix reduced_bob(const DensityMatrix& rho) {
    require_two_qubits(rho);
    ComplexMatrix out(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            out(i, j) = rho.mat()(0 * 2 + i, 0 * 2 + j) + rho.mat()(1 * 2 + i, 1 * 2 + j);
    return out;
}

BobPurityBound bob_purity_bound(const DensityMatrix& rho, const MeasurementAxis& axis,
                                const MeasurementAxis& axis_prime) {
    const ConditionalDecomposition dec = condition_on_axis(rho, axis);
    const ConditionalDecomposition dec_prime = condition_on_axis(rho, axis_prime);
    const PurityBudget budget = remote_purities(dec, dec_prime);

    BobPurityBound out;
    out.lhs = reduced_bob(rho).frobenius_sq();
    out.rhs = 1.0 - budget.eta;
    out.holds = out.lhs >= out.rhs - 1e-12;
    return out;
}

// --- simulation ------------------------------------------------------------------

ClickRecord simulate_clicks(const DensityMatrix& rho, const MeasurementAxis& axis,
                            std::int64_t shots, std::uint64_t seed) {
    require_two_qubits(rho);
    if (shots < 1) throw BadParams("need at least one shot");

    const ConditionalDecomposition dec = condition_on_axis(rho, axis);
    const double p_plus = dec.plus_defined ? dec.p_plus : 0.0;
    const double c_pp = clamp01(0.5 * (1.0 - dec.purity_plus()));
    const double c_mm = clamp01(0.5 * (1.0 - dec.purity_minus()));
    const double c_pm = clamp01(0.5 * (1.0 - dec.overlap()));

    ClickRecord rec;
    rec.axis_label = "theta=" + std::to_string(axis.theta) + ",phi=" + std::to_string(axis.phi);
    rec.shots = shots;

    SplitMix64 rng(seed);
    for (std::int64_t s = 0; s < shots; ++s) {
        // Three draws per shot, unconditionally, to keep the stream aligned.
        const bool plus1 = rng.uniform01() < p_plus;
        const bool plus2 = rng.uniform01() < p_plus;
        const double u = rng.uniform01();
        if (plus1) ++rec.marginal1_plus;
        if (plus2) ++rec.marginal2_plus;
        const double c = plus1 == plus2 ? (plus1 ? c_pp : c_mm) : c_pm;
        if (u < c) {
            if (plus1 && plus2)
                ++rec.coinc_pp;
            else if (!plus1 && !plus2)
                ++rec.coinc_mm;
            else
                ++rec.coinc_pm;
        }
    }
    return rec;
}

namespace {

// Per-axis base estimates from counts, with binomial standard errors.
struct BaseEstimates {
    double p1p = 0.0, p2p = 0.0;          // marginal "+" probabilities
    double c_pp = 0.0, c_mm = 0.0, c_pm = 0.0;  // conditional coincidence probs
    double se_p1p = 0.0, se_p2p = 0.0;
    double se_cpp = 0.0, se_cmm = 0.0, se_cpm = 0.0;
    bool clamped = false;
};

BaseEstimates reduce_record(const ClickRecord& rec) {
    const double s = static_cast<double>(rec.shots);
    if (rec.shots < 1) throw BadParams("record has no shots");

    const double m1p = static_cast<double>(rec.marginal1_plus);
    const double m2p = static_cast<double>(rec.marginal2_plus);
    const double events[] = {m1p, s - m1p, m2p, s - m2p};
    for (double e : events)
        if (e < 10.0)
            throw InsufficientCounts("a marginal branch saw fewer than 10 events");

    BaseEstimates b;
    b.p1p = m1p / s;
    b.p2p = m2p / s;
    b.se_p1p = std::sqrt(b.p1p * (1.0 - b.p1p) / s);
    b.se_p2p = std::sqrt(b.p2p * (1.0 - b.p2p) / s);

    const double n_pp = s * b.p1p * b.p2p;
    const double n_mm = s * (1.0 - b.p1p) * (1.0 - b.p2p);
    const double n_pm = s * (b.p1p * (1.0 - b.p2p) + (1.0 - b.p1p) * b.p2p);
    for (double n : {n_pp, n_mm, n_pm})
        if (n < 10.0)
            throw InsufficientCounts("a coincidence denominator has fewer than 10 expected events");

    auto cond = [&](double count, double denom, double& se) {
        double c = count / denom;
        if (c > 1.0) c = 1.0;
        se = std::sqrt(std::max(0.0, c * (1.0 - c)) / denom);
        return c;
    };
    b.c_pp = cond(static_cast<double>(rec.coinc_pp), n_pp, b.se_cpp);
    b.c_mm = cond(static_cast<double>(rec.coinc_mm), n_mm, b.se_cmm);
    b.c_pm = cond(static_cast<double>(rec.coinc_pm), n_pm, b.se_cpm);
    return b;
}

AxisEstimates estimates_from_base(const BaseEstimates& b, bool* clamped) {
    AxisEstimates e;
    e.p_plus = clamp01(0.5 * (b.p1p + b.p2p));
    e.p_minus = 1.0 - e.p_plus;
    auto purity_est = [&](double c) {
        const double raw = 1.0 - 2.0 * c;
        if ((raw < 0.0 || raw > 1.0) && clamped) *clamped = true;
        return clamp01(raw);
    };
    e.t_pp = purity_est(b.c_pp);
    e.t_mm = purity_est(b.c_mm);
    e.t_pm = purity_est(b.c_pm);
    e.plus_defined = e.p_plus >= kDegenerateP;
    e.minus_defined = e.p_minus >= kDegenerateP;
    return e;
}

}  // namespace

WitnessReport witness_from_clicks(const ClickRecord& record, const MeasurementAxis& axis,
                                  const ClickRecord& record_prime,
                                  const MeasurementAxis& axis_prime) {
    if (std::abs(axis_dot(axis, axis_prime)) > 1e-9)
        throw AxesNotComplementary("measurement axes are not orthogonal");
    if (record.shots != record_prime.shots)
        throw BadParams("records must carry matching shot counts");

    const BaseEstimates base_a = reduce_record(record);
    const BaseEstimates base_b = reduce_record(record_prime);

    bool clamped = false;
    auto evaluate = [&](const BaseEstimates& a, const BaseEstimates& b,
                        bool* clamp_flag) -> WitnessCore {
        return witness_core(estimates_from_base(a, clamp_flag),
                            estimates_from_base(b, clamp_flag));
    };

    const WitnessCore core = evaluate(base_a, base_b, &clamped);

    // Delta-method standard errors: central differences over the ten base
    // probabilities, each scaled by its binomial standard error.
    double var_lhs[2] = {0.0, 0.0};
    double var_rhs[2] = {0.0, 0.0};
    double var_w[2] = {0.0, 0.0};

    struct Slot {
        double* value;
        double se;
    };
    BaseEstimates pert_a = base_a;
    BaseEstimates pert_b = base_b;
    const Slot slots[] = {
        {&pert_a.p1p, base_a.se_p1p},  {&pert_a.p2p, base_a.se_p2p},
        {&pert_a.c_pp, base_a.se_cpp}, {&pert_a.c_mm, base_a.se_cmm},
        {&pert_a.c_pm, base_a.se_cpm}, {&pert_b.p1p, base_b.se_p1p},
        {&pert_b.p2p, base_b.se_p2p},  {&pert_b.c_pp, base_b.se_cpp},
        {&pert_b.c_mm, base_b.se_cmm}, {&pert_b.c_pm, base_b.se_cpm},
    };

    for (const Slot& slot : slots) {
        if (slot.se <= 0.0) continue;
        const double h = std::max(1e-9, 1e-3 * slot.se);
        const double saved = *slot.value;
        *slot.value = saved + h;
        const WitnessCore hi = evaluate(pert_a, pert_b, nullptr);
        *slot.value = saved - h;
        const WitnessCore lo = evaluate(pert_a, pert_b, nullptr);
        *slot.value = saved;

        const AxisWitness* his[2] = {&hi.primal, &hi.dual};
        const AxisWitness* los[2] = {&lo.primal, &lo.dual};
        for (int k = 0; k < 2; ++k) {
            const double dl = (his[k]->lhs - los[k]->lhs) / (2.0 * h) * slot.se;
            const double dr = (his[k]->rhs - los[k]->rhs) / (2.0 * h) * slot.se;
            const double dw = (his[k]->w - los[k]->w) / (2.0 * h) * slot.se;
            var_lhs[k] += dl * dl;
            var_rhs[k] += dr * dr;
            var_w[k] += dw * dw;
        }
    }

    WitnessReport report;
    report.primal = core.primal;
    report.dual = core.dual;
    report.budget = core.budget;
    report.from_counts = true;
    report.clamped_estimates = clamped;
    report.primal.lhs_se = std::sqrt(var_lhs[0]);
    report.primal.rhs_se = std::sqrt(var_rhs[0]);
    report.primal.w_se = std::sqrt(var_w[0]);
    report.dual.lhs_se = std::sqrt(var_lhs[1]);
    report.dual.rhs_se = std::sqrt(var_rhs[1]);
    report.dual.w_se = std::sqrt(var_w[1]);
    // Three standard errors on the violation before claiming detection.
    report.guard = 3.0;
    const bool primal_hit = report.primal.w < -3.0 * report.primal.w_se;
    const bool dual_hit = report.dual.w < -3.0 * report.dual.w_se;
    report.verdict = (primal_hit || dual_hit) ? Verdict::ENTANGLED_DETECTED
                                              : Verdict::INCONCLUSIVE;
    return report;
}

}  // namespace qcollect::pseudopure
