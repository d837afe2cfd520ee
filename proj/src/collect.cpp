#include "qcollect/collect.hpp"

#include "qcollect/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

namespace qcollect::collect {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFactorFloor = 1e-300;
constexpr double kLogFloor = -690.77552789821368;  // log(1e-300)

}  // namespace

// --- basis -----------------------------------------------------------------

std::vector<cdouble> SeparableBasisSet::product_state(int j) const {
    const std::size_t d = shape.total_dim();
    std::vector<cdouble> chi(d);
    for (std::size_t i = 0; i < d; ++i) {
        cdouble amp = 1.0;
        for (int s = 1; s <= shape.subsystems; ++s)
            amp *= locals[static_cast<std::size_t>(s - 1)](shape.digit(i, s),
                                                           static_cast<std::size_t>(j));
        chi[i] = amp;
    }
    return chi;
}

SeparableBasisSet make_separable_basis(const TensorShape& shape,
                                       std::vector<ComplexMatrix> locals, double tol) {
    if (locals.size() != static_cast<std::size_t>(shape.subsystems))
        throw ShapeMismatch("one local unitary per subsystem required");
    const std::size_t n = static_cast<std::size_t>(shape.local_dim);
    for (const auto& u : locals) {
        if (u.rows() != n || u.cols() != n)
            throw ShapeMismatch("local unitary has wrong dimension");
        if (!u.is_unitary(tol)) throw NotUnitary("local matrix is not unitary within tolerance");
    }
    return SeparableBasisSet{shape, std::move(locals)};
}

GramMatrix2 make_gram2(double g11, double g22, double g12_abs2) {
    if (g11 < 0.0 || g22 < 0.0 || g12_abs2 < 0.0)
        throw BadParams("Gram matrix entries must be nonnegative");
    if (g12_abs2 > g11 * g22 + 1e-12)
        throw BadParams("|G12|^2 exceeds G11*G22 beyond tolerance");
    return GramMatrix2{g11, g22, g12_abs2};
}

std::string to_string(Verdict v) {
    return v == Verdict::ENTANGLED_DETECTED ? "ENTANGLED_DETECTED" : "INCONCLUSIVE";
}

// --- unitary parameterization ----------------------------------------------

std::size_t unitary_param_count(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
}

ComplexMatrix unitary_from_params(std::span<const double> params, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (params.size() != unitary_param_count(n))
        throw BadParams("expected n^2 parameters for a local unitary");

    const std::size_t rotations = un * (un - 1) / 2;
    ComplexMatrix u(un, un);
    for (std::size_t i = 0; i < un; ++i) {
        const double alpha = params[2 * rotations + i];
        u(i, i) = cdouble(std::cos(alpha), std::sin(alpha));
    }

    // U = R_1 R_2 ... R_m D with the rotations in elimination order, so the
    // product is applied right to left.
    std::vector<std::pair<std::size_t, std::size_t>> order;
    order.reserve(rotations);
    for (std::size_t c = 0; c + 1 < un; ++c)
        for (std::size_t q = c + 1; q < un; ++q) order.emplace_back(c, q);

    for (std::size_t idx = order.size(); idx-- > 0;) {
        const auto [p, q] = order[idx];
        const double theta = params[2 * idx];
        const double phi = params[2 * idx + 1];
        const double co = std::cos(theta);
        const double si = std::sin(theta);
        const cdouble eip(std::cos(phi), std::sin(phi));
        // Left-multiply by R(p,q,theta,phi): mixes rows p and q.
        for (std::size_t col = 0; col < un; ++col) {
            const cdouble rp = u(p, col);
            const cdouble rq = u(q, col);
            u(p, col) = co * rp - si * std::conj(eip) * rq;
            u(q, col) = si * eip * rp + co * rq;
        }
    }
    return u;
}

std::vector<double> params_from_unitary(const ComplexMatrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw ShapeMismatch("unitary must be square");
    if (!input.is_unitary(1e-6)) throw NotUnitary("matrix is not unitary within 1e-6");

    ComplexMatrix m = input;
    std::vector<double> params(unitary_param_count(static_cast<int>(n)), 0.0);
    std::size_t idx = 0;
    for (std::size_t c = 0; c + 1 < n; ++c) {
        for (std::size_t q = c + 1; q < n; ++q) {
            const cdouble x = m(c, c);
            const cdouble y = m(q, c);
            double theta = 0.0, phi = 0.0;
            if (std::abs(y) > 1e-14) {
                theta = std::atan2(std::abs(y), std::abs(x));
                phi = std::arg(y) - std::arg(x);
                const double co = std::cos(theta);
                const double si = std::sin(theta);
                const cdouble eip(std::cos(phi), std::sin(phi));
                // Apply R^dagger to rows p=c and q.
                for (std::size_t col = 0; col < n; ++col) {
                    const cdouble rp = m(c, col);
                    const cdouble rq = m(q, col);
                    m(c, col) = co * rp + si * std::conj(eip) * rq;
                    m(q, col) = -si * eip * rp + co * rq;
                }
            }
            params[2 * idx] = theta;
            params[2 * idx + 1] = phi;
            ++idx;
        }
    }
    const std::size_t rotations = n * (n - 1) / 2;
    for (std::size_t i = 0; i < n; ++i) params[2 * rotations + i] = std::arg(m(i, i));
    return params;
}

// --- functionals -------------------------------------------------------------

double product_functional_pure(const PureState& psi, const SeparableBasisSet& basis) {
    if (!(psi.shape() == basis.shape)) throw ShapeMismatch("state and basis shapes differ");
    const int n = psi.shape().local_dim;
    double log_acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const std::vector<cdouble> chi = basis.product_state(j);
        cdouble overlap = 0.0;
        for (std::size_t i = 0; i < chi.size(); ++i)
            overlap += std::conj(psi.amplitudes()[i]) * chi[i];
        const double mag2 = std::norm(overlap);
        if (mag2 < kFactorFloor) return 0.0;
        log_acc += std::log(mag2);
    }
    return std::exp(log_acc);
}

double product_functional_mixed(const DensityMatrix& rho, const SeparableBasisSet& basis) {
    if (!(rho.shape() == basis.shape)) throw ShapeMismatch("state and basis shapes differ");
    const int n = rho.shape().local_dim;

    std::vector<std::vector<cdouble>> chi(static_cast<std::size_t>(n));
    std::vector<std::vector<cdouble>> rho_chi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        chi[static_cast<std::size_t>(j)] = basis.product_state(j);
        rho_chi[static_cast<std::size_t>(j)] = rho.mat().apply(chi[static_cast<std::size_t>(j)]);
    }
    auto element = [&](int j, int k) {
        cdouble acc = 0.0;
        const auto& bra = chi[static_cast<std::size_t>(j)];
        const auto& ket = rho_chi[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < bra.size(); ++i) acc += std::conj(bra[i]) * ket[i];
        return acc;
    };

    double log_acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double diag = element(j, j).real();
        if (diag < kFactorFloor) return 0.0;
        log_acc += std::log(diag);
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const double off2 = std::norm(element(j, k));
            if (off2 < kFactorFloor) return 0.0;
            log_acc += std::log(off2);
        }
    }
    return std::exp(log_acc / static_cast<double>(n));
}

double collectibility_Ya(const GramMatrix2& gram) {
    const double prod = gram.g11 * gram.g22;
    double radicand = prod - gram.g12_abs2;
    if (radicand < 0.0) {
        if (radicand < -1e-12)
            throw NegativeRadicand("G11*G22 - |G12|^2 = " + std::to_string(radicand));
        radicand = 0.0;
    }
    const double s = std::sqrt(prod) + std::sqrt(radicand);
    return 0.25 * s * s;
}

GramMatrix2 gram_from_pure(const PureState& psi, const SeparableBasisSet& downstream) {
    if (psi.shape().local_dim != 2) throw NotQubits("Gram projection is defined for qubits");
    if (downstream.shape.local_dim != 2 ||
        downstream.shape.subsystems != psi.shape().subsystems - 1)
        throw ShapeMismatch("downstream basis must cover subsystems 2..K of a qubit system");

    const std::size_t rest_dim = downstream.shape.total_dim();
    std::vector<cdouble> phi1(2, 0.0), phi2(2, 0.0);
    for (int j = 0; j < 2; ++j) {
        const std::vector<cdouble> proj = downstream.product_state(j);
        auto& phi = (j == 0) ? phi1 : phi2;
        for (std::size_t m = 0; m < 2; ++m) {
            cdouble acc = 0.0;
            for (std::size_t rest = 0; rest < rest_dim; ++rest)
                acc += std::conj(proj[rest]) * psi.amplitudes()[m * rest_dim + rest];
            phi[m] = acc;
        }
    }
    const double g11 = std::norm(phi1[0]) + std::norm(phi1[1]);
    const double g22 = std::norm(phi2[0]) + std::norm(phi2[1]);
    const cdouble g12 = std::conj(phi1[0]) * phi2[0] + std::conj(phi1[1]) * phi2[1];
    return GramMatrix2{g11, g22, std::norm(g12)};
}

// --- Nelder-Mead -------------------------------------------------------------

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

struct NmResult {
    std::vector<double> x;
    double f = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int iters_used = 0;
};

// Standard simplex search, maximizing. Converged when the function spread
// over the simplex drops below ftol.
NmResult nelder_mead_max(const Objective& fn, const std::vector<double>& x0, double step,
                         int max_iters, double ftol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) fs[i] = fn(xs[i]);

    std::vector<std::size_t> ord(n + 1);
    NmResult res;
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] > fs[b]; });
        const std::size_t best = ord[0], second_worst = ord[n - 1], worst = ord[n];
        if (fs[best] - fs[worst] < ftol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += xs[ord[k]][d];
        for (double& v : centroid) v /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + t * (centroid[d] - xs[worst][d]);
            return p;
        };

        const std::vector<double> xr = blend(1.0);
        const double fr = fn(xr);
        if (fr > fs[best]) {
            const std::vector<double> xe = blend(2.0);
            const double fe = fn(xe);
            if (fe > fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr > fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        bool shrink = false;
        if (fr > fs[worst]) {
            const std::vector<double> xc = blend(0.5);
            const double fc = fn(xc);
            if (fc >= fr) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                shrink = true;
            }
        } else {
            const std::vector<double> xc = blend(-0.5);
            const double fc = fn(xc);
            if (fc > fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t k = 1; k <= n; ++k) {
                const std::size_t i = ord[k];
                for (std::size_t d = 0; d < n; ++d)
                    xs[i][d] = xs[ord[0]][d] + 0.5 * (xs[i][d] - xs[ord[0]][d]);
                fs[i] = fn(xs[i]);
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fs[i] > fs[best]) best = i;
    res.x = xs[best];
    res.f = fs[best];
    res.iters_used = iter;
    return res;
}

struct RestartResult {
    double f = -std::numeric_limits<double>::infinity();
    std::vector<double> x;
    bool converged = false;
};

// One restart: a coarse simplex run followed by progressively tighter
// re-seeded simplices around the incumbent, within the iteration budget.
RestartResult run_restart(const Objective& fn, const std::vector<double>& x0,
                          const OptimizerConfig& cfg) {
    int budget = std::max(1, cfg.max_iters);
    double step = 0.4;
    NmResult cur = nelder_mead_max(fn, x0, step, budget, cfg.objective_tol);
    budget -= cur.iters_used;

    while (budget > 20) {
        step *= 0.1;
        if (step < 1e-8) break;
        NmResult nxt = nelder_mead_max(fn, cur.x, step, budget, cfg.objective_tol);
        budget -= nxt.iters_used;
        const bool improved = nxt.f > cur.f + cfg.objective_tol;
        if (nxt.f > cur.f) cur = nxt;
        if (!improved) break;
    }
    return RestartResult{cur.f, cur.x, cur.converged};
}

struct MaxOutcome {
    double f = -std::numeric_limits<double>::infinity();
    std::vector<double> x;
    int restarts_converged = 0;
};

// Multi-start driver. Start 0.. take the deterministic warm starts, the rest
// are uniform random angle vectors from per-restart streams; the winner is
// the strict maximum, ties resolved toward the lowest restart index. The
// outcome does not depend on the thread count.
MaxOutcome maximize_over_params(const Objective& fn, std::size_t nparams,
                                const OptimizerConfig& cfg,
                                const std::vector<std::vector<double>>& warm_starts) {
    const int restarts = std::max(1, cfg.restarts);
    std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
    const SplitMix64 base(cfg.seed);

    auto run_index = [&](int i) {
        std::vector<double> x0;
        if (static_cast<std::size_t>(i) < warm_starts.size()) {
            x0 = warm_starts[static_cast<std::size_t>(i)];
        } else {
            SplitMix64 rng = base.split(0x5eed0000ULL + static_cast<std::uint64_t>(i));
            x0.resize(nparams);
            for (double& v : x0) v = rng.uniform01() * kTwoPi;
        }
        results[static_cast<std::size_t>(i)] = run_restart(fn, x0, cfg);
    };

    const int nthreads = std::clamp(cfg.threads, 1, restarts);
    if (nthreads <= 1) {
        for (int i = 0; i < restarts; ++i) run_index(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&]() {
                for (int i = next.fetch_add(1); i < restarts; i = next.fetch_add(1)) run_index(i);
            });
        for (auto& th : pool) th.join();
    }

    MaxOutcome out;
    for (int i = 0; i < restarts; ++i) {
        const auto& r = results[static_cast<std::size_t>(i)];
        if (r.converged) ++out.restarts_converged;
        if (r.f > out.f) {
            out.f = r.f;
            out.x = r.x;
        }
    }
    return out;
}

SeparableBasisSet basis_from_params(const TensorShape& shape, std::span<const double> params) {
    const std::size_t per = unitary_param_count(shape.local_dim);
    std::vector<ComplexMatrix> locals;
    locals.reserve(static_cast<std::size_t>(shape.subsystems));
    for (int s = 0; s < shape.subsystems; ++s)
        locals.push_back(unitary_from_params(
            params.subspan(static_cast<std::size_t>(s) * per, per), shape.local_dim));
    return SeparableBasisSet{shape, std::move(locals)};
}

std::vector<double> concat_params(const std::vector<std::vector<double>>& parts) {
    std::vector<double> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

// Warm start for bipartite states: Schmidt bases composed with the Fourier
// pair saturates the pure-state maximum, and for Werner-like spectra the
// dominant eigenvector plays the same role.
std::vector<double> schmidt_fourier_start(const PureState& psi) {
    const SchmidtData sd = schmidt(psi);
    const ComplexMatrix f = fourier_unitary(static_cast<std::size_t>(psi.shape().local_dim));
    return concat_params({params_from_unitary(sd.left_basis * f),
                          params_from_unitary(sd.right_basis * f.conjugate())});
}

std::vector<double> fourier_pattern_start(const TensorShape& shape) {
    const ComplexMatrix f = fourier_unitary(static_cast<std::size_t>(shape.local_dim));
    std::vector<std::vector<double>> parts;
    for (int s = 0; s < shape.subsystems; ++s)
        parts.push_back(params_from_unitary(s % 2 == 0 ? f : f.conjugate()));
    return concat_params(parts);
}

}  // namespace

// --- maximizations --------------------------------------------------------

double pure_detection_threshold(const TensorShape& shape) {
    return std::pow(static_cast<double>(shape.local_dim),
                    -static_cast<double>(shape.local_dim) * shape.subsystems);
}

std::optional<double> mixed_detection_threshold(const TensorShape& shape) {
    const double n = shape.local_dim;
    if (shape.subsystems == 2) return std::pow(n, -2.0 * n);
    if (shape.local_dim == 2)
        return 1.0 / (16.0 * (std::pow(2.0, shape.subsystems - 1) - 1.0));
    return std::nullopt;
}

CollectReport collectibility_pure_max(const PureState& psi, const OptimizerConfig& cfg) {
    const TensorShape shape = psi.shape();
    const std::size_t nparams =
        unitary_param_count(shape.local_dim) * static_cast<std::size_t>(shape.subsystems);

    std::vector<std::vector<double>> warms;
    if (shape.subsystems == 2) warms.push_back(schmidt_fourier_start(psi));
    warms.push_back(fourier_pattern_start(shape));

    Objective fn = [&psi, &shape](const std::vector<double>& params) {
        const SeparableBasisSet basis = basis_from_params(shape, params);
        const int n = shape.local_dim;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const std::vector<cdouble> chi = basis.product_state(j);
            cdouble overlap = 0.0;
            for (std::size_t i = 0; i < chi.size(); ++i)
                overlap += std::conj(psi.amplitudes()[i]) * chi[i];
            const double mag2 = std::norm(overlap);
            acc += (mag2 < kFactorFloor) ? kLogFloor : std::log(mag2);
        }
        return acc;
    };

    const MaxOutcome best = maximize_over_params(fn, nparams, cfg, warms);

    CollectReport report;
    report.basis = basis_from_params(shape, best.x);
    report.value = product_functional_pure(psi, report.basis);
    report.restarts_converged = best.restarts_converged;
    report.threshold = pure_detection_threshold(shape);
    report.threshold_name = "N^-(N*K) separable bound";
    report.verdict = (report.value > report.threshold + kVerdictGuard)
                         ? Verdict::ENTANGLED_DETECTED
                         : Verdict::INCONCLUSIVE;
    return report;
}

CollectReport collectibility_mixed_max(const DensityMatrix& rho, const OptimizerConfig& cfg) {
    const TensorShape shape = rho.shape();
    const std::size_t nparams =
        unitary_param_count(shape.local_dim) * static_cast<std::size_t>(shape.subsystems);

    std::vector<std::vector<double>> warms;
    if (shape.subsystems == 2) {
        // Dominant eigenvector as a pseudo pure state.
        const EigenSystem sys = eigh(rho.mat());
        std::vector<cdouble> top(shape.total_dim());
        for (std::size_t r = 0; r < top.size(); ++r)
            top[r] = sys.vectors(r, top.size() - 1);
        try {
            warms.push_back(schmidt_fourier_start(PureState(shape, top)));
        } catch (const Error&) {
            // fall through to the generic starts
        }
    }
    warms.push_back(fourier_pattern_start(shape));

    const int n = shape.local_dim;
    Objective fn = [&rho, &shape, n](const std::vector<double>& params) {
        const SeparableBasisSet basis = basis_from_params(shape, params);
        std::vector<std::vector<cdouble>> chi(static_cast<std::size_t>(n));
        std::vector<std::vector<cdouble>> rho_chi(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            chi[static_cast<std::size_t>(j)] = basis.product_state(j);
            rho_chi[static_cast<std::size_t>(j)] =
                rho.mat().apply(chi[static_cast<std::size_t>(j)]);
        }
        auto element = [&](int j, int k) {
            cdouble acc = 0.0;
            const auto& bra = chi[static_cast<std::size_t>(j)];
            const auto& ket = rho_chi[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < bra.size(); ++i) acc += std::conj(bra[i]) * ket[i];
            return acc;
        };
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double diag = element(j, j).real();
            acc += (diag < kFactorFloor) ? kLogFloor : std::log(diag);
        }
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double off2 = std::norm(element(j, k));
                acc += (off2 < kFactorFloor) ? kLogFloor : std::log(off2);
            }
        return acc;
    };

    const MaxOutcome best = maximize_over_params(fn, nparams, cfg, warms);

    CollectReport report;
    report.basis = basis_from_params(shape, best.x);
    report.value = product_functional_mixed(rho, report.basis);
    report.restarts_converged = best.restarts_converged;
    if (const auto thr = mixed_detection_threshold(shape)) {
        report.threshold = *thr;
        report.threshold_name =
            (shape.subsystems == 2) ? "N^-2N PPT bound" : "1/(16(2^(K-1)-1)) PPT bound";
        report.verdict = (report.value > report.threshold + kVerdictGuard)
                             ? Verdict::ENTANGLED_DETECTED
                             : Verdict::INCONCLUSIVE;
    } else {
        report.threshold = 0.0;
        report.threshold_name = "none (no PPT bound for this shape)";
        report.verdict = Verdict::INCONCLUSIVE;
    }
    return report;
}

YaMaxReport collectibility_Ya_max(const PureState& psi, const OptimizerConfig& cfg) {
    if (psi.shape().local_dim != 2) throw NotQubits("Y_a is defined for qubit systems");
    if (psi.shape().subsystems < 2) throw NotBipartite("Y_a needs at least two subsystems");
    const TensorShape down_shape(psi.shape().subsystems - 1, 2);
    const std::size_t nparams =
        unitary_param_count(2) * static_cast<std::size_t>(down_shape.subsystems);

    Objective fn = [&psi, &down_shape](const std::vector<double>& params) {
        const SeparableBasisSet downstream = basis_from_params(down_shape, params);
        const GramMatrix2 gram = gram_from_pure(psi, downstream);
        const double ya = collectibility_Ya(gram);
        return (ya < kFactorFloor) ? kLogFloor : std::log(ya);
    };

    const MaxOutcome best =
        maximize_over_params(fn, nparams, cfg, {fourier_pattern_start(down_shape)});

    YaMaxReport report;
    report.downstream = basis_from_params(down_shape, best.x);
    report.value = collectibility_Ya(gram_from_pure(psi, report.downstream));
    report.restarts_converged = best.restarts_converged;
    return report;
}

}  // namespace qcollect::collect
