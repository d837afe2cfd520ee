#include "qcollect/werner.hpp"

#include <cmath>
#include <functional>

namespace qcollect::werner {

namespace {

void check_spec(const WernerSpec& spec) {
    if (spec.local_dim < 2) throw BadLambda("local dimension must be at least 2");
    if (spec.lambdas.size() != static_cast<std::size_t>(spec.local_dim))
        throw BadLambda("Schmidt vector must have N entries");
    double sum = 0.0;
    for (double l : spec.lambdas) {
        if (l < 0.0) throw BadLambda("Schmidt coefficients must be nonnegative");
        sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw BadLambda("Schmidt coefficients must sum to 1, got " + std::to_string(sum));
    if (spec.alpha < 0.0 || spec.alpha > 1.0)
        throw BadLambda("alpha must lie in [0, 1], got " + std::to_string(spec.alpha));
    const std::size_t n = static_cast<std::size_t>(spec.local_dim);
    for (const auto& u : {std::cref(spec.local_u), std::cref(spec.local_v)}) {
        if (!u.get()) continue;
        if (u.get()->rows() != n || u.get()->cols() != n)
            throw ShapeMismatch("local unitary has wrong dimension");
        if (!u.get()->is_unitary(kDefaultTol))
            throw NotUnitary("local matrix is not unitary within tolerance");
    }
}

double sqrt_lambda_sum(const std::vector<double>& lambdas) {
    double s = 0.0;
    for (double l : lambdas) s += std::sqrt(std::max(0.0, l));
    return s;
}

}  // namespace

PureState werner_pure_state(const WernerSpec& spec) {
    check_spec(spec);
    const std::size_t n = static_cast<std::size_t>(spec.local_dim);
    const TensorShape shape(2, spec.local_dim);

    std::vector<cdouble> amps(shape.total_dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        amps[i * n + i] = std::sqrt(std::max(0.0, spec.lambdas[i]));

    if (spec.local_u || spec.local_v) {
        const ComplexMatrix u = spec.local_u.value_or(ComplexMatrix::identity(n));
        const ComplexMatrix v = spec.local_v.value_or(ComplexMatrix::identity(n));
        amps = kron(u, v).apply(amps);
    }
    return PureState(shape, std::move(amps));
}

DensityMatrix werner_state(const WernerSpec& spec) {
    check_spec(spec);
    const TensorShape shape(2, spec.local_dim);
    const std::size_t d = shape.total_dim();

    const PureState psi = werner_pure_state(spec);
    ComplexMatrix rho = psi.projector().scaled(spec.alpha);
    const double uniform = (1.0 - spec.alpha) / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) rho(i, i) += uniform;
    return validate_density(rho, shape);
}

double pure_collectibility_of_lambda(const std::vector<double>& lambdas) {
    const double n = static_cast<double>(lambdas.size());
    const double s = sqrt_lambda_sum(lambdas);
    return std::pow(s / n, 2.0 * n);
}

double werner_collectibility(const WernerSpec& spec) {
    check_spec(spec);
    const double n = static_cast<double>(spec.local_dim);
    const double y = pure_collectibility_of_lambda(spec.lambdas);
    // y > 0 always: at least one lambda_i is positive.
    return std::pow(spec.alpha, n - 1.0) * y *
           (spec.alpha + (1.0 - spec.alpha) / (n * n) * std::pow(y, -1.0 / n));
}

double renyi_half(const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw BadLambda("empty Schmidt vector");
    return 2.0 * std::log(sqrt_lambda_sum(lambdas));
}

WernerThresholds thresholds_two_qubit(double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw BadLambda("lambda must lie in [0, 1]");
    WernerThresholds out;
    out.omega = std::sqrt(lambda * (1.0 - lambda));
    out.alpha_t = 1.0 / (1.0 + 4.0 * out.omega);
    out.alpha_c = 2.0 / (1.0 + 2.0 * out.omega +
                         std::sqrt((1.0 + 2.0 * out.omega) * (1.0 + 10.0 * out.omega)));
    return out;
}

double negativity_collectibility(const PureState& psi) {
    if (psi.shape().subsystems != 2)
        throw NotBipartite("the negativity identity holds for bipartite states");
    const double n = static_cast<double>(psi.shape().local_dim);
    const double neg = negativity(psi);
    return std::pow(1.0 + (n - 1.0) * neg, n) / std::pow(n, 2.0 * n);
}

double schur_theta(const std::vector<double>& x, double b, double q, std::size_t j,
                   std::size_t k) {
    if (j == k || j >= x.size() || k >= x.size()) throw BadParams("need distinct indices j, k");
    if (b < 0.0) throw BadParams("b must be nonnegative");
    if (q < 1.0) throw BadParams("q must be at least 1");
    for (double xi : x)
        if (xi < 0.0) throw BadParams("x entries must be nonnegative");

    const double xj = x[j], xk = x[k];
    double rest = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i == j || i == k) continue;
        rest *= (x[i] * x[i] + b) * std::pow(x[i], q);
    }
    const double b1 = q + 2.0;
    const double b2 = b * (q - 1.0);
    const double bracket = b1 * xj * xj * xk * xk + b2 * (xj * xj + xk * xk) +
                           b * (xk - xj) * (xk - xj) + q * b * b;
    const double diff = xj - xk;
    return -diff * diff * std::pow(xj * xk, q - 1.0) * rest * bracket;
}

std::pair<ComplexMatrix, ComplexMatrix> saturating_basis(int local_dim) {
    if (local_dim < 2) throw BadParams("need N >= 2");
    const ComplexMatrix u = fourier_unitary(static_cast<std::size_t>(local_dim));
    return {u, u.conjugate()};
}

}  // namespace qcollect::werner
