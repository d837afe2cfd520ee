#include "qcollect/bounds.hpp"

#include <cmath>

namespace qcollect::bounds {

namespace {

void check_query(const BoundQuery& q) {
    if (q.block_dim < 1 || q.block_dim > q.total_dim)
        throw BadParams("need 1 <= N <= D");
    if (q.trace <= 0.0) throw BadParams("trace must be positive");
    const double xi = q.xi();
    const double d = static_cast<double>(q.total_dim);
    if (xi < 1.0 / d - 1e-12 || xi > 1.0 + 1e-12)
        throw XiOutOfRange("xi = " + std::to_string(xi) + " outside [1/D, 1]");
}

// Minus branch of D D~ x^2 - (D + D~ - 1) x + (1 - xi) = 0; the linear
// limit applies when N = D.
double phi_minus(std::size_t total_dim, std::size_t block_dim, double xi) {
    const double d = static_cast<double>(total_dim);
    const double dt = static_cast<double>(total_dim - block_dim);
    const double a = d + dt - 1.0;
    if (total_dim == block_dim) return (1.0 - xi) / a;
    double disc = a * a + 4.0 * d * dt * (xi - 1.0);
    if (disc < 0.0) disc = 0.0;  // xi at the lower edge, rounding only
    return (a - std::sqrt(disc)) / (2.0 * d * dt);
}

}  // namespace

BoundResult r_bound(const BoundQuery& q) {
    check_query(q);
    const double xi = std::min(1.0, std::max(q.xi(), 1.0 / static_cast<double>(q.total_dim)));
    const double d = static_cast<double>(q.total_dim);
    const double dt = static_cast<double>(q.total_dim - q.block_dim);
    const double n = static_cast<double>(q.block_dim);

    BoundResult out;
    out.phi = phi_minus(q.total_dim, q.block_dim, xi);
    const double base1 = std::max(0.0, 1.0 - d * out.phi);
    const double base2 = std::max(0.0, 1.0 - dt * out.phi);
    out.r = std::pow(q.trace / n, n) * std::pow(base1, (n - 1.0) / 2.0) *
            std::pow(base2, (n + 1.0) / 2.0);
    return out;
}

MaximizerMatrix maximizer_matrix(const BoundQuery& q,
                                 const std::optional<std::vector<double>>& phases) {
    check_query(q);
    const double xi = std::min(1.0, std::max(q.xi(), 1.0 / static_cast<double>(q.total_dim)));
    const std::size_t d = q.total_dim;
    const std::size_t n = q.block_dim;
    const double dd = static_cast<double>(d);
    const double dt = static_cast<double>(d - n);
    const double nn = static_cast<double>(n);

    MaximizerMatrix out;
    out.block_dim = n;
    out.rho_c = phi_minus(d, n, xi);
    out.rho_a = (1.0 - dt * out.rho_c) / nn;
    out.rho_b =
        std::sqrt(std::max(0.0, (1.0 - dd * out.rho_c)) * std::max(0.0, (1.0 - dt * out.rho_c))) /
        nn;

    const std::size_t n_off = n * (n - 1) / 2;
    if (phases && phases->size() != n_off)
        throw BadParams("expected one phase per upper-triangle block entry");

    out.matrix = ComplexMatrix(d, d);
    for (std::size_t i = 0; i < n; ++i) out.matrix(i, i) = q.trace * out.rho_a;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double ph = phases ? (*phases)[idx] : 0.0;
            const cdouble v = q.trace * out.rho_b * cdouble(std::cos(ph), std::sin(ph));
            out.matrix(i, j) = v;
            out.matrix(j, i) = std::conj(v);
            ++idx;
        }
    }
    for (std::size_t i = n; i < d; ++i) out.matrix(i, i) = q.trace * out.rho_c;
    return out;
}

double MaximizerMatrix::block_product_root() const {
    return leading_block_product_root(matrix, block_dim);
}

double leading_block_product_root(const ComplexMatrix& m, std::size_t block_dim) {
    if (block_dim < 1 || block_dim > m.rows() || m.rows() != m.cols())
        throw BadParams("block size must be within the matrix");
    double log_acc = 0.0;
    for (std::size_t i = 0; i < block_dim; ++i) {
        const double diag = m(i, i).real();
        if (diag < 1e-300) return 0.0;
        log_acc += std::log(diag);
    }
    for (std::size_t i = 0; i < block_dim; ++i)
        for (std::size_t j = i + 1; j < block_dim; ++j) {
            const double off2 = std::norm(m(i, j));
            if (off2 < 1e-300) return 0.0;
            log_acc += std::log(off2);
        }
    return std::exp(log_acc / static_cast<double>(block_dim));
}

double ppt_bound(const TensorShape& shape) {
    const double n = static_cast<double>(shape.local_dim);
    if (shape.subsystems == 2) return std::pow(n, -2.0 * n);
    if (shape.local_dim == 2)
        return 1.0 / (16.0 * (std::pow(2.0, shape.subsystems - 1) - 1.0));
    throw Unsupported("PPT bound is available for K=2 (any N) or N=2 (any K)");
}

PurityFloors purity_floors(const TensorShape& shape) {
    const double d = static_cast<double>(shape.total_dim());
    return PurityFloors{1.0 / d, 1.0 / (d - 1.0)};
}

double critical_purity(const TensorShape& shape) {
    const double target = ppt_bound(shape);
    const PurityFloors floors = purity_floors(shape);

    auto r_of = [&](double p) {
        return r_bound(BoundQuery{shape.total_dim(), static_cast<std::size_t>(shape.local_dim),
                                  1.0, p})
            .r;
    };

    double lo = floors.p_min;
    double hi = 1.0;
    if (r_of(hi) <= target)
        throw NoRoot("PPT bound exceeds r_N at purity 1 for this shape");

    // r_N is nondecreasing in purity, so plain bisection applies.
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (r_of(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace qcollect::bounds
