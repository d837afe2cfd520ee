#include "qcollect/qcore.hpp"

#include <algorithm>
#include <cmath>

namespace qcollect {

TensorShape::TensorShape(int k, int n) : subsystems(k), local_dim(n) {
    if (k < 1) throw BadShape("need at least one subsystem");
    if (n < 2) throw BadShape("local dimension must be at least 2");
    std::size_t d = 1;
    for (int i = 0; i < k; ++i) {
        d *= static_cast<std::size_t>(n);
        if (d > kMaxTotalDim)
            throw BadShape("total dimension N^K exceeds " + std::to_string(kMaxTotalDim));
    }
    total_dim_ = d;
}

std::size_t TensorShape::digit(std::size_t index, int subsystem) const {
    std::size_t div = 1;
    for (int i = 0; i < subsystems - subsystem; ++i) div *= static_cast<std::size_t>(local_dim);
    return (index / div) % static_cast<std::size_t>(local_dim);
}

PureState::PureState(const TensorShape& shape, std::vector<cdouble> amplitudes, double tol)
    : shape_(shape), amps_(std::move(amplitudes)) {
    if (amps_.size() != shape_.total_dim())
        throw ShapeMismatch("amplitude count does not match N^K");
    double norm_sq = 0.0;
    for (const auto& z : amps_) norm_sq += std::norm(z);
    const double norm = std::sqrt(norm_sq);
    if (std::abs(norm - 1.0) > tol)
        throw BadShape("pure state norm " + std::to_string(norm) + " not within tolerance of 1");
    for (auto& z : amps_) z /= norm;
}

PureState PureState::basis_state(const TensorShape& shape, const std::vector<int>& digits) {
    if (digits.size() != static_cast<std::size_t>(shape.subsystems))
        throw ShapeMismatch("one digit per subsystem required");
    std::size_t idx = 0;
    for (int d : digits) {
        if (d < 0 || d >= shape.local_dim) throw BadShape("basis digit out of range");
        idx = idx * static_cast<std::size_t>(shape.local_dim) + static_cast<std::size_t>(d);
    }
    std::vector<cdouble> amps(shape.total_dim(), 0.0);
    amps[idx] = 1.0;
    return PureState(shape, std::move(amps));
}

ComplexMatrix PureState::projector() const {
    return outer(amps_, amps_);
}

DensityMatrix validate_density(const ComplexMatrix& mat, const TensorShape& shape,
                               double tol, double declared_trace) {
    const std::size_t d = shape.total_dim();
    if (mat.rows() != d || mat.cols() != d)
        throw ShapeMismatch("density matrix must be N^K x N^K");

    const double defect = mat.hermiticity_defect();
    if (defect > tol)
        throw HermiticityViolation("max |m - m^dagger| = " + std::to_string(defect));

    // Work on the exactly Hermitian part from here on.
    ComplexMatrix h(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        h(r, r) = cdouble(mat(r, r).real(), 0.0);
        for (std::size_t c = r + 1; c < d; ++c) {
            const cdouble avg = 0.5 * (mat(r, c) + std::conj(mat(c, r)));
            h(r, c) = avg;
            h(c, r) = std::conj(avg);
        }
    }

    const double tr = h.trace().real();
    if (std::abs(tr - declared_trace) > tol)
        throw TraceViolation("trace " + std::to_string(tr) + " differs from declared " +
                             std::to_string(declared_trace));

    EigenSystem sys = eigh(h);
    const double min_eig = sys.values.front();
    if (min_eig < -tol) throw NegativeEigenvalue(min_eig);

    if (min_eig < 0.0) {
        // Clip the slack negatives and renormalize to the declared trace.
        double clipped_tr = 0.0;
        for (double& v : sys.values) {
            v = std::max(0.0, v);
            clipped_tr += v;
        }
        ComplexMatrix rebuilt(d, d);
        for (std::size_t k = 0; k < d; ++k) {
            const double w = sys.values[k] * (declared_trace / clipped_tr);
            if (w == 0.0) continue;
            for (std::size_t r = 0; r < d; ++r) {
                const cdouble vr = sys.vectors(r, k);
                for (std::size_t c = 0; c < d; ++c)
                    rebuilt(r, c) += w * vr * std::conj(sys.vectors(c, k));
            }
        }
        h = std::move(rebuilt);
    }

    return DensityMatrix(shape, std::move(h), tol, declared_trace);
}

DensityMatrix density_from_pure(const PureState& psi, double tol) {
    return validate_density(psi.projector(), psi.shape(), tol);
}

ComplexMatrix partial_transpose(const ComplexMatrix& mat, const TensorShape& shape,
                                const std::set<int>& subset) {
    const std::size_t d = shape.total_dim();
    if (mat.rows() != d || mat.cols() != d)
        throw ShapeMismatch("matrix does not match shape");
    if (subset.empty() || subset.size() >= static_cast<std::size_t>(shape.subsystems))
        throw BadSubset("subset must be a nonempty proper subset of the subsystems");
    for (int s : subset)
        if (s < 1 || s > shape.subsystems) throw BadSubset("subsystem index out of range");

    const std::size_t n = static_cast<std::size_t>(shape.local_dim);
    // Place value of each subsystem digit in the composite index.
    std::vector<std::size_t> weight(static_cast<std::size_t>(shape.subsystems));
    {
        std::size_t w = 1;
        for (int s = shape.subsystems; s >= 1; --s) {
            weight[static_cast<std::size_t>(s - 1)] = w;
            w *= n;
        }
    }

    ComplexMatrix out(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            std::size_t rr = r, cc = c;
            for (int s : subset) {
                const std::size_t w = weight[static_cast<std::size_t>(s - 1)];
                const std::size_t rd = (r / w) % n;
                const std::size_t cd = (c / w) % n;
                rr += (cd - rd) * w;  // swap the digit pair
                cc += (rd - cd) * w;
            }
            out(rr, cc) = mat(r, c);
        }
    }
    return out;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, const std::set<int>& subset) {
    return partial_transpose(rho.mat(), rho.shape(), subset);
}

double purity(const ComplexMatrix& hermitian) {
    return hermitian.frobenius_sq();
}

double purity(const DensityMatrix& rho) {
    return purity(rho.mat());
}

SchmidtData schmidt(const PureState& psi) {
    if (psi.shape().subsystems != 2)
        throw NotBipartite("Schmidt decomposition requires exactly two subsystems");
    const std::size_t n = static_cast<std::size_t>(psi.shape().local_dim);

    ComplexMatrix m(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) m(a, b) = psi.amplitudes()[a * n + b];

    SvdSystem sys = svd_square(m);

    SchmidtData out;
    out.lambdas.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.lambdas[i] = sys.singular[i] * sys.singular[i];
    out.left_basis = sys.u;
    // psi_ab = sum_i s_i U_ai conj(V_bi): the right Schmidt vectors are the
    // conjugated columns of V.
    out.right_basis = sys.v.conjugate();
    return out;
}

double negativity(const PureState& psi) {
    if (psi.shape().subsystems != 2)
        throw NotBipartite("negativity requires exactly two subsystems");
    const ComplexMatrix pt = partial_transpose(psi.projector(), psi.shape(), {2});
    EigenSystem sys = eigh(pt);
    double trace_norm = 0.0;
    for (double v : sys.values) trace_norm += std::abs(v);
    const double n = static_cast<double>(psi.shape().local_dim);
    return std::clamp((trace_norm - 1.0) / (n - 1.0), 0.0, 1.0);
}

}  // namespace qcollect
