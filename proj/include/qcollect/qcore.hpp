// qcore.hpp
// Value types for finite-dimensional quantum states on a K-fold N-level
// tensor product space, plus the exact-semantics operations on them:
// validation, partial transposition, purity, Schmidt decomposition and
// negativity. All types are immutable after construction and all
// operations are pure functions.
//
// Composite index convention: subsystem 1 is the leftmost tensor factor,
// i = sum_k i_k N^(K-k) (row-major digits, most significant first).

#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "qcollect/complex_matrix.hpp"
#include "qcollect/errors.hpp"

namespace qcollect {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr std::size_t kMaxTotalDim = 4096;

struct TensorShape {
    int subsystems = 0;  // K >= 1
    int local_dim = 0;   // N >= 2

    TensorShape() = default;
    TensorShape(int k, int n);

    std::size_t total_dim() const { return total_dim_; }

    // Digit of the composite index belonging to `subsystem` (1-based,
    // 1 = leftmost factor).
    std::size_t digit(std::size_t index, int subsystem) const;

    bool operator==(const TensorShape& o) const {
        return subsystems == o.subsystems && local_dim == o.local_dim;
    }

private:
    std::size_t total_dim_ = 0;
};

class DensityMatrix {
public:
    const TensorShape& shape() const { return shape_; }
    const ComplexMatrix& mat() const { return mat_; }
    double tolerance() const { return tol_; }
    double declared_trace() const { return trace_; }

    friend DensityMatrix validate_density(const ComplexMatrix& mat, const TensorShape& shape,
                                          double tol, double declared_trace);

private:
    DensityMatrix(TensorShape shape, ComplexMatrix mat, double tol, double trace)
        : shape_(shape), mat_(std::move(mat)), tol_(tol), trace_(trace) {}

    TensorShape shape_;
    ComplexMatrix mat_;
    double tol_;
    double trace_;
};

class PureState {
public:
    PureState(const TensorShape& shape, std::vector<cdouble> amplitudes,
              double tol = kDefaultTol);

    const TensorShape& shape() const { return shape_; }
    const std::vector<cdouble>& amplitudes() const { return amps_; }

    // |j...j> pattern and |j1 j2 ... jK> from explicit digits.
    static PureState basis_state(const TensorShape& shape, const std::vector<int>& digits);

    ComplexMatrix projector() const;  // |psi><psi|

private:
    TensorShape shape_;
    std::vector<cdouble> amps_;
};

struct SchmidtData {
    std::vector<double> lambdas;  // descending, sum 1
    ComplexMatrix left_basis;     // columns = left Schmidt vectors
    ComplexMatrix right_basis;    // columns = right Schmidt vectors
};

// Checks Hermiticity, trace and positivity within `tol`. Eigenvalues in
// [-tol, 0) are clipped to zero and the matrix renormalized to the
// declared trace; anything worse throws.
DensityMatrix validate_density(const ComplexMatrix& mat, const TensorShape& shape,
                               double tol = kDefaultTol, double declared_trace = 1.0);

DensityMatrix density_from_pure(const PureState& psi, double tol = kDefaultTol);

// Transposes the indices of the chosen subsystems (1-based). The subset
// must be a nonempty proper subset of {1..K}.
ComplexMatrix partial_transpose(const DensityMatrix& rho, const std::set<int>& subset);
ComplexMatrix partial_transpose(const ComplexMatrix& mat, const TensorShape& shape,
                                const std::set<int>& subset);

double purity(const DensityMatrix& rho);
double purity(const ComplexMatrix& hermitian);  // Tr(M^2) for Hermitian M

// K = 2 only. psi = sum_i sqrt(lambda_i) (left col i) (x) (right col i).
SchmidtData schmidt(const PureState& psi);

// K = 2 only. (||psi_pt||_1 - 1)/(N - 1) via the trace norm of the
// partial transpose of |psi><psi|.
double negativity(const PureState& psi);

}  // namespace qcollect
