// complex_matrix.hpp
// Small dense complex matrices (row-major) plus the Hermitian eigensolver
// and SVD the rest of the library builds on. Dimensions stay modest
// (D <= 4096 by contract, D <= 16 in practice) so everything is direct.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qcollect/errors.hpp"

namespace qcollect {

using cdouble = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cdouble& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const cdouble& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    const std::vector<cdouble>& data() const { return a_; }
    std::vector<cdouble>& data() { return a_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    cdouble trace() const;

    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix scaled(cdouble s) const;

    std::vector<cdouble> apply(const std::vector<cdouble>& v) const;

    // max_ij |a_ij - b_ij|
    double max_abs_diff(const ComplexMatrix& other) const;
    // max_ij |a_ij - (a_ji)*|, zero for Hermitian matrices
    double hermiticity_defect() const;
    double max_abs() const;
    // Frobenius norm squared = Tr(A A^dagger)
    double frobenius_sq() const;

    bool is_unitary(double tol) const;

private:
    std::size_t rows_, cols_;
    std::vector<cdouble> a_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix outer(const std::vector<cdouble>& u, const std::vector<cdouble>& v);

// Discrete Fourier unitary, F_mn = exp(2 pi i m n / N) / sqrt(N).
ComplexMatrix fourier_unitary(std::size_t n);

// Eigendecomposition of a Hermitian matrix: A = V diag(values) V^dagger,
// values ascending, columns of V are the eigenvectors. Cyclic Jacobi with a
// fixed sweep order, so results are deterministic for a given input.
struct EigenSystem {
    std::vector<double> values;
    ComplexMatrix vectors;
};
EigenSystem eigh(const ComplexMatrix& a);

// Thin SVD of a square matrix: A = U diag(singular) V^dagger, singular
// values descending. Built on eigh of A^dagger A.
struct SvdSystem {
    std::vector<double> singular;
    ComplexMatrix u;
    ComplexMatrix v;
};
SvdSystem svd_square(const ComplexMatrix& a);

}  // namespace qcollect
