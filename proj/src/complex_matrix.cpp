#include "qcollect/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcollect {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
    return m;
}

cdouble ComplexMatrix::trace() const {
    cdouble t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ShapeMismatch("matrix product dimension mismatch");
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const cdouble v = (*this)(r, k);
            if (v == cdouble{}) continue;
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += v * rhs(k, c);
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ShapeMismatch("matrix sum dimension mismatch");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ShapeMismatch("matrix difference dimension mismatch");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
    return out;
}

ComplexMatrix ComplexMatrix::scaled(cdouble s) const {
    ComplexMatrix out = *this;
    for (auto& z : out.a_) z *= s;
    return out;
}

std::vector<cdouble> ComplexMatrix::apply(const std::vector<cdouble>& v) const {
    if (cols_ != v.size()) throw ShapeMismatch("matrix-vector dimension mismatch");
    std::vector<cdouble> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        cdouble acc = 0.0;
        const cdouble* row = &a_[r * cols_];
        for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw ShapeMismatch("matrix comparison dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - other.a_[i]));
    return m;
}

double ComplexMatrix::hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return m;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : a_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::frobenius_sq() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return s;
}

bool ComplexMatrix::is_unitary(double tol) const {
    if (rows_ != cols_) return false;
    return (adjoint() * (*this)).max_abs_diff(identity(rows_)) <= tol;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cdouble v = a(ar, ac);
            if (v == cdouble{}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
        }
    return out;
}

ComplexMatrix fourier_unitary(std::size_t n) {
    ComplexMatrix f(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    const double base = 6.283185307179586476925286766559 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double ang = base * static_cast<double>((r * c) % n);
            f(r, c) = cdouble(std::cos(ang) * norm, std::sin(ang) * norm);
        }
    return f;
}

ComplexMatrix outer(const std::vector<cdouble>& u, const std::vector<cdouble>& v) {
    ComplexMatrix out(u.size(), v.size());
    for (std::size_t r = 0; r < u.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) out(r, c) = u[r] * std::conj(v[c]);
    return out;
}

// Cyclic Jacobi for Hermitian matrices. Each rotation annihilates one
// off-diagonal pair; sweeps repeat in a fixed (p,q) order until the
// off-diagonal mass drops below a scaled epsilon.
EigenSystem eigh(const ComplexMatrix& input) {
    if (input.rows() != input.cols()) throw ShapeMismatch("eigh requires a square matrix");
    const std::size_t n = input.rows();

    ComplexMatrix a = input;
    // Work on the exactly Hermitian part; callers validate the defect.
    for (std::size_t r = 0; r < n; ++r) {
        a(r, r) = cdouble(a(r, r).real(), 0.0);
        for (std::size_t c = r + 1; c < n; ++c) {
            const cdouble avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = avg;
            a(c, r) = std::conj(avg);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(1.0, std::sqrt(a.frobenius_sq()));
    const double stop = 1e-15 * scale;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(2.0 * off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cdouble apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const cdouble phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();

                // Solve t^2 - 2 theta t - 1 = 0 for the smaller root.
                const double theta = (aqq - app) / (2.0 * mag);
                double t;
                if (theta >= 0.0)
                    t = -1.0 / (theta + std::sqrt(theta * theta + 1.0));
                else
                    t = 1.0 / (-theta + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // Unitary U: e_p' = c e_p + s conj(phase) e_q,
                //            e_q' = -s phase e_p + c e_q.
                const cdouble sf = s * phase;                // times e_p in col q
                const cdouble sfc = s * std::conj(phase);    // times e_q in col p

                const double app_new = app * c * c + 2.0 * s * c * mag + aqq * s * s;
                const double aqq_new = app + aqq - app_new;
                a(p, p) = app_new;
                a(q, q) = aqq_new;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cdouble aip = a(i, p);
                    const cdouble aiq = a(i, q);
                    a(i, p) = c * aip + sfc * aiq;
                    a(i, q) = -sf * aip + c * aiq;
                    a(p, i) = std::conj(a(i, p));
                    a(q, i) = std::conj(a(i, q));
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cdouble vip = v(i, p);
                    const cdouble viq = v(i, q);
                    v(i, p) = c * vip + sfc * viq;
                    v(i, q) = -sf * vip + c * viq;
                }
            }
        }
    }

    EigenSystem sys;
    sys.values.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return diag[l] < diag[r]; });

    sys.vectors = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        sys.values[c] = diag[order[c]];
        for (std::size_t r = 0; r < n; ++r) sys.vectors(r, c) = v(r, order[c]);
    }
    return sys;
}

SvdSystem svd_square(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeMismatch("svd_square requires a square matrix");
    const std::size_t n = a.rows();

    EigenSystem gram = eigh(a.adjoint() * a);  // A^dagger A = V S^2 V^dagger

    SvdSystem sys;
    sys.singular.resize(n);
    sys.v = ComplexMatrix(n, n);
    sys.u = ComplexMatrix(n, n);

    // Descending singular values.
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = n - 1 - c;
        sys.singular[c] = std::sqrt(std::max(0.0, gram.values[src]));
        for (std::size_t r = 0; r < n; ++r) sys.v(r, c) = gram.vectors(r, src);
    }

    // Left vectors by Gram-Schmidt of A v_c against the accepted columns;
    // orthonormality of U then holds to machine precision even when the
    // trailing singular values are pure rounding noise.
    const double scale = std::max(1.0, sys.singular.empty() ? 0.0 : sys.singular[0]);
    std::vector<bool> filled(n, false);
    std::vector<std::vector<cdouble>> cols;
    cols.reserve(n);

    auto orthogonalize = [&](std::vector<cdouble>& cand) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& col : cols) {
                cdouble proj = 0.0;
                for (std::size_t r = 0; r < n; ++r) proj += std::conj(col[r]) * cand[r];
                for (std::size_t r = 0; r < n; ++r) cand[r] -= proj * col[r];
            }
        }
        double norm = 0.0;
        for (const auto& z : cand) norm += std::norm(z);
        return std::sqrt(norm);
    };

    std::vector<std::size_t> pending_slots;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<cdouble> vc(n);
        for (std::size_t r = 0; r < n; ++r) vc[r] = sys.v(r, c);
        std::vector<cdouble> cand = a.apply(vc);
        const double norm = orthogonalize(cand);
        if (norm > 1e-13 * scale) {
            for (auto& z : cand) z /= norm;
            for (std::size_t r = 0; r < n; ++r) sys.u(r, c) = cand[r];
            cols.push_back(std::move(cand));
            filled[c] = true;
        } else {
            pending_slots.push_back(c);
        }
    }
    for (std::size_t c : pending_slots) {
        for (std::size_t seed = 0; seed < n; ++seed) {
            std::vector<cdouble> cand(n, 0.0);
            cand[seed] = 1.0;
            const double norm = orthogonalize(cand);
            if (norm > 0.1) {
                for (auto& z : cand) z /= norm;
                for (std::size_t r = 0; r < n; ++r) sys.u(r, c) = cand[r];
                cols.push_back(std::move(cand));
                break;
            }
        }
    }
    return sys;
}

}  // namespace qcollect
