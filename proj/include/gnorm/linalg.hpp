#pragma once

// Dense linear algebra kernel: products, symmetric eigendecomposition
// (cyclic Jacobi), singular values, Moore-Penrose pseudoinverse, norms.
// Everything is desk scale (n up to a few hundred), 64-bit floats,
// deterministic summation order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnorm {

/// Row-major dense matrix of doubles; the universal numeric carrier.
class DenseMatrix {
public:
    DenseMatrix() : rows_(0), cols_(0) {}

    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    DenseMatrix(std::initializer_list<std::initializer_list<double>> m) {
        rows_ = m.size();
        cols_ = rows_ ? m.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : m) {
            if (row.size() != cols_)
                throw std::invalid_argument("DenseMatrix: ragged initializer");
            for (double v : row) data_.push_back(v);
        }
    }

    /// Construction from external data; rejects non-finite entries.
    static DenseMatrix from_data(std::size_t rows, std::size_t cols,
                                 std::vector<double> data) {
        if (data.size() != rows * cols)
            throw std::invalid_argument("DenseMatrix: data length " +
                                        std::to_string(data.size()) +
                                        " does not equal rows*cols");
        for (double v : data)
            if (!std::isfinite(v))
                throw std::invalid_argument("DenseMatrix: non-finite entry");
        DenseMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.data_ = std::move(data);
        return m;
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix diagonal(const std::vector<double>& d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

/// Non-negative values sorted descending (singular values, clamped spectra).
struct Spectrum {
    std::vector<double> values;
};

inline std::string shape_str(const DenseMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

/// Exact triple-loop product with deterministic (row-major) summation order.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: dimension mismatch " + shape_str(a) +
                                    " times " + shape_str(b));
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

inline DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("add: shape mismatch " + shape_str(a) + " vs " +
                                    shape_str(b));
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

inline DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("sub: shape mismatch " + shape_str(a) + " vs " +
                                    shape_str(b));
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

inline DenseMatrix scale(const DenseMatrix& a, double s) {
    DenseMatrix c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

inline double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

inline double max_abs(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data()) s = std::max(s, std::abs(v));
    return s;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        s = std::max(s, std::abs(a.data()[i] - b.data()[i]));
    return s;
}

struct EigenResult {
    std::vector<double> eigenvalues;  // sorted descending; may be negative
    DenseMatrix eigenvectors;         // columns match eigenvalues
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// The input is symmetrized as (M + M^T)/2 first; sweeps run until the
/// largest off-diagonal magnitude drops below 1e-12 * ||M||_F.
inline EigenResult sym_eigen(const DenseMatrix& m_in) {
    if (m_in.rows() != m_in.cols())
        throw std::invalid_argument("sym_eigen: non-square input " + shape_str(m_in));
    const std::size_t n = m_in.rows();

    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (m_in(i, j) + m_in(j, i));

    DenseMatrix v = DenseMatrix::identity(n);
    const double tol = 1e-12 * std::max(frobenius_norm(a), 1e-300);

    auto max_offdiag = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s = std::max(s, std::abs(a(i, j)));
        return s;
    };

    int sweep = 0;
    while (max_offdiag() > tol) {
        if (++sweep > 100)
            throw std::runtime_error("sym_eigen: no convergence after 100 sweeps, residual " +
                                     std::to_string(max_offdiag()));
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= tol * 1e-2) continue;
                double app = a(p, p), aqq = a(q, q);
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenResult r;
    r.eigenvalues.resize(n);
    r.eigenvectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        r.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) r.eigenvectors(i, j) = v(i, order[j]);
    }
    return r;
}

/// Singular values of a square matrix: sqrt of clamped eigenvalues of M^T M,
/// sorted descending. Tiny negative eigenvalues (round-off) clamp to zero.
inline Spectrum singular_values(const DenseMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("singular_values: non-square input " + shape_str(m));
    EigenResult e = sym_eigen(matmul(transpose(m), m));
    double lmax = e.eigenvalues.empty() ? 0.0 : std::max(e.eigenvalues.front(), 0.0);
    Spectrum s;
    s.values.reserve(e.eigenvalues.size());
    for (double lam : e.eigenvalues) {
        if (lam < 1e-12 * lmax) lam = 0.0;
        s.values.push_back(std::sqrt(lam));
    }
    std::sort(s.values.begin(), s.values.end(), std::greater<double>());
    return s;
}

/// Moore-Penrose pseudoinverse via pinv(M) = (M^T M)^+ M^T. All call sites in
/// this project pass symmetric PSD matrices; eigenvalues below 1e-12 * lambda_max
/// are treated as zero.
inline DenseMatrix pseudoinverse(const DenseMatrix& m) {
    DenseMatrix mt = transpose(m);
    EigenResult e = sym_eigen(matmul(mt, m));
    double lmax = 0.0;
    for (double lam : e.eigenvalues) lmax = std::max(lmax, lam);
    const double tau = 1e-12 * lmax;
    const std::size_t k = e.eigenvalues.size();
    DenseMatrix inv_diag(k, k);
    for (std::size_t i = 0; i < k; ++i)
        inv_diag(i, i) = e.eigenvalues[i] > tau ? 1.0 / e.eigenvalues[i] : 0.0;
    DenseMatrix vt = transpose(e.eigenvectors);
    return matmul(matmul(e.eigenvectors, matmul(inv_diag, vt)), mt);
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Small-system plumbing for the linear testbed (A is well away from singular
/// there by construction).
inline std::vector<double> gauss_solve(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw std::invalid_argument("gauss_solve: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300)
            throw std::runtime_error("gauss_solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace gnorm
