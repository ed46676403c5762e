#pragma once

// Small dense linear algebra used throughout the library: a row-major matrix,
// pivoted LU (determinants, inverses), leading principal minors, the Thomas
// tridiagonal solver and two symmetric eigensolvers (implicit QL for
// tridiagonal matrices, cyclic Jacobi for dense ones).

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdrd/errors.hpp"

namespace tdrd {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix id(n, n);
        for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
        return id;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Vector apply(std::span<const double> x) const {
        assert(x.size() == cols_);
        Vector y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    /// Induced 1-norm (maximum absolute column sum).
    double norm1() const {
        double best = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// Extract the submatrix with the given (ordered) row and column indices.
inline Matrix submatrix(const Matrix& a, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols) {
    Matrix s(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = a(rows[i], cols[j]);
    return s;
}

inline Matrix leading_block(const Matrix& a, std::size_t k) {
    Matrix s(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) s(i, j) = a(i, j);
    return s;
}

/// LU factorization with partial pivoting, PA = LU, packed in one matrix.
struct LuDecomposition {
    Matrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;

    double determinant() const {
        if (singular) return 0.0;
        double det = sign;
        for (std::size_t i = 0; i < lu.rows(); ++i) det *= lu(i, i);
        return det;
    }

    Vector solve(std::span<const double> b) const {
        if (singular) throw SingularError("lu solve: singular matrix", std::numeric_limits<double>::infinity());
        const std::size_t n = lu.rows();
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[perm[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
            x[i] = s / lu(i, i);
        }
        return x;
    }
};

inline LuDecomposition lu_decompose(Matrix a) {
    assert(a.rows() == a.cols());
    const std::size_t n = a.rows();
    LuDecomposition out;
    out.perm.resize(n);
    std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (best == 0.0) {
            out.singular = true;
            continue;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(out.perm[k], out.perm[piv]);
            out.sign = -out.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    out.lu = std::move(a);
    return out;
}

inline double determinant(const Matrix& a) {
    if (a.rows() == 0) return 1.0;
    return lu_decompose(a).determinant();
}

/// det[1], ..., det[n]: each leading block factored on its own.
inline Vector leading_minors(const Matrix& a) {
    Vector minors(a.rows());
    for (std::size_t k = 1; k <= a.rows(); ++k) minors[k - 1] = determinant(leading_block(a, k));
    return minors;
}

inline Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    const auto lu = lu_decompose(a);
    if (lu.singular)
        throw SingularError("inverse: matrix is exactly singular",
                            std::numeric_limits<double>::infinity());
    Matrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const Vector col = lu.solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

/// Thomas algorithm for a tridiagonal system.
///   lower[i-1]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i]
/// Returns false when a pivot vanishes.
inline bool solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x, std::span<double> scratch) {
    const std::size_t n = diag.size();
    if (n == 0) return true;
    assert(lower.size() + 1 == n && upper.size() + 1 == n);
    assert(rhs.size() == n && x.size() == n && scratch.size() >= n);
    double denom = diag[0];
    if (denom == 0.0) return false;
    x[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i - 1] = upper[i - 1] / denom;
        denom = diag[i] - lower[i - 1] * scratch[i - 1];
        if (denom == 0.0) return false;
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i] * x[i + 1];
    return true;
}

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // column j pairs with values[j]
    int iterations = 0;
};

namespace detail {

inline void sort_eigenpairs(SymmetricEigen& eig) {
    const std::size_t n = eig.values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return eig.values[i] < eig.values[j]; });
    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(eig.vectors.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted.values[j] = eig.values[order[j]];
        for (std::size_t i = 0; i < eig.vectors.rows(); ++i)
            sorted.vectors(i, j) = eig.vectors(i, order[j]);
    }
    sorted.iterations = eig.iterations;
    eig = std::move(sorted);
}

}  // namespace detail

/// Implicit QL iteration with Wilkinson-type shifts for a symmetric
/// tridiagonal matrix (diagonal `d`, off-diagonal `e`, e[i] = T(i, i+1)).
/// `max_sweeps` bounds the sweeps spent on any single eigenvalue.
inline SymmetricEigen symmetric_tridiagonal_eigen(Vector d, Vector e, double tol = 1e-12,
                                                  int max_sweeps = 500) {
    const std::size_t n = d.size();
    if (n == 0) return {};
    assert(e.size() + 1 == n);
    e.push_back(0.0);
    Matrix z = Matrix::identity(n);
    int total = 0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t mm;
        do {
            for (mm = l; mm + 1 < n; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= tol * dd) break;
            }
            if (mm == l) break;
            if (iter++ == max_sweeps)
                throw ConvergenceError("tridiagonal QL: no convergence after " +
                                       std::to_string(max_sweeps) + " sweeps at index " +
                                       std::to_string(l));
            ++total;
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(mm) - 1;
                 i >= static_cast<std::ptrdiff_t>(l); --i) {
                const auto iu = static_cast<std::size_t>(i);
                double f = s * e[iu];
                const double b = c * e[iu];
                r = std::hypot(f, g);
                e[iu + 1] = r;
                if (r == 0.0) {
                    d[iu + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + 2.0 * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                for (std::size_t k = 0; k < n; ++k) {
                    f = z(k, iu + 1);
                    z(k, iu + 1) = s * z(k, iu) + c * f;
                    z(k, iu) = c * z(k, iu) - s * f;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        } while (mm != l);
    }
    SymmetricEigen out{std::move(d), std::move(z), total};
    detail::sort_eigenpairs(out);
    return out;
}

/// Cyclic Jacobi rotations for a dense symmetric matrix.
inline SymmetricEigen jacobi_eigen(Matrix a, double tol = 1e-14, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    assert(a.cols() == n);
    Matrix v = Matrix::identity(n);
    const double scale = std::max(a.frobenius(), std::numeric_limits<double>::min());
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= tol * scale) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    if (sweep == max_sweeps) throw ConvergenceError("jacobi: no convergence");
    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    out.iterations = sweep;
    detail::sort_eigenpairs(out);
    return out;
}

}  // namespace tdrd
