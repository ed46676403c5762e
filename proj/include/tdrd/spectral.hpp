#pragma once

// Tri-diagonal Toeplitz diffusion matrices: parabolicity test, closed-form
// spectrum of D^T and an independent numerical eigensolver used as oracle.

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "tdrd/errors.hpp"
#include "tdrd/linalg.hpp"

namespace tdrd {

/// Diffusion matrix with constant diagonal a, super-diagonal b and
/// sub-diagonal c. Construct through make() to get validation.
class ToeplitzDiffusion {
public:
    static ToeplitzDiffusion make(int m, double a, double b, double c) {
        if (m < 2) throw ConfigError("diffusion matrix: m must be >= 2, got " + std::to_string(m));
        if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
            !std::isfinite(c)) {
            std::ostringstream os;
            os << "diffusion matrix: a, b, c must be finite and strictly positive (a=" << a
               << ", b=" << b << ", c=" << c << ")";
            throw ConfigError(os.str());
        }
        return ToeplitzDiffusion(m, a, b, c);
    }

    int m() const noexcept { return m_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }
    double mu() const noexcept { return b_ / c_; }

    Matrix matrix() const {
        const auto n = static_cast<std::size_t>(m_);
        Matrix d(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            d(i, i) = a_;
            if (i + 1 < n) {
                d(i, i + 1) = b_;
                d(i + 1, i) = c_;
            }
        }
        return d;
    }

    /// (D + D^T) / 2
    Matrix symmetric_part() const {
        const Matrix d = matrix();
        const Matrix dt = d.transpose();
        Matrix s(d.rows(), d.cols());
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j) s(i, j) = 0.5 * (d(i, j) + dt(i, j));
        return s;
    }

private:
    ToeplitzDiffusion(int m, double a, double b, double c) : m_(m), a_(a), b_(b), c_(c) {}
    int m_;
    double a_, b_, c_;
};

struct ParabolicityReport {
    bool parabolic = false;
    double ratio = 0.0;      // a / (b + c)
    double threshold = 0.0;  // cos(pi / (m + 1))
    double margin = 0.0;     // ratio - threshold
};

inline ParabolicityReport check_parabolicity(const ToeplitzDiffusion& d) {
    ParabolicityReport r;
    r.ratio = d.a() / (d.b() + d.c());
    r.threshold = std::cos(std::numbers::pi / (d.m() + 1));
    r.margin = r.ratio - r.threshold;
    r.parabolic = r.threshold < r.ratio;
    return r;
}

/// Ascending eigenvalues of D^T and eigenvectors V_1..V_m (0-based storage).
struct Spectrum {
    int m = 0;
    double mu = 1.0;
    Vector lambdas;
    std::vector<Vector> eigvecs;

    /// Matrix whose columns are V_1..V_m.
    Matrix eigvec_matrix() const {
        const auto n = static_cast<std::size_t>(m);
        Matrix p(n, n);
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t k = 0; k < n; ++k) p(k, l) = eigvecs[l][k];
        return p;
    }

    double max_abs_lambda() const {
        double best = 0.0;
        for (double v : lambdas) best = std::max(best, std::abs(v));
        return best;
    }
};

namespace detail {

// sin(j*pi/(m+1)) with j reduced modulo 2(m+1) in exact integer arithmetic.
inline double sin_pi_fraction(long long j, long long denom) {
    const long long period = 2 * denom;
    j %= period;
    if (j < 0) j += period;
    return std::sin(static_cast<double>(j) * std::numbers::pi / static_cast<double>(denom));
}

}  // namespace detail

/// lambda_l = a + 2 sqrt(bc) cos((m+1-l) pi/(m+1)),
/// v_{kl} = mu^{k/2} sin(k (m+1-l) pi/(m+1)), for l, k = 1..m.
inline Spectrum closed_form_spectrum(const ToeplitzDiffusion& d) {
    const int m = d.m();
    const long long denom = m + 1;
    const double root_bc = std::sqrt(d.b() * d.c());
    const double half_log_mu = 0.5 * std::log(d.mu());
    Spectrum s;
    s.m = m;
    s.mu = d.mu();
    s.lambdas.resize(m);
    s.eigvecs.assign(m, Vector(m));
    for (int l = 1; l <= m; ++l) {
        const long long freq = denom - l;
        s.lambdas[l - 1] =
            d.a() + 2.0 * root_bc * std::cos(static_cast<double>(freq) * std::numbers::pi /
                                             static_cast<double>(denom));
        for (int k = 1; k <= m; ++k)
            s.eigvecs[l - 1][k - 1] =
                std::exp(k * half_log_mu) * detail::sin_pi_fraction(k * freq, denom);
    }
    return s;
}

/// ||D^T V_l - lambda_l V_l|| / ||V_l|| for the 0-based index l.
inline double eigenpair_residual(const ToeplitzDiffusion& d, const Spectrum& s, int l) {
    const Matrix dt = d.matrix().transpose();
    const Vector& v = s.eigvecs[l];
    Vector r = dt.apply(v);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= s.lambdas[l] * v[k];
    return norm2(r) / norm2(v);
}

/// Numerical eigenpairs of D^T, independent of the closed form. D^T is
/// similar to the symmetric tridiagonal T = S^-1 D^T S with S = diag(mu^{k/2})
/// and off-diagonal sqrt(bc); T is diagonalized by implicit QL and the
/// eigenvectors are mapped back through S.
inline Spectrum oracle_eigen(const ToeplitzDiffusion& d, double tol = 1e-12, int max_sweeps = 500) {
    const int m = d.m();
    Vector diag(m, d.a());
    Vector off(m - 1, std::sqrt(d.b() * d.c()));
    const SymmetricEigen eig = symmetric_tridiagonal_eigen(diag, off, tol, max_sweeps);
    Spectrum s;
    s.m = m;
    s.mu = d.mu();
    s.lambdas = eig.values;
    s.eigvecs.assign(m, Vector(m));
    const double half_log_mu = 0.5 * std::log(d.mu());
    for (int l = 0; l < m; ++l) {
        for (int k = 0; k < m; ++k)
            s.eigvecs[l][k] = std::exp((k + 1) * half_log_mu) * eig.vectors(k, l);
    }
    return s;
}

}  // namespace tdrd
