#pragma once

// Positivity certificate for the quadratic form that controls the diffusion
// contribution to dL/dt. For every admissible multi-index p the m x m matrix
//
//   a_{lk} = (lambda_l + lambda_k)/2 * prod_{j<l} theta_j^{p_j^2}
//            * prod_{l<=j<k} theta_j^{(p_j+1)^2} * prod_{j>=k} theta_j^{(p_j+2)^2}
//
// (l <= k, symmetric) must be positive definite. Entries are formed in log
// space and the matrix is handled in the scaled form S^-1 A S^-1,
// S = diag(sqrt(a_ll)), which has unit diagonal and the same minor signs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tdrd/errors.hpp"
#include "tdrd/hpoly.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/spectral.hpp"

namespace tdrd {

inline constexpr std::uint64_t kMaxMultiIndices = 10'000'000;

/// Result of the K/H determinant recursion on an m x m symmetric matrix.
/// K(r, l) and H(r, l) hold K_l^r and H_l^r with 1-based r, l.
struct KHRecursion {
    Matrix K;
    Matrix H;
    Vector minors;          // det[1..m]
    Vector identity_error;  // per l = 2..m (index l-1): relative error of K_l^l vs det[l]*prod
    double max_error = 0.0;
};

namespace detail {

// prod_{k=1}^{r-2} det[k]^{2^{r-k-2}}
inline double minor_product(const Vector& minors, int r) {
    double prod = 1.0;
    for (int k = 1; k <= r - 2; ++k) prod *= std::pow(minors[k - 1], std::ldexp(1.0, r - k - 2));
    return prod;
}

inline double relative_gap(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

}  // namespace detail

/// Runs the recursion without checking the identity.
inline KHRecursion kh_tables(const Matrix& a) {
    const int m = static_cast<int>(a.rows());
    if (m < 2 || a.cols() != a.rows()) throw ConfigError("K/H recursion: need a square matrix with m >= 2");
    KHRecursion out;
    out.K = Matrix(m + 1, m + 1, 0.0);
    out.H = Matrix(m + 1, m + 1, 0.0);
    out.minors = leading_minors(a);
    auto A = [&](int i, int j) { return a(i - 1, j - 1); };

    for (int l = 2; l <= m; ++l) {
        out.K(2, l) = A(1, 1) * A(l, l) - A(1, l) * A(1, l);
        out.H(2, l) = A(1, 1) * A(2, l) - A(1, 2) * A(1, l);
    }
    // H_l^r for r >= 3: rows 1..r and columns 1..r-1, l of the leading l x l block.
    for (int r = 3; r <= m - 1; ++r) {
        const double prod = detail::minor_product(out.minors, r);
        for (int l = r + 1; l <= m; ++l) {
            std::vector<std::size_t> rows, cols;
            for (int i = 1; i <= r; ++i) rows.push_back(static_cast<std::size_t>(i - 1));
            for (int j = 1; j <= r - 1; ++j) cols.push_back(static_cast<std::size_t>(j - 1));
            cols.push_back(static_cast<std::size_t>(l - 1));
            out.H(r, l) = determinant(submatrix(a, rows, cols)) * prod;
        }
    }
    for (int r = 3; r <= m; ++r)
        for (int l = r; l <= m; ++l)
            out.K(r, l) = out.K(r - 1, r - 1) * out.K(r - 1, l) - out.H(r - 1, l) * out.H(r - 1, l);

    out.identity_error.assign(m, 0.0);
    for (int l = 2; l <= m; ++l) {
        const double rhs = out.minors[l - 1] * detail::minor_product(out.minors, l);
        out.identity_error[l - 1] = detail::relative_gap(out.K(l, l), rhs);
        out.max_error = std::max(out.max_error, out.identity_error[l - 1]);
    }
    return out;
}

/// K/H recursion plus the check K_l^l = det[l] * prod_{k<=l-2} det[k]^{2^{l-k-2}}.
/// Throws ConsistencyError when the identity fails beyond `tol` (relative).
inline KHRecursion kh_recursion(const Matrix& a, double tol = 1e-8) {
    KHRecursion out = kh_tables(a);
    if (out.max_error > tol) {
        std::ostringstream os;
        os << std::setprecision(17) << "K/H recursion: K_l^l identity violated, relative error "
           << out.max_error << " > " << tol;
        throw ConsistencyError(os.str());
    }
    return out;
}

/// One matrix a_{lk}(p) for a fixed multi-index.
struct FormMatrix {
    std::vector<int> index;  // p_1..p_{m-1}
    Matrix log_entries;      // log a_{lk}
    Matrix scaled;           // a_{lk} / sqrt(a_ll a_kk)
    Vector minors;           // leading minors of `scaled`

    int m() const noexcept { return static_cast<int>(scaled.rows()); }

    /// log a_ll, the row/column scaling exponents.
    Vector log_diagonal() const {
        Vector d(scaled.rows());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = log_entries(i, i);
        return d;
    }

    /// Unscaled entries; may contain inf when theta powers overflow.
    Matrix entries() const {
        Matrix a(scaled.rows(), scaled.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = std::exp(log_entries(i, j));
        return a;
    }

    /// log det[k] of the unscaled matrix, valid when minors[k-1] > 0.
    double log_raw_minor(int k) const {
        double s = std::log(minors[k - 1]);
        for (int i = 0; i < k; ++i) s += log_entries(i, i);
        return s;
    }

    KHRecursion recursion() const { return kh_recursion(scaled); }
};

inline void check_index_admissible(int m, int p_m, std::span<const int> idx) {
    if (static_cast<int>(idx.size()) != m - 1) throw ConfigError("multi-index: expected m-1 entries");
    int prev = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < prev || idx[i] > p_m - 2)
            throw ConfigError("multi-index: need 0 <= p_1 <= ... <= p_{m-1} <= p_m - 2");
        prev = idx[i];
    }
}

inline FormMatrix build_form_matrix(const CertificateParams& params, const Spectrum& spectrum,
                                    std::span<const int> idx) {
    const int m = params.m;
    if (spectrum.m != m) throw ConfigError("form matrix: spectrum dimension mismatch");
    check_index_admissible(m, params.p_m, idx);
    if (!(spectrum.lambdas[0] > 0.0))
        throw DomainError("form matrix: eigenvalues must be positive (parabolicity fails)");
    FormMatrix fm;
    fm.index.assign(idx.begin(), idx.end());
    fm.log_entries = Matrix(m, m);
    Vector log_theta(m - 1);
    for (int k = 0; k < m - 1; ++k) log_theta[k] = std::log(params.thetas[k]);
    for (int l = 0; l < m; ++l)
        for (int k = l; k < m; ++k) {
            double v = std::log(0.5 * (spectrum.lambdas[l] + spectrum.lambdas[k]));
            for (int j = 0; j < m - 1; ++j) {
                const int shift = (j < l) ? 0 : (j < k ? 1 : 2);
                const double e = idx[j] + shift;
                v += e * e * log_theta[j];
            }
            fm.log_entries(l, k) = v;
            fm.log_entries(k, l) = v;
        }
    fm.scaled = Matrix(m, m);
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k)
            fm.scaled(l, k) = (l == k) ? 1.0
                                       : std::exp(fm.log_entries(l, k) -
                                                  0.5 * (fm.log_entries(l, l) + fm.log_entries(k, k)));
    fm.minors = leading_minors(fm.scaled);
    return fm;
}

/// A_{lk} = (lambda_l + lambda_k) / (2 sqrt(lambda_l lambda_k)).
inline Matrix coupling_matrix(const Spectrum& spectrum) {
    const int m = spectrum.m;
    Matrix A(m, m);
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k)
            A(l, k) = (spectrum.lambdas[l] + spectrum.lambdas[k]) /
                      (2.0 * std::sqrt(spectrum.lambdas[l] * spectrum.lambdas[k]));
    return A;
}

struct CertificateWitness {
    std::vector<int> index;
    int minor = 0;  // 1-based l of the first non-positive det[l]
    double value = 0.0;
};

struct CertificateReport {
    bool pass = false;
    int m = 0;
    int p_m = 0;
    Vector thetas;
    Vector lambdas;
    std::uint64_t indices_total = 0;
    std::uint64_t indices_checked = 0;
    std::optional<CertificateWitness> witness;
    double min_scaled_minor = std::numeric_limits<double>::infinity();
    Vector K_diagonal;  // K_l^l, l = 2..m, of the first (or failing) matrix
    double kh_error = 0.0;

    std::string to_text() const {
        std::ostringstream os;
        os << std::setprecision(17);
        auto list = [&](const auto& v) {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
            os << ']';
        };
        os << "pass = " << (pass ? "true" : "false") << '\n';
        os << "m = " << m << '\n';
        os << "p_m = " << p_m << '\n';
        os << "thetas = ";
        list(thetas);
        os << "\nlambdas = ";
        list(lambdas);
        os << "\nindices_total = " << indices_total << '\n';
        os << "indices_checked = " << indices_checked << '\n';
        os << "min_scaled_minor = " << min_scaled_minor << '\n';
        os << "K_diagonal = ";
        list(K_diagonal);
        os << "\nkh_error = " << kh_error << '\n';
        if (witness) {
            os << "witness_index = ";
            list(witness->index);
            os << "\nwitness_minor = " << witness->minor << '\n';
            os << "witness_value = " << witness->value << '\n';
        }
        return os.str();
    }
};

/// Checks that every leading minor of every admissible form matrix is
/// positive. Stops at the lexicographically first failure.
inline CertificateReport check_certificate(const CertificateParams& params, const Spectrum& spectrum,
                                           std::uint64_t max_indices = kMaxMultiIndices) {
    if (spectrum.m != params.m) throw ConfigError("certificate: spectrum dimension mismatch");
    CertificateReport rep;
    rep.m = params.m;
    rep.p_m = params.p_m;
    rep.thetas = params.thetas;
    rep.lambdas = spectrum.lambdas;
    rep.indices_total = count_multi_indices(params.m, params.p_m - 2);
    if (rep.indices_total > max_indices) {
        std::ostringstream os;
        os << "certificate: " << rep.indices_total << " multi-indices exceed the budget of " << max_indices
           << "; use a smaller p_m";
        throw CapacityError(os.str());
    }
    if (!(spectrum.lambdas[0] > 0.0)) {
        rep.witness = CertificateWitness{std::vector<int>(params.m - 1, 0), 1, spectrum.lambdas[0]};
        rep.min_scaled_minor = spectrum.lambdas[0];
        return rep;
    }
    bool first = true;
    for_each_multi_index(params.m, params.p_m - 2, [&](std::span<const int> idx) {
        const FormMatrix fm = build_form_matrix(params, spectrum, idx);
        ++rep.indices_checked;
        int bad = 0;
        for (int l = 1; l <= params.m; ++l) {
            rep.min_scaled_minor = std::min(rep.min_scaled_minor, fm.minors[l - 1]);
            if (!(fm.minors[l - 1] > 0.0) && bad == 0) bad = l;
        }
        if (first || bad != 0) {
            const KHRecursion rec = kh_tables(fm.scaled);
            rep.K_diagonal.clear();
            for (int l = 2; l <= params.m; ++l) rep.K_diagonal.push_back(rec.K(l, l));
            rep.kh_error = rec.max_error;
            first = false;
        }
        if (bad != 0) {
            rep.witness = CertificateWitness{fm.index, bad, fm.minors[bad - 1]};
            return false;
        }
        return true;
    });
    rep.pass = !rep.witness.has_value();
    return rep;
}

struct ThetaSearchStrategy {
    int max_doublings = 60;
    int bisection_steps = 40;
    bool tighten = true;
    double slack = 0.05;  // relative head-room added back after tightening
    std::uint64_t seed = 0;  // 0: tighten coordinates in order; otherwise shuffled
};

struct ThetaSearchResult {
    bool feasible = false;
    std::optional<CertificateParams> params;
    CertificateReport report;  // re-validation of the returned params, or best attempt
    int doublings = 0;
    double best_margin = -std::numeric_limits<double>::infinity();
};

/// Finds theta with a passing certificate: start at max_{k>l} A_{lk} + 1,
/// double the coordinates that feed the first failing minor, then bisect each
/// coordinate down towards the feasibility boundary.
inline ThetaSearchResult theta_search(const Spectrum& spectrum, int p_m, const ThetaSearchStrategy& strategy = {}) {
    const int m = spectrum.m;
    if (p_m < 2) throw ConfigError("theta search: p_m must be >= 2");
    if (count_multi_indices(m, p_m - 2) > kMaxMultiIndices)
        throw CapacityError("theta search: too many multi-indices; use a smaller p_m");
    ThetaSearchResult res;
    if (!(spectrum.lambdas[0] > 0.0)) {
        res.report = check_certificate(CertificateParams{m, p_m, Vector(m - 1, 1.0)}, spectrum);
        res.best_margin = res.report.min_scaled_minor;
        return res;
    }
    const Matrix A = coupling_matrix(spectrum);
    Vector theta(m - 1);
    for (int l = 0; l < m - 1; ++l) {
        double best = 0.0;
        for (int k = l + 1; k < m; ++k) best = std::max(best, A(l, k));
        theta[l] = best + 1.0;
    }
    auto check = [&](const Vector& t) { return check_certificate(CertificateParams{m, p_m, t}, spectrum); };

    CertificateReport rep = check(theta);
    res.best_margin = rep.min_scaled_minor;
    while (!rep.pass) {
        if (res.doublings == strategy.max_doublings) {
            res.report = rep;
            return res;
        }
        const int l = rep.witness->minor;
        // Minor l only involves theta_1..theta_{l-1}.
        for (int k = 0; k < std::max(l - 1, 1) && k < m - 1; ++k) theta[k] *= 2.0;
        ++res.doublings;
        rep = check(theta);
        res.best_margin = std::max(res.best_margin, rep.min_scaled_minor);
    }

    if (strategy.tighten) {
        std::vector<int> order(m - 1);
        for (int k = 0; k < m - 1; ++k) order[k] = k;
        if (strategy.seed != 0) {
            std::mt19937_64 rng(strategy.seed);
            std::shuffle(order.begin(), order.end(), rng);
        }
        for (int k : order) {
            double hi = theta[k];  // passes with the current vector
            double lo = 0.0;       // theta must stay > 0
            for (int step = 0; step < strategy.bisection_steps; ++step) {
                const double mid = 0.5 * (lo + hi);
                Vector trial = theta;
                trial[k] = mid;
                if (check(trial).pass) hi = mid;
                else lo = mid;
            }
            Vector padded = theta;
            padded[k] = hi * (1.0 + strategy.slack);
            if (padded[k] < theta[k] && check(padded).pass) theta = padded;
            else {
                theta[k] = hi;
            }
        }
    }
    res.report = check(theta);
    if (!res.report.pass) throw ConsistencyError("theta search: returned parameters failed re-validation");
    res.feasible = true;
    res.params = CertificateParams{m, p_m, theta};
    res.best_margin = res.report.min_scaled_minor;
    return res;
}

}  // namespace tdrd
