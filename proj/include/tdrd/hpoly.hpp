#pragma once

// The weighted homogeneous polynomial
//
//   H(w) = sum_{0 <= p_1 <= ... <= p_{m-1} <= p_m}
//            prod_k C(p_{k+1}, p_k) theta_k^{p_k^2}
//            * w_1^{p_1} w_2^{p_2 - p_1} ... w_m^{p_m - p_{m-1}}
//
// together with its gradient and Hessian. Every derivative is again a sum of
// the same shape with a lower degree and shifted theta exponents
// theta_k^{(p_k + shift_k)^2}, so one kernel evaluates all of them.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "tdrd/errors.hpp"
#include "tdrd/linalg.hpp"

namespace tdrd {

struct CertificateParams {
    int m = 2;
    int p_m = 2;
    Vector thetas;  // theta_1..theta_{m-1}

    static CertificateParams make(int m, int p_m, Vector thetas) {
        if (m < 2) throw ConfigError("certificate: m must be >= 2");
        if (p_m < 2) throw ConfigError("certificate: p_m must be >= 2, got " + std::to_string(p_m));
        if (static_cast<int>(thetas.size()) != m - 1) {
            std::ostringstream os;
            os << "certificate: expected " << m - 1 << " theta values, got " << thetas.size();
            throw ConfigError(os.str());
        }
        for (double t : thetas)
            if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("certificate: theta values must be finite and > 0");
        return CertificateParams{m, p_m, std::move(thetas)};
    }
};

/// Non-decreasing tuples 0 <= p_1 <= ... <= p_{m-1} <= top.
/// Visited lexicographically in (p_{m-1}, ..., p_1): p_{m-1} varies slowest.
/// The visitor returns false to stop early.
template <typename Visitor>
bool for_each_multi_index(int m, int top, Visitor&& visit) {
    const int len = m - 1;
    if (top < 0) return true;
    std::vector<int> p(std::max(len, 0), 0);
    while (true) {
        if (!visit(std::span<const int>(p))) return false;
        // Odometer step: bump the fastest position that still has room.
        int i = 0;
        while (i < len && p[i] >= (i + 1 < len ? p[i + 1] : top)) ++i;
        if (i >= len) return true;
        ++p[i];
        for (int j = 0; j < i; ++j) p[j] = 0;
    }
}

/// Number of tuples visited by for_each_multi_index: C(top + m - 1, m - 1).
/// Saturates at UINT64_MAX.
inline std::uint64_t count_multi_indices(int m, int top) {
    if (top < 0) return 0;
    const int k = m - 1;
    const int n = top + k;
    long double acc = 1.0L;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (acc > 1.8e19L) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(acc)));
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace detail {

/// sum over tuples with p_m = degree of
///   prod_k C(p_{k+1}, p_k) theta_k^{(p_k + shift_k)^2} * prod_j w_j^{p_j - p_{j-1}}.
/// Throws OverflowError (carrying log of the magnitude) if a term overflows.
inline double weighted_sum(std::span<const double> thetas, std::span<const double> w, int degree,
                           std::span<const int> shift) {
    const int m = static_cast<int>(w.size());
    if (degree < 0) return 0.0;
    // Visits every non-vanishing term as (coefficient-free term value, log term).
    auto visit_terms = [&](auto&& sink) {
        for_each_multi_index(m, degree, [&](std::span<const int> p) {
            double term = 1.0;
            double log_term = 0.0;
            int prev = 0;
            for (int j = 0; j < m; ++j) {
                const int pj = (j < m - 1) ? p[j] : degree;
                const int e = pj - prev;
                if (j < m - 1) {
                    const int upper = (j + 1 < m - 1) ? p[j + 1] : degree;
                    const double coef = binomial(upper, pj);
                    const int ex = pj + shift[j];
                    const double sq = static_cast<double>(ex) * ex;
                    term *= coef * std::pow(thetas[j], sq);
                    log_term += std::log(coef) + sq * std::log(thetas[j]);
                }
                if (e > 0) {
                    if (w[j] == 0.0) return true;
                    term *= std::pow(w[j], e);
                    log_term += e * std::log(std::abs(w[j]));
                }
                prev = pj;
            }
            sink(term, log_term);
            return true;
        });
    };
    double total = 0.0;
    bool overflow = false;
    visit_terms([&](double term, double) {
        if (!std::isfinite(term)) overflow = true;
        total += term;
    });
    if (!overflow && std::isfinite(total)) return total;

    double mx = -std::numeric_limits<double>::infinity();
    visit_terms([&](double, double lt) { mx = std::max(mx, lt); });
    double s = 0.0;
    visit_terms([&](double, double lt) { s += std::exp(lt - mx); });
    const double log_mag = mx + std::log(s);
    std::ostringstream os;
    os << "polynomial evaluation overflow: log|value| ~ " << log_mag;
    throw OverflowError(os.str(), log_mag);
}

inline void require_nonnegative(std::span<const double> w, const char* who) {
    for (double v : w)
        if (!(v >= 0.0)) throw DomainError(std::string(who) + ": W must be componentwise >= 0");
}

inline void require_dims(const CertificateParams& params, std::span<const double> w, const char* who) {
    if (static_cast<int>(w.size()) != params.m || static_cast<int>(params.thetas.size()) != params.m - 1)
        throw ConfigError(std::string(who) + ": dimension mismatch");
}

/// shift_k for the second derivative in (l, k) with l <= kappa (0-based):
/// 0 for k < l, 1 for l <= k < kappa, 2 for k >= kappa.
inline std::vector<int> hessian_shift(int m, int l, int kappa) {
    std::vector<int> s(m - 1, 0);
    for (int k = 0; k < m - 1; ++k) s[k] = (k < l) ? 0 : (k < kappa ? 1 : 2);
    return s;
}

/// Evaluation without the W >= 0 precondition (used by simulator monitors,
/// where round-off can leave components at -1e-17).
inline double H_unchecked(const CertificateParams& params, std::span<const double> w) {
    std::vector<int> zero(params.m - 1, 0);
    return weighted_sum(params.thetas, w, params.p_m, zero);
}

inline Matrix H_hessian_unchecked(const CertificateParams& params, std::span<const double> w) {
    const int m = params.m;
    Matrix h(m, m);
    const double pref = static_cast<double>(params.p_m) * (params.p_m - 1);
    for (int l = 0; l < m; ++l)
        for (int k = l; k < m; ++k) {
            const auto shift = hessian_shift(m, l, k);
            const double v = pref * weighted_sum(params.thetas, w, params.p_m - 2, shift);
            h(l, k) = v;
            h(k, l) = v;
        }
    return h;
}

}  // namespace detail

inline double eval_H(const CertificateParams& params, std::span<const double> w) {
    detail::require_dims(params, w, "eval_H");
    detail::require_nonnegative(w, "eval_H");
    return detail::H_unchecked(params, w);
}

inline Vector eval_H_gradient(const CertificateParams& params, std::span<const double> w) {
    detail::require_dims(params, w, "eval_H_gradient");
    detail::require_nonnegative(w, "eval_H_gradient");
    const int m = params.m;
    Vector g(m);
    for (int l = 0; l < m; ++l) {
        std::vector<int> shift(m - 1, 0);
        for (int k = l; k < m - 1; ++k) shift[k] = 1;
        g[l] = params.p_m * detail::weighted_sum(params.thetas, w, params.p_m - 1, shift);
    }
    return g;
}

inline Matrix eval_H_hessian(const CertificateParams& params, std::span<const double> w) {
    detail::require_dims(params, w, "eval_H_hessian");
    detail::require_nonnegative(w, "eval_H_hessian");
    return detail::H_hessian_unchecked(params, w);
}

}  // namespace tdrd
