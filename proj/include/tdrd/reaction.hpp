#pragma once

// Reaction terms F(W) in diagonal coordinates, their pull-back to
// U-coordinates, and a sampling audit of quasi-positivity (A1), polynomial
// growth (A2) and the weighted linear bound <S, F(W)> <= C2 (1 + <W, 1>) (A3).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tdrd/errors.hpp"
#include "tdrd/expression.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/regions.hpp"
#include "tdrd/spectral.hpp"
#include "tdrd/transform.hpp"

namespace tdrd {

/// F_l = w_l (r_l - sum_k c_lk w_k). Quasi-positive through the w_l factor.
struct LotkaChain {
    Vector r;
    Matrix c;
};

/// F_l = w_l^2. Quasi-positive but violates the linear bound.
struct PureGrowth {};

struct ZeroReaction {};

struct ExpressionReaction {
    std::vector<Expression> components;
};

using ReactionFamily = std::variant<LotkaChain, PureGrowth, ZeroReaction, ExpressionReaction>;

class ReactionSpec {
public:
    /// Defaults: r_l = 1, c_ll = 1, c_{l,l+-1} = 1/2, S = (1, ..., 1).
    static ReactionSpec lotka_chain(int m, Vector r = {}, Matrix c = {}, Vector S = {}) {
        check_m(m);
        if (r.empty()) r.assign(m, 1.0);
        if (c.rows() == 0) {
            c = Matrix(m, m);
            for (int i = 0; i < m; ++i) {
                c(i, i) = 1.0;
                if (i + 1 < m) c(i, i + 1) = c(i + 1, i) = 0.5;
            }
        }
        if (static_cast<int>(r.size()) != m || static_cast<int>(c.rows()) != m || static_cast<int>(c.cols()) != m)
            throw ConfigError("lotka-chain: r must have m entries and c must be m x m");
        return ReactionSpec(m, 2, std::move(S), LotkaChain{std::move(r), std::move(c)});
    }

    static ReactionSpec pure_growth(int m, Vector S = {}) {
        check_m(m);
        return ReactionSpec(m, 2, std::move(S), PureGrowth{});
    }

    static ReactionSpec zero(int m, Vector S = {}) {
        check_m(m);
        return ReactionSpec(m, 0, std::move(S), ZeroReaction{});
    }

    static ReactionSpec from_expressions(int m, const std::vector<std::string>& exprs, int degree, Vector S = {}) {
        check_m(m);
        if (static_cast<int>(exprs.size()) != m)
            throw ConfigError("expression reaction: need exactly m expressions");
        if (degree < 0) throw ConfigError("expression reaction: degree must be >= 0");
        ExpressionReaction er;
        for (const auto& e : exprs) er.components.push_back(Expression::parse(e, m));
        return ReactionSpec(m, degree, std::move(S), std::move(er));
    }

    int m() const noexcept { return m_; }
    int degree() const noexcept { return degree_; }
    const Vector& S() const noexcept { return S_; }
    const ReactionFamily& family() const noexcept { return family_; }

    std::string kind_name() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, LotkaChain>) return "lotka-chain";
                else if constexpr (std::is_same_v<T, PureGrowth>) return "pure-growth";
                else if constexpr (std::is_same_v<T, ZeroReaction>) return "zero";
                else return "expression";
            },
            family_);
    }

    /// Evaluates F(W) without the W >= 0 precondition.
    void evaluate(std::span<const double> w, std::span<double> out) const {
        std::visit(
            [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, LotkaChain>) {
                    for (int l = 0; l < m_; ++l) {
                        double s = f.r[l];
                        for (int k = 0; k < m_; ++k) s -= f.c(l, k) * w[k];
                        out[l] = w[l] * s;
                    }
                } else if constexpr (std::is_same_v<T, PureGrowth>) {
                    for (int l = 0; l < m_; ++l) out[l] = w[l] * w[l];
                } else if constexpr (std::is_same_v<T, ZeroReaction>) {
                    for (int l = 0; l < m_; ++l) out[l] = 0.0;
                } else {
                    for (int l = 0; l < m_; ++l) out[l] = f.components[l].evaluate(w);
                }
            },
            family_);
    }

    Vector evaluate(std::span<const double> w) const {
        Vector out(m_);
        evaluate(w, out);
        return out;
    }

private:
    static void check_m(int m) {
        if (m < 2) throw ConfigError("reaction: m must be >= 2");
    }

    ReactionSpec(int m, int degree, Vector S, ReactionFamily family)
        : m_(m), degree_(degree), S_(std::move(S)), family_(std::move(family)) {
        if (S_.empty()) S_.assign(m_, 1.0);
        if (static_cast<int>(S_.size()) != m_) throw ConfigError("reaction: S must have m entries");
        if (S_.back() != 1.0) throw ConfigError("reaction: the last entry of S must be 1");
        for (double v : S_)
            if (!(v > 0.0)) throw ConfigError("reaction: entries of S must be > 0");
    }

    int m_;
    int degree_;
    Vector S_;
    ReactionFamily family_;
};

inline Vector eval_F_W(const ReactionSpec& spec, std::span<const double> w) {
    if (static_cast<int>(w.size()) != spec.m()) throw ConfigError("eval_F_W: dimension mismatch");
    for (double v : w)
        if (!(v >= 0.0)) throw DomainError("eval_F_W: W must lie in the nonnegative orthant");
    return spec.evaluate(w);
}

/// F(U) = (P^T)^-1 F(P^T U).
inline std::function<Vector(std::span<const double>)> pullback_F_U(const ReactionSpec& spec,
                                                                  const DiagonalizingTransform& transform) {
    if (transform.m() != spec.m()) throw ConfigError("pullback: dimension mismatch");
    return [spec, transform](std::span<const double> u) {
        const Vector w = transform.to_W(u);
        return transform.to_U(spec.evaluate(w));
    };
}

inline std::function<Vector(std::span<const double>)> pullback_F_U(const ReactionSpec& spec,
                                                                  const Spectrum& spectrum,
                                                                  const RegionSpec& region) {
    return pullback_F_U(spec, DiagonalizingTransform::make(spectrum, region));
}

/// Forward-difference estimate of ||dF/dW||_inf at w.
inline double lipschitz_estimate(const ReactionSpec& spec, std::span<const double> w) {
    const int m = spec.m();
    Vector base = spec.evaluate(w);
    Vector probe(w.begin(), w.end());
    Vector shifted(m);
    Vector row_sums(m, 0.0);
    for (int k = 0; k < m; ++k) {
        const double h = 1e-7 * (1.0 + std::abs(w[k]));
        probe[k] = w[k] + h;
        spec.evaluate(probe, shifted);
        probe[k] = w[k];
        for (int l = 0; l < m; ++l) row_sums[l] += std::abs(shifted[l] - base[l]) / h;
    }
    return norm_inf(row_sums);
}

struct AuditOptions {
    int samples = 2000;  // random samples per radius (box and each face)
    std::uint64_t seed = 1;
    Vector radii{1.0, 10.0, 100.0, 1000.0};
};

struct AuditReport {
    int m = 0;
    int degree = 0;
    Vector radii;

    bool a1_pass = true;
    double a1_min_value = std::numeric_limits<double>::infinity();  // min F_l on {w_l = 0}
    int a1_worst_component = -1;

    bool a2_pass = true;
    Vector envelope;     // max_l |F_l| over the box of each radius
    Vector growth_base;  // max (1 + <W,1>) over the same samples
    Vector c1;           // max |F_l| / (1 + <W,1>)^N per radius
    double fitted_exponent = 0.0;

    bool a3_pass = true;
    Vector c2;  // sup <S,F> / (1 + <W,1>) over the nested boxes
    double c2_growth_slope = 0.0;

    bool all_pass() const { return a1_pass && a2_pass && a3_pass; }

    std::string to_text() const {
        std::ostringstream os;
        os << std::setprecision(17);
        auto list = [&](const Vector& v) {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
            os << ']';
        };
        os << "m = " << m << "\ndegree = " << degree << "\nradii = ";
        list(radii);
        os << "\nA1_pass = " << (a1_pass ? "true" : "false") << "\nA1_min_face_value = " << a1_min_value
           << "\nA1_worst_component = " << a1_worst_component + 1;
        os << "\nA2_pass = " << (a2_pass ? "true" : "false") << "\nA2_fitted_exponent = " << fitted_exponent
           << "\nA2_envelope = ";
        list(envelope);
        os << "\nA2_C1 = ";
        list(c1);
        os << "\nA3_pass = " << (a3_pass ? "true" : "false") << "\nA3_C2 = ";
        list(c2);
        os << "\nA3_growth_slope = " << c2_growth_slope << '\n';
        return os.str();
    }
};

namespace detail {

// All 0/R vertex combinations of the box [0,R]^m, optionally pinning one
// coordinate to zero. Skipped for large m.
template <typename Sink>
void visit_box_vertices(int m, double R, int pinned, Sink&& sink) {
    if (m > 12) return;
    Vector w(m);
    for (std::uint32_t code = 0; code < (1u << m); ++code) {
        if (pinned >= 0 && ((code >> pinned) & 1u)) continue;
        for (int k = 0; k < m; ++k) w[k] = ((code >> k) & 1u) ? R : 0.0;
        sink(std::span<const double>(w));
    }
}

inline double least_squares_slope(const Vector& x, const Vector& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0.0 ? 0.0 : sxy / sxx;
}

}  // namespace detail

inline constexpr double kA2ExponentSlack = 0.1;
inline constexpr double kA3MaxGrowthSlope = 0.25;

/// Sampling audit over [0,R]^m for each radius R. The growth exponent is the
/// log-log slope of the envelope over the radii above the smallest one (the
/// first decade is dominated by lower-order terms). C2 is a supremum over
/// nested boxes, so it can only grow with R; it passes when its growth
/// between the two largest radii stays below a slope of 0.25.
inline AuditReport audit_assumptions(const ReactionSpec& spec, const AuditOptions& opt = {}) {
    const int m = spec.m();
    const int N = spec.degree();
    if (opt.radii.empty()) throw ConfigError("audit: need at least one radius");
    if (opt.samples < 0) throw ConfigError("audit: sample budget must be >= 0");
    AuditReport rep;
    rep.m = m;
    rep.degree = N;
    rep.radii = opt.radii;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector f(m);
    Vector w(m);
    double c2_running = -std::numeric_limits<double>::infinity();

    for (double R : opt.radii) {
        // (A1) faces {w_l = 0}
        for (int l = 0; l < m; ++l) {
            auto face_check = [&](std::span<const double> p) {
                spec.evaluate(p, f);
                const double tol = 1e-12 * std::pow(1.0 + norm_inf(p), N);
                if (f[l] < rep.a1_min_value) {
                    rep.a1_min_value = f[l];
                    rep.a1_worst_component = l;
                }
                if (f[l] < -tol) rep.a1_pass = false;
            };
            for (int s = 0; s < opt.samples; ++s) {
                for (int k = 0; k < m; ++k) w[k] = (k == l) ? 0.0 : R * unit(rng);
                face_check(w);
            }
            detail::visit_box_vertices(m, R, l, face_check);
        }

        // (A2), (A3) on the box
        double env = 0.0, base = 1.0, c1 = 0.0;
        auto box_check = [&](std::span<const double> p) {
            spec.evaluate(p, f);
            double sum = 0.0;
            for (double v : p) sum += v;
            const double b = 1.0 + sum;
            const double fmax = norm_inf(f);
            env = std::max(env, fmax);
            base = std::max(base, b);
            c1 = std::max(c1, fmax / std::pow(b, N));
            c2_running = std::max(c2_running, dot(spec.S(), f) / b);
        };
        for (int s = 0; s < opt.samples; ++s) {
            for (int k = 0; k < m; ++k) w[k] = R * unit(rng);
            box_check(w);
        }
        detail::visit_box_vertices(m, R, -1, box_check);
        rep.envelope.push_back(env);
        rep.growth_base.push_back(base);
        rep.c1.push_back(c1);
        rep.c2.push_back(c2_running);
    }

    Vector lx, ly;
    const std::size_t first = rep.radii.size() >= 3 ? 1 : 0;
    for (std::size_t i = first; i < rep.radii.size(); ++i) {
        if (rep.envelope[i] > 0.0) {
            lx.push_back(std::log(rep.growth_base[i]));
            ly.push_back(std::log(rep.envelope[i]));
        }
    }
    rep.fitted_exponent = lx.size() >= 2 ? detail::least_squares_slope(lx, ly) : 0.0;
    rep.a2_pass = rep.fitted_exponent <= N + kA2ExponentSlack;

    if (rep.c2.size() >= 2) {
        const std::size_t n = rep.c2.size();
        const double last = rep.c2[n - 1], prev = rep.c2[n - 2];
        if (last <= 0.0) rep.c2_growth_slope = 0.0;
        else if (prev <= 0.0) rep.c2_growth_slope = std::numeric_limits<double>::infinity();
        else
            rep.c2_growth_slope =
                std::log(last / prev) / std::log(rep.radii[n - 1] / rep.radii[n - 2]);
    }
    rep.a3_pass = rep.c2_growth_slope <= kA3MaxGrowthSlope;
    return rep;
}

}  // namespace tdrd
