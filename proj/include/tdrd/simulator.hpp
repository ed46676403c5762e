#pragma once

// Method-of-lines integrator for the diagonalized system
//
//   dw_l/dt = lambda_l w_l'' + F_l(W),   l = 1..m,
//
// on the interval [0, length]. Diffusion is backward Euler (one Thomas solve
// per component), reaction is forward Euler. Boundary rows use a ghost-point
// closure of  d_eta w_l = gamma_l - sigma_l w_l  or pin w_l = 0 (Dirichlet).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tdrd/errors.hpp"
#include "tdrd/hpoly.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/reaction.hpp"
#include "tdrd/regions.hpp"
#include "tdrd/spectral.hpp"
#include "tdrd/transform.hpp"

namespace tdrd {

struct GridSpec {
    int n_x = 100;  // interior points
    double length = 1.0;

    static GridSpec make(int n_x, double length) {
        if (n_x < 3) throw ConfigError("grid: n_x must be >= 3");
        if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("grid: length must be finite and > 0");
        return GridSpec{n_x, length};
    }

    double dx() const noexcept { return length / (n_x + 1); }
    int nodes() const noexcept { return n_x + 2; }  // including both boundary nodes
    double x(int i) const noexcept { return i * dx(); }

    /// Trapezoid weights over all nodes.
    Vector weights() const {
        Vector w(nodes(), dx());
        w.front() = w.back() = 0.5 * dx();
        return w;
    }
};

enum class BoundaryForm { plain, diffusion_weighted };

/// alpha U + (1 - alpha) d_eta U = B            (plain)
/// alpha U + (1 - alpha) D d_eta U = B          (diffusion_weighted)
struct BoundarySpec {
    double alpha = 0.0;
    Vector B;
    BoundaryForm form = BoundaryForm::plain;

    static BoundarySpec make(int m, double alpha, Vector B, BoundaryForm form = BoundaryForm::plain) {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("boundary: alpha must lie in [0, 1]");
        if (B.empty()) B.assign(m, 0.0);
        if (static_cast<int>(B.size()) != m) throw ConfigError("boundary: B must have m entries");
        if (alpha == 0.0 || alpha == 1.0)
            for (double v : B)
                if (v != 0.0)
                    throw ConfigError("boundary: Neumann (alpha=0) and Dirichlet (alpha=1) require B = 0");
        return BoundarySpec{alpha, std::move(B), form};
    }

    static BoundarySpec neumann(int m) { return make(m, 0.0, {}); }
    static BoundarySpec dirichlet(int m) { return make(m, 1.0, {}); }

    bool is_dirichlet() const noexcept { return alpha == 1.0; }
    bool is_neumann() const noexcept { return alpha == 0.0; }
};

/// Per-component closure. For flux closures d_eta w = gamma - sigma w.
struct ScalarBoundary {
    bool dirichlet = false;
    double sigma = 0.0;
    double gamma = 0.0;
};

inline std::vector<ScalarBoundary> transformed_boundary(const BoundarySpec& bc, const DiagonalizingTransform& tr,
                                                        const Vector& lambdas) {
    const int m = tr.m();
    if (static_cast<int>(bc.B.size()) != m) throw ConfigError("boundary: B must have m entries");
    std::vector<ScalarBoundary> out(m);
    if (bc.is_dirichlet()) {
        for (auto& s : out) s.dirichlet = true;
        return out;
    }
    const Vector rho = tr.to_W(bc.B);
    for (int l = 0; l < m; ++l) {
        double sigma = bc.alpha / (1.0 - bc.alpha);
        double gamma = rho[l] / (1.0 - bc.alpha);
        if (bc.form == BoundaryForm::diffusion_weighted) {
            sigma /= lambdas[l];
            gamma /= lambdas[l];
        }
        out[l] = ScalarBoundary{false, sigma, gamma};
    }
    return out;
}

/// One backward-Euler diffusion step (I - dt lambda Lap) w_new = rhs, in place.
/// `rhs` holds w_old plus any explicit source on entry. Flux closures add the
/// gamma contribution themselves.
inline void diffuse_implicit(std::span<double> w, double lambda, double dt, const GridSpec& grid,
                             const ScalarBoundary& bc, std::vector<double>& scratch) {
    const int n = grid.nodes();
    const double dx = grid.dx();
    const double r = dt * lambda / (dx * dx);
    // lower[i-1] couples row i to x[i-1]; upper[i] couples row i to x[i+1].
    std::vector<double> lower(n - 1, -r), diag(n, 1.0 + 2.0 * r), upper(n - 1, -r);
    if (bc.dirichlet) {
        diag[0] = diag[n - 1] = 1.0;
        upper[0] = lower[n - 2] = 0.0;
        w[0] = w[n - 1] = 0.0;
    } else {
        diag[0] = diag[n - 1] = 1.0 + 2.0 * r + 2.0 * r * dx * bc.sigma;
        upper[0] = lower[n - 2] = -2.0 * r;
        w[0] += 2.0 * r * dx * bc.gamma;
        w[n - 1] += 2.0 * r * dx * bc.gamma;
    }
    scratch.resize(n);
    std::vector<double> rhs(w.begin(), w.end());
    if (!solve_tridiagonal(lower, diag, upper, rhs, w, scratch))
        throw SingularError("diffusion step: tridiagonal system is singular", std::numeric_limits<double>::infinity());
}

struct SimParams {
    double T = 1.0;
    double dt = 1e-3;
    double monitor_interval = 0.01;
    std::vector<double> snapshot_times;
    double blowup_threshold = 1e12;
    double lipschitz_safety = 10.0;  // dt <= 1 / (safety * Lip)
    double min_dt = 1e-14;

    void validate() const {
        if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("simulation: T must be finite and > 0");
        if (!(dt > 0.0)) throw ConfigError("simulation: dt must be > 0");
        if (!(monitor_interval > 0.0)) throw ConfigError("simulation: monitor interval must be > 0");
        for (double s : snapshot_times)
            if (!(s >= 0.0 && s <= T)) throw ConfigError("simulation: snapshot times must lie in [0, T]");
    }
};

/// Field in diagonal coordinates, stored component-major: w[l][i].
struct SimState {
    double t = 0.0;
    std::vector<Vector> w;

    int m() const noexcept { return static_cast<int>(w.size()); }
    int nodes() const noexcept { return w.empty() ? 0 : static_cast<int>(w[0].size()); }
    Vector at(int i) const {
        Vector p(w.size());
        for (std::size_t l = 0; l < w.size(); ++l) p[l] = w[l][i];
        return p;
    }
    double max_abs() const {
        double mx = 0.0;
        for (const auto& c : w)
            for (double v : c) mx = std::max(mx, std::abs(v));
        return mx;
    }
};

struct MonitorSample {
    double t = 0.0;
    double L = 0.0;
    double Z = 0.0;
    double min_slack = 0.0;
    Vector min_w;
    Vector mass;
};

struct EnvelopeFit {
    double c_hat = 0.0;  // growth rate in Z(t) <= Z(0) e^{c t} + k
    double k = 0.0;
};

/// c_hat is the largest observed logarithmic growth rate of Z between
/// consecutive samples (floored at 0); k absorbs whatever that misses.
inline EnvelopeFit fit_envelope(std::span<const MonitorSample> samples) {
    EnvelopeFit fit;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        if (a.Z > 0.0 && b.Z > 0.0 && b.t > a.t)
            fit.c_hat = std::max(fit.c_hat, std::log(b.Z / a.Z) / (b.t - a.t));
    }
    if (samples.empty()) return fit;
    const double z0 = samples.front().Z;
    for (const auto& s : samples) fit.k = std::max(fit.k, s.Z - z0 * std::exp(fit.c_hat * s.t));
    return fit;
}

struct SimReport {
    std::vector<MonitorSample> samples;
    std::vector<SimState> snapshots;
    SimState final_state;
    bool blew_up = false;
    double blowup_time = 0.0;
    std::string blowup_message;
    std::int64_t steps = 0;
    double min_w = std::numeric_limits<double>::infinity();
    double min_slack = std::numeric_limits<double>::infinity();
    double max_Z = 0.0;
    EnvelopeFit envelope;
};

struct I2Report {
    bool pass = true;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double min_relative_eigenvalue = std::numeric_limits<double>::infinity();  // min over nodes of eig / ||M||
    int worst_node = -1;
    double min_integrand = std::numeric_limits<double>::infinity();
    double max_norm = 0.0;
};

inline constexpr double kI2RelativeTolerance = 1e-10;

/// M_{l k}(x) = (lambda_l + lambda_k)/2 * d^2 H / dw_k dw_l at W(x).
inline Matrix i2_form_matrix(const CertificateParams& params, const Vector& lambdas, std::span<const double> w) {
    Matrix m = detail::H_hessian_unchecked(params, w);
    for (std::size_t l = 0; l < m.rows(); ++l)
        for (std::size_t k = 0; k < m.cols(); ++k) m(l, k) *= 0.5 * (lambdas[l] + lambdas[k]);
    return m;
}

/// Pointwise check that the quadratic form of the diffusion dissipation term
/// is nonnegative along the realized field.
inline I2Report verify_I2_sign(const SimState& state, const CertificateParams& params, const Vector& lambdas,
                               const GridSpec& grid) {
    const int m = state.m();
    const int n = state.nodes();
    if (m != params.m || static_cast<int>(lambdas.size()) != m) throw ConfigError("verify_I2_sign: dimension mismatch");
    I2Report rep;
    const double dx = grid.dx();
    Vector grad(m);
    for (int i = 0; i < n; ++i) {
        const Vector w = state.at(i);
        const Matrix M = i2_form_matrix(params, lambdas, w);
        const auto eig = jacobi_eigen(M);
        double norm = 0.0;
        for (double v : eig.values) norm = std::max(norm, std::abs(v));
        const double lo = eig.values.front();
        rep.max_norm = std::max(rep.max_norm, norm);
        const double rel = norm > 0.0 ? lo / norm : 0.0;
        if (rel < rep.min_relative_eigenvalue) {
            rep.min_relative_eigenvalue = rel;
            rep.worst_node = i;
        }
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, lo);
        if (lo < -kI2RelativeTolerance * norm) rep.pass = false;

        for (int l = 0; l < m; ++l) {
            const auto& c = state.w[l];
            if (i == 0) grad[l] = (c[1] - c[0]) / dx;
            else if (i == n - 1) grad[l] = (c[n - 1] - c[n - 2]) / dx;
            else grad[l] = (c[i + 1] - c[i - 1]) / (2.0 * dx);
        }
        rep.min_integrand = std::min(rep.min_integrand, dot(grad, M.apply(grad)));
    }
    return rep;
}

class Simulator {
public:
    Simulator(Spectrum spectrum, const RegionSpec& region, ReactionSpec reaction, BoundarySpec boundary, GridSpec grid,
              CertificateParams certificate, SimParams params)
        : spectrum_(std::move(spectrum)),
          transform_(DiagonalizingTransform::make(spectrum_, region)),
          reaction_(std::move(reaction)),
          boundary_(std::move(boundary)),
          grid_(grid),
          cert_(std::move(certificate)),
          params_(std::move(params)) {
        const int m = spectrum_.m;
        if (reaction_.m() != m || cert_.m != m) throw ConfigError("simulator: dimension mismatch");
        if (!(spectrum_.lambdas.front() > 0.0)) throw ConfigError("simulator: diffusion eigenvalues must be > 0");
        params_.validate();
        GridSpec::make(grid_.n_x, grid_.length);
        closures_ = transformed_boundary(boundary_, transform_, spectrum_.lambdas);
    }

    const Spectrum& spectrum() const noexcept { return spectrum_; }
    const DiagonalizingTransform& transform() const noexcept { return transform_; }
    const GridSpec& grid() const noexcept { return grid_; }
    const ReactionSpec& reaction() const noexcept { return reaction_; }
    const CertificateParams& certificate() const noexcept { return cert_; }
    const SimParams& params() const noexcept { return params_; }
    const std::vector<ScalarBoundary>& closures() const noexcept { return closures_; }

    SimState make_state(std::vector<Vector> w, double t = 0.0) const {
        if (static_cast<int>(w.size()) != spectrum_.m) throw ConfigError("initial field: need m components");
        for (const auto& c : w) {
            if (static_cast<int>(c.size()) != grid_.nodes())
                throw ConfigError("initial field: each component needs n_x + 2 nodes");
            for (double v : c)
                if (!std::isfinite(v)) throw ConfigError("initial field: values must be finite");
        }
        SimState s{t, std::move(w)};
        if (closures_.front().dirichlet)
            for (auto& c : s.w) c.front() = c.back() = 0.0;
        return s;
    }

    /// Field given in U-coordinates, U[k][i].
    SimState make_state_from_U(const std::vector<Vector>& u, double t = 0.0) const {
        const int m = spectrum_.m;
        if (static_cast<int>(u.size()) != m) throw ConfigError("initial field: need m components");
        const int n = static_cast<int>(u[0].size());
        std::vector<Vector> w(m, Vector(n));
        Vector p(m);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < m; ++k) p[k] = u[k].at(i);
            const Vector q = transform_.to_W(p);
            for (int l = 0; l < m; ++l) w[l][i] = q[l];
        }
        return make_state(std::move(w), t);
    }

    std::vector<Vector> to_U(const SimState& s) const {
        const int m = s.m(), n = s.nodes();
        std::vector<Vector> u(m, Vector(n));
        for (int i = 0; i < n; ++i) {
            const Vector q = transform_.to_U(s.at(i));
            for (int k = 0; k < m; ++k) u[k][i] = q[k];
        }
        return u;
    }

    /// Largest per-node reaction Lipschitz estimate over the field.
    double lipschitz(const SimState& s) const {
        double lip = 0.0;
        for (int i = 0; i < s.nodes(); ++i) lip = std::max(lip, lipschitz_estimate(reaction_, s.at(i)));
        return lip;
    }

    double admissible_dt(const SimState& s, double requested) const {
        const double lip = lipschitz(s);
        double dt = requested;
        if (lip > 0.0) dt = std::min(dt, 1.0 / (params_.lipschitz_safety * lip));
        return dt;
    }

    /// Advances by exactly dt. Throws BlowUpError when the field leaves the
    /// finite range or exceeds the blow-up threshold.
    void step(SimState& s, double dt) const {
        if (!(dt > 0.0)) throw ConfigError("step: dt must be > 0");
        const int m = s.m(), n = s.nodes();
        Vector p(m), f(m);
        for (int i = 0; i < n; ++i) {
            for (int l = 0; l < m; ++l) p[l] = s.w[l][i];
            reaction_.evaluate(p, f);
            for (int l = 0; l < m; ++l) s.w[l][i] += dt * f[l];
        }
        for (int l = 0; l < m; ++l)
            diffuse_implicit(s.w[l], spectrum_.lambdas[l], dt, grid_, closures_[l], scratch_);
        s.t += dt;
        check_blowup(s);
    }

    MonitorSample measure(const SimState& s) const {
        const int m = s.m(), n = s.nodes();
        const Vector wts = grid_.weights();
        MonitorSample out;
        out.t = s.t;
        out.min_w.assign(m, std::numeric_limits<double>::infinity());
        out.mass.assign(m, 0.0);
        out.min_slack = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const Vector w = s.at(i);
            out.L += wts[i] * detail::H_unchecked(cert_, w);
            for (int l = 0; l < m; ++l) {
                out.min_w[l] = std::min(out.min_w[l], w[l]);
                out.mass[l] += wts[i] * w[l];
            }
            const Vector u = transform_.to_U(w);
            const auto mem = membership(transform_.region(), spectrum_, u);
            out.min_slack = std::min(out.min_slack, mem.slacks[mem.worst_index]);
        }
        out.Z = out.L > 0.0 ? std::pow(out.L, 1.0 / cert_.p_m) : 0.0;
        return out;
    }

    I2Report verify_I2_sign(const SimState& s) const {
        return tdrd::verify_I2_sign(s, cert_, spectrum_.lambdas, grid_);
    }

    SimReport run(SimState state) const {
        SimReport rep;
        std::vector<double> snaps = params_.snapshot_times;
        std::sort(snaps.begin(), snaps.end());
        std::size_t next_snap = 0;
        auto take_snapshots = [&](const SimState& s, bool final) {
            while (next_snap < snaps.size() && (snaps[next_snap] <= s.t || (final && s.t >= params_.T))) {
                rep.snapshots.push_back(s);
                ++next_snap;
            }
        };
        auto record = [&](const SimState& s) {
            rep.samples.push_back(measure(s));
            const auto& ms = rep.samples.back();
            for (double v : ms.min_w) rep.min_w = std::min(rep.min_w, v);
            rep.min_slack = std::min(rep.min_slack, ms.min_slack);
            rep.max_Z = std::max(rep.max_Z, ms.Z);
        };

        record(state);
        take_snapshots(state, false);
        std::int64_t monitor_index = 1;
        const double T = params_.T;
        const double eps = 1e-12 * T;
        try {
            while (state.t < T - eps) {
                const double next_monitor = std::min(T, monitor_index * params_.monitor_interval);
                double target = next_monitor;
                if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
                double dt = admissible_dt(state, params_.dt);
                if (dt < params_.min_dt) {
                    std::ostringstream os;
                    os << "time step collapsed to " << dt << " at t = " << state.t;
                    throw BlowUpError(os.str(), state.t);
                }
                bool hits = false;
                if (state.t + dt >= target - eps) {
                    dt = target - state.t;
                    hits = true;
                }
                step(state, dt);
                ++rep.steps;
                if (hits) state.t = target;
                if (hits && target == next_monitor) {
                    record(state);
                    ++monitor_index;
                }
                take_snapshots(state, false);
            }
            take_snapshots(state, true);
        } catch (const BlowUpError& e) {
            rep.blew_up = true;
            rep.blowup_time = e.time();
            rep.blowup_message = e.what();
        }
        rep.final_state = std::move(state);
        rep.envelope = fit_envelope(rep.samples);
        return rep;
    }

private:
    void check_blowup(const SimState& s) const {
        for (const auto& c : s.w)
            for (double v : c)
                if (!std::isfinite(v) || std::abs(v) > params_.blowup_threshold) {
                    std::ostringstream os;
                    os << std::setprecision(17) << "blow-up: |W| exceeded " << params_.blowup_threshold
                       << " at t = " << s.t;
                    throw BlowUpError(os.str(), s.t);
                }
    }

    Spectrum spectrum_;
    DiagonalizingTransform transform_;
    ReactionSpec reaction_;
    BoundarySpec boundary_;
    GridSpec grid_;
    CertificateParams cert_;
    SimParams params_;
    std::vector<ScalarBoundary> closures_;
    mutable std::vector<double> scratch_;
};

/// Explicit integration of the coupled system U_t = D U'' + F(U) in the
/// original coordinates. Used as an independent cross-check of the
/// diagonalized integrator. dt is capped by 0.5 dx^2 / max lambda.
inline std::vector<Vector> simulate_coupled_explicit(const ToeplitzDiffusion& diffusion, const Spectrum& spectrum,
                                                     const ReactionSpec& reaction,
                                                     const DiagonalizingTransform& transform,
                                                     const BoundarySpec& bc, const GridSpec& grid,
                                                     std::vector<Vector> u, double T, double dt) {
    const int m = diffusion.m();
    const int n = grid.nodes();
    const double dx = grid.dx();
    if (static_cast<int>(u.size()) != m) throw ConfigError("coupled: need m components");
    for (const auto& c : u)
        if (static_cast<int>(c.size()) != n) throw ConfigError("coupled: each component needs n_x + 2 nodes");
    dt = std::min(dt, 0.5 * dx * dx / spectrum.max_abs_lambda());
    const Matrix D = diffusion.matrix();
    const Matrix Dinv = inverse(D);
    const auto F = pullback_F_U(reaction, transform);

    // Ghost closure d_eta U = g - S U with g, S per form.
    Matrix S(m, m);
    Vector g(m, 0.0);
    if (!bc.is_dirichlet()) {
        const double inv = 1.0 / (1.0 - bc.alpha);
        if (bc.form == BoundaryForm::plain) {
            for (int k = 0; k < m; ++k) {
                S(k, k) = bc.alpha * inv;
                g[k] = bc.B[k] * inv;
            }
        } else {
            g = Dinv.apply(bc.B);
            for (int k = 0; k < m; ++k) {
                g[k] *= inv;
                for (int j = 0; j < m; ++j) S(k, j) = bc.alpha * inv * Dinv(k, j);
            }
        }
    }

    std::vector<Vector> lap(m, Vector(n)), next = u;
    Vector p(m), q(m);
    double t = 0.0;
    while (t < T - 1e-12 * T) {
        const double h = std::min(dt, T - t);
        for (int k = 0; k < m; ++k)
            for (int i = 1; i < n - 1; ++i) lap[k][i] = (u[k][i + 1] - 2.0 * u[k][i] + u[k][i - 1]) / (dx * dx);
        if (!bc.is_dirichlet()) {
            for (int end = 0; end < 2; ++end) {
                const int i = end == 0 ? 0 : n - 1;
                const int nb = end == 0 ? 1 : n - 2;
                for (int k = 0; k < m; ++k) p[k] = u[k][i];
                const Vector su = S.apply(p);
                for (int k = 0; k < m; ++k)
                    lap[k][i] = (2.0 * u[k][nb] - 2.0 * u[k][i] + 2.0 * dx * (g[k] - su[k])) / (dx * dx);
            }
        }
        const int lo = bc.is_dirichlet() ? 1 : 0;
        const int hi = bc.is_dirichlet() ? n - 2 : n - 1;
        for (int i = lo; i <= hi; ++i) {
            for (int k = 0; k < m; ++k) p[k] = u[k][i];
            const Vector f = F(p);
            for (int k = 0; k < m; ++k) q[k] = lap[k][i];
            const Vector dq = D.apply(q);
            for (int k = 0; k < m; ++k) next[k][i] = u[k][i] + h * (dq[k] + f[k]);
        }
        if (bc.is_dirichlet())
            for (int k = 0; k < m; ++k) next[k][0] = next[k][n - 1] = 0.0;
        std::swap(u, next);
        t += h;
        for (const auto& c : u)
            for (double v : c)
                if (!std::isfinite(v)) throw BlowUpError("coupled: non-finite field", t);
    }
    return u;
}

inline void write_csv_header(std::ostream& os, int m) {
    os << "t,L,Z,min_slack";
    for (int l = 1; l <= m; ++l) os << ",min_w_" << l;
    for (int l = 1; l <= m; ++l) os << ",mass_" << l;
    os << '\n';
}

inline void write_csv(std::ostream& os, std::span<const MonitorSample> samples, int m) {
    write_csv_header(os, m);
    os << std::setprecision(17);
    for (const auto& s : samples) {
        os << s.t << ',' << s.L << ',' << s.Z << ',' << s.min_slack;
        for (double v : s.min_w) os << ',' << v;
        for (double v : s.mass) os << ',' << v;
        os << '\n';
    }
}

/// Layout: int64 m, int64 n_x, then for each component l the n_x + 2 nodal
/// values as float64 (x fastest). All little-endian.
inline void write_snapshot(std::ostream& os, const SimState& s) {
    static_assert(sizeof(double) == 8);
    auto put_le = [&](std::uint64_t bits) {
        char buf[8];
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
        os.write(buf, 8);
    };
    put_le(static_cast<std::uint64_t>(static_cast<std::int64_t>(s.m())));
    put_le(static_cast<std::uint64_t>(static_cast<std::int64_t>(s.nodes() - 2)));
    for (const auto& c : s.w)
        for (double v : c) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            put_le(bits);
        }
}

inline SimState read_snapshot(std::istream& is, double t = 0.0) {
    auto get_le = [&]() {
        unsigned char buf[8];
        if (!is.read(reinterpret_cast<char*>(buf), 8)) throw ConfigError("snapshot: truncated file");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        return bits;
    };
    const auto m = static_cast<std::int64_t>(get_le());
    const auto n_x = static_cast<std::int64_t>(get_le());
    if (m < 1 || n_x < 1) throw ConfigError("snapshot: bad header");
    SimState s;
    s.t = t;
    s.w.assign(m, Vector(n_x + 2));
    for (auto& c : s.w)
        for (double& v : c) {
            const std::uint64_t bits = get_le();
            std::memcpy(&v, &bits, 8);
        }
    return s;
}

}  // namespace tdrd
