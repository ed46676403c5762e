#pragma once

// Shared helpers for the test programs: Eigen conversions, random problem
// generators and brute-force reference implementations.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tdrd/tdrd.hpp"

namespace tdrd::testing {

inline Eigen::MatrixXd to_eigen(const Matrix& a) {
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix a(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) a(i, j) = e(i, j);
    return a;
}

/// Eigenvalues of the (real-spectrum) matrix, ascending, from Eigen's
/// general eigensolver.
inline Vector eigen_real_eigenvalues(const Matrix& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
    Vector out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i].real());
    std::sort(out.begin(), out.end());
    return out;
}

inline Vector eigen_symmetric_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a), Eigen::EigenvaluesOnly);
    Vector out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

/// Random parabolic (m, a, b, c): b, c log-uniform in [1/4, 4] and a placed
/// above the threshold by a random factor.
inline ToeplitzDiffusion random_parabolic(std::mt19937_64& rng, int m_lo, int m_hi) {
    std::uniform_int_distribution<int> md(m_lo, m_hi);
    std::uniform_real_distribution<double> lg(std::log(0.25), std::log(4.0)), fac(1.01, 3.0);
    const int m = md(rng);
    const double b = std::exp(lg(rng)), c = std::exp(lg(rng));
    const double a = fac(rng) * (b + c) * std::cos(std::acos(-1.0) / (m + 1));
    return ToeplitzDiffusion::make(m, a, b, c);
}

/// H by explicit nested enumeration of all tuples 0 <= p_1 <= ... <= p_{m-1} <= p_m.
inline double brute_force_H(int m, int p_m, const Vector& theta, const Vector& w) {
    std::vector<int> p(m + 1, 0);
    p[m] = p_m;
    double total = 0.0;
    std::function<void(int)> rec = [&](int j) {
        if (j == 0) {
            double term = 1.0;
            for (int k = 1; k <= m - 1; ++k) {
                double binom = 1.0;
                for (int i = 1; i <= p[k]; ++i) binom = binom * (p[k + 1] - p[k] + i) / i;
                term *= binom * std::pow(theta[k - 1], p[k] * p[k]);
            }
            int prev = 0;
            for (int k = 1; k <= m; ++k) {
                term *= std::pow(w[k - 1], p[k] - prev);
                prev = p[k];
            }
            total += term;
            return;
        }
        for (int v = 0; v <= p[j + 1]; ++v) {
            p[j] = v;
            rec(j - 1);
        }
    };
    rec(m - 1);
    return total;
}

/// Leading principal minors by Eigen's partial-pivot LU on each block.
inline Vector eigen_leading_minors(const Matrix& a) {
    const Eigen::MatrixXd e = to_eigen(a);
    Vector out;
    for (Eigen::Index k = 1; k <= e.rows(); ++k) out.push_back(e.topLeftCorner(k, k).determinant());
    return out;
}

/// m=3, a=2, b=c=1, lotka-chain reaction, homogeneous Neumann data and a
/// nonnegative initial field; certificate parameters from the search.
inline Simulator compliant_simulator(double dt, int n_x = 100, std::vector<double> snapshots = {}) {
    const auto s = closed_form_spectrum(ToeplitzDiffusion::make(3, 2.0, 1.0, 1.0));
    const auto cert = theta_search(s, 2);
    SimParams params;
    params.T = 1.0;
    params.dt = dt;
    params.monitor_interval = 0.01;
    params.snapshot_times = std::move(snapshots);
    return Simulator(s, RegionSpec::all_positive(3), ReactionSpec::lotka_chain(3), BoundarySpec::neumann(3),
                     GridSpec::make(n_x, 1.0), *cert.params, params);
}

inline SimState compliant_initial_state(const Simulator& sim, std::uint64_t seed = 1) {
    RunConfig cfg;
    cfg.matrix = {3, 2.0, 1.0, 1.0};
    cfg.seed = seed;
    return sim.make_state(build_initial_field(cfg, sim.grid()));
}

/// Discrete L2 norm over the grid with trapezoid weights.
inline double l2_norm(const GridSpec& grid, std::span<const double> v) {
    const Vector w = grid.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
    return std::sqrt(s);
}

/// L2 error of the scalar implicit diffusion step against
/// w(x,t) = exp(-lambda pi^2 t) sin(pi x) on (0,1) with Dirichlet ends.
inline double heat_kernel_error(int n_x, double dt, double lambda, double t_end) {
    const double pi = std::acos(-1.0);
    const auto grid = GridSpec::make(n_x, 1.0);
    Vector w(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) w[i] = std::sin(pi * grid.x(i));
    std::vector<double> scratch;
    const ScalarBoundary bc{true, 0.0, 0.0};
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    for (long k = 0; k < steps; ++k) diffuse_implicit(w, lambda, dt, grid, bc, scratch);
    const double t = steps * dt;
    Vector err(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) err[i] = w[i] - std::exp(-lambda * pi * pi * t) * std::sin(pi * grid.x(i));
    return l2_norm(grid, err);
}

}  // namespace tdrd::testing
