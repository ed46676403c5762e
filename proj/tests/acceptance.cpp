// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli_runner.hpp"
#include "support.hpp"

using namespace tdrd;
using tdrd::testing::run_cli;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel_err(double x, double ref) {
    const double scale = std::max(std::abs(x), std::abs(ref));
    return scale == 0.0 ? 0.0 : std::abs(x - ref) / scale;
}

// Eigenvalues of tridiag(sqrt(bc), a, sqrt(bc)), which is similar to D^T.
Vector similar_symmetric_eigenvalues(const ToeplitzDiffusion& d) {
    Matrix t(d.m(), d.m());
    for (int i = 0; i < d.m(); ++i) {
        t(i, i) = d.a();
        if (i + 1 < d.m()) t(i, i + 1) = t(i + 1, i) = std::sqrt(d.b() * d.c());
    }
    return tdrd::testing::eigen_symmetric_eigenvalues(t);
}

Spectrum random_spectrum(std::mt19937_64& rng, int m) {
    return closed_form_spectrum(tdrd::testing::random_parabolic(rng, m, m));
}

std::vector<int> random_index(std::mt19937_64& rng, int m, int p_m) {
    std::uniform_int_distribution<int> u(0, p_m - 2);
    std::vector<int> idx(m - 1);
    for (int& v : idx) v = u(rng);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Outcome closed_form_spectrum_vs_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst_eig = 0.0, worst_res = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto d = tdrd::testing::random_parabolic(rng, 2, 64);
        const auto s = closed_form_spectrum(d);
        const Vector ref = similar_symmetric_eigenvalues(d);
        const double scale = s.max_abs_lambda();
        for (int l = 0; l < d.m(); ++l) {
            worst_eig = std::max(worst_eig, std::abs(s.lambdas[l] - ref[l]) / scale);
            worst_res = std::max(worst_res, eigenpair_residual(d, s, l));
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << "max eig err/max|lambda| = " << worst_eig << ", max residual = " << worst_res << ", " << secs << " s";
    return {worst_eig <= 1e-10 && worst_res <= 1e-10 && secs < 10.0, os.str()};
}

Outcome parabolicity_equivalence() {
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<int> md(2, 32), coin(0, 1);
    std::uniform_real_distribution<double> u(0.1, 3.0), fac(0.5, 1.5), lg(std::log(1e-9), std::log(1e-6));
    int checked = 0, near = 0, mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = md(rng);
        const double b = u(rng), c = u(rng), thr = std::cos(std::acos(-1.0) / (m + 1));
        double a;
        if (trial % 2 == 0) {
            a = fac(rng) * (b + c) * thr;
        } else {
            const double delta = (coin(rng) ? 1.0 : -1.0) * std::exp(lg(rng));
            a = (b + c) * (thr + delta);
        }
        const auto d = ToeplitzDiffusion::make(m, a, b, c);
        const auto rep = check_parabolicity(d);
        if (rep.margin == 0.0) continue;
        if (std::abs(rep.margin) < 1e-6) ++near;
        const Vector minors = tdrd::testing::eigen_leading_minors(d.symmetric_part());
        const bool pd = std::all_of(minors.begin(), minors.end(), [](double v) { return v > 0.0; });
        ++checked;
        if (pd != rep.parabolic) ++mismatches;
    }
    std::ostringstream os;
    os << checked << " samples (" << near << " with |margin| < 1e-6), " << mismatches << " mismatches";
    return {mismatches == 0 && checked >= 990 && near >= 400, os.str()};
}

Outcome two_component_regions() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    long compared = 0, mismatches = 0;
    for (double mu : {0.25, 1.0, 4.0}) {
        const auto s = closed_form_spectrum(ToeplitzDiffusion::make(2, 10.0, mu, 1.0));
        const double r = std::sqrt(mu);
        const auto regs = enumerate_regions(2).to_vector();
        for (int trial = 0; trial < 10000; ++trial) {
            const double u1 = u(rng), u2 = u(rng);
            const bool expect[4] = {
                u1 >= r * std::abs(u2),
                r * u2 >= std::abs(u1),
                -r * u2 >= std::abs(u1),
                -u1 >= r * std::abs(u2),
            };
            for (int k = 0; k < 4; ++k) {
                const auto rep = membership(regs[k], s, Vector{u1, u2});
                if (std::abs(rep.slacks[rep.worst_index]) <= 1e-10) continue;
                ++compared;
                if (rep.in_region != expect[k]) ++mismatches;
            }
        }
    }
    std::ostringstream os;
    os << compared << " memberships compared, " << mismatches << " mismatches";
    return {mismatches == 0 && compared > 0, os.str()};
}

Outcome kh_identity() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> th(0.5, 2.5);
    std::uniform_int_distribution<int> pm(2, 6);
    double worst = 0.0;
    for (int m = 3; m <= 5; ++m)
        for (int trial = 0; trial < 100; ++trial) {
            const int p_m = pm(rng);
            Vector theta(m - 1);
            for (double& v : theta) v = th(rng);
            const auto s = random_spectrum(rng, m);
            const auto fm = build_form_matrix(CertificateParams::make(m, p_m, theta), s, random_index(rng, m, p_m));
            const auto rec = kh_tables(fm.scaled);
            const Vector det = tdrd::testing::eigen_leading_minors(fm.scaled);
            double rhs = det[m - 1];
            for (int k = 1; k <= m - 2; ++k) rhs *= std::pow(det[k - 1], std::ldexp(1.0, m - k - 2));
            worst = std::max(worst, rel_err(rec.K(m, m), rhs));
        }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << "300 instances, max relative gap = " << worst << ", " << secs << " s";
    return {worst <= 1e-8 && secs < 5.0, os.str()};
}

Outcome certificate_soundness() {
    std::mt19937_64 rng(105);
    std::uniform_int_distribution<int> md(2, 4), pm(2, 5);
    std::uniform_real_distribution<double> th(1.0, 4.0);
    int passing = 0, attempts = 0, forms = 0, indefinite = 0;
    while (passing < 100 && attempts < 10000) {
        ++attempts;
        const int m = md(rng), p_m = pm(rng);
        Vector theta(m - 1);
        for (double& v : theta) v = th(rng);
        const auto s = random_spectrum(rng, m);
        const auto params = CertificateParams::make(m, p_m, theta);
        if (!check_certificate(params, s).pass) continue;
        ++passing;
        for_each_multi_index(m, p_m - 2, [&](std::span<const int> idx) {
            ++forms;
            const auto fm = build_form_matrix(params, s, idx);
            if (!(tdrd::testing::eigen_symmetric_eigenvalues(fm.scaled).front() > 0.0)) ++indefinite;
            return true;
        });
    }

    // lambda = (2, 4): the scaled 2x2 minor is 1 - 9 / (8 theta^2) for every index.
    const auto s24 = closed_form_spectrum(ToeplitzDiffusion::make(2, 3.0, 1.0, 1.0));
    const double threshold = 3.0 / (2.0 * std::sqrt(2.0));
    std::uniform_real_distribution<double> below(0.3, threshold * (1.0 - 1e-6));
    int bad_witness = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double theta = below(rng);
        const auto rep = check_certificate(CertificateParams::make(2, pm(rng), {theta}), s24);
        const double expected = 1.0 - 9.0 / (8.0 * theta * theta);
        const bool ok = !rep.pass && rep.witness && rep.witness->minor == 2 &&
                        rep.witness->index == std::vector<int>{0} &&
                        std::abs(rep.witness->value - expected) <= 1e-12 * std::max(1.0, std::abs(expected));
        if (!ok) ++bad_witness;
    }
    std::ostringstream os;
    os << passing << " passing configs (" << forms << " form matrices, " << indefinite
       << " not positive definite); 100 failing configs, " << bad_witness << " with wrong verdict or witness";
    return {passing == 100 && indefinite == 0 && bad_witness == 0, os.str()};
}

// Central differences of a polynomial of degree <= 6 carry error terms in
// t^2 and t^4 only; two Richardson levels remove them, which allows a large
// relative step and keeps cancellation small when H dwarfs the derivative.
double extrapolated_difference(const std::function<double(double)>& diff, double t0 = 0.4) {
    const double d0 = diff(t0), d1 = diff(t0 / 2), d2 = diff(t0 / 4);
    const double r0 = (4.0 * d1 - d0) / 3.0, r1 = (4.0 * d2 - d1) / 3.0;
    return (16.0 * r1 - r0) / 15.0;
}

Outcome h_polynomial_calculus() {
    std::mt19937_64 rng(106);
    std::uniform_int_distribution<int> md(2, 5), pm(2, 6);
    std::uniform_real_distribution<double> th(0.5, 2.0), wd(0.1, 2.0);
    double worst_grad = 0.0, worst_hess = 0.0, worst_euler = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = md(rng), p_m = pm(rng);
        Vector theta(m - 1), w(m);
        for (double& v : theta) v = th(rng);
        for (double& v : w) v = wd(rng);
        const auto p = CertificateParams::make(m, p_m, theta);
        const Vector g = eval_H_gradient(p, w);
        const Matrix h = eval_H_hessian(p, w);
        auto H_at = [&](int l, double dl, int k, double dk) {
            Vector x = w;
            x[l] += dl;
            x[k] += dk;
            return eval_H(p, x);
        };
        for (int l = 0; l < m; ++l) {
            const double fd = extrapolated_difference([&](double t) {
                const double step = t * w[l];
                return (H_at(l, step, l, 0.0) - H_at(l, -step, l, 0.0)) / (2 * step);
            });
            worst_grad = std::max(worst_grad, rel_err(g[l], fd));
            // second derivatives from differences of the gradient checked above
            for (int k = 0; k < m; ++k) {
                const double fd2 = extrapolated_difference([&](double t) {
                    const double step = t * w[l];
                    Vector a = w, b = w;
                    a[l] += step;
                    b[l] -= step;
                    return (eval_H_gradient(p, a)[k] - eval_H_gradient(p, b)[k]) / (2 * step);
                });
                worst_hess = std::max(worst_hess, rel_err(h(l, k), fd2));
            }
        }
        worst_euler = std::max(worst_euler, rel_err(dot(w, g), p_m * eval_H(p, w)));
    }
    std::ostringstream os;
    os << "gradient rel err = " << worst_grad << ", Hessian rel err = " << worst_hess
       << ", Euler identity rel err = " << worst_euler;
    return {worst_grad <= 1e-5 && worst_hess <= 1e-5 && worst_euler <= 1e-10, os.str()};
}

Outcome simulator_verification() {
    std::ostringstream os;
    bool ok = true;

    // (a) scalar heat kernel
    const double err = tdrd::testing::heat_kernel_error(200, 1e-4, 1.0, 0.1);
    const double e1 = tdrd::testing::heat_kernel_error(19, 0.5 * 0.05 * 0.05, 1.0, 0.1);
    const double e2 = tdrd::testing::heat_kernel_error(39, 0.5 * 0.025 * 0.025, 1.0, 0.1);
    const double e3 = tdrd::testing::heat_kernel_error(79, 0.5 * 0.0125 * 0.0125, 1.0, 0.1);
    const double r1 = e1 / e2, r2 = e2 / e3;
    const bool a_ok = err <= 1e-3 && r1 >= 3.4 && r1 <= 4.6 && r2 >= 3.4 && r2 <= 4.6;
    os << "(a) " << (a_ok ? "ok" : "FAILED") << ": L2 err = " << err << ", refinement ratios = " << r1 << ", " << r2;
    ok = ok && a_ok;

    // (b) compliant m=3 scenario and its refinement
    const auto t0 = Clock::now();
    const auto coarse = tdrd::testing::compliant_simulator(1e-3, 100);
    const auto fine = tdrd::testing::compliant_simulator(5e-4, 200);
    const auto a = coarse.run(tdrd::testing::compliant_initial_state(coarse));
    const auto b = fine.run(tdrd::testing::compliant_initial_state(fine));
    const double secs = seconds_since(t0);
    double max_L = 0.0;
    bool bounded = !a.blew_up && !b.blew_up;
    for (const auto& s : a.samples) {
        max_L = std::max(max_L, s.L);
        bounded = bounded && std::isfinite(s.L) &&
                  s.Z <= a.samples.front().Z * std::exp(a.envelope.c_hat * s.t) + a.envelope.k + 1e-12;
    }
    const bool stable = std::abs(a.envelope.c_hat - b.envelope.c_hat) <= 0.05 * std::max(a.envelope.c_hat, 1e-3) &&
                        std::abs(a.max_Z - b.max_Z) <= 0.01 * a.max_Z;
    const double min_slack = std::min(a.min_slack, b.min_slack);
    const bool b_ok = bounded && stable && min_slack >= -1e-8 && secs < 60.0;
    os << "; (b) " << (b_ok ? "ok" : "FAILED") << ": min slack = " << min_slack << ", max L = " << max_L
       << ", c_hat = " << a.envelope.c_hat << " vs " << b.envelope.c_hat << ", max Z = " << a.max_Z << " vs "
       << b.max_Z << ", " << secs << " s";
    ok = ok && b_ok;

    // (c) superlinear growth
    SimParams p;
    p.T = 2.0;
    p.dt = 1e-3;
    p.monitor_interval = 0.1;
    const auto s = closed_form_spectrum(ToeplitzDiffusion::make(2, 3.0, 1.0, 1.0));
    Simulator growth(s, RegionSpec::all_positive(2), ReactionSpec::pure_growth(2), BoundarySpec::neumann(2),
                     GridSpec::make(20, 1.0), CertificateParams::make(2, 2, {2.0}), p);
    std::vector<Vector> ones(2, Vector(growth.grid().nodes(), 1.0));
    const auto g = growth.run(growth.make_state(ones));
    const bool c_ok = g.blew_up && g.blowup_time < 2.0;
    os << "; (c) " << (c_ok ? "ok" : "FAILED") << ": blow-up " << (g.blew_up ? "at t = " : "not signalled")
       << (g.blew_up ? std::to_string(g.blowup_time) : "");
    ok = ok && c_ok;
    return {ok, os.str()};
}

Outcome i2_sign_check() {
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(0.1 * k);
    const auto sim = tdrd::testing::compliant_simulator(1e-3, 100, times);
    const bool cert_ok = check_certificate(sim.certificate(), sim.spectrum()).pass;
    const auto rep = sim.run(tdrd::testing::compliant_initial_state(sim));
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& snap : rep.snapshots) worst = std::min(worst, sim.verify_I2_sign(snap).min_relative_eigenvalue);
    std::ostringstream os;
    os << rep.snapshots.size() << " snapshots, certificate " << (cert_ok ? "passes" : "fails")
       << ", min eigenvalue / ||M|| = " << worst;
    return {cert_ok && rep.snapshots.size() == 10 && worst >= -1e-10, os.str()};
}

Outcome cli_contract() {
    const auto dir = std::filesystem::temp_directory_path() / ("tdrd_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "run.json";
    {
        std::ofstream out(cfg);
        out << R"({"matrix": {"m": 3, "a": 2, "b": 1, "c": 1}, "grid": {"n_x": 50},
                   "time": {"T": 0.5, "dt": 1e-3, "monitor_interval": 0.01}, "seed": 7})";
    }
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto a = dir / "a.csv", b = dir / "b.csv";
    const int ra = run_cli("simulate --config " + cfg.string() + " --csv " + a.string()).code;
    const int rb = run_cli("simulate --config " + cfg.string() + " --csv " + b.string()).code;
    const std::string ca = slurp(a), cb = slurp(b);
    const bool identical = ra == 0 && rb == 0 && !ca.empty() && ca == cb;
    std::filesystem::remove_all(dir);

    struct Case {
        const char* args;
        int expected;
    };
    const Case cases[] = {
        {"spectrum --m 2 --a 3 --b 1 --c 1", 0},
        {"spectrum --m 2 --a 1 --b 1 --c 1", 1},
        {"spectrum --m 2 --a 3 --b -1 --c 1", 2},
        {"spectrum --config /nonexistent/run.json", 2},
        {"regions --m 13 --a 3 --b 1 --c 1 --point 1", 3},
        {"certify --m 10 --a 3 --b 1 --c 1 --pm 40 --theta 2 2 2 2 2 2 2 2 2", 3},
        {"certify --m 2 --a 3 --b 1 --c 1 --pm 2 --theta 1.0", 4},
        {"simulate --m 2 --a 3 --b 1 --c 1 --reaction pure-growth --T 2 --nx 10", 5},
        {"audit --m 3 --a 2 --b 1 --c 1 --samples 200 --reaction pure-growth", 6},
    };
    std::ostringstream os;
    os << "CSV " << (identical ? "byte-identical" : "DIFFERS") << " (" << ca.size() << " bytes)";
    bool codes_ok = true;
    for (const auto& c : cases) {
        const int got = run_cli(c.args).code;
        if (got != c.expected) {
            codes_ok = false;
            os << "; '" << c.args << "' exited " << got << ", expected " << c.expected;
        }
    }
    if (codes_ok) os << "; exit codes 0-6 as documented";
    return {identical && codes_ok, os.str()};
}

}  // namespace

int main() {
    std::cout.precision(3);
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"closed-form spectrum vs eigen oracle", closed_form_spectrum_vs_oracle},
        {"parabolicity equivalence", parabolicity_equivalence},
        {"m=2 region fidelity", two_component_regions},
        {"K/H determinant identity", kh_identity},
        {"certificate soundness", certificate_soundness},
        {"H-polynomial calculus", h_polynomial_calculus},
        {"simulator verification", simulator_verification},
        {"I2 sign check", i2_sign_check},
        {"CLI determinism and exit codes", cli_contract},
    };
    int failed = 0, n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << n << "] " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
