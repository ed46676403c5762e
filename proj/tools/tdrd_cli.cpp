// Command-line front end. Exit codes:
//   0 success, 1 not parabolic (spectrum), 2 configuration error,
//   3 capacity exceeded, 4 certificate failed, 5 blow-up detected,
//   6 assumption audit failed, 7 numerical or internal error.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdrd/tdrd.hpp"

namespace {

enum ExitCode {
    kOk = 0,
    kNotParabolic = 1,
    kConfig = 2,
    kCapacity = 3,
    kCertificateFail = 4,
    kBlowUp = 5,
    kAuditFail = 6,
    kInternal = 7,
};

struct Flags {
    std::string config;
    int m = 0;
    double a = 0, b = 0, c = 0;
    int pm = 2;
    std::vector<double> thetas;
    std::vector<int> region;
    std::vector<double> point;
    std::string reaction;
    double alpha = 0;
    int nx = 0;
    double T = 0, dt = 0;
    std::string csv;
    std::uint64_t seed = 0;
    int samples = 0;
    bool allow_failed = false;
    bool print_config = false;
    int count = 100;
};

struct Options {
    CLI::Option *m, *a, *b, *c, *pm, *theta, *region, *point, *reaction, *alpha, *nx, *T, *dt, *csv, *seed,
        *samples;
};

tdrd::RunConfig effective_config(const Flags& f, const Options& o) {
    tdrd::RunConfig cfg = f.config.empty() ? tdrd::RunConfig{} : tdrd::load_config(f.config);
    if (o.m->count()) cfg.matrix.m = f.m;
    if (o.a->count()) cfg.matrix.a = f.a;
    if (o.b->count()) cfg.matrix.b = f.b;
    if (o.c->count()) cfg.matrix.c = f.c;
    if (o.pm->count()) cfg.certificate.p_m = f.pm;
    if (o.theta->count()) cfg.certificate.thetas = f.thetas;
    if (o.region->count()) cfg.region = f.region;
    if (o.point->count()) cfg.point = f.point;
    if (o.reaction->count()) cfg.reaction.kind = f.reaction;
    if (o.alpha->count()) cfg.boundary.alpha = f.alpha;
    if (o.nx->count()) cfg.n_x = f.nx;
    if (o.T->count()) cfg.time.T = f.T;
    if (o.dt->count()) cfg.time.dt = f.dt;
    if (o.csv->count()) cfg.output.csv = f.csv;
    if (o.seed->count()) cfg.seed = f.seed;
    if (o.samples->count()) cfg.audit.samples = f.samples;
    if (f.allow_failed) cfg.allow_failed_certificate = true;
    return cfg;
}

template <typename V>
void print_list(std::ostream& os, const V& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
}

int cmd_spectrum(const tdrd::RunConfig& cfg) {
    const auto d = tdrd::build_diffusion(cfg);
    const auto par = tdrd::check_parabolicity(d);
    const auto s = tdrd::closed_form_spectrum(d);
    const auto oracle = tdrd::oracle_eigen(d);
    std::cout << "m = " << d.m() << "\na = " << d.a() << "\nb = " << d.b() << "\nc = " << d.c() << "\nmu = " << d.mu()
              << "\n";
    std::cout << "l,lambda,oracle_lambda,abs_error,residual\n";
    for (int l = 0; l < s.m; ++l)
        std::cout << l + 1 << ',' << s.lambdas[l] << ',' << oracle.lambdas[l] << ','
                  << std::abs(s.lambdas[l] - oracle.lambdas[l]) << ',' << tdrd::eigenpair_residual(d, s, l) << '\n';
    for (int l = 0; l < s.m; ++l) {
        std::cout << "V_" << l + 1 << " = ";
        print_list(std::cout, s.eigvecs[l]);
        std::cout << '\n';
    }
    std::cout << "ratio = " << par.ratio << "\nthreshold = " << par.threshold << "\nmargin = " << par.margin
              << "\nparabolic = " << (par.parabolic ? "yes" : "no") << '\n';
    return par.parabolic ? kOk : kNotParabolic;
}

int cmd_regions(const tdrd::RunConfig& cfg) {
    const auto d = tdrd::build_diffusion(cfg);
    if (d.m() > 12) throw tdrd::CapacityError("regions: full table limited to m <= 12");
    if (static_cast<int>(cfg.point.size()) != d.m()) throw tdrd::ConfigError("regions: --point needs m values");
    const auto s = tdrd::closed_form_spectrum(d);
    const double eps = tdrd::default_membership_tolerance(s, cfg.point);
    std::cout << "code,region,member,worst,slacks\n";
    for (const auto& r : tdrd::enumerate_regions(d.m())) {
        const auto mem = tdrd::membership(r, s, cfg.point, eps);
        std::cout << r.code() << ",\"" << r.label() << "\"," << (mem.in_region ? "yes" : "no") << ','
                  << mem.worst_index + 1 << ",\"";
        print_list(std::cout, mem.slacks);
        std::cout << "\"\n";
    }
    return kOk;
}

// Resolves the certificate parameters: explicit thetas, or a search.
tdrd::CertificateReport resolve_certificate(const tdrd::RunConfig& cfg, const tdrd::Spectrum& s,
                                            tdrd::CertificateParams& params) {
    if (cfg.certificate.thetas) {
        params = tdrd::CertificateParams::make(s.m, cfg.certificate.p_m, *cfg.certificate.thetas);
        return tdrd::check_certificate(params, s);
    }
    tdrd::ThetaSearchStrategy strat;
    strat.seed = cfg.seed;
    const auto res = tdrd::theta_search(s, cfg.certificate.p_m, strat);
    params = res.params ? *res.params : tdrd::CertificateParams{s.m, cfg.certificate.p_m, res.report.thetas};
    return res.report;
}

int cmd_certify(const tdrd::RunConfig& cfg) {
    const auto s = tdrd::closed_form_spectrum(tdrd::build_diffusion(cfg));
    tdrd::CertificateParams params;
    const auto rep = resolve_certificate(cfg, s, params);
    std::cout << rep.to_text();
    return rep.pass ? kOk : kCertificateFail;
}

int cmd_theta_search(const tdrd::RunConfig& cfg) {
    const auto s = tdrd::closed_form_spectrum(tdrd::build_diffusion(cfg));
    tdrd::ThetaSearchStrategy strat;
    strat.seed = cfg.seed;
    const auto res = tdrd::theta_search(s, cfg.certificate.p_m, strat);
    std::cout << "feasible = " << (res.feasible ? "true" : "false") << "\ndoublings = " << res.doublings
              << "\nbest_margin = " << res.best_margin << '\n';
    std::cout << res.report.to_text();
    return res.feasible ? kOk : kCertificateFail;
}

int cmd_audit(const tdrd::RunConfig& cfg) {
    const auto spec = tdrd::build_reaction(cfg);
    tdrd::AuditOptions opt;
    opt.samples = cfg.audit.samples;
    opt.seed = cfg.seed;
    opt.radii = cfg.audit.radii;
    const auto rep = tdrd::audit_assumptions(spec, opt);
    std::cout << "reaction = " << spec.kind_name() << '\n' << rep.to_text();
    return rep.all_pass() ? kOk : kAuditFail;
}

int cmd_simulate(const tdrd::RunConfig& cfg) {
    const auto d = tdrd::build_diffusion(cfg);
    const auto s = tdrd::closed_form_spectrum(d);
    tdrd::CertificateParams params;
    const auto cert = resolve_certificate(cfg, s, params);
    if (!cert.pass) {
        if (!cfg.allow_failed_certificate) {
            std::cerr << "certificate failed; rerun with --allow-failed-certificate to simulate anyway\n"
                      << cert.to_text();
            return kCertificateFail;
        }
        std::cerr << "warning: simulating with a failed certificate\n";
    }
    const auto grid = tdrd::build_grid(cfg);
    tdrd::Simulator sim(s, tdrd::build_region(cfg), tdrd::build_reaction(cfg), tdrd::build_boundary(cfg), grid,
                        params, cfg.time);
    const auto report = sim.run(sim.make_state(tdrd::build_initial_field(cfg, grid)));

    if (cfg.output.csv.empty()) {
        tdrd::write_csv(std::cout, report.samples, s.m);
    } else {
        std::ofstream out(cfg.output.csv);
        if (!out) throw tdrd::ConfigError("cannot write " + cfg.output.csv);
        tdrd::write_csv(out, report.samples, s.m);
    }
    if (!cfg.output.snapshot_prefix.empty()) {
        for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
            const std::string path = cfg.output.snapshot_prefix + "_" + std::to_string(i) + ".bin";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw tdrd::ConfigError("cannot write " + path);
            tdrd::write_snapshot(out, report.snapshots[i]);
        }
    }
    std::ostream& log = cfg.output.csv.empty() ? std::cerr : std::cout;
    log << std::setprecision(17) << "steps = " << report.steps << "\nmin_w = " << report.min_w
        << "\nmin_slack = " << report.min_slack << "\nmax_Z = " << report.max_Z
        << "\nenvelope_c = " << report.envelope.c_hat << "\nenvelope_k = " << report.envelope.k << '\n';
    if (report.blew_up) {
        log << "blow_up_time = " << report.blowup_time << '\n';
        std::cerr << report.blowup_message << '\n';
        return kBlowUp;
    }
    return kOk;
}

// Self-test of the K/H determinant recursion on random form matrices.
int cmd_verify(const tdrd::RunConfig& cfg, int count) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> theta_dist(0.5, 3.0), lambda_dist(0.5, 5.0);
    double worst = 0.0;
    int failures = 0;
    for (int m = 3; m <= 5; ++m) {
        for (int trial = 0; trial < count; ++trial) {
            tdrd::Spectrum s;
            s.m = m;
            for (int l = 0; l < m; ++l) s.lambdas.push_back(lambda_dist(rng));
            std::sort(s.lambdas.begin(), s.lambdas.end());
            const int p_m = 2 + static_cast<int>(rng() % 3);
            tdrd::Vector th(m - 1);
            for (double& t : th) t = theta_dist(rng);
            std::vector<int> idx(m - 1);
            for (int& p : idx) p = static_cast<int>(rng() % (p_m - 1));
            std::sort(idx.begin(), idx.end());
            const auto fm = tdrd::build_form_matrix(tdrd::CertificateParams::make(m, p_m, th), s, idx);
            const auto rec = tdrd::kh_tables(fm.scaled);
            worst = std::max(worst, rec.max_error);
            if (rec.max_error > 1e-8) ++failures;
        }
    }
    std::cout << "instances = " << 3 * count << "\nmax_relative_error = " << worst << "\nfailures = " << failures
              << '\n';
    return failures == 0 ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tridiagonal reaction-diffusion toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    Options o{};
    app.add_option("--config", f.config, "JSON run configuration");
    o.m = app.add_option("--m", f.m, "number of components");
    o.a = app.add_option("--a", f.a, "diagonal entry");
    o.b = app.add_option("--b", f.b, "super-diagonal entry");
    o.c = app.add_option("--c", f.c, "sub-diagonal entry");
    o.pm = app.add_option("--pm", f.pm, "polynomial degree p_m");
    o.theta = app.add_option("--theta", f.thetas, "theta_1..theta_{m-1}");
    o.region = app.add_option("--region", f.region, "sign vector (+1/-1 per component)");
    o.point = app.add_option("--point", f.point, "point X for region membership");
    o.reaction = app.add_option("--reaction", f.reaction, "lotka-chain | pure-growth | zero | expression");
    o.alpha = app.add_option("--alpha", f.alpha, "boundary alpha in [0, 1]");
    o.nx = app.add_option("--nx", f.nx, "interior grid points");
    o.T = app.add_option("--T", f.T, "time horizon");
    o.dt = app.add_option("--dt", f.dt, "requested time step");
    o.csv = app.add_option("--csv", f.csv, "CSV output path (default stdout)");
    o.seed = app.add_option("--seed", f.seed, "random seed");
    o.samples = app.add_option("--samples", f.samples, "audit samples per radius");
    app.add_flag("--allow-failed-certificate", f.allow_failed, "simulate even if the certificate fails");
    app.add_flag("--print-config", f.print_config, "print the effective configuration and exit");

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, eigenvectors and parabolicity");
    auto* regions = app.add_subcommand("regions", "membership of a point in all 2^m regions");
    auto* certify = app.add_subcommand("certify", "check the Lyapunov certificate");
    auto* search = app.add_subcommand("theta-search", "search for certificate parameters");
    auto* audit = app.add_subcommand("audit", "sample the reaction assumptions");
    auto* simulate = app.add_subcommand("simulate", "integrate the diagonalized system");
    auto* verify = app.add_subcommand("verify", "self-test of the determinant recursion");
    verify->add_option("--count", f.count, "random instances per m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    std::cout << std::setprecision(17);
    try {
        const tdrd::RunConfig cfg = effective_config(f, o);
        if (f.print_config) {
            std::cout << tdrd::serialize_config(cfg);
            return kOk;
        }
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (regions->parsed()) return cmd_regions(cfg);
        if (certify->parsed()) return cmd_certify(cfg);
        if (search->parsed()) return cmd_theta_search(cfg);
        if (audit->parsed()) return cmd_audit(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (verify->parsed()) return cmd_verify(cfg, f.count);
    } catch (const tdrd::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const tdrd::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCapacity;
    } catch (const tdrd::BlowUpError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
