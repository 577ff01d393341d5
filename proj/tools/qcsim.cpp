#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qc/config.hpp"
#include "qc/csv.hpp"
#include "qc/errors.hpp"
#include "qc/metrics.hpp"
#include "qc/model.hpp"
#include "qc/network.hpp"
#include "qc/processes.hpp"
#include "qc/runners.hpp"
#include "qc/svg.hpp"

namespace fs = std::filesystem;
using namespace qc;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    bool threads_set = false;
};

NetworkConfig make_config(const GlobalArgs& args) {
    NetworkConfig cfg;
    if (!args.config_path.empty())
        cfg = load_config(args.config_path);
    if (args.seed_set)
        cfg.seed = args.seed;
    if (args.threads_set)
        cfg.threads = args.threads;
    cfg.validate();
    return cfg;
}

std::string out_path(const GlobalArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

int cmd_sweep(const GlobalArgs& args) {
    const NetworkConfig cfg = make_config(args);
    const auto points = run_sweep(cfg);
    write_csv(sweep_table(points), out_path(args, "sweep.csv"));
    write_svg(sweep_plot(points), out_path(args, "sweep.svg"));
    write_config_echo(cfg, out_path(args, "config.echo"));
    std::cout << "sweep: " << points.size() << " (N, ||C||) cells x "
              << cfg.realizations << " realizations -> " << args.out_dir
              << "/sweep.csv, sweep.svg\n";
    return 0;
}

int cmd_raster(const GlobalArgs& args, double coupling_norm, bool norm_set) {
    const NetworkConfig cfg = make_config(args);
    const double norm = norm_set ? coupling_norm : cfg.coupling_norm;
    const RasterArtifact artifact = run_raster(cfg, norm);
    write_csv(raster_table(artifact), out_path(args, "raster.csv"));
    write_csv(raster_metrics_table(artifact), out_path(args, "metrics.csv"));
    write_csv(raster_oscillator_table(artifact), out_path(args, "oscillators.csv"));
    NetworkConfig echo = cfg;
    echo.coupling_norm = norm;
    write_config_echo(echo, out_path(args, "config.echo"));
    std::cout << "raster: N = " << artifact.n << ", ||C|| = " << norm
              << ", post-burn-in mean rho = " << artifact.rho_bar << " -> "
              << args.out_dir << "/raster.csv, metrics.csv, oscillators.csv\n";
    return 0;
}

int cmd_snapshots(const GlobalArgs& args, double coupling_norm, bool norm_set) {
    const NetworkConfig cfg = make_config(args);
    const double norm = norm_set ? coupling_norm : cfg.coupling_norm;
    std::vector<double> times = cfg.snapshot_times;
    if (times.empty())
        times = default_snapshot_times(cfg.dt * static_cast<double>(cfg.n_steps));
    const SnapshotTable snapshots = run_phase_snapshots(cfg, norm, times);
    write_csv(snapshot_csv_table(snapshots), out_path(args, "snapshots.csv"));
    NetworkConfig echo = cfg;
    echo.coupling_norm = norm;
    echo.snapshot_times = times;
    write_config_echo(echo, out_path(args, "config.echo"));
    std::cout << "snapshots: " << times.size() << " windows -> " << args.out_dir
              << "/snapshots.csv\n";
    return 0;
}

// One oscillator at the configured mean frequency: full E-I path, the
// rotation/OU reconstruction, and the polar amplitude/phase pair.
int cmd_single(const GlobalArgs& args) {
    const NetworkConfig cfg = make_config(args);
    const double s_ii = solve_sii_for_frequency(cfg.omega_mean);
    const EIParams params = fixed_point_params(s_ii);
    const DerivedParams derived = derive_all(params);
    const TimeGrid grid{cfg.dt, cfg.n_steps, 0.0};

    enum : std::uint64_t { kFullE = 100, kFullI, kOu1, kOu2, kPolarB, kPolarW, kInit };
    RngStream full_e(cfg.seed, kFullE), full_i(cfg.seed, kFullI);
    RngStream ou1(cfg.seed, kOu1), ou2(cfg.seed, kOu2);
    RngStream polar_b(cfg.seed, kPolarB), polar_w(cfg.seed, kPolarW);
    RngStream init(cfg.seed, kInit);

    const Path full = simulate_full_model(params, grid, full_e, full_i);

    // OU path on the scaled clock, started from a stationary draw.
    const TimeGrid scaled{derived.lambda * grid.dt, grid.n_steps, 0.0};
    const Vec2 s0{std::sqrt(0.5) * init.normal(), std::sqrt(0.5) * init.normal()};
    const Path ou = simulate_ou2d(scaled, ou1, ou2, s0);
    const Path vstar = reconstruct_vstar(ou, derived, grid);

    PolarOptions polar_opts;
    polar_opts.amplitude_rescale = cfg.amplitude_rescale;
    polar_opts.epsilon_floor = cfg.epsilon_floor;
    polar_opts.lambda_scaled_drift =
        cfg.drift_time_scaling == DriftTimeScaling::lambda_scaled;
    const double z0 = 1.0 - init.uniform();
    const double phi0 = std::numbers::pi - 2.0 * std::numbers::pi * init.uniform();
    const Path polar = simulate_polar(derived, grid, polar_b, polar_w, z0, phi0, polar_opts);

    Table table;
    table.header = {"t", "v_e", "v_i", "vstar_e", "vstar_i", "z", "phi", "theta"};
    for (std::size_t k = 0; k < full.size(); ++k)
        table.add_row({full.t[k], full.cols[0][k], full.cols[1][k], vstar.cols[0][k],
                       vstar.cols[1][k], polar.cols[0][k], polar.cols[1][k],
                       polar.cols[2][k]});
    write_csv(table, out_path(args, "single.csv"));

    LinePlot plot;
    plot.title = "Single oscillator sample paths";
    plot.x_label = "time [s]";
    plot.y_label = "V_E [mV]";
    plot.markers = false;
    plot.series.push_back({"full model", full.t, full.cols[0]});
    plot.series.push_back({"rotation/OU approximation", vstar.t, vstar.cols[0]});
    write_svg(plot, out_path(args, "single.svg"));
    write_config_echo(cfg, out_path(args, "config.echo"));

    std::cout << "single: lambda = " << derived.lambda << " 1/s, omega_d = "
              << derived.omega_d << " rad/s (" << derived.omega_d / (2.0 * std::numbers::pi)
              << " Hz), sigma = " << derived.sigma << " mV, ||Q|| = " << derived.q_norm
              << "\n";
    if (full.size() >= 256) {
        const auto spec_full = power_spectrum(full.cols[0], grid.dt);
        const auto spec_vstar = power_spectrum(vstar.cols[0], grid.dt);
        std::cout << "single: spectral peaks, full model " << spec_full.peak_frequency()
                  << " Hz, approximation " << spec_vstar.peak_frequency() << " Hz\n";
    }
    std::cout << "single: wrote " << args.out_dir << "/single.csv, single.svg\n";
    return 0;
}

bool report(const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    return ok;
}

// Fast self-contained invariant checks (a subset of the full test suite).
int cmd_validate(const GlobalArgs& args) {
    const NetworkConfig cfg = make_config(args);
    bool all = true;

    {
        const DerivedParams d = derive_all(fixed_point_params(0.1));
        all &= report("table parameters: lambda within 1e-3 of 8.333",
                      std::fabs(d.lambda - 8.333) < 1e-3);
        all &= report("table parameters: omega_d within 0.01 of 437.72",
                      std::fabs(d.omega_d - 437.72) < 0.01);
        all &= report("table parameters: sigma within 0.01 of 6.85",
                      std::fabs(d.sigma - 6.85) < 0.01);
        all &= report("table parameters: ||Q|| within 0.5 of 703.5",
                      std::fabs(d.q_norm - 703.5) < 0.5);
    }
    {
        RngStream gen(cfg.seed, 9001);
        bool ok = true;
        for (int i = 0; i < 200 && ok; ++i) {
            EIParams p = fixed_point_params(0.0);
            p.s_ee = 2.0 * gen.uniform();
            p.s_ei = 0.5 + 4.0 * gen.uniform();
            p.s_ie = 0.5 + 4.0 * gen.uniform();
            p.s_ii = gen.uniform();
            p.tau_e = 0.001 + 0.009 * gen.uniform();
            p.tau_i = 0.001 + 0.009 * gen.uniform();
            double lambda = 0.0, omega = 0.0;
            try {
                lambda = derive_damping(p);
                omega = derive_frequency(p);
            } catch (const NotOscillatory&) {
                continue;
            }
            if (!is_quasi_cycle(lambda, omega, 0.5))
                continue;
            const Mat2 q = canonical_transform(p);
            const Mat2 target{-lambda, omega, -omega, -lambda};
            const Mat2 residual = q.inverse() * minus_drift_matrix(p) * q - target;
            ok = residual.max_abs() < 1e-9;
        }
        all &= report("canonical identity on random admissible parameters", ok);
    }
    {
        bool ok = true;
        for (double w = 434.72; w <= 440.72; w += 0.5) {
            const double s_ii = solve_sii_for_frequency(w);
            const double back = derive_frequency(fixed_point_params(s_ii));
            ok = ok && std::fabs(back - w) < 1e-6 * w;
        }
        all &= report("frequency -> S_II round trip within 1e-6 relative", ok);
    }
    {
        RngStream a(cfg.seed, 7), b(cfg.seed, 7);
        bool ok = true;
        for (int i = 0; i < 1000; ++i)
            ok = ok && a.normal() == b.normal();
        all &= report("identical stream replays identical draws", ok);
    }
    {
        const std::vector<double> theta{0.4, -1.3, 2.9, 0.4};
        const auto [rho1, psi1] = pli(theta);
        std::vector<double> shifted = theta;
        for (double& th : shifted)
            th += 2.0 * std::numbers::pi * 3.0;
        const auto [rho2, psi2] = pli(shifted);
        all &= report("PLI invariant under 2*pi wraps",
                      std::fabs(rho1 - rho2) < 1e-12 && std::fabs(psi1 - psi2) < 1e-9);
    }
    {
        // N=1 network must reproduce the single-oscillator path bit for bit.
        const std::vector<double> omega{437.72};
        const std::vector<double> z0{0.8}, theta0{0.3};
        NetworkState state = make_network_state(omega, z0, theta0);
        std::vector<RngStream> ps{phase_noise_stream(cfg.seed, 0)};
        std::vector<RngStream> as{amplitude_noise_stream(cfg.seed, 0)};
        const CouplingSpec coupling = CouplingSpec::all_to_all(0.0, 1);
        const TimeGrid grid{5e-5, 200, 0.0};
        for (std::size_t k = 0; k < grid.n_steps; ++k)
            step_network(state, coupling, grid.dt, ps, as, {});
        DerivedParams d;
        d.omega_d = omega[0];
        d.lambda = state.lam[0];
        d.sigma = state.sig[0];
        d.q_norm = state.qnorm[0];
        RngStream b2 = phase_noise_stream(cfg.seed, 0);
        RngStream w2 = amplitude_noise_stream(cfg.seed, 0);
        const Path path = simulate_polar(d, grid, b2, w2, z0[0], theta0[0]);
        all &= report("zero coupling factorizes to the single-oscillator path",
                      path.cols[0].back() == state.z[0] &&
                          path.cols[2].back() == state.theta[0]);
    }
    {
        Table t;
        t.header = {"a", "b"};
        t.add_row({1.0 / 3.0, 2.0e4});
        all &= report("CSV rendering is deterministic", to_csv(t) == to_csv(t));
    }

    std::cout << (all ? "validate: all checks passed\n" : "validate: FAILURES\n");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-cycle oscillator network simulator"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalArgs args;
    app.add_option("--config", args.config_path, "configuration file (key = value lines)");
    app.add_option("--out", args.out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", args.seed, "master seed override");
    auto* threads_opt = app.add_option("--threads", args.threads, "worker thread count");

    auto* sweep = app.add_subcommand("sweep", "coupling sweep: mean PLI vs ||C|| per N");
    auto* raster = app.add_subcommand("raster", "synchronous-group raster at one ||C||");
    auto* snapshots = app.add_subcommand("snapshots", "phase histograms at chosen times");
    auto* single = app.add_subcommand("single", "one-oscillator sample paths");
    auto* validate = app.add_subcommand("validate", "run built-in invariant checks");

    double raster_norm = 0.0, snapshot_norm = 0.0;
    auto* raster_norm_opt =
        raster->add_option("--coupling-norm", raster_norm, "target ||C||");
    auto* snapshot_norm_opt =
        snapshots->add_option("--coupling-norm", snapshot_norm, "target ||C||");

    CLI11_PARSE(app, argc, argv);
    args.seed_set = seed_opt->count() > 0;
    args.threads_set = threads_opt->count() > 0;

    try {
        if (sweep->parsed())
            return cmd_sweep(args);
        if (raster->parsed())
            return cmd_raster(args, raster_norm, raster_norm_opt->count() > 0);
        if (snapshots->parsed())
            return cmd_snapshots(args, snapshot_norm, snapshot_norm_opt->count() > 0);
        if (single->parsed())
            return cmd_single(args);
        if (validate->parsed())
            return cmd_validate(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
