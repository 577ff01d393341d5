#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qc/config.hpp"
#include "qc/csv.hpp"
#include "qc/runners.hpp"
#include "qc/svg.hpp"
#include "testutil.hpp"

using namespace qc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "qc_harness_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

NetworkConfig tiny_sweep_config() {
    NetworkConfig cfg;
    cfg.sweep_n_values = {2};
    cfg.coupling_norm_values = {0.0, 50.0};
    cfg.realizations = 2;
    cfg.n_steps = 1500;
    cfg.burn_in = 500;
    cfg.seed = 9;
    return cfg;
}

} // namespace

TEST_CASE("config files: defaults, comments, overrides, rejection of junk") {
    const fs::path path = temp_dir() / "a.cfg";
    std::ofstream(path) << "# comment line\n"
                           "n = 12\n"
                           "dt = 1e-4   # trailing comment\n"
                           "seed = 77\n"
                           "ratio_factor = false\n"
                           "amplitude_variant = ratio\n"
                           "coupling_norm_values = 0, 10, 100\n"
                           "\n";
    const NetworkConfig cfg = load_config(path.string());
    CHECK(cfg.n == 12);
    CHECK(cfg.dt == 1e-4);
    CHECK(cfg.seed == 77);
    CHECK_FALSE(cfg.coupling.phase_amplitude_ratio_factor);
    CHECK(cfg.coupling.amplitude_variant == AmplitudeVariant::ratio);
    CHECK(cfg.coupling_norm_values == std::vector<double>{0.0, 10.0, 100.0});
    CHECK(cfg.n_steps == 10000); // untouched default

    std::ofstream(path) << "frobnicate = 3\n";
    CHECK_THROWS_AS(load_config(path.string()), std::invalid_argument);
    std::ofstream(path) << "dt = banana\n";
    CHECK_THROWS_AS(load_config(path.string()), std::invalid_argument);
    std::ofstream(path) << "dt 1e-4\n";
    CHECK_THROWS_AS(load_config(path.string()), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/nowhere.cfg"), std::runtime_error);
}

TEST_CASE("config echo round-trips bit for bit") {
    NetworkConfig cfg;
    cfg.n = 34;
    cfg.dt = 1.0 / 3.0;
    cfg.n_steps = 500;
    cfg.burn_in = 100;
    cfg.omega_sd = 0.7071067811865476;
    cfg.coupling.amplitude_variant = AmplitudeVariant::cosine_factor;
    cfg.drift_time_scaling = DriftTimeScaling::lambda_scaled;
    cfg.snapshot_times = {0.001, 0.002};

    const fs::path path = temp_dir() / "echo.cfg";
    write_config_echo(cfg, path.string());
    const NetworkConfig loaded = load_config(path.string());
    CHECK(config_echo(loaded) == config_echo(cfg));
    CHECK(loaded.dt == cfg.dt);
    CHECK(loaded.omega_sd == cfg.omega_sd);
    CHECK(loaded.drift_time_scaling == DriftTimeScaling::lambda_scaled);
}

TEST_CASE("CSV writing: header-only tables, width checks, path context on error") {
    Table table;
    table.header = {"a", "b", "c"};
    CHECK(to_csv(table) == "a,b,c\n");

    table.add_row({1.0, 0.5, 2e4});
    const std::string text = to_csv(table);
    CHECK(text == "a,b,c\n1,0.5,20000\n");

    CHECK_THROWS_AS(table.add_row({1.0}), std::invalid_argument);

    bool mentioned_path = false;
    try {
        write_csv(table, "/nonexistent-dir/out.csv");
    } catch (const std::runtime_error& e) {
        mentioned_path = std::string(e.what()).find("/nonexistent-dir/out.csv") !=
                         std::string::npos;
    }
    CHECK(mentioned_path);
}

TEST_CASE("17-digit float formatting survives a round trip") {
    for (double v : {1.0 / 3.0, 5e-5, 437.71820192665625, 0.0, -1.75e-300}) {
        const std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("sweep SVG: one polyline per N, byte-deterministic") {
    std::vector<SweepPoint> points;
    for (std::size_t n : {2u, 10u, 66u, 100u}) {
        for (int c = 0; c < 12; ++c) {
            SweepPoint p;
            p.n = n;
            p.coupling_norm = std::pow(10.0, c / 3.0);
            p.mean_rho_bar = 1.0 - 1.0 / (1.0 + p.coupling_norm / (5.0 * n));
            p.sd_rho_bar = 0.01;
            points.push_back(p);
        }
    }
    const LinePlot plot = sweep_plot(points);
    const std::string svg = render_svg(plot);
    std::size_t count = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++count;
    CHECK(count == 4);
    CHECK(render_svg(plot) == svg);
    CHECK(svg.find("N = 100") != std::string::npos);
}

TEST_CASE("default coupling grid: zero plus 12 log-spaced values") {
    const auto norms = default_coupling_norms();
    REQUIRE(norms.size() == 13);
    CHECK(norms.front() == 0.0);
    CHECK(within(norms[1], 1.0, 1e-12));
    CHECK(within_rel(norms.back(), 2.0e4, 1e-12));
    for (std::size_t i = 1; i < norms.size(); ++i)
        CHECK(norms[i] > norms[i - 1]);
}

TEST_CASE("tiny sweep: shape, determinism, CSV stability") {
    const NetworkConfig cfg = tiny_sweep_config();
    const auto points = run_sweep(cfg);
    REQUIRE(points.size() == 2);
    CHECK(points[0].n == 2);
    CHECK(points[0].coupling_norm == 0.0);
    CHECK(points[0].rho_bars.size() == 2);
    CHECK(points[1].coupling_norm == 50.0);

    const auto again = run_sweep(cfg);
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(points[i].mean_rho_bar == again[i].mean_rho_bar);
        CHECK(points[i].sd_rho_bar == again[i].sd_rho_bar);
    }
    CHECK(to_csv(sweep_table(points)) == to_csv(sweep_table(again)));
}

TEST_CASE("sweep respects the thread knob without changing results") {
    NetworkConfig cfg = tiny_sweep_config();
    cfg.threads = 1;
    const auto sequential = run_sweep(cfg);
    cfg.threads = 4;
    const auto parallel = run_sweep(cfg);
    REQUIRE(sequential.size() == parallel.size());
    for (std::size_t i = 0; i < sequential.size(); ++i)
        CHECK(sequential[i].mean_rho_bar == parallel[i].mean_rho_bar);
}

TEST_CASE("raster artifact: sorted frequencies, class labels, table shapes") {
    NetworkConfig cfg;
    cfg.n = 20;
    cfg.n_steps = 300;
    cfg.burn_in = 100;
    cfg.seed = 21;
    const RasterArtifact artifact = run_raster(cfg, 500.0);

    REQUIRE(artifact.n == 20);
    for (std::size_t s = 1; s < artifact.n; ++s)
        CHECK(artifact.omega[s] >= artifact.omega[s - 1]);
    for (int c : artifact.freq_class) {
        CHECK(c >= 0);
        CHECK(c <= 2);
    }

    const Table raster = raster_table(artifact);
    CHECK(raster.header.size() == artifact.n + 1);
    CHECK(raster.rows.size() == artifact.frame_count());

    const Table metrics = raster_metrics_table(artifact);
    CHECK(metrics.rows.size() == artifact.frame_count());
    CHECK(metrics.header.size() == 11 + kPhaseBins);

    const Table osc = raster_oscillator_table(artifact);
    CHECK(osc.rows.size() == artifact.n);

    // Membership row sums match the recorded group sizes.
    for (std::size_t f = 0; f < artifact.frame_count(); ++f) {
        int sum = 0;
        for (std::size_t s = 0; s < artifact.n; ++s)
            sum += artifact.member(f, s) ? 1 : 0;
        CHECK(sum == static_cast<int>(artifact.frames[f].sync_group.size()));
    }
}

TEST_CASE("snapshots: zero-width window picks a single frame") {
    NetworkConfig cfg;
    cfg.n = 15;
    cfg.n_steps = 400;
    cfg.burn_in = 100;
    cfg.seed = 22;
    cfg.snapshot_window = 0.0;
    const double t_snap = 200 * cfg.dt;
    const std::vector<double> times{t_snap};
    const SnapshotTable snaps = run_phase_snapshots(cfg, 200.0, times);
    REQUIRE(snaps.times.size() == 1);

    RunOptions opts;
    opts.record_frames = true;
    NetworkConfig run_cfg = cfg;
    run_cfg.coupling_norm = 200.0;
    const RealizationResult result = run_realization(run_cfg, opts);
    const auto& frame = result.frames[200];
    for (int b = 0; b < kPhaseBins; ++b)
        CHECK(snaps.bins[0][static_cast<std::size_t>(b)] ==
              static_cast<double>(frame.bin_counts[static_cast<std::size_t>(b)]));

    CHECK_THROWS_AS(run_phase_snapshots(cfg, 200.0, std::vector<double>{1e9}),
                    std::invalid_argument);
}

TEST_CASE("snapshot progression from near-uniform to a dominant peak") {
    NetworkConfig cfg;
    cfg.n = 100;
    cfg.n_steps = 10000;
    cfg.burn_in = 5000;
    cfg.seed = 707;
    const std::vector<double> times{0.005, 0.45};

    // Strong coupling: the earliest window is still near-uniform.
    const SnapshotTable strong = run_phase_snapshots(cfg, 4950.0, times);
    const auto& early = strong.bins[0];
    const double early_max = *std::max_element(early.begin(), early.end());
    const double early_min = *std::min_element(early.begin(), early.end());
    CHECK(early_min > 0.0);
    CHECK(early_max / early_min < 4.0);

    // Late in the run a single group dominates; at the very strong coupling
    // the peak bin holds the majority of the population.
    const auto& late_strong = strong.bins[1];
    CHECK(*std::max_element(late_strong.begin(), late_strong.end()) > 25.0);

    const SnapshotTable very_strong = run_phase_snapshots(cfg, 20000.0, times);
    const auto& late = very_strong.bins[1];
    CHECK(*std::max_element(late.begin(), late.end()) >= 50.0);
}

TEST_CASE("re-running from the echoed config reproduces the outputs") {
    const NetworkConfig cfg = tiny_sweep_config();
    const std::string csv = to_csv(sweep_table(run_sweep(cfg)));

    const fs::path path = temp_dir() / "roundtrip.cfg";
    write_config_echo(cfg, path.string());
    const NetworkConfig loaded = load_config(path.string());
    CHECK(to_csv(sweep_table(run_sweep(loaded))) == csv);

    // And the on-disk files are byte-identical.
    const fs::path a = temp_dir() / "sweep_a.csv";
    const fs::path b = temp_dir() / "sweep_b.csv";
    write_csv(sweep_table(run_sweep(cfg)), a.string());
    write_csv(sweep_table(run_sweep(loaded)), b.string());
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("explicit coupling matrices load from CSV files") {
    const fs::path path = temp_dir() / "matrix.csv";
    std::ofstream out(path);
    const std::size_t n = 4;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            out << (i == j ? 0.0 : 2.5) << (j + 1 < n ? "," : "");
        out << "\n";
    }
    out.close();

    const fs::path cfg_path = temp_dir() / "matrix.cfg";
    std::ofstream(cfg_path) << "n = 4\nn_steps = 200\nburn_in = 50\n"
                               "coupling_matrix_file = " << path.string() << "\n";
    const NetworkConfig cfg = load_config(cfg_path.string());
    CHECK(cfg.coupling.kind == CouplingSpec::Kind::explicit_matrix);
    CHECK(cfg.coupling.matrix.size() == n * n);
    CHECK(within_rel(cfg.coupling.two_norm(n), 2.5 * 3.0, 1e-6));

    RunOptions opts;
    opts.record_frames = false;
    const RealizationResult res = run_realization(cfg, opts);
    CHECK(std::isfinite(res.rho_bar));
}

TEST_CASE("snapshot table layout") {
    SnapshotTable snaps;
    snaps.times = {0.1};
    snaps.rho = {0.5};
    snaps.bins.push_back({});
    const Table table = snapshot_csv_table(snaps);
    CHECK(table.header.size() == 2 + kPhaseBins);
    CHECK(table.rows.size() == 1);
}
