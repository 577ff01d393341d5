#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qc/errors.hpp"
#include "qc/metrics.hpp"
#include "qc/model.hpp"
#include "qc/network.hpp"
#include "qc/processes.hpp"
#include "testutil.hpp"

using namespace qc;
using std::numbers::pi;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }

} // namespace

TEST_CASE("natural frequency sampling: clipping, degenerate sd, moments") {
    RngStream stream(3, 0);
    const auto clipped = sample_natural_frequencies(10'000, 437.72, 1.0, 3.0, stream);
    for (double w : clipped) {
        CHECK(w >= 434.72);
        CHECK(w <= 440.72);
    }

    RngStream s2(3, 1);
    const auto flat = sample_natural_frequencies(100, 437.72, 0.0, 3.0, s2);
    for (double w : flat)
        CHECK(w == 437.72);

    RngStream s3(4, 0);
    const auto big = sample_natural_frequencies(100'000, 437.72, 1.0, 3.0, s3);
    double sum = 0.0, sum2 = 0.0;
    for (double w : big) {
        sum += w;
        sum2 += w * w;
    }
    const double n = static_cast<double>(big.size());
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(within(mean, 437.72, 0.01));
    CHECK(sd > 0.98);
    CHECK(sd < 1.02);

    // Truncated-normal oracle for the +-3 sd clip.
    const double z = 3.0;
    const double mass = 2.0 * normal_cdf(z) - 1.0;
    const double oracle_sd = std::sqrt(1.0 - 2.0 * z * normal_pdf(z) / mass);
    CHECK(within(sd, oracle_sd, 0.01));
}

TEST_CASE("per-oscillator derivation at and around the standard point") {
    const double omega_table = derive_frequency(fixed_point_params(0.1));
    const std::vector<double> omega{omega_table, 434.72, 440.72};
    const OscillatorBank bank = derive_per_oscillator(omega);

    CHECK(within_rel(bank.lam[0], 250.0 / 3.0 * 0.1, 1e-9));
    CHECK(within(bank.sig[0], 6.85, 1e-2));
    CHECK(within_rel(bank.qnorm[0] / kQNormReference, 1.0, 1e-2));

    // Round trip for the off-center frequencies.
    for (std::size_t i = 1; i < omega.size(); ++i) {
        const double s_ii = solve_sii_for_frequency(omega[i]);
        CHECK(within_rel(bank.lam[i], kLambdaPerSii * s_ii, 1e-12));
        CHECK(within_rel(derive_frequency(fixed_point_params(s_ii)), omega[i], 1e-9));
    }

    // Identical frequencies give bitwise identical triples.
    const std::vector<double> same{437.0, 437.0, 437.0};
    const OscillatorBank same_bank = derive_per_oscillator(same);
    CHECK(same_bank.lam[0] == same_bank.lam[1]);
    CHECK(same_bank.sig[0] == same_bank.sig[2]);
    CHECK(same_bank.qnorm[1] == same_bank.qnorm[2]);

    CHECK_THROWS_AS(derive_per_oscillator(std::vector<double>{500.0}), OutOfRange);
    CHECK_THROWS_AS(derive_per_oscillator(std::vector<double>{445.0}), OutOfRange);
}

TEST_CASE("coupling spec invariants") {
    const CouplingSpec spec = CouplingSpec::all_to_all(4950.0, 100);
    CHECK(within(spec.strength, 50.0, 1e-12));
    CHECK(within(spec.two_norm(100), 4950.0, 1e-9));

    // Explicit all-to-all matrix agrees with the closed form.
    CouplingSpec explicit_spec;
    explicit_spec.kind = CouplingSpec::Kind::explicit_matrix;
    const std::size_t n = 16;
    explicit_spec.matrix.assign(n * n, 3.0);
    for (std::size_t i = 0; i < n; ++i)
        explicit_spec.matrix[i * n + i] = 0.0;
    explicit_spec.validate(n);
    CHECK(within_rel(explicit_spec.two_norm(n), 3.0 * (n - 1), 1e-6));

    CouplingSpec bad = explicit_spec;
    bad.matrix[1] = -1.0;
    CHECK_THROWS_AS(bad.validate(n), std::invalid_argument);
    bad = explicit_spec;
    bad.matrix[0] = 0.5;
    CHECK_THROWS_AS(bad.validate(n), std::invalid_argument);

    CHECK_THROWS_AS(CouplingSpec::all_to_all(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(CouplingSpec::all_to_all(1.0, 1), std::invalid_argument);
}

TEST_CASE("N = 1 network reduces exactly to the single-oscillator simulator") {
    const std::uint64_t seed = 99;
    const std::vector<double> omega{437.9};
    const std::vector<double> z0{0.6}, theta0{-0.2};
    NetworkState state = make_network_state(omega, z0, theta0);

    std::vector<RngStream> ps{phase_noise_stream(seed, 0)};
    std::vector<RngStream> as{amplitude_noise_stream(seed, 0)};
    const CouplingSpec coupling = CouplingSpec::all_to_all(0.0, 1);
    const TimeGrid grid{5e-5, 500, 0.0};

    DerivedParams d;
    d.omega_d = omega[0];
    d.lambda = state.lam[0];
    d.sigma = state.sig[0];
    d.q_norm = state.qnorm[0];
    RngStream b = phase_noise_stream(seed, 0);
    RngStream w = amplitude_noise_stream(seed, 0);
    const Path path = simulate_polar(d, grid, b, w, z0[0], theta0[0]);

    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        step_network(state, coupling, grid.dt, ps, as, {});
        CHECK(state.z[0] == path.cols[0][k + 1]);
        CHECK(state.theta[0] == path.cols[2][k + 1]);
    }
}

TEST_CASE("zero coupling factorizes into independent single-oscillator runs, bitwise") {
    const std::uint64_t seed = 123;
    const std::size_t n = 5;
    RngStream freq(seed, kFrequencyStreamId);
    const auto omega = sample_natural_frequencies(n, 437.72, 1.0, 3.0, freq);
    std::vector<double> z0, theta0;
    RngStream init(seed, kInitPhaseStreamId);
    for (std::size_t i = 0; i < n; ++i) {
        theta0.push_back(pi - 2.0 * pi * init.uniform());
        z0.push_back(0.2 + 0.8 * init.uniform());
    }

    NetworkState state = make_network_state(omega, z0, theta0);
    std::vector<RngStream> ps, as;
    for (std::size_t i = 0; i < n; ++i) {
        ps.push_back(phase_noise_stream(seed, i));
        as.push_back(amplitude_noise_stream(seed, i));
    }
    const CouplingSpec coupling = CouplingSpec::all_to_all(0.0, n);
    const TimeGrid grid{5e-5, 300, 0.0};

    std::vector<Path> solo;
    for (std::size_t i = 0; i < n; ++i) {
        DerivedParams d;
        d.omega_d = omega[i];
        d.lambda = state.lam[i];
        d.sigma = state.sig[i];
        d.q_norm = state.qnorm[i];
        RngStream b = phase_noise_stream(seed, i);
        RngStream w = amplitude_noise_stream(seed, i);
        solo.push_back(simulate_polar(d, grid, b, w, z0[i], theta0[i]));
    }

    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        step_network(state, coupling, grid.dt, ps, as, {});
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(state.z[i] == solo[i].cols[0][k + 1]);
            CHECK(state.theta[i] == solo[i].cols[2][k + 1]);
        }
    }
}

TEST_CASE("noise-free uncoupled phases rotate at their natural frequencies") {
    const std::vector<double> omega{436.5, 437.72, 439.0};
    const std::vector<double> z0{1.0, 1.0, 1.0}, theta0{0.1, -0.4, 2.0};
    NetworkState state = make_network_state(omega, z0, theta0);

    std::vector<RngStream> ps, as;
    for (std::size_t i = 0; i < 3; ++i) {
        ps.push_back(phase_noise_stream(1, i));
        as.push_back(amplitude_noise_stream(1, i));
    }
    NetworkOptions opts;
    opts.noise_scale = 0.0;
    const CouplingSpec coupling = CouplingSpec::all_to_all(0.0, 3);
    const double dt = 5e-5;
    for (int k = 0; k < 2000; ++k)
        step_network(state, coupling, dt, ps, as, opts);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(within(state.theta[i], theta0[i] - omega[i] * 2000 * dt, 1e-8));
}

TEST_CASE("two equal oscillators contract their phase gap at the linearized rate") {
    const std::vector<double> omega{437.72, 437.72};
    const std::vector<double> z0{0.9, 1.4}, theta0{0.9, -0.5};
    NetworkState state = make_network_state(omega, z0, theta0);

    std::vector<RngStream> ps{phase_noise_stream(2, 0), phase_noise_stream(2, 1)};
    std::vector<RngStream> as{amplitude_noise_stream(2, 0), amplitude_noise_stream(2, 1)};
    NetworkOptions opts;
    opts.noise_scale = 0.0;
    const double c = 40.0;
    const CouplingSpec coupling = CouplingSpec::all_to_all(c, 2);
    const double dt = 5e-5;

    double gap = state.theta[0] - state.theta[1];
    for (int k = 0; k < 4000; ++k) {
        const double z_ratio = state.z[1] / state.z[0] + state.z[0] / state.z[1];
        const double expected_dgap = -(coupling.strength / 4.0) * z_ratio * std::sin(gap) * dt;
        step_network(state, coupling, dt, ps, as, opts);
        const double new_gap = state.theta[0] - state.theta[1];
        CHECK(within(new_gap - gap, expected_dgap, 1e-12 + 1e-9 * std::fabs(expected_dgap)));
        // |gap| contracts monotonically toward zero.
        CHECK(std::fabs(new_gap) <= std::fabs(gap) + 1e-15);
        gap = new_gap;
    }
    CHECK(std::fabs(gap) < std::fabs(theta0[0] - theta0[1]));
}

TEST_CASE("explicit matrix coupling agrees with the all-to-all fast path") {
    const std::size_t n = 6;
    RngStream freq(7, kFrequencyStreamId);
    const auto omega = sample_natural_frequencies(n, 437.72, 1.0, 3.0, freq);
    std::vector<double> z0(n, 1.0), theta0(n);
    for (std::size_t i = 0; i < n; ++i)
        theta0[i] = 0.5 * static_cast<double>(i) - 1.0;

    NetworkState state_a = make_network_state(omega, z0, theta0);
    NetworkState state_b = state_a;

    const double c = 12.0;
    const CouplingSpec fast = CouplingSpec::all_to_all(c, n);
    CouplingSpec slow;
    slow.kind = CouplingSpec::Kind::explicit_matrix;
    slow.matrix.assign(n * n, fast.strength);
    for (std::size_t i = 0; i < n; ++i)
        slow.matrix[i * n + i] = 0.0;

    std::vector<RngStream> ps_a, as_a, ps_b, as_b;
    for (std::size_t i = 0; i < n; ++i) {
        ps_a.push_back(phase_noise_stream(8, i));
        as_a.push_back(amplitude_noise_stream(8, i));
        ps_b.push_back(phase_noise_stream(8, i));
        as_b.push_back(amplitude_noise_stream(8, i));
    }
    for (int k = 0; k < 200; ++k) {
        step_network(state_a, fast, 5e-5, ps_a, as_a, {});
        step_network(state_b, slow, 5e-5, ps_b, as_b, {});
    }
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(within(state_a.theta[i], state_b.theta[i], 1e-9));
        CHECK(within(state_a.z[i], state_b.z[i], 1e-9));
    }
}

TEST_CASE("classic Kuramoto: rotation, locking, and the synchronization transition") {
    // K = 0, no noise: exact rotation.
    std::vector<double> theta{0.3, -0.7};
    const std::vector<double> omega{300.0, 400.0};
    for (int k = 0; k < 1000; ++k)
        step_classic_kuramoto(theta, omega, 0.0, 1e-4, {}, 0.0);
    CHECK(within(theta[0], 0.3 + 300.0 * 0.1, 1e-8));
    CHECK(within(theta[1], -0.7 + 400.0 * 0.1, 1e-8));

    // Two equal oscillators lock under strong coupling.
    std::vector<double> pair{1.2, -1.0};
    const std::vector<double> same{437.72, 437.72};
    for (int k = 0; k < 4000; ++k)
        step_classic_kuramoto(pair, same, 5.0, 1e-3, {}, 0.0);
    CHECK(std::fabs(wrap_phase(pair[0] - pair[1])) < 1e-3);

    // N = 100, Gaussian frequencies, below vs above the critical coupling
    // K_c = 2 / (pi g(0)) ~ 1.596 for unit-sd Gaussian frequencies.
    RngStream freq(11, 0);
    const auto omegas = sample_natural_frequencies(100, 437.72, 1.0, 3.0, freq);
    const double kc = 2.0 * std::sqrt(2.0 / pi);

    const auto run_mean_rho = [&](double k_coupling) {
        std::vector<double> th(100);
        RngStream init(12, 0);
        for (double& t : th)
            t = pi - 2.0 * pi * init.uniform();
        const double dt = 5e-5;
        const int steps = 30'000;
        double rho_sum = 0.0;
        int count = 0;
        for (int k = 0; k < steps; ++k) {
            step_classic_kuramoto(th, omegas, k_coupling, dt, {}, 0.0);
            if (k >= steps - 10'000) {
                rho_sum += pli(th).first;
                ++count;
            }
        }
        return rho_sum / count;
    };

    CHECK(run_mean_rho(0.5 * kc) < 0.4);
    CHECK(run_mean_rho(8.0 * kc) > 0.9);
}

TEST_CASE("amplitude variants: the reference coupling stays bounded, other_only explodes") {
    NetworkConfig cfg;
    cfg.n = 100;
    cfg.coupling_norm = 4950.0;
    cfg.n_steps = 20'000; // 1 s
    cfg.burn_in = 5000;
    cfg.seed = 31;
    cfg.coupling.amplitude_variant = AmplitudeVariant::other_only;
    RunOptions opts;
    opts.record_frames = false;
    const RealizationResult exploded = run_realization(cfg, opts);
    CHECK(exploded.exploded);
    CHECK(exploded.explosion_time < 1.0);
    CHECK(exploded.max_z > cfg.explosion_threshold);

    cfg.coupling.amplitude_variant = AmplitudeVariant::difference;
    cfg.n_steps = 100'000; // 5 s
    const RealizationResult bounded = run_realization(cfg, opts);
    CHECK_FALSE(bounded.exploded);
    CHECK(bounded.max_z < 100.0);
}

TEST_CASE("uncoupled network PLI sits at the uniform-resultant level") {
    NetworkConfig cfg;
    cfg.n = 2;
    cfg.coupling_norm = 0.0;
    cfg.seed = 77;
    RunOptions opts;
    opts.record_frames = false;
    double sum = 0.0;
    const int reals = 10;
    for (int r = 0; r < reals; ++r) {
        NetworkConfig c2 = cfg;
        c2.seed = derive_seed(cfg.seed, 1, 1, static_cast<std::uint64_t>(r));
        sum += run_realization(c2, opts).rho_bar;
    }
    const double mean2 = sum / reals;
    CHECK(mean2 > 0.5);
    CHECK(mean2 < 0.78);
}

TEST_CASE("coupling raises the mean PLI (small smoke sweep)") {
    NetworkConfig cfg;
    cfg.n = 10;
    cfg.seed = 5;
    RunOptions opts;
    opts.record_frames = false;
    const auto mean_rho = [&](double norm) {
        double sum = 0.0;
        for (int r = 0; r < 3; ++r) {
            NetworkConfig c2 = cfg;
            c2.coupling_norm = norm;
            c2.seed = derive_seed(cfg.seed, 9, static_cast<std::uint64_t>(norm),
                                  static_cast<std::uint64_t>(r));
            sum += run_realization(c2, opts).rho_bar;
        }
        return sum / 3.0;
    };
    const double low = mean_rho(0.0);
    const double high = mean_rho(3000.0);
    CHECK(low < 0.5);
    CHECK(high > 0.8);
    CHECK(high > low);
}

TEST_CASE("membership bookkeeping: column sums equal group sizes") {
    NetworkConfig cfg;
    cfg.n = 10;
    cfg.n_steps = 200;
    cfg.burn_in = 100;
    cfg.seed = 13;
    cfg.coupling_norm = 100.0;
    RunOptions opts;
    opts.record_frames = true;
    opts.record_membership = true;
    const RealizationResult result = run_realization(cfg, opts);
    REQUIRE(result.frames.size() == cfg.n_steps + 1);
    REQUIRE(result.membership.size() == (cfg.n_steps + 1) * cfg.n);
    for (std::size_t f = 0; f < result.frames.size(); ++f) {
        int sum = 0;
        for (std::size_t i = 0; i < cfg.n; ++i)
            sum += result.membership[f * cfg.n + i];
        CHECK(sum == static_cast<int>(result.frames[f].sync_group.size()));
        const auto& counts = result.frames[f].bin_counts;
        CHECK(sum == *std::max_element(counts.begin(), counts.end()));
    }
}

TEST_CASE("lambda-scaled drift mode changes the amplitude dynamics") {
    const std::vector<double> omega{437.72};
    const std::vector<double> z0{1.0}, theta0{0.0};
    NetworkState a = make_network_state(omega, z0, theta0);
    NetworkState b = a;
    std::vector<RngStream> ps{phase_noise_stream(3, 0)}, as{amplitude_noise_stream(3, 0)};
    std::vector<RngStream> ps2{phase_noise_stream(3, 0)}, as2{amplitude_noise_stream(3, 0)};
    NetworkOptions real_time;
    NetworkOptions scaled;
    scaled.lambda_scaled_drift = true;
    const CouplingSpec coupling = CouplingSpec::all_to_all(0.0, 1);
    step_network(a, coupling, 5e-5, ps, as, real_time);
    step_network(b, coupling, 5e-5, ps2, as2, scaled);
    CHECK(a.z[0] != b.z[0]);
    CHECK(a.theta[0] == b.theta[0]); // the phase drift is real-time in both
}

TEST_CASE("network state and config validation") {
    NetworkConfig cfg;
    cfg.burn_in = cfg.n_steps;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    NetworkState state;
    CHECK_THROWS_AS(state.validate(), std::invalid_argument);
}
