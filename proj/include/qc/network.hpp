#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qc/metrics.hpp"
#include "qc/model.hpp"
#include "qc/processes.hpp"
#include "qc/sde.hpp"

namespace qc {

// Amplitude interaction g(Z_j, Z_i, theta_j, theta_i) inserted into the
// coupled amplitude drift.  `difference` is the reference coupling; the
// others are the variants discussed alongside it (other_only and
// cosine_factor blow the amplitudes up and exit the quasi-cycle regime).
enum class AmplitudeVariant {
    difference,    // Z_j - Z_i
    ratio,         // Z_j / Z_i
    other_only,    // Z_j
    cosine_factor, // Z_j * cos(theta_j - theta_i)
    none,
};

struct CouplingSpec {
    enum class Kind { all_to_all, explicit_matrix };

    Kind kind = Kind::all_to_all;
    double strength = 0.0;      // per off-diagonal entry c (all_to_all)
    std::vector<double> matrix; // n x n row-major (explicit_matrix)
    bool phase_amplitude_ratio_factor = true; // include Z_j/Z_i in the phase sum
    AmplitudeVariant amplitude_variant = AmplitudeVariant::difference;

    // All-to-all matrix c*(ones - I) with 2-norm equal to `norm`:
    // c = norm / (n - 1).
    static CouplingSpec all_to_all(double norm, std::size_t n);

    void validate(std::size_t n) const; // C_ij >= 0, C_ii = 0, size checks
    double two_norm(std::size_t n) const;
};

// Per-oscillator state of the coupled network at one time step.
struct NetworkState {
    std::vector<double> z;     // amplitudes, > 0
    std::vector<double> theta; // unwrapped phases [rad]
    std::vector<double> omega; // natural frequencies [rad/s]
    std::vector<double> lam;   // damping rates [1/s]
    std::vector<double> sig;   // noise scalars [mV]
    std::vector<double> qnorm; // ||Q_i|| (unrescaled)

    std::size_t size() const { return z.size(); }
    void validate() const;
};

// n draws from Normal(mean, sd^2), rejection-resampled until within
// mean +- clip_sds * sd.
std::vector<double> sample_natural_frequencies(std::size_t n, double mean,
                                               double sd, double clip_sds,
                                               RngStream& stream);

struct OscillatorBank {
    std::vector<double> lam;
    std::vector<double> sig;
    std::vector<double> qnorm;
};

// Per-oscillator damping, noise scalar and ||Q|| at the fixed operating
// point, given natural frequencies: lambda_i = (250/3) S_II(omega_i),
// sigma_i = 2998.38 / omega_i, ||Q_i|| from the canonical transform.
// Throws OutOfRange when an omega admits no quasi-cycle (S_II <= 0).
OscillatorBank derive_per_oscillator(std::span<const double> omega);

// State with amplitudes/phases given and the bank derived from omega.
NetworkState make_network_state(std::span<const double> omega,
                                std::span<const double> z0,
                                std::span<const double> theta0);

// Noise stream layout of one realization (seed-scoped):
//   0           natural-frequency sampling
//   1           initial phases
//   2           initial amplitudes
//   3 + 2i      phase-slip noise b_i of oscillator i
//   3 + 2i + 1  amplitude noise W_i of oscillator i
inline constexpr std::uint64_t kFrequencyStreamId = 0;
inline constexpr std::uint64_t kInitPhaseStreamId = 1;
inline constexpr std::uint64_t kInitAmplitudeStreamId = 2;

inline RngStream phase_noise_stream(std::uint64_t seed, std::size_t i) {
    return {seed, 3 + 2 * static_cast<std::uint64_t>(i)};
}
inline RngStream amplitude_noise_stream(std::uint64_t seed, std::size_t i) {
    return {seed, 3 + 2 * static_cast<std::uint64_t>(i) + 1};
}

struct NetworkOptions {
    double amplitude_rescale = kQNormReference;
    double epsilon_floor = 1e-4;
    bool lambda_scaled_drift = false;
    double noise_scale = 1.0; // 0 gives the deterministic skeleton
};

// One synchronous Euler-Maruyama update of all oscillators:
//   d theta_i = [-omega_i + (1/2N) sum_j r_ij C_ij sin(theta_j - theta_i)] dt
//               + eta_i / Z_i
//   d Z_i     = F_i (1/(2 Z_i) - Z_i) dt + (1/2N) sum_j C_ij g(...) dt + F_i xi_i
// with r_ij = Z_j/Z_i (or 1), F_i = (sigma_i/sqrt(lambda_i)) (||Q_i||/rescale),
// eta_i, xi_i ~ Normal(0, lambda_i dt), then Z_i <- max(Z_i, epsilon_floor).
// With zero coupling this reproduces simulate_polar bit for bit given the
// same streams.
void step_network(NetworkState& state, const CouplingSpec& coupling, double dt,
                  std::span<RngStream> phase_streams,
                  std::span<RngStream> amp_streams,
                  const NetworkOptions& opts = {});

// Classic mean-field Kuramoto baseline:
//   d theta_j = [omega_j + (K/N) sum_k sin(theta_k - theta_j)] dt
//               (+ noise_sd dW_j when noise_sd > 0).
void step_classic_kuramoto(std::vector<double>& theta,
                           std::span<const double> omega, double k, double dt,
                           std::span<RngStream> streams, double noise_sd = 0.0);

enum class DriftTimeScaling { real_time, lambda_scaled };

// Full experiment description.  Loaded from flat key = value config files by
// the harness; all fields have working defaults.
struct NetworkConfig {
    std::size_t n = 100;
    CouplingSpec coupling;      // variant flags; matrix when explicit
    double coupling_norm = 0.0; // ||C|| target for single-coupling runs
    std::vector<double> coupling_norm_values; // sweep targets (empty = default grid)
    std::vector<std::size_t> sweep_n_values{2, 10, 66, 100};
    double omega_mean = 437.72; // rad/s
    double omega_sd = 1.0;      // rad/s
    double clip_sds = 3.0;
    double dt = 5e-5; // seconds
    std::size_t n_steps = 10000;
    std::size_t burn_in = 5000;
    std::size_t realizations = 10;
    std::uint64_t seed = 1;
    double amplitude_rescale = kQNormReference;
    double epsilon_floor = 1e-4;
    DriftTimeScaling drift_time_scaling = DriftTimeScaling::real_time;
    double explosion_threshold = 1000.0; // 0 disables the explosion stop
    std::vector<double> snapshot_times;  // empty = default set
    double snapshot_window = 0.005;      // seconds
    unsigned threads = 0;                // 0 = hardware concurrency
    std::string coupling_matrix_file;    // optional explicit C as CSV

    void validate() const;
    NetworkOptions network_options() const;
    // Coupling actually applied: explicit matrix as-is, otherwise
    // all_to_all(coupling_norm, n).
    CouplingSpec effective_coupling(double norm) const;
};

// 0 plus 12 log-spaced values from 1 to 2e4.
std::vector<double> default_coupling_norms();

struct RunOptions {
    bool record_frames = true;
    bool record_membership = false;
    bool record_phases = false;      // keep the full theta matrix (frame-major)
    std::size_t z_sample_stride = 0; // collect every k-th post-burn-in Z vector
};

struct RealizationResult {
    std::vector<double> omega;        // sampled natural frequencies
    NetworkState final_state;
    std::vector<MetricsFrame> frames; // steps 0..n_steps when recorded
    // Step-major membership matrix (frame k, oscillator i) in original index
    // order, when recorded.
    std::vector<std::uint8_t> membership;
    std::vector<double> phases; // frame-major unwrapped theta, when recorded
    double rho_bar = 0.0;         // mean rho over steps burn_in+1 .. n_steps
    double pop_mean_omega = 0.0;  // population mean natural frequency
    double avg_group_omega = 0.0; // post-burn-in time averages
    double avg_group_z = 0.0;
    double avg_pop_z = 0.0;
    double max_z = 0.0;
    bool exploded = false;
    std::size_t explosion_step = 0;
    double explosion_time = 0.0;
    std::vector<double> z_samples;
};

// Initializes theta ~ U(-pi, pi], Z ~ U(0, 1], samples natural frequencies,
// runs n_steps of step_network with per-step metrics, and reports rho_bar
// over the post-burn-in window.  Stops early (recording first passage) when
// any amplitude exceeds explosion_threshold.
RealizationResult run_realization(const NetworkConfig& cfg,
                                  const RunOptions& opts = {});

// Metrics snapshot of one state (used per step by run_realization).
MetricsFrame compute_metrics_frame(double t, const NetworkState& state);

} // namespace qc
