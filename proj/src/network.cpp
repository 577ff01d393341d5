#include "qc/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qc/errors.hpp"

namespace qc {

using std::numbers::pi;

CouplingSpec CouplingSpec::all_to_all(double norm, std::size_t n) {
    if (norm < 0.0)
        throw std::invalid_argument("CouplingSpec: ||C|| must be >= 0");
    if (n < 2 && norm > 0.0)
        throw std::invalid_argument("CouplingSpec: coupling needs at least 2 oscillators");
    CouplingSpec spec;
    spec.kind = Kind::all_to_all;
    spec.strength = (n < 2) ? 0.0 : norm / static_cast<double>(n - 1);
    return spec;
}

void CouplingSpec::validate(std::size_t n) const {
    if (kind == Kind::all_to_all) {
        if (strength < 0.0)
            throw std::invalid_argument("CouplingSpec: strength must be >= 0");
        return;
    }
    if (matrix.size() != n * n)
        throw std::invalid_argument("CouplingSpec: matrix must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = matrix[i * n + j];
            if (i == j && c != 0.0)
                throw std::invalid_argument("CouplingSpec: diagonal must be zero");
            if (c < 0.0)
                throw std::invalid_argument("CouplingSpec: entries must be >= 0");
        }
    }
}

double CouplingSpec::two_norm(std::size_t n) const {
    if (kind == Kind::all_to_all)
        return (n < 2) ? 0.0 : strength * static_cast<double>(n - 1);
    // Power iteration on C^T C for the largest singular value.
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> cv(n), w(n);
    double sigma = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += matrix[i * n + j] * v[j];
            cv[i] = s;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += matrix[i * n + j] * cv[i];
            w[j] = s;
        }
        double norm = 0.0;
        for (double x : w)
            norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0)
            return 0.0;
        for (std::size_t j = 0; j < n; ++j)
            v[j] = w[j] / norm;
        sigma = std::sqrt(norm);
    }
    return sigma;
}

void NetworkState::validate() const {
    const std::size_t n = z.size();
    if (n == 0)
        throw std::invalid_argument("NetworkState: empty");
    if (theta.size() != n || omega.size() != n || lam.size() != n ||
        sig.size() != n || qnorm.size() != n)
        throw std::invalid_argument("NetworkState: vector length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(z[i] > 0.0))
            throw std::invalid_argument("NetworkState: amplitudes must be > 0");
        if (!(lam[i] > 0.0))
            throw std::invalid_argument("NetworkState: damping rates must be > 0");
    }
}

std::vector<double> sample_natural_frequencies(std::size_t n, double mean,
                                               double sd, double clip_sds,
                                               RngStream& stream) {
    if (n < 1)
        throw std::invalid_argument("sample_natural_frequencies: n must be >= 1");
    if (sd < 0.0)
        throw std::invalid_argument("sample_natural_frequencies: sd must be >= 0");
    std::vector<double> omega(n);
    const double half_width = clip_sds * sd;
    for (std::size_t i = 0; i < n; ++i) {
        double x;
        do {
            x = mean + sd * stream.normal();
        } while (std::fabs(x - mean) > half_width);
        omega[i] = x;
    }
    return omega;
}

OscillatorBank derive_per_oscillator(std::span<const double> omega) {
    OscillatorBank bank;
    bank.lam.reserve(omega.size());
    bank.sig.reserve(omega.size());
    bank.qnorm.reserve(omega.size());
    for (double w : omega) {
        const double s_ii = solve_sii_for_frequency(w); // throws OutOfRange
        if (!(s_ii > 0.0))
            throw OutOfRange("derive_per_oscillator: frequency outside the quasi-cycle range");
        bank.lam.push_back(kLambdaPerSii * s_ii);
        bank.sig.push_back(kSigmaNumerator / w);
        bank.qnorm.push_back(canonical_transform(fixed_point_params(s_ii)).two_norm());
    }
    return bank;
}

NetworkState make_network_state(std::span<const double> omega,
                                std::span<const double> z0,
                                std::span<const double> theta0) {
    if (omega.size() != z0.size() || omega.size() != theta0.size())
        throw std::invalid_argument("make_network_state: length mismatch");
    OscillatorBank bank = derive_per_oscillator(omega);
    NetworkState state;
    state.omega.assign(omega.begin(), omega.end());
    state.z.assign(z0.begin(), z0.end());
    state.theta.assign(theta0.begin(), theta0.end());
    state.lam = std::move(bank.lam);
    state.sig = std::move(bank.sig);
    state.qnorm = std::move(bank.qnorm);
    state.validate();
    return state;
}

namespace {

struct StepScratch {
    std::vector<double> cos_theta, sin_theta, d_theta, d_z;
};

double amplitude_term(AmplitudeVariant variant, double zj, double zi,
                      double thj, double thi) {
    switch (variant) {
    case AmplitudeVariant::difference: return zj - zi;
    case AmplitudeVariant::ratio: return zj / zi;
    case AmplitudeVariant::other_only: return zj;
    case AmplitudeVariant::cosine_factor: return zj * std::cos(thj - thi);
    case AmplitudeVariant::none: return 0.0;
    }
    return 0.0;
}

} // namespace

void step_network(NetworkState& state, const CouplingSpec& coupling, double dt,
                  std::span<RngStream> phase_streams,
                  std::span<RngStream> amp_streams, const NetworkOptions& opts) {
    const std::size_t n = state.size();
    if (phase_streams.size() != n || amp_streams.size() != n)
        throw std::invalid_argument("step_network: need one stream pair per oscillator");
    if (!(dt > 0.0))
        throw std::invalid_argument("step_network: dt must be > 0");

    static thread_local StepScratch scratch;
    scratch.cos_theta.resize(n);
    scratch.sin_theta.resize(n);
    scratch.d_theta.resize(n);
    scratch.d_z.resize(n);

    const double inv_2n = 1.0 / (2.0 * static_cast<double>(n));
    const bool all_to_all = coupling.kind == CouplingSpec::Kind::all_to_all;
    const bool ratio_factor = coupling.phase_amplitude_ratio_factor;
    const AmplitudeVariant variant = coupling.amplitude_variant;

    // Resultants of the start-of-step state.  For all-to-all coupling the
    // pair sums collapse to these totals minus the self term.
    double zx = 0.0, zy = 0.0; // sum Z_j cos/sin theta_j
    double ux = 0.0, uy = 0.0; // sum cos/sin theta_j
    double zs = 0.0;           // sum Z_j
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(state.theta[i]);
        const double s = std::sin(state.theta[i]);
        scratch.cos_theta[i] = c;
        scratch.sin_theta[i] = s;
        if (all_to_all) {
            zx += state.z[i] * c;
            zy += state.z[i] * s;
            ux += c;
            uy += s;
            zs += state.z[i];
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double zi = state.z[i];
        const double ci = scratch.cos_theta[i];
        const double si = scratch.sin_theta[i];

        // Draw order per oscillator: phase noise, then amplitude noise.
        const double noise_var = opts.noise_scale * opts.noise_scale * (state.lam[i] * dt);
        const double eta = gaussian_increment(phase_streams[i], noise_var);
        const double xi = gaussian_increment(amp_streams[i], noise_var);

        double phase_coupling = 0.0;
        double amp_coupling = 0.0;
        if (all_to_all) {
            const double c = coupling.strength;
            // sum_{j != i} Z_j sin(theta_j - theta_i)
            const double weighted = ci * (zy - zi * si) - si * (zx - zi * ci);
            const double unweighted = ci * (uy - si) - si * (ux - ci);
            phase_coupling = c * inv_2n * (ratio_factor ? weighted / zi : unweighted);
            switch (variant) {
            case AmplitudeVariant::difference:
                amp_coupling = c * inv_2n * (zs - static_cast<double>(n) * zi);
                break;
            case AmplitudeVariant::ratio:
                amp_coupling = c * inv_2n * ((zs - zi) / zi);
                break;
            case AmplitudeVariant::other_only:
                amp_coupling = c * inv_2n * (zs - zi);
                break;
            case AmplitudeVariant::cosine_factor:
                amp_coupling = c * inv_2n * (ci * (zx - zi * ci) + si * (zy - zi * si));
                break;
            case AmplitudeVariant::none:
                amp_coupling = 0.0;
                break;
            }
        } else {
            double phase_sum = 0.0;
            double amp_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                const double cij = coupling.matrix[i * n + j];
                if (cij == 0.0)
                    continue;
                const double gap = state.theta[j] - state.theta[i];
                phase_sum += cij * (ratio_factor ? state.z[j] / zi : 1.0) * std::sin(gap);
                amp_sum += cij * amplitude_term(variant, state.z[j], zi,
                                                state.theta[j], state.theta[i]);
            }
            phase_coupling = inv_2n * phase_sum;
            amp_coupling = inv_2n * amp_sum;
        }

        PolarCoeffs coeffs;
        coeffs.omega = state.omega[i];
        coeffs.lambda = state.lam[i];
        coeffs.amp_factor = polar_amp_factor(state.sig[i], state.lam[i],
                                             state.qnorm[i], opts.amplitude_rescale);
        coeffs.drift_scale = opts.lambda_scaled_drift ? state.lam[i] : 1.0;
        const PolarIncrement inc =
            polar_increment(zi, phase_coupling, amp_coupling, coeffs, dt, eta, xi);
        scratch.d_theta[i] = inc.d_theta;
        scratch.d_z[i] = inc.d_z;
    }

    for (std::size_t i = 0; i < n; ++i) {
        state.theta[i] += scratch.d_theta[i];
        state.z[i] = std::fmax(state.z[i] + scratch.d_z[i], opts.epsilon_floor);
        const std::array<double, 2> gate{state.z[i], state.theta[i]};
        check_state_finite(gate, "step_network");
    }
}

void step_classic_kuramoto(std::vector<double>& theta,
                           std::span<const double> omega, double k, double dt,
                           std::span<RngStream> streams, double noise_sd) {
    const std::size_t n = theta.size();
    if (omega.size() != n)
        throw std::invalid_argument("step_classic_kuramoto: length mismatch");
    if (noise_sd > 0.0 && streams.size() != n)
        throw std::invalid_argument("step_classic_kuramoto: need one stream per oscillator");

    double ux = 0.0, uy = 0.0;
    for (double th : theta) {
        ux += std::cos(th);
        uy += std::sin(th);
    }
    const double k_over_n = k / static_cast<double>(n);
    const double noise_var = noise_sd * noise_sd * dt;
    for (std::size_t j = 0; j < n; ++j) {
        const double cj = std::cos(theta[j]);
        const double sj = std::sin(theta[j]);
        // sum_k sin(theta_k - theta_j); the self term vanishes.
        const double drift = omega[j] + k_over_n * (cj * uy - sj * ux);
        double noise = 0.0;
        if (noise_sd > 0.0)
            noise = gaussian_increment(streams[j], noise_var);
        theta[j] += drift * dt + noise;
    }
    check_state_finite(theta, "step_classic_kuramoto");
}

MetricsFrame compute_metrics_frame(double t, const NetworkState& state) {
    MetricsFrame frame;
    frame.t = t;

    double sx = 0.0, sy = 0.0, zsum = 0.0;
    static thread_local std::vector<int> bins;
    bins.resize(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        sx += std::cos(state.theta[i]);
        sy += std::sin(state.theta[i]);
        zsum += state.z[i];
        bins[i] = phase_bin(state.theta[i]);
        ++frame.bin_counts[static_cast<std::size_t>(bins[i])];
    }
    const double n = static_cast<double>(state.size());
    frame.rho = std::min(std::sqrt(sx * sx + sy * sy) / n, 1.0);
    frame.psi = (sx == 0.0 && sy == 0.0) ? 0.0 : std::atan2(sy, sx);
    frame.pop_mean_theta = frame.psi;
    frame.pop_mean_z = zsum / n;

    int best = 0;
    for (int b = 1; b < kPhaseBins; ++b)
        if (frame.bin_counts[static_cast<std::size_t>(b)] >
            frame.bin_counts[static_cast<std::size_t>(best)])
            best = b;
    frame.sync_group.reserve(
        static_cast<std::size_t>(frame.bin_counts[static_cast<std::size_t>(best)]));
    for (std::size_t i = 0; i < state.size(); ++i)
        if (bins[i] == best)
            frame.sync_group.push_back(static_cast<int>(i));

    const GroupStats stats = group_stats(frame.sync_group, state);
    frame.group_mean_omega = stats.mean_omega;
    frame.group_mean_z = stats.mean_z;
    frame.group_mean_theta = stats.mean_theta;
    return frame;
}

void NetworkConfig::validate() const {
    if (n < 1)
        throw std::invalid_argument("NetworkConfig: n must be >= 1");
    if (!(dt > 0.0))
        throw std::invalid_argument("NetworkConfig: dt must be > 0");
    if (n_steps < 1)
        throw std::invalid_argument("NetworkConfig: n_steps must be >= 1");
    if (burn_in >= n_steps)
        throw std::invalid_argument("NetworkConfig: burn_in must be < n_steps");
    if (realizations < 1)
        throw std::invalid_argument("NetworkConfig: realizations must be >= 1");
    if (!(epsilon_floor > 0.0))
        throw std::invalid_argument("NetworkConfig: epsilon_floor must be > 0");
    if (!(amplitude_rescale > 0.0))
        throw std::invalid_argument("NetworkConfig: amplitude_rescale must be > 0");
    if (omega_sd < 0.0)
        throw std::invalid_argument("NetworkConfig: omega_sd must be >= 0");
    if (!(clip_sds > 0.0))
        throw std::invalid_argument("NetworkConfig: clip_sds must be > 0");
    if (coupling_norm < 0.0)
        throw std::invalid_argument("NetworkConfig: coupling_norm must be >= 0");
    if (explosion_threshold < 0.0)
        throw std::invalid_argument("NetworkConfig: explosion_threshold must be >= 0");
    if (snapshot_window < 0.0)
        throw std::invalid_argument("NetworkConfig: snapshot_window must be >= 0");
    if (coupling.kind == CouplingSpec::Kind::explicit_matrix)
        coupling.validate(n);
}

NetworkOptions NetworkConfig::network_options() const {
    NetworkOptions opts;
    opts.amplitude_rescale = amplitude_rescale;
    opts.epsilon_floor = epsilon_floor;
    opts.lambda_scaled_drift = drift_time_scaling == DriftTimeScaling::lambda_scaled;
    return opts;
}

CouplingSpec NetworkConfig::effective_coupling(double norm) const {
    if (coupling.kind == CouplingSpec::Kind::explicit_matrix)
        return coupling;
    CouplingSpec spec = CouplingSpec::all_to_all(norm, n);
    spec.phase_amplitude_ratio_factor = coupling.phase_amplitude_ratio_factor;
    spec.amplitude_variant = coupling.amplitude_variant;
    return spec;
}

std::vector<double> default_coupling_norms() {
    std::vector<double> norms{0.0};
    const double lo = 0.0;                // log10(1)
    const double hi = std::log10(2.0e4);
    for (int i = 0; i < 12; ++i)
        norms.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / 11.0));
    return norms;
}

RealizationResult run_realization(const NetworkConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const std::size_t n = cfg.n;

    RealizationResult result;

    RngStream freq_stream(cfg.seed, kFrequencyStreamId);
    result.omega = sample_natural_frequencies(n, cfg.omega_mean, cfg.omega_sd,
                                              cfg.clip_sds, freq_stream);

    RngStream init_phase(cfg.seed, kInitPhaseStreamId);
    RngStream init_amp(cfg.seed, kInitAmplitudeStreamId);
    std::vector<double> theta0(n), z0(n);
    for (std::size_t i = 0; i < n; ++i)
        theta0[i] = pi - 2.0 * pi * init_phase.uniform(); // U(-pi, pi]
    for (std::size_t i = 0; i < n; ++i)
        z0[i] = 1.0 - init_amp.uniform(); // U(0, 1]

    NetworkState state = make_network_state(result.omega, z0, theta0);

    std::vector<RngStream> phase_streams, amp_streams;
    phase_streams.reserve(n);
    amp_streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        phase_streams.push_back(phase_noise_stream(cfg.seed, i));
        amp_streams.push_back(amplitude_noise_stream(cfg.seed, i));
    }

    const CouplingSpec coupling = cfg.effective_coupling(cfg.coupling_norm);
    coupling.validate(n);
    const NetworkOptions net_opts = cfg.network_options();

    double omega_sum = 0.0;
    for (double w : result.omega)
        omega_sum += w;
    result.pop_mean_omega = omega_sum / static_cast<double>(n);

    if (opts.record_frames)
        result.frames.reserve(cfg.n_steps + 1);
    if (opts.record_membership)
        result.membership.reserve((cfg.n_steps + 1) * n);
    if (opts.record_phases)
        result.phases.reserve((cfg.n_steps + 1) * n);

    double rho_sum = 0.0;
    double group_omega_sum = 0.0, group_z_sum = 0.0, pop_z_sum = 0.0;
    std::size_t tail_count = 0;

    const auto track_frame = [&](std::size_t k) {
        const MetricsFrame frame = compute_metrics_frame(cfg.dt * static_cast<double>(k), state);
        if (opts.record_membership) {
            std::vector<std::uint8_t> row(n, 0);
            for (int idx : frame.sync_group)
                row[static_cast<std::size_t>(idx)] = 1;
            result.membership.insert(result.membership.end(), row.begin(), row.end());
        }
        if (opts.record_phases)
            result.phases.insert(result.phases.end(), state.theta.begin(),
                                 state.theta.end());
        if (k > cfg.burn_in) {
            rho_sum += frame.rho;
            group_omega_sum += frame.group_mean_omega;
            group_z_sum += frame.group_mean_z;
            pop_z_sum += frame.pop_mean_z;
            ++tail_count;
            if (opts.z_sample_stride > 0 && (k - cfg.burn_in) % opts.z_sample_stride == 0)
                result.z_samples.insert(result.z_samples.end(), state.z.begin(), state.z.end());
        }
        if (opts.record_frames)
            result.frames.push_back(std::move(frame));
    };

    track_frame(0);
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        step_network(state, coupling, cfg.dt, phase_streams, amp_streams, net_opts);
        const double step_max = *std::max_element(state.z.begin(), state.z.end());
        result.max_z = std::fmax(result.max_z, step_max);
        track_frame(k);
        if (cfg.explosion_threshold > 0.0 && step_max > cfg.explosion_threshold) {
            result.exploded = true;
            result.explosion_step = k;
            result.explosion_time = cfg.dt * static_cast<double>(k);
            break;
        }
    }

    if (tail_count > 0) {
        const double inv = 1.0 / static_cast<double>(tail_count);
        result.rho_bar = rho_sum * inv;
        result.avg_group_omega = group_omega_sum * inv;
        result.avg_group_z = group_z_sum * inv;
        result.avg_pop_z = pop_z_sum * inv;
    } else {
        result.rho_bar = std::numeric_limits<double>::quiet_NaN();
        result.avg_group_omega = std::numeric_limits<double>::quiet_NaN();
        result.avg_group_z = std::numeric_limits<double>::quiet_NaN();
        result.avg_pop_z = std::numeric_limits<double>::quiet_NaN();
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace qc
