#include "qc/runners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qc {

namespace {

// Index-based worker pool; results are stored by job index, so the output
// is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned k = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (k == 0)
        k = 1;
    k = static_cast<unsigned>(std::min<std::size_t>(k, count));
    if (k <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (unsigned w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace

std::uint64_t sweep_cell_seed(std::uint64_t base, std::size_t n_index,
                              std::size_t coupling_index,
                              std::size_t realization_index) {
    return derive_seed(base, n_index + 1, coupling_index + 1, realization_index + 1);
}

std::vector<SweepPoint> run_sweep(const NetworkConfig& cfg) {
    cfg.validate();
    const std::vector<double> norms =
        cfg.coupling_norm_values.empty() ? default_coupling_norms() : cfg.coupling_norm_values;
    if (norms.empty())
        throw std::invalid_argument("run_sweep: coupling_norm_values must be nonempty");
    const std::vector<std::size_t>& n_values = cfg.sweep_n_values;
    if (n_values.empty())
        throw std::invalid_argument("run_sweep: sweep_n_values must be nonempty");

    const std::size_t cells = n_values.size() * norms.size();
    const std::size_t jobs = cells * cfg.realizations;
    std::vector<double> rho_bars(jobs, 0.0);

    parallel_for(jobs, cfg.threads, [&](std::size_t job) {
        const std::size_t r = job % cfg.realizations;
        const std::size_t cell = job / cfg.realizations;
        const std::size_t c_idx = cell % norms.size();
        const std::size_t n_idx = cell / norms.size();

        NetworkConfig run_cfg = cfg;
        run_cfg.n = n_values[n_idx];
        run_cfg.coupling_norm = norms[c_idx];
        run_cfg.seed = sweep_cell_seed(cfg.seed, n_idx, c_idx, r);
        RunOptions opts;
        opts.record_frames = false;
        rho_bars[job] = run_realization(run_cfg, opts).rho_bar;
    });

    std::vector<SweepPoint> points;
    points.reserve(cells);
    for (std::size_t n_idx = 0; n_idx < n_values.size(); ++n_idx) {
        for (std::size_t c_idx = 0; c_idx < norms.size(); ++c_idx) {
            SweepPoint point;
            point.n = n_values[n_idx];
            point.coupling_norm = norms[c_idx];
            const std::size_t cell = n_idx * norms.size() + c_idx;
            double sum = 0.0;
            for (std::size_t r = 0; r < cfg.realizations; ++r) {
                const double rho = rho_bars[cell * cfg.realizations + r];
                point.rho_bars.push_back(rho);
                sum += rho;
            }
            const double mean = sum / static_cast<double>(cfg.realizations);
            double ss = 0.0;
            for (double rho : point.rho_bars)
                ss += (rho - mean) * (rho - mean);
            point.mean_rho_bar = mean;
            point.sd_rho_bar = cfg.realizations > 1
                                   ? std::sqrt(ss / static_cast<double>(cfg.realizations - 1))
                                   : 0.0;
            points.push_back(std::move(point));
        }
    }
    return points;
}

RasterArtifact run_raster(const NetworkConfig& cfg, double coupling_norm) {
    NetworkConfig run_cfg = cfg;
    run_cfg.coupling_norm = coupling_norm;
    RunOptions opts;
    opts.record_frames = true;
    opts.record_membership = true;
    const RealizationResult result = run_realization(run_cfg, opts);

    RasterArtifact artifact;
    artifact.n = run_cfg.n;
    artifact.coupling_norm = coupling_norm;
    artifact.rho_bar = result.rho_bar;
    artifact.frames = result.frames;

    // Sort oscillators by ascending natural frequency (stable on index).
    artifact.order.resize(artifact.n);
    std::iota(artifact.order.begin(), artifact.order.end(), std::size_t{0});
    std::sort(artifact.order.begin(), artifact.order.end(),
              [&](std::size_t a, std::size_t b) {
                  if (result.omega[a] != result.omega[b])
                      return result.omega[a] < result.omega[b];
                  return a < b;
              });
    artifact.omega.resize(artifact.n);
    artifact.lambda.resize(artifact.n);
    artifact.sigma.resize(artifact.n);
    artifact.qnorm.resize(artifact.n);
    for (std::size_t s = 0; s < artifact.n; ++s) {
        const std::size_t i = artifact.order[s];
        artifact.omega[s] = result.omega[i];
        artifact.lambda[s] = result.final_state.lam[i];
        artifact.sigma[s] = result.final_state.sig[i];
        artifact.qnorm[s] = result.final_state.qnorm[i];
    }

    // Frequency classes over 20 equal bins spanning the clipped support of
    // the sampling distribution: the extreme two bins on either side, the
    // two most populous remaining bins, and the rest.
    const double lo = run_cfg.omega_mean - run_cfg.clip_sds * run_cfg.omega_sd;
    const double hi = run_cfg.omega_mean + run_cfg.clip_sds * run_cfg.omega_sd;
    const double width = (hi - lo) > 0.0 ? (hi - lo) / 20.0 : 1.0;
    std::array<int, 20> counts{};
    std::vector<int> freq_bin(artifact.n);
    for (std::size_t s = 0; s < artifact.n; ++s) {
        int b = static_cast<int>(std::floor((artifact.omega[s] - lo) / width));
        b = std::clamp(b, 0, 19);
        freq_bin[s] = b;
        ++counts[static_cast<std::size_t>(b)];
    }
    const auto is_extreme = [](int b) { return b <= 1 || b >= 18; };
    int populous[2] = {-1, -1};
    for (int b = 0; b < 20; ++b) {
        if (is_extreme(b))
            continue;
        if (populous[0] < 0 || counts[static_cast<std::size_t>(b)] >
                                   counts[static_cast<std::size_t>(populous[0])]) {
            populous[1] = populous[0];
            populous[0] = b;
        } else if (populous[1] < 0 || counts[static_cast<std::size_t>(b)] >
                                          counts[static_cast<std::size_t>(populous[1])]) {
            populous[1] = b;
        }
    }
    artifact.freq_class.resize(artifact.n);
    for (std::size_t s = 0; s < artifact.n; ++s) {
        const int b = freq_bin[s];
        if (is_extreme(b))
            artifact.freq_class[s] = 0;
        else if (b == populous[0] || b == populous[1])
            artifact.freq_class[s] = 1;
        else
            artifact.freq_class[s] = 2;
    }

    // Membership matrix permuted into sorted order.
    const std::size_t frames = result.frames.size();
    artifact.membership.resize(frames * artifact.n);
    for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t s = 0; s < artifact.n; ++s)
            artifact.membership[f * artifact.n + s] =
                result.membership[f * artifact.n + artifact.order[s]];
    return artifact;
}

std::vector<double> default_snapshot_times(double duration) {
    const double fractions[] = {0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9};
    std::vector<double> times;
    for (double f : fractions)
        times.push_back(f * duration);
    return times;
}

SnapshotTable run_phase_snapshots(const NetworkConfig& cfg, double coupling_norm,
                                  std::span<const double> snapshot_times) {
    NetworkConfig run_cfg = cfg;
    run_cfg.coupling_norm = coupling_norm;
    const double duration = run_cfg.dt * static_cast<double>(run_cfg.n_steps);
    for (double t : snapshot_times) {
        if (t < 0.0 || t > duration)
            throw std::invalid_argument("run_phase_snapshots: time outside run duration");
    }
    RunOptions opts;
    opts.record_frames = true;
    opts.record_phases = true;
    const RealizationResult result = run_realization(run_cfg, opts);

    // A synchronized clump rotates by omega_mean * window during the
    // averaging window (2.2 rad at the defaults), so raw per-frame counts
    // would smear it over several bins.  Histograms are accumulated in the
    // frame co-rotating at the configured mean natural frequency, which is
    // the identity for a zero-width window.
    SnapshotTable table;
    const std::size_t n = run_cfg.n;
    for (double ts : snapshot_times) {
        const double t_end = ts + run_cfg.snapshot_window;
        auto k_lo = static_cast<std::ptrdiff_t>(std::ceil(ts / run_cfg.dt - 1e-9));
        auto k_hi = static_cast<std::ptrdiff_t>(std::floor(t_end / run_cfg.dt + 1e-9));
        k_lo = std::clamp<std::ptrdiff_t>(k_lo, 0,
                                          static_cast<std::ptrdiff_t>(result.frames.size()) - 1);
        k_hi = std::clamp<std::ptrdiff_t>(k_hi, k_lo,
                                          static_cast<std::ptrdiff_t>(result.frames.size()) - 1);
        std::array<double, kPhaseBins> avg{};
        double rho = 0.0;
        const double count = static_cast<double>(k_hi - k_lo + 1);
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
            const double t_k = run_cfg.dt * static_cast<double>(k);
            const double derotate = run_cfg.omega_mean * (t_k - ts);
            for (std::size_t i = 0; i < n; ++i) {
                const double theta = result.phases[static_cast<std::size_t>(k) * n + i];
                ++avg[static_cast<std::size_t>(phase_bin(theta + derotate))];
            }
            rho += result.frames[static_cast<std::size_t>(k)].rho;
        }
        for (double& v : avg)
            v /= count;
        table.times.push_back(ts);
        table.bins.push_back(avg);
        table.rho.push_back(rho / count);
    }
    return table;
}

Table sweep_table(const std::vector<SweepPoint>& points) {
    Table table;
    table.header = {"n", "coupling_norm", "mean_rho_bar", "sd_rho_bar"};
    for (const auto& p : points)
        table.add_row({static_cast<double>(p.n), p.coupling_norm, p.mean_rho_bar,
                       p.sd_rho_bar});
    return table;
}

Table raster_table(const RasterArtifact& artifact) {
    Table table;
    table.header = {"step"};
    for (std::size_t s = 0; s < artifact.n; ++s)
        table.header.push_back("m" + std::to_string(s));
    for (std::size_t f = 0; f < artifact.frame_count(); ++f) {
        std::vector<double> row;
        row.reserve(artifact.n + 1);
        row.push_back(static_cast<double>(f));
        for (std::size_t s = 0; s < artifact.n; ++s)
            row.push_back(artifact.member(f, s) ? 1.0 : 0.0);
        table.add_row(std::move(row));
    }
    return table;
}

Table raster_metrics_table(const RasterArtifact& artifact) {
    Table table;
    table.header = {"step", "t", "rho", "psi", "group_size", "group_mean_theta",
                    "group_mean_omega", "group_mean_z", "pop_mean_theta",
                    "pop_mean_omega", "pop_mean_z"};
    for (int b = 0; b < kPhaseBins; ++b)
        table.header.push_back("bin" + std::to_string(b));
    double pop_mean_omega = 0.0;
    for (double w : artifact.omega)
        pop_mean_omega += w;
    pop_mean_omega /= static_cast<double>(artifact.n);
    for (std::size_t f = 0; f < artifact.frame_count(); ++f) {
        const MetricsFrame& frame = artifact.frames[f];
        std::vector<double> row{static_cast<double>(f),
                                frame.t,
                                frame.rho,
                                frame.psi,
                                static_cast<double>(frame.sync_group.size()),
                                frame.group_mean_theta,
                                frame.group_mean_omega,
                                frame.group_mean_z,
                                frame.pop_mean_theta,
                                pop_mean_omega,
                                frame.pop_mean_z};
        for (int b = 0; b < kPhaseBins; ++b)
            row.push_back(static_cast<double>(frame.bin_counts[static_cast<std::size_t>(b)]));
        table.add_row(std::move(row));
    }
    return table;
}

Table raster_oscillator_table(const RasterArtifact& artifact) {
    Table table;
    table.header = {"rank", "original_index", "omega", "lambda", "sigma",
                    "q_norm", "freq_class"};
    for (std::size_t s = 0; s < artifact.n; ++s)
        table.add_row({static_cast<double>(s), static_cast<double>(artifact.order[s]),
                       artifact.omega[s], artifact.lambda[s], artifact.sigma[s],
                       artifact.qnorm[s], static_cast<double>(artifact.freq_class[s])});
    return table;
}

Table snapshot_csv_table(const SnapshotTable& snapshots) {
    Table table;
    table.header = {"t", "mean_rho"};
    for (int b = 0; b < kPhaseBins; ++b)
        table.header.push_back("bin" + std::to_string(b));
    for (std::size_t i = 0; i < snapshots.times.size(); ++i) {
        std::vector<double> row{snapshots.times[i], snapshots.rho[i]};
        for (int b = 0; b < kPhaseBins; ++b)
            row.push_back(snapshots.bins[i][static_cast<std::size_t>(b)]);
        table.add_row(std::move(row));
    }
    return table;
}

LinePlot sweep_plot(const std::vector<SweepPoint>& points) {
    LinePlot plot;
    plot.title = "Phase coherence vs coupling strength";
    plot.x_label = "coupling norm ||C||";
    plot.y_label = "mean phase-locking index";
    plot.log1p_x = true;
    std::vector<std::size_t> n_values;
    for (const auto& p : points)
        if (std::find(n_values.begin(), n_values.end(), p.n) == n_values.end())
            n_values.push_back(p.n);
    for (std::size_t n : n_values) {
        LineSeries series;
        series.name = "N = " + std::to_string(n);
        for (const auto& p : points) {
            if (p.n != n)
                continue;
            series.x.push_back(p.coupling_norm);
            series.y.push_back(p.mean_rho_bar);
        }
        plot.series.push_back(std::move(series));
    }
    return plot;
}

} // namespace qc
