#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qc/csv.hpp"
#include "qc/network.hpp"
#include "qc/svg.hpp"

namespace qc {

// One (N, ||C||) cell of a coupling sweep.
struct SweepPoint {
    std::size_t n = 0;
    double coupling_norm = 0.0;
    double mean_rho_bar = 0.0;
    double sd_rho_bar = 0.0;            // sample sd across realizations
    std::vector<double> rho_bars;       // per realization
};

// Runs cfg.realizations realizations for every (sweep_n_values x
// coupling_norm_values) cell.  Realizations are independent workers; the
// aggregation is keyed by indices, so results do not depend on scheduling.
std::vector<SweepPoint> run_sweep(const NetworkConfig& cfg);

// Seed of one sweep cell realization (also used by the tests).
std::uint64_t sweep_cell_seed(std::uint64_t base, std::size_t n_index,
                              std::size_t coupling_index,
                              std::size_t realization_index);

// Single-coupling run with per-step synchronous-group bookkeeping; rows are
// ordered by ascending natural frequency.
struct RasterArtifact {
    std::size_t n = 0;
    double coupling_norm = 0.0;
    std::vector<std::size_t> order;   // sorted position -> original index
    std::vector<double> omega;        // ascending
    std::vector<double> lambda;
    std::vector<double> sigma;
    std::vector<double> qnorm;
    std::vector<int> freq_class;      // 0 extreme bins, 1 most populous, 2 rest
    std::vector<MetricsFrame> frames; // steps 0..last
    std::vector<std::uint8_t> membership; // frame-major, sorted order
    double rho_bar = 0.0;

    std::size_t frame_count() const { return frames.size(); }
    bool member(std::size_t frame, std::size_t sorted_index) const {
        return membership[frame * n + sorted_index] != 0;
    }
};

RasterArtifact run_raster(const NetworkConfig& cfg, double coupling_norm);

// 20-bin phase histograms averaged over a window at each snapshot time.
struct SnapshotTable {
    std::vector<double> times;
    std::vector<std::array<double, kPhaseBins>> bins;
    std::vector<double> rho; // mean PLI over the same windows
};

SnapshotTable run_phase_snapshots(const NetworkConfig& cfg, double coupling_norm,
                                  std::span<const double> snapshot_times);

// Default snapshot times for a run of the given duration.
std::vector<double> default_snapshot_times(double duration);

// Tables for CSV emission.
Table sweep_table(const std::vector<SweepPoint>& points);
Table raster_table(const RasterArtifact& artifact);
Table raster_metrics_table(const RasterArtifact& artifact);
Table raster_oscillator_table(const RasterArtifact& artifact);
Table snapshot_csv_table(const SnapshotTable& snapshots);

// rho-bar vs ||C|| polylines, one per N.
LinePlot sweep_plot(const std::vector<SweepPoint>& points);

} // namespace qc
