#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qc {

inline constexpr int kPhaseBins = 20;

struct NetworkState; // network.hpp

// Phase coherence snapshot of one network step.
struct MetricsFrame {
    double t = 0.0;
    double rho = 0.0; // phase-locking index in [0, 1]
    double psi = 0.0; // mean phase in (-pi, pi]; 0 when the resultant vanishes
    std::array<int, kPhaseBins> bin_counts{};
    std::vector<int> sync_group; // indices in the most-populated phase bin
    double group_mean_omega = 0.0;
    double group_mean_z = 0.0;
    double group_mean_theta = 0.0;
    double pop_mean_z = 0.0;
    double pop_mean_theta = 0.0; // circular mean over all oscillators
};

// Wraps an angle to [-pi, pi).
double wrap_phase(double theta);

// Bin index in {0, ..., 19} for bins of width pi/10 starting at -pi.
int phase_bin(double theta);

// Phase-locking index rho = |sum_j e^{i theta_j}| / N and mean phase
// psi = arg(sum).  Throws EmptyInput for an empty vector.
std::pair<double, double> pli(std::span<const double> theta);

// Counts per phase bin; sums to theta.size().
std::array<int, kPhaseBins> phase_histogram(std::span<const double> theta);

// Indices in the most-populated phase bin; ties broken by lowest bin index.
// Throws EmptyInput for an empty vector.
std::vector<int> synchronous_group(std::span<const double> theta);

struct GroupStats {
    double mean_omega = 0.0;
    double mean_z = 0.0;
    double mean_theta = 0.0; // circular mean
};

// Arithmetic means of omega and Z over the group, circular mean of theta.
// Throws EmptyInput for an empty group.
GroupStats group_stats(std::span<const int> group, const NetworkState& state);

// Circular mean (argument of the resultant) of a set of angles; 0 when the
// resultant vanishes.
double circular_mean(std::span<const double> theta);

// One-sided averaged periodogram (Welch): mean-removed, Hann-tapered
// segments of seg_len samples with 50% overlap.
struct Spectrum {
    std::vector<double> freq_hz;
    std::vector<double> power; // density, units^2 / Hz
    double df = 0.0;

    // Frequency of the largest power over f > 0.
    double peak_frequency() const;
    // Integral of the density; approximates the series variance.
    double total_power() const;
};

inline constexpr std::size_t kSpectrumSegmentLength = 8192;

// Throws InsufficientData when the series has fewer than 256 samples.
// seg_len is clamped to the largest power of two <= series length.
Spectrum power_spectrum(std::span<const double> series, double dt,
                        std::size_t seg_len = kSpectrumSegmentLength);

// Iterative radix-2 FFT; n must be a power of two.  re/im are transformed
// in place.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);

} // namespace qc
