#include "qc/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qc/errors.hpp"
#include "qc/network.hpp"

namespace qc {

using std::numbers::pi;

double wrap_phase(double theta) {
    const double w = theta - 2.0 * pi * std::floor((theta + pi) / (2.0 * pi));
    // Guard the half-open interval against rounding at the seam.
    if (w >= pi)
        return -pi;
    if (w < -pi)
        return std::nextafter(-pi, 0.0);
    return w;
}

int phase_bin(double theta) {
    const double w = wrap_phase(theta);
    const int b = static_cast<int>(std::floor((w + pi) / (pi / 10.0)));
    return std::clamp(b, 0, kPhaseBins - 1);
}

std::pair<double, double> pli(std::span<const double> theta) {
    if (theta.empty())
        throw EmptyInput("pli: empty phase vector");
    double sx = 0.0, sy = 0.0;
    for (double th : theta) {
        sx += std::cos(th);
        sy += std::sin(th);
    }
    const double n = static_cast<double>(theta.size());
    const double rho = std::min(std::sqrt(sx * sx + sy * sy) / n, 1.0);
    const double psi = (sx == 0.0 && sy == 0.0) ? 0.0 : std::atan2(sy, sx);
    return {rho, psi};
}

std::array<int, kPhaseBins> phase_histogram(std::span<const double> theta) {
    std::array<int, kPhaseBins> counts{};
    for (double th : theta)
        ++counts[phase_bin(th)];
    return counts;
}

std::vector<int> synchronous_group(std::span<const double> theta) {
    if (theta.empty())
        throw EmptyInput("synchronous_group: empty phase vector");
    const auto counts = phase_histogram(theta);
    int best = 0;
    for (int b = 1; b < kPhaseBins; ++b)
        if (counts[b] > counts[best])
            best = b;
    std::vector<int> group;
    group.reserve(static_cast<std::size_t>(counts[best]));
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (phase_bin(theta[i]) == best)
            group.push_back(static_cast<int>(i));
    return group;
}

double circular_mean(std::span<const double> theta) {
    double sx = 0.0, sy = 0.0;
    for (double th : theta) {
        sx += std::cos(th);
        sy += std::sin(th);
    }
    return (sx == 0.0 && sy == 0.0) ? 0.0 : std::atan2(sy, sx);
}

GroupStats group_stats(std::span<const int> group, const NetworkState& state) {
    if (group.empty())
        throw EmptyInput("group_stats: empty group");
    GroupStats stats;
    double sx = 0.0, sy = 0.0;
    for (int i : group) {
        stats.mean_omega += state.omega[static_cast<std::size_t>(i)];
        stats.mean_z += state.z[static_cast<std::size_t>(i)];
        sx += std::cos(state.theta[static_cast<std::size_t>(i)]);
        sy += std::sin(state.theta[static_cast<std::size_t>(i)]);
    }
    const double n = static_cast<double>(group.size());
    stats.mean_omega /= n;
    stats.mean_z /= n;
    stats.mean_theta = (sx == 0.0 && sy == 0.0) ? 0.0 : std::atan2(sy, sx);
    return stats;
}

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
    const std::size_t n = re.size();
    if (n == 0 || (n & (n - 1)) != 0 || im.size() != n)
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * pi / static_cast<double>(len);
        const double wr = std::cos(ang);
        const double wi = std::sin(ang);
        for (std::size_t i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::size_t a = i + k;
                const std::size_t b = a + len / 2;
                const double tr = re[b] * cr - im[b] * ci;
                const double ti = re[b] * ci + im[b] * cr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                const double ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
    }
}

double Spectrum::peak_frequency() const {
    double best_f = 0.0;
    double best_p = -1.0;
    for (std::size_t k = 0; k < freq_hz.size(); ++k) {
        if (freq_hz[k] <= 0.0)
            continue;
        if (power[k] > best_p) {
            best_p = power[k];
            best_f = freq_hz[k];
        }
    }
    return best_f;
}

double Spectrum::total_power() const {
    double sum = 0.0;
    for (double p : power)
        sum += p;
    return sum * df;
}

Spectrum power_spectrum(std::span<const double> series, double dt,
                        std::size_t seg_len) {
    if (series.size() < 256)
        throw InsufficientData("power_spectrum: need at least 256 samples");
    if (!(dt > 0.0))
        throw std::invalid_argument("power_spectrum: dt must be > 0");
    seg_len = std::min(seg_len, std::bit_floor(series.size()));

    // Periodic Hann taper.
    std::vector<double> window(seg_len);
    double window_power = 0.0;
    for (std::size_t i = 0; i < seg_len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                                          static_cast<double>(seg_len)));
        window_power += window[i] * window[i];
    }

    const std::size_t hop = seg_len / 2;
    const std::size_t n_half = seg_len / 2;
    std::vector<double> acc(n_half + 1, 0.0);
    std::vector<double> re(seg_len), im(seg_len);
    const double fs = 1.0 / dt;

    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + seg_len <= series.size(); start += hop) {
        double mean = 0.0;
        for (std::size_t i = 0; i < seg_len; ++i)
            mean += series[start + i];
        mean /= static_cast<double>(seg_len);
        for (std::size_t i = 0; i < seg_len; ++i) {
            re[i] = (series[start + i] - mean) * window[i];
            im[i] = 0.0;
        }
        fft_radix2(re, im);
        for (std::size_t k = 0; k <= n_half; ++k)
            acc[k] += re[k] * re[k] + im[k] * im[k];
        ++n_segments;
    }

    Spectrum spec;
    spec.df = fs / static_cast<double>(seg_len);
    spec.freq_hz.resize(n_half + 1);
    spec.power.resize(n_half + 1);
    const double norm = 1.0 / (static_cast<double>(n_segments) * fs * window_power);
    for (std::size_t k = 0; k <= n_half; ++k) {
        spec.freq_hz[k] = static_cast<double>(k) * spec.df;
        double p = acc[k] * norm;
        if (k != 0 && k != n_half)
            p *= 2.0; // fold the negative frequencies
        spec.power[k] = p;
    }
    return spec;
}

} // namespace qc
