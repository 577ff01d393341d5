#pragma once

#include <cstdint>
#include <span>

namespace qc {

// States with magnitude beyond this are treated as numerically divergent.
inline constexpr double kDivergenceLimit = 1e12;

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic seed derivation for sub-experiments (sweep cells,
// realizations, ...).  Pure function of its inputs, independent of
// scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(base);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Counter-based random stream: every draw is a hash of
// (seed, stream_id, counter), so identical (seed, stream_id) replays the
// identical sequence regardless of thread scheduling, and distinct
// stream_ids are statistically independent.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;

    RngStream() = default;
    RngStream(std::uint64_t seed_, std::uint64_t stream_id_)
        : seed(seed_), stream_id(stream_id_) {}

    std::uint64_t next_word() {
        std::uint64_t h = mix64(seed);
        h = mix64(h ^ stream_id);
        h = mix64(h ^ counter);
        ++counter;
        return h;
    }

    // Uniform on [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes two counter ticks.
    double normal();
};

// One draw from Normal(0, variance); variance = 0 yields exactly 0.
// Always advances the stream so parallel bookkeeping stays aligned.
double gaussian_increment(RngStream& stream, double variance);

// Uniform integration grid: t_k = t0 + k * dt, k = 0..n_steps.
struct TimeGrid {
    double dt = 1.0;
    std::size_t n_steps = 1;
    double t0 = 0.0;

    void validate() const; // throws std::invalid_argument
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double duration() const { return static_cast<double>(n_steps) * dt; }
};

// In-place explicit Euler-Maruyama update: x += drift * dt + noise, where
// noise is a pre-scaled increment already carrying its sqrt-variance.
// Throws NumericalDivergence on non-finite input or output.
void euler_maruyama_step(std::span<double> x, std::span<const double> drift,
                         std::span<const double> noise, double dt);

// Finiteness/magnitude gate shared by the steppers.
void check_state_finite(std::span<const double> x, const char* what);

} // namespace qc
