#include "qc/sde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qc/errors.hpp"

namespace qc {

double RngStream::normal() {
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(next_word() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_word() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double gaussian_increment(RngStream& stream, double variance) {
    if (variance < 0.0)
        throw std::invalid_argument("gaussian_increment: variance must be >= 0");
    const double n = stream.normal();
    if (variance == 0.0)
        return 0.0;
    return std::sqrt(variance) * n;
}

void TimeGrid::validate() const {
    if (!(dt > 0.0))
        throw std::invalid_argument("TimeGrid: dt must be > 0");
    if (n_steps < 1)
        throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

void check_state_finite(std::span<const double> x, const char* what) {
    for (double v : x) {
        if (!std::isfinite(v) || std::fabs(v) > kDivergenceLimit)
            throw NumericalDivergence(std::string(what) + ": state left the finite range");
    }
}

void euler_maruyama_step(std::span<double> x, std::span<const double> drift,
                         std::span<const double> noise, double dt) {
    if (drift.size() != x.size() || noise.size() != x.size())
        throw std::invalid_argument("euler_maruyama_step: size mismatch");
    check_state_finite(x, "euler_maruyama_step");
    check_state_finite(drift, "euler_maruyama_step");
    check_state_finite(noise, "euler_maruyama_step");
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += drift[i] * dt + noise[i];
    check_state_finite(x, "euler_maruyama_step");
}

} // namespace qc
