#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qc/model.hpp"
#include "qc/sde.hpp"

namespace qc {

// A simulated trajectory in column layout: cols[c][k] is the value of
// column c at time t[k].  Interpretation of the columns depends on the
// process: (v_e, v_i), (s1, s2), (z, phi, theta), ...
struct Path {
    std::vector<std::string> labels;
    std::vector<double> t;
    std::vector<std::vector<double>> cols;

    std::size_t size() const { return t.size(); }
    const std::vector<double>& col(std::size_t c) const { return cols[c]; }
};

// Full E-I linear noise model dV = -A V dt + N dW, stepped with
// Euler-Maruyama on the given grid.  Returns n_steps + 1 samples of
// (v_e, v_i) starting from v0.
Path simulate_full_model(const EIParams& p, const TimeGrid& grid,
                         RngStream& w_e, RngStream& w_i, Vec2 v0 = {0.0, 0.0});

// Standard 2-D Ornstein-Uhlenbeck process dS = -S dt + dW with independent
// components.  Returns n_steps + 1 samples of (s1, s2).  noise_scale
// multiplies the Brownian increments; 0 gives the deterministic skeleton.
Path simulate_ou2d(const TimeGrid& grid, RngStream& w1, RngStream& w2,
                   Vec2 s0 = {0.0, 0.0}, double noise_scale = 1.0);

// Rotation/OU reconstruction V*(t_k) = (sigma/sqrt(lambda)) Q R_{-omega t_k} S_k.
// ou_path must hold the OU process sampled at the scaled times lambda * t_k of
// the same index grid; otherwise GridMismatch is thrown.
Path reconstruct_vstar(const Path& ou_path, const DerivedParams& d,
                       const TimeGrid& grid);

// Options shared by the polar simulator and the coupled network.
struct PolarOptions {
    double amplitude_rescale = kQNormReference; // divides ||Q|| in the amplitude factor
    double epsilon_floor = 1e-4;                // lower clamp for Z after each step
    bool lambda_scaled_drift = false;           // scale amplitude drift terms by lambda
    double noise_scale = 1.0;                   // 0 gives the deterministic skeleton
};

// Amplitude prefactor (sigma/sqrt(lambda)) * (||Q|| / rescale) shared by the
// single-oscillator and network steppers.
inline double polar_amp_factor(double sigma, double lambda, double q_norm,
                               double rescale) {
    return sigma / std::sqrt(lambda) * (q_norm / rescale);
}

// Per-oscillator coefficients of the amplitude/phase dynamics.
struct PolarCoeffs {
    double omega = 0.0;       // natural angular frequency [rad/s]
    double lambda = 0.0;      // damping rate [1/s]; noise variance is lambda*dt
    double amp_factor = 0.0;  // see polar_amp_factor
    double drift_scale = 1.0; // 1 for real-time drifts, lambda for scaled-time
};

struct PolarIncrement {
    double d_theta = 0.0;
    double d_phi = 0.0;
    double d_z = 0.0;
};

// One explicit Euler-Maruyama increment of the polar pair
//   d theta = (-omega + theta_coupling) dt + eta / Z
//   d Z     = drift_scale * (amp_factor * (1/(2Z) - Z) + amp_coupling) dt
//             + amp_factor * xi
// with eta, xi ~ Normal(0, lambda dt) drawn by the caller.  The uncoupled
// simulator and the network stepper share this kernel so that zero coupling
// reproduces the single-oscillator trajectories bit for bit.
inline PolarIncrement polar_increment(double z, double theta_coupling,
                                      double amp_coupling, const PolarCoeffs& k,
                                      double dt, double eta, double xi) {
    PolarIncrement inc;
    inc.d_phi = eta / z;
    inc.d_theta = (-k.omega + theta_coupling) * dt + inc.d_phi;
    inc.d_z = k.drift_scale * (k.amp_factor * (0.5 / z - z) + amp_coupling) * dt +
              k.amp_factor * xi;
    return inc;
}

// Radial amplitude Z, phase slip phi and total phase theta = theta0 - omega t + phi
// of one quasi-cycle oscillator.  Returns n_steps + 1 samples of (z, phi, theta).
// Throws InvalidInitial for z0 <= 0.
Path simulate_polar(const DerivedParams& d, const TimeGrid& grid,
                    RngStream& b_stream, RngStream& w_stream, double z0,
                    double phi0, const PolarOptions& opts = {});

} // namespace qc
