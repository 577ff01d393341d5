#include "qc/processes.hpp"

#include <array>
#include <cmath>

#include "qc/errors.hpp"

namespace qc {

static Path make_path(std::vector<std::string> labels, std::size_t n_samples) {
    Path path;
    path.labels = std::move(labels);
    path.t.reserve(n_samples);
    path.cols.assign(path.labels.size(), {});
    for (auto& c : path.cols)
        c.reserve(n_samples);
    return path;
}

Path simulate_full_model(const EIParams& p, const TimeGrid& grid,
                         RngStream& w_e, RngStream& w_i, Vec2 v0) {
    p.validate();
    grid.validate();
    const Mat2 a = drift_matrix(p);
    const Mat2 n = noise_matrix(p);

    Path path = make_path({"v_e", "v_i"}, grid.n_steps + 1);
    std::array<double, 2> x{v0.x, v0.y};
    path.t.push_back(grid.time_at(0));
    path.cols[0].push_back(x[0]);
    path.cols[1].push_back(x[1]);

    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const std::array<double, 2> drift{-(a.a * x[0] + a.b * x[1]),
                                          -(a.c * x[0] + a.d * x[1])};
        const std::array<double, 2> noise{n.a * gaussian_increment(w_e, grid.dt),
                                          n.d * gaussian_increment(w_i, grid.dt)};
        euler_maruyama_step(x, drift, noise, grid.dt);
        path.t.push_back(grid.time_at(k + 1));
        path.cols[0].push_back(x[0]);
        path.cols[1].push_back(x[1]);
    }
    return path;
}

Path simulate_ou2d(const TimeGrid& grid, RngStream& w1, RngStream& w2, Vec2 s0,
                   double noise_scale) {
    grid.validate();
    const double noise_var = noise_scale * noise_scale * grid.dt;
    Path path = make_path({"s1", "s2"}, grid.n_steps + 1);
    std::array<double, 2> x{s0.x, s0.y};
    path.t.push_back(grid.time_at(0));
    path.cols[0].push_back(x[0]);
    path.cols[1].push_back(x[1]);

    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const std::array<double, 2> drift{-x[0], -x[1]};
        const std::array<double, 2> noise{gaussian_increment(w1, noise_var),
                                          gaussian_increment(w2, noise_var)};
        euler_maruyama_step(x, drift, noise, grid.dt);
        path.t.push_back(grid.time_at(k + 1));
        path.cols[0].push_back(x[0]);
        path.cols[1].push_back(x[1]);
    }
    return path;
}

Path reconstruct_vstar(const Path& ou_path, const DerivedParams& d,
                       const TimeGrid& grid) {
    grid.validate();
    if (ou_path.size() != grid.n_steps + 1 || ou_path.cols.size() != 2)
        throw GridMismatch("reconstruct_vstar: OU path length does not match grid");
    const double scale = d.sigma / std::sqrt(d.lambda);

    Path path = make_path({"v_e", "v_i"}, grid.n_steps + 1);
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        const double t = grid.time_at(k);
        const double scaled_t = d.lambda * t;
        if (std::fabs(ou_path.t[k] - scaled_t) > 1e-9 * std::fmax(1.0, std::fabs(scaled_t)))
            throw GridMismatch("reconstruct_vstar: OU path not sampled at lambda * t");
        const Vec2 s{ou_path.cols[0][k], ou_path.cols[1][k]};
        const Vec2 v = scale * (d.q_matrix * (rotation(-d.omega_d * t) * s));
        path.t.push_back(t);
        path.cols[0].push_back(v.x);
        path.cols[1].push_back(v.y);
    }
    return path;
}

Path simulate_polar(const DerivedParams& d, const TimeGrid& grid,
                    RngStream& b_stream, RngStream& w_stream, double z0,
                    double phi0, const PolarOptions& opts) {
    grid.validate();
    if (!(z0 > 0.0))
        throw InvalidInitial("simulate_polar: z0 must be > 0");

    PolarCoeffs coeffs;
    coeffs.omega = d.omega_d;
    coeffs.lambda = d.lambda;
    coeffs.amp_factor = polar_amp_factor(d.sigma, d.lambda, d.q_norm, opts.amplitude_rescale);
    coeffs.drift_scale = opts.lambda_scaled_drift ? d.lambda : 1.0;

    Path path = make_path({"z", "phi", "theta"}, grid.n_steps + 1);
    double z = z0;
    double phi = phi0;
    double theta = phi0;
    path.t.push_back(grid.time_at(0));
    path.cols[0].push_back(z);
    path.cols[1].push_back(phi);
    path.cols[2].push_back(theta);

    const double noise_var = opts.noise_scale * opts.noise_scale * (d.lambda * grid.dt);
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double eta = gaussian_increment(b_stream, noise_var);
        const double xi = gaussian_increment(w_stream, noise_var);
        const PolarIncrement inc = polar_increment(z, 0.0, 0.0, coeffs, grid.dt, eta, xi);
        theta += inc.d_theta;
        phi += inc.d_phi;
        z = std::fmax(z + inc.d_z, opts.epsilon_floor);
        const std::array<double, 2> gate{z, theta};
        check_state_finite(gate, "simulate_polar");
        path.t.push_back(grid.time_at(k + 1));
        path.cols[0].push_back(z);
        path.cols[1].push_back(phi);
        path.cols[2].push_back(theta);
    }
    return path;
}

} // namespace qc
