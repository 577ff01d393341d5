#include "qc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "qc/errors.hpp"

namespace qc {

void EIParams::validate() const {
    if (s_ee < 0.0 || s_ei < 0.0 || s_ie < 0.0 || s_ii < 0.0)
        throw std::invalid_argument("EIParams: synaptic efficacies must be >= 0");
    if (!(tau_e > 0.0) || !(tau_i > 0.0))
        throw std::invalid_argument("EIParams: time constants must be > 0");
    if (sigma_e < 0.0 || sigma_i < 0.0)
        throw std::invalid_argument("EIParams: noise amplitudes must be >= 0");
}

EIParams fixed_point_params(double s_ii) {
    EIParams p;
    p.s_ee = kFixedSee;
    p.s_ei = kFixedSei;
    p.s_ie = kFixedSie;
    p.s_ii = s_ii;
    p.tau_e = kFixedTauE;
    p.tau_i = kFixedTauI;
    p.sigma_e = kFixedSigmaE;
    p.sigma_i = kFixedSigmaI;
    return p;
}

Mat2 drift_matrix(const EIParams& p) {
    return {(1.0 - p.s_ee) / p.tau_e, p.s_ei / p.tau_e,
            -p.s_ie / p.tau_i, (1.0 + p.s_ii) / p.tau_i};
}

Mat2 minus_drift_matrix(const EIParams& p) {
    return -1.0 * drift_matrix(p);
}

Mat2 noise_matrix(const EIParams& p) {
    return {p.sigma_e / p.tau_e, 0.0, 0.0, p.sigma_i / p.tau_i};
}

double derive_damping(const EIParams& p) {
    p.validate();
    return 0.5 * ((1.0 - p.s_ee) / p.tau_e + (1.0 + p.s_ii) / p.tau_i);
}

static double frequency_radicand(const EIParams& p) {
    const double bracket = (1.0 - p.s_ee) / p.tau_e - (1.0 + p.s_ii) / p.tau_i;
    return p.s_ei * p.s_ie / (p.tau_e * p.tau_i) - 0.25 * bracket * bracket;
}

double derive_frequency(const EIParams& p) {
    p.validate();
    const double rad = frequency_radicand(p);
    if (!(rad > 0.0))
        throw NotOscillatory("eigenvalues of -A are real: no natural frequency");
    return std::sqrt(rad);
}

Mat2 canonical_transform(const EIParams& p) {
    const double omega = derive_frequency(p); // throws NotOscillatory if real
    // Entries of -A.  The column scale kappa pins the gauge: Q is unique only
    // up to a complex scalar on the eigenvector.
    const Mat2 ma = minus_drift_matrix(p);
    const double kappa = 2.0 / p.tau_e;
    const double half_diag_gap = 0.5 * (ma.a - ma.d);
    return {-omega * kappa / ma.c, half_diag_gap * kappa / ma.c,
            0.0, kappa};
}

double derive_sigma(const EIParams& p, const Mat2& q) {
    p.validate();
    const Mat2 c = q.inverse() * noise_matrix(p); // throws SingularTransform
    return std::sqrt(0.5 * (c.a * c.a + c.b * c.b + c.c * c.c + c.d * c.d));
}

DerivedParams derive_all(const EIParams& p) {
    DerivedParams d;
    d.lambda = derive_damping(p);
    d.omega_d = derive_frequency(p);
    d.q_matrix = canonical_transform(p);
    d.q_norm = d.q_matrix.two_norm();
    d.sigma = derive_sigma(p, d.q_matrix);
    return d;
}

double solve_sii_for_frequency(double omega_d) {
    const double radicand = 2.0e6 - 9.0 * omega_d * omega_d;
    if (radicand < 0.0)
        throw OutOfRange("no S_II reproduces the requested natural frequency");
    return std::sqrt(radicand) / 250.0 - 2.0;
}

bool is_quasi_cycle(double lambda, double omega_d, double ratio_threshold) {
    return lambda > 0.0 && lambda / omega_d < ratio_threshold;
}

bool is_quasi_cycle(const DerivedParams& d, double ratio_threshold) {
    return is_quasi_cycle(d.lambda, d.omega_d, ratio_threshold);
}

} // namespace qc
