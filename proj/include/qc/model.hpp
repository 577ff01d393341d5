#pragma once

#include "qc/mat2.hpp"

namespace qc {

// Raw parameters of one excitatory/inhibitory oscillator:
//   tau_E dV_E = (-V_E + S_EE V_E - S_EI V_I) dt + sigma_E dW_E
//   tau_I dV_I = (-V_I - S_II V_I + S_IE V_E) dt + sigma_I dW_I
struct EIParams {
    double s_ee = 0.0; // synaptic efficacies, dimensionless, >= 0
    double s_ei = 0.0;
    double s_ie = 0.0;
    double s_ii = 0.0;
    double tau_e = 1.0; // time constants [s], > 0
    double tau_i = 1.0;
    double sigma_e = 0.0; // noise amplitudes [mV], >= 0
    double sigma_i = 0.0;

    void validate() const; // throws std::invalid_argument
};

// Quantities derived from EIParams via the linear-noise analysis.
struct DerivedParams {
    double lambda = 0.0;  // damping rate [1/s]
    double omega_d = 0.0; // natural angular frequency [rad/s]
    double sigma = 0.0;   // scalar noise amplitude [mV]
    Mat2 q_matrix;        // canonical transform Q
    double q_norm = 0.0;  // largest singular value of Q
};

// Fixed operating-point parameters shared by all network experiments; only
// s_ii is varied to move the natural frequency.
inline constexpr double kFixedSee = 1.5;
inline constexpr double kFixedSei = 1.0;
inline constexpr double kFixedSie = 4.0;
inline constexpr double kFixedTauE = 0.003;
inline constexpr double kFixedTauI = 0.006;
inline constexpr double kFixedSigmaE = 12.0;
inline constexpr double kFixedSigmaI = 12.0;

// lambda = (250/3) * s_ii at the fixed operating point.
inline constexpr double kLambdaPerSii = 250.0 / 3.0;

// Closed-form noise scalar at the fixed operating point: sigma = 2998.38 / omega_d.
inline constexpr double kSigmaNumerator = 2998.38;

// Reference amplitude rescale: ||Q|| at the standard operating point is ~703.5.
inline constexpr double kQNormReference = 703.5;

EIParams fixed_point_params(double s_ii);

// Drift matrix A of dV = -A V dt + N dW and its negation -A.
Mat2 drift_matrix(const EIParams& p);
Mat2 minus_drift_matrix(const EIParams& p);
Mat2 noise_matrix(const EIParams& p); // diag(sigma_E/tau_E, sigma_I/tau_I)

// Damping rate: 0.5 * [(1 - S_EE)/tau_E + (1 + S_II)/tau_I].
double derive_damping(const EIParams& p);

// Natural angular frequency:
//   sqrt(S_EI S_IE / (tau_E tau_I) - 0.25 [(1 - S_EE)/tau_E - (1 + S_II)/tau_I]^2)
// Throws NotOscillatory when the radicand is not positive (real eigenvalues).
double derive_frequency(const EIParams& p);

// Transform Q with Q^{-1} (-A) Q = [[-lambda, omega_d], [-omega_d, -lambda]].
// Columns are the real and imaginary parts of the eigenvector of -A for
// eigenvalue -lambda + i omega_d, scaled so entry (2,1) = 0 and
// entry (2,2) = 2/tau_E. Throws NotOscillatory for real eigenvalues.
Mat2 canonical_transform(const EIParams& p);

// Scalar noise amplitude sqrt(0.5 Tr(Q^{-1} N N^T Q^{-T})).
// Throws SingularTransform for singular q.
double derive_sigma(const EIParams& p, const Mat2& q);

// All derived quantities at once.
DerivedParams derive_all(const EIParams& p);

// Inverts the frequency relation at the fixed operating point: the unique
// root S_II >= -2 of  omega_d^2 = (2e6 - 62500 (2 + S_II)^2) / 9,  i.e.
//   S_II = sqrt(2e6 - 9 omega_d^2) / 250 - 2.
// Throws OutOfRange when the radicand is negative.
double solve_sii_for_frequency(double omega_d);

// True iff 0 < lambda and lambda / omega_d < ratio_threshold.
bool is_quasi_cycle(double lambda, double omega_d, double ratio_threshold = 0.05);
bool is_quasi_cycle(const DerivedParams& d, double ratio_threshold = 0.05);

} // namespace qc
