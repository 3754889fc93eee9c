#pragma once

#include <utility>

namespace twq {

// Physics configuration of the seeded four-wave-mixing source. Noise knobs are in
// shot-noise units per detector/beam. The squeezing phase and second displacement do
// not enter intensity statistics in the bright-seed, zero-second-displacement regime
// modelled here, so they are not fields.
struct SqueezeParams {
    double gain = 1.0;                  // G >= 1, G = cosh^2(s)
    double seed_power = 1.0;            // mean seed photon number, > 0
    double eta_probe = 1.0;             // transmission of the probe path, [0,1]
    double eta_conj = 1.0;              // transmission of the conjugate path, [0,1]
    double electronic_var = 0.0;        // detector electronic noise variance, >= 0
    double excess_classical_var = 0.0;  // uncorrelated classical noise per beam, >= 0

    // Squeeze degree s with cosh^2(s) == gain.
    double squeeze_degree() const;

    void validate() const;  // throws config_error
};

// Relative intensity noise figures, linear, in shot-noise units (1.0 = shot noise).
struct NoiseFigures {
    double probe_rel = 1.0;
    double conj_rel = 1.0;
    double diff_rel = 1.0;
};

// Normalized 2x2 covariance of the per-beam intensity fluctuations, each channel in
// its own shot-noise units, plus the electronic variance carried through to synthesis.
struct NoiseModel {
    double sigma_aa = 1.0;
    double sigma_bb = 1.0;
    double sigma_ab = 0.0;
    double electronic_var = 0.0;

    double correlation() const;  // sigma_ab / sqrt(sigma_aa * sigma_bb)
};

double to_db(double linear);
double from_db(double db);

// Mean detected photon numbers (probe, conjugate).
std::pair<double, double> mean_photons(const SqueezeParams& p);

// Individual-beam relative intensity noise; probe/conj from the lossy single-beam
// limits, diff from lossy_diff_noise.
NoiseFigures individual_noise(const SqueezeParams& p);

// Ideal (lossless) intensity-difference noise, 1/(2G-1).
double ideal_diff_noise(double gain);

// Intensity-difference squeezing with per-beam losses (pure optical figure; the
// electronic and excess classical knobs are excluded here).
double lossy_diff_noise(const SqueezeParams& p);

NoiseModel covariance_matrix(const SqueezeParams& p);

// Difference noise recomputed from the covariance matrix with mean-photon weights.
// Must agree with lossy_diff_noise when electronic_var == excess_classical_var == 0.
double diff_noise_from_covariance(const SqueezeParams& p);

}  // namespace twq
