#include "twq/tms_model.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "twq/errors.hpp"

namespace twq {

double SqueezeParams::squeeze_degree() const { return std::acosh(std::sqrt(gain)); }

void SqueezeParams::validate() const {
    if (!(gain >= 1.0))
        throw config_error("gain must be >= 1 (got " + std::to_string(gain) + ")");
    if (!(seed_power > 0.0))
        throw config_error("seed_power must be > 0 (got " + std::to_string(seed_power) + ")");
    if (!(eta_probe >= 0.0 && eta_probe <= 1.0))
        throw config_error("eta_probe must be in [0,1] (got " + std::to_string(eta_probe) + ")");
    if (!(eta_conj >= 0.0 && eta_conj <= 1.0))
        throw config_error("eta_conj must be in [0,1] (got " + std::to_string(eta_conj) + ")");
    if (!(electronic_var >= 0.0))
        throw config_error("electronic_var must be >= 0");
    if (!(excess_classical_var >= 0.0))
        throw config_error("excess_classical_var must be >= 0");
}

double NoiseModel::correlation() const { return sigma_ab / std::sqrt(sigma_aa * sigma_bb); }

double to_db(double linear) { return 10.0 * std::log10(linear); }

double from_db(double db) { return std::pow(10.0, db / 10.0); }

std::pair<double, double> mean_photons(const SqueezeParams& p) {
    p.validate();
    const double n_a = p.eta_probe * p.seed_power * p.gain;
    const double n_b = p.eta_conj * p.seed_power * (p.gain - 1.0);
    return {n_a, n_b};
}

NoiseFigures individual_noise(const SqueezeParams& p) {
    p.validate();
    const double extra = p.excess_classical_var + p.electronic_var;
    NoiseFigures f;
    f.probe_rel = 1.0 + 2.0 * p.eta_probe * (p.gain - 1.0) + extra;
    f.conj_rel = 1.0 + 2.0 * p.eta_conj * (p.gain - 1.0) + extra;
    f.diff_rel = lossy_diff_noise(p);
    return f;
}

double ideal_diff_noise(double gain) {
    if (!(gain >= 1.0))
        throw config_error("gain must be >= 1 (got " + std::to_string(gain) + ")");
    return 1.0 / (2.0 * gain - 1.0);
}

double lossy_diff_noise(const SqueezeParams& p) {
    p.validate();
    if (p.eta_probe == 0.0 && p.eta_conj == 0.0)
        throw config_error("lossy_diff_noise: eta_probe and eta_conj are both 0, no light detected");
    const double g = p.gain;
    const double ea = p.eta_probe;
    const double eb = p.eta_conj;
    const double d = ea - eb;
    return 1.0 + 2.0 * (g - 1.0) * (g * d * d - eb * eb) / (g * ea + (g - 1.0) * eb);
}

NoiseModel covariance_matrix(const SqueezeParams& p) {
    p.validate();
    const double extra = p.excess_classical_var + p.electronic_var;
    NoiseModel m;
    m.sigma_aa = 1.0 + 2.0 * p.eta_probe * (p.gain - 1.0) + extra;
    m.sigma_bb = 1.0 + 2.0 * p.eta_conj * (p.gain - 1.0) + extra;
    m.sigma_ab = 2.0 * std::sqrt(p.eta_probe * p.eta_conj * p.gain * (p.gain - 1.0));
    m.electronic_var = p.electronic_var;
    // Positive semidefinite for all valid inputs; a violation is a formula bug.
    assert(m.sigma_aa * m.sigma_bb - m.sigma_ab * m.sigma_ab > -1e-12 * m.sigma_aa * m.sigma_bb);
    return m;
}

double diff_noise_from_covariance(const SqueezeParams& p) {
    const NoiseModel m = covariance_matrix(p);
    const auto [mu_a, mu_b] = mean_photons(p);
    const double num =
        mu_a * m.sigma_aa + mu_b * m.sigma_bb - 2.0 * std::sqrt(mu_a * mu_b) * m.sigma_ab;
    return num / (mu_a + mu_b);
}

}  // namespace twq
