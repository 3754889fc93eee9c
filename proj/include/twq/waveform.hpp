#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "twq/rng.hpp"
#include "twq/tms_model.hpp"

namespace twq {

struct AcquisitionConfig {
    std::size_t n_samples = 0;
    double sample_rate = 1.25e6;   // Hz, informational
    double analysis_freq = 2.0e6;  // Hz, informational
    double if_bandwidth = 1.0e6;   // Hz, used only when filter_enabled
    uint64_t rng_seed = 0;
    bool filter_enabled = false;

    void validate() const;  // throws config_error / sizing_error
};

struct WaveformMeta {
    SqueezeParams params;
    AcquisitionConfig config;
    std::string source = "synthesized";  // "synthesized" or "external"
    std::string input_digest;            // sha512 of the ingested file, when external
};

// Paired fluctuation streams in shot-noise-normalized units plus the two reference
// streams (shot_ref unit variance, elec_ref variance = electronic_var). All channels
// are zero-mean: the DC component is removed like the RF bias tee in front of the
// spectrum analyzer.
struct TwinWaveform {
    std::vector<double> probe;
    std::vector<double> conjugate;
    std::vector<double> shot_ref;
    std::vector<double> elec_ref;
    WaveformMeta meta;

    std::size_t size() const { return probe.size(); }
};

struct Sym2x2 {
    double aa = 1.0;
    double bb = 1.0;
    double ab = 0.0;
};

// Sequential correlated-pair generator from the closed-form 2x2 square-root factor:
//   x = l11*z1,  y = l21*z1 + l22*z2.
class BivariateGaussianSampler {
public:
    BivariateGaussianSampler(const Sym2x2& sigma, uint64_t seed);

    std::pair<double, double> next();

private:
    double l11_, l21_, l22_;
    NormalChunkGenerator gen_;
};

// Validates the factorization inputs and returns (l11, l21, l22). Rejects aa <= 0 and
// a discriminant below -1e-12 (tiny negatives clamp to zero).
std::array<double, 3> bivariate_factor(const Sym2x2& sigma);

TwinWaveform synthesize(const SqueezeParams& p, const AcquisitionConfig& cfg);

namespace serial {
TwinWaveform synthesize(const SqueezeParams& p, const AcquisitionConfig& cfg);
}

// Single-pole low-pass with cutoff cfg.if_bandwidth at cfg.sample_rate.
std::vector<double> apply_if_filter(std::span<const double> samples,
                                    const AcquisitionConfig& cfg);

enum class WaveformFormat { csv, binary };

// CSV: header probe,conjugate,shot_ref,elec_ref; shortest round-trip float text.
// Binary: magic TWQR, version 0x01, u64 LE count, interleaved f64 LE samples,
// plus a <name>.meta.json sidecar.
void write_waveform(const TwinWaveform& w, const std::filesystem::path& path,
                    WaveformFormat format);

TwinWaveform ingest_waveform(const std::filesystem::path& path, WaveformFormat format);

}  // namespace twq
