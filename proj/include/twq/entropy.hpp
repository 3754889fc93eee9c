#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace twq {

struct EntropyReport {
    int n_bits = 0;
    double h_signal = 0.0;     // bits/sample
    double h_classical = 0.0;  // bits/sample
    double h_effective = 0.0;  // h_signal - h_classical, clipped at 0
    std::size_t sample_count = 0;
};

// Which stream the bin edges are fit on before both streams are encoded. The
// signal-fitted default measures how much of the extracted symbol stream the
// classical noise can explain.
enum class EdgeSource { signal_fitted, noise_fitted };

// Plug-in Shannon entropy of a symbol stream, bits/sample. Empty bins contribute 0.
double shannon_entropy(std::span<const uint16_t> symbols, std::size_t alphabet_size);

double shannon_entropy_from_counts(std::span<const std::size_t> counts);

EntropyReport effective_entropy(std::span<const double> signal_samples,
                                std::span<const double> classical_samples, int n_bits,
                                EdgeSource edges = EdgeSource::signal_fitted);

// One report per n_bits value. Sorts each stream once and derives every histogram
// from the sorted arrays, so the whole curve costs one sort plus binary searches.
std::vector<EntropyReport> entropy_curve(std::span<const double> signal_samples,
                                         std::span<const double> classical_samples,
                                         std::span<const int> n_bits_range,
                                         EdgeSource edges = EdgeSource::signal_fitted);

// CSV with header n_bits,h_signal,h_classical,h_effective,sample_count.
void save_entropy_csv(std::span<const EntropyReport> reports,
                      const std::filesystem::path& path);

}  // namespace twq
