#include "twq/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "twq/errors.hpp"
#include "twq/extractor.hpp"

namespace twq {

double shannon_entropy(std::span<const uint16_t> symbols, std::size_t alphabet_size) {
    if (symbols.empty()) throw sizing_error("shannon_entropy: empty symbol stream");
    std::vector<std::size_t> counts(alphabet_size, 0);
    for (uint16_t s : symbols) {
        if (s >= alphabet_size)
            throw data_error("shannon_entropy: symbol " + std::to_string(s) +
                             " outside alphabet of size " + std::to_string(alphabet_size));
        ++counts[s];
    }
    return shannon_entropy_from_counts(counts);
}

double shannon_entropy_from_counts(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) throw sizing_error("shannon_entropy: empty histogram");
    double h = 0.0;
    const double n = static_cast<double>(total);
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

// Bin occupancies of a sorted stream under the scheme's edges. A sample equal to an
// edge belongs to the upper bin, so boundaries resolve with lower_bound.
std::vector<std::size_t> histogram_sorted(std::span<const double> sorted,
                                          const BinningScheme& scheme) {
    const std::size_t n_bins = scheme.n_bins();
    std::vector<std::size_t> counts(n_bins);
    std::size_t prev = 0;
    for (std::size_t k = 0; k + 1 < n_bins; ++k) {
        const std::size_t pos = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), scheme.edges[k]) - sorted.begin());
        counts[k] = pos - prev;
        prev = pos;
    }
    counts[n_bins - 1] = sorted.size() - prev;
    return counts;
}

EntropyReport report_for(std::span<const double> signal_sorted,
                         std::span<const double> classical_sorted, int n_bits,
                         EdgeSource edges) {
    const BinningScheme scheme =
        fit_bins_sorted(edges == EdgeSource::signal_fitted ? signal_sorted : classical_sorted,
                        n_bits);
    EntropyReport r;
    r.n_bits = n_bits;
    r.sample_count = signal_sorted.size();
    r.h_signal = shannon_entropy_from_counts(histogram_sorted(signal_sorted, scheme));
    r.h_classical = shannon_entropy_from_counts(histogram_sorted(classical_sorted, scheme));
    r.h_effective = r.h_signal - r.h_classical;
    if (r.h_effective < 0.0) {
        std::cerr << "warning: negative effective entropy (" << r.h_effective
                  << " bits at n_bits=" << n_bits << ") clipped to 0\n";
        r.h_effective = 0.0;
    }
    return r;
}

}  // namespace

EntropyReport effective_entropy(std::span<const double> signal_samples,
                                std::span<const double> classical_samples, int n_bits,
                                EdgeSource edges) {
    const std::vector<int> range{n_bits};
    return entropy_curve(signal_samples, classical_samples, range, edges).front();
}

std::vector<EntropyReport> entropy_curve(std::span<const double> signal_samples,
                                         std::span<const double> classical_samples,
                                         std::span<const int> n_bits_range, EdgeSource edges) {
    if (signal_samples.empty() || classical_samples.empty())
        throw sizing_error("entropy: empty sample set");
    for (int nb : n_bits_range)
        if (nb < 1 || nb > 12)
            throw config_error("entropy_curve: n_bits " + std::to_string(nb) +
                               " outside [1,12]");
    if (signal_samples.size() != classical_samples.size())
        std::cerr << "warning: signal (" << signal_samples.size() << ") and classical ("
                  << classical_samples.size() << ") sample counts differ\n";

    std::vector<double> signal_sorted(signal_samples.begin(), signal_samples.end());
    std::vector<double> classical_sorted(classical_samples.begin(), classical_samples.end());
    std::sort(signal_sorted.begin(), signal_sorted.end());
    std::sort(classical_sorted.begin(), classical_sorted.end());

    std::vector<EntropyReport> out;
    out.reserve(n_bits_range.size());
    for (int nb : n_bits_range)
        out.push_back(report_for(signal_sorted, classical_sorted, nb, edges));
    return out;
}

void save_entropy_csv(std::span<const EntropyReport> reports,
                      const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    os << "n_bits,h_signal,h_classical,h_effective,sample_count\n";
    os.precision(12);
    for (const auto& r : reports) {
        os << r.n_bits << ',' << r.h_signal << ',' << r.h_classical << ',' << r.h_effective
           << ',' << r.sample_count << '\n';
    }
}

}  // namespace twq
