#include "twq/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "twq/errors.hpp"

namespace twq {

void BinningScheme::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["n_bits"] = n_bits;
    j["edges"] = edges;
    j["fit_size"] = fit_size;
    std::ofstream os(path);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

BinningScheme BinningScheme::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw data_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path.string() + ": " + e.what());
    }
    BinningScheme s;
    s.n_bits = j.at("n_bits").get<int>();
    s.edges = j.at("edges").get<std::vector<double>>();
    s.fit_size = j.at("fit_size").get<std::size_t>();
    if (s.n_bits < 1 || s.n_bits > 16 ||
        s.edges.size() != (std::size_t{1} << s.n_bits) - 1 ||
        !std::is_sorted(s.edges.begin(), s.edges.end()))
        throw data_error(path.string() + ": inconsistent binning scheme");
    return s;
}

BinningScheme fit_bins(std::span<const double> samples, int n_bits) {
    if (n_bits < 1 || n_bits > 16)
        throw config_error("fit_bins: n_bits must be in [1,16], got " + std::to_string(n_bits));
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return fit_bins_sorted(sorted, n_bits);
}

BinningScheme fit_bins_sorted(std::span<const double> sorted, int n_bits) {
    if (n_bits < 1 || n_bits > 16)
        throw config_error("fit_bins: n_bits must be in [1,16], got " + std::to_string(n_bits));
    const std::size_t n = sorted.size();
    const std::size_t n_bins = std::size_t{1} << n_bits;
    if (n < n_bins * 16)
        throw sizing_error("fit_bins: need at least " + std::to_string(n_bins * 16) +
                           " samples for " + std::to_string(n_bins) + " bins, got " +
                           std::to_string(n));
    BinningScheme scheme;
    scheme.n_bits = n_bits;
    scheme.fit_size = n;
    scheme.edges.resize(n_bins - 1);
    for (std::size_t k = 1; k < n_bins; ++k) {
        // Quantile at rank k/n_bins, linearly interpolated between order statistics.
        const double pos = static_cast<double>(n - 1) * static_cast<double>(k) /
                           static_cast<double>(n_bins);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        double edge = sorted[lo];
        if (frac > 0.0) edge += frac * (sorted[lo + 1] - sorted[lo]);
        scheme.edges[k - 1] = edge;
    }
    for (std::size_t k = 1; k < scheme.edges.size(); ++k) {
        if (!(scheme.edges[k] > scheme.edges[k - 1]))
            throw data_error("fit_bins: degenerate data, edges at quantiles " +
                             std::to_string(k) + "/" + std::to_string(n_bins) + " and " +
                             std::to_string(k + 1) + "/" + std::to_string(n_bins) +
                             " coincide (fewer than " + std::to_string(n_bins) +
                             " distinct values)");
    }
    return scheme;
}

uint32_t bin_index(double x, const BinningScheme& scheme) {
    const auto it = std::upper_bound(scheme.edges.begin(), scheme.edges.end(), x);
    return static_cast<uint32_t>(it - scheme.edges.begin());
}

std::vector<uint16_t> bin_indices(std::span<const double> samples, const BinningScheme& scheme) {
    std::vector<uint16_t> out(samples.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples.size()); ++i) {
        out[static_cast<std::size_t>(i)] =
            static_cast<uint16_t>(bin_index(samples[static_cast<std::size_t>(i)], scheme));
    }
    return out;
}

namespace {

// Encodes samples[begin..end) into the packed buffer starting at bit begin*n_bits.
// Callers split work at multiples of 8 samples so every range is byte-aligned.
void encode_range(std::span<const double> samples, const BinningScheme& scheme,
                  std::size_t begin, std::size_t end, uint8_t* bytes) {
    const int n_bits = scheme.n_bits;
    std::size_t byte_pos = begin * static_cast<std::size_t>(n_bits) / 8;
    uint64_t acc = 0;
    int acc_bits = 0;
    for (std::size_t i = begin; i < end; ++i) {
        acc = (acc << n_bits) | bin_index(samples[i], scheme);
        acc_bits += n_bits;
        while (acc_bits >= 8) {
            acc_bits -= 8;
            bytes[byte_pos++] = static_cast<uint8_t>(acc >> acc_bits);
        }
    }
    if (acc_bits > 0) bytes[byte_pos] = static_cast<uint8_t>(acc << (8 - acc_bits));
}

}  // namespace

BitStream encode(std::span<const double> samples, const BinningScheme& scheme,
                 BitSource source) {
    BitStream out(scheme.n_bits, source);
    out.resize_bits(samples.size() * static_cast<std::size_t>(scheme.n_bits));
    // Chunks of whole multiples of 8 samples keep every range byte-aligned.
    constexpr std::size_t kChunk = std::size_t{1} << 16;
    const std::size_t n_chunks = (samples.size() + kChunk - 1) / kChunk;
    uint8_t* bytes = out.mutable_bytes().data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        const std::size_t end = std::min(begin + kChunk, samples.size());
        encode_range(samples, scheme, begin, end, bytes);
    }
    return out;
}

namespace serial {
BitStream encode(std::span<const double> samples, const BinningScheme& scheme,
                 BitSource source) {
    BitStream out(scheme.n_bits, source);
    out.resize_bits(samples.size() * static_cast<std::size_t>(scheme.n_bits));
    encode_range(samples, scheme, 0, samples.size(), out.mutable_bytes().data());
    return out;
}
}  // namespace serial

}  // namespace twq
