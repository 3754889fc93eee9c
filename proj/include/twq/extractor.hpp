#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "twq/bitstream.hpp"

namespace twq {

// Equal-frequency binning scheme: 2^n_bits bins delimited by empirical quantile
// edges. Edges are fit once on a calibration set and then applied unchanged.
struct BinningScheme {
    int n_bits = 0;
    std::vector<double> edges;  // strictly increasing, length 2^n_bits - 1
    std::size_t fit_size = 0;

    std::size_t n_bins() const { return std::size_t{1} << n_bits; }

    void save(const std::filesystem::path& path) const;
    static BinningScheme load(const std::filesystem::path& path);
};

// Fits quantile edges at ranks k/2^n (linear interpolation between order
// statistics). Requires at least 16 samples per bin.
BinningScheme fit_bins(std::span<const double> samples, int n_bits);

// Same fit on data the caller has already sorted ascending.
BinningScheme fit_bins_sorted(std::span<const double> sorted, int n_bits);

// Bin index of one sample: the number of edges <= x, so a sample equal to an edge
// lands in the upper bin and out-of-range values clamp to the end bins.
uint32_t bin_index(double x, const BinningScheme& scheme);

// All bin indices, parallel over samples.
std::vector<uint16_t> bin_indices(std::span<const double> samples, const BinningScheme& scheme);

// Bin index emitted as n_bits binary, most-significant bit first.
BitStream encode(std::span<const double> samples, const BinningScheme& scheme,
                 BitSource source);

namespace serial {
BitStream encode(std::span<const double> samples, const BinningScheme& scheme,
                 BitSource source);
}

}  // namespace twq
