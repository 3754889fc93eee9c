#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "twq/bitstream.hpp"

namespace twq {

// Agreement granularity: bitwise keeps every position where the two streams carry the
// same bit; symbol keeps all n bits of a sample only when the whole symbol matches.
enum class Granularity { bitwise, symbol };

struct ReconcileResult {
    BitStream kept;        // a's bits at agreeing positions, in order
    BitStream agree_mask;  // bitmap over input positions, 1 = kept
    double agreement_rate = 0.0;
};

ReconcileResult common_bits(const BitStream& a, const BitStream& b,
                            Granularity granularity = Granularity::bitwise);

namespace serial {
ReconcileResult common_bits(const BitStream& a, const BitStream& b,
                            Granularity granularity = Granularity::bitwise);
}

// The kept positions as sorted indices (the persisted representation).
std::vector<uint64_t> mask_indices(const BitStream& agree_mask);

// Sorted 64-bit little-endian indices, streamed; lets the counterpart stream be
// reconciled offline.
void save_mask(const BitStream& agree_mask, const std::filesystem::path& path);
BitStream load_mask(const std::filesystem::path& path, std::size_t stream_bits);

// Extracts s's bits at mask positions; common_bits(a,b).kept == apply_mask(a, mask).
BitStream apply_mask(const BitStream& s, const BitStream& agree_mask);

// Monte-Carlo estimate of the per-bit agreement rate when two rho-correlated unit
// Gaussians are independently equal-frequency binned at 2^n_bits and bit-expanded.
double expected_agreement(double rho, int n_bits, std::size_t n_pairs, uint64_t seed);

}  // namespace twq
