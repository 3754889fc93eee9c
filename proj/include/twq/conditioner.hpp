#pragma once

#include <cstddef>
#include <utility>

#include "twq/bitstream.hpp"

namespace twq {

// Splits the input into consecutive in_block_bits blocks (final partial block
// discarded), hashes each block with SHA-512, and concatenates the first
// out_block_bits bits of each digest. Default geometry 1280 -> 512 compresses 8-bit
// samples to 3.2 bits each.
BitStream condition(const BitStream& bits, std::size_t in_block_bits = 1280,
                    std::size_t out_block_bits = 512);

namespace serial {
BitStream condition(const BitStream& bits, std::size_t in_block_bits = 1280,
                    std::size_t out_block_bits = 512);
}

// Block geometry with out/in <= safety * h_effective/n_bits and out fixed at 512.
// The input block is the smallest multiple of 128 bits satisfying the bound.
std::pair<std::size_t, std::size_t> choose_ratio(double h_effective, int n_bits,
                                                 double safety);

}  // namespace twq
