#include "twq/conditioner.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <openssl/evp.h>

#include "twq/digest.hpp"
#include "twq/errors.hpp"

namespace twq {

namespace {

BitStream condition_impl(const BitStream& bits, std::size_t in_block_bits,
                         std::size_t out_block_bits, bool parallel) {
    if (out_block_bits == 0 || out_block_bits > 512)
        throw config_error("condition: out_block_bits must be in [1,512]");
    if (in_block_bits <= out_block_bits)
        throw config_error("condition: in_block_bits must exceed out_block_bits");
    if (bits.size() < in_block_bits)
        throw sizing_error("condition: input of " + std::to_string(bits.size()) +
                           " bits is shorter than one block of " +
                           std::to_string(in_block_bits));

    const std::size_t n_blocks = bits.size() / in_block_bits;
    const std::size_t in_bytes = (in_block_bits + 7) / 8;
    std::vector<std::array<uint8_t, 64>> digests(n_blocks);

#pragma omp parallel if (parallel)
    {
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        std::vector<uint8_t> block(in_bytes);
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_blocks); ++k) {
            const std::size_t offset = static_cast<std::size_t>(k) * in_block_bits;
            const uint8_t* src;
            BitStream tmp;
            if ((offset & 7) == 0 && (in_block_bits & 7) == 0) {
                src = bits.bytes().data() + offset / 8;
            } else {
                tmp = bits.slice(offset, in_block_bits);
                src = tmp.bytes().data();
            }
            unsigned int len = 0;
            EVP_DigestInit_ex(ctx, EVP_sha512(), nullptr);
            EVP_DigestUpdate(ctx, src, in_bytes);
            EVP_DigestFinal_ex(ctx, digests[static_cast<std::size_t>(k)].data(), &len);
        }
        EVP_MD_CTX_free(ctx);
    }

    BitStream out(bits.bits_per_sample(), BitSource::conditioned);
    out.reserve_bits(n_blocks * out_block_bits);
    if ((out_block_bits & 7) == 0) {
        auto& bytes = out.mutable_bytes();
        for (const auto& d : digests)
            bytes.insert(bytes.end(), d.begin(), d.begin() + out_block_bits / 8);
        out.resize_bits(n_blocks * out_block_bits);
    } else {
        for (const auto& d : digests)
            for (std::size_t i = 0; i < out_block_bits; ++i)
                out.push_back((d[i >> 3] >> (7 - (i & 7))) & 1);
    }
    return out;
}

}  // namespace

BitStream condition(const BitStream& bits, std::size_t in_block_bits,
                    std::size_t out_block_bits) {
    return condition_impl(bits, in_block_bits, out_block_bits, true);
}

namespace serial {
BitStream condition(const BitStream& bits, std::size_t in_block_bits,
                    std::size_t out_block_bits) {
    return condition_impl(bits, in_block_bits, out_block_bits, false);
}
}  // namespace serial

std::pair<std::size_t, std::size_t> choose_ratio(double h_effective, int n_bits,
                                                 double safety) {
    if (!(h_effective > 0.0))
        throw config_error("choose_ratio: h_effective must be > 0");
    if (!(h_effective <= static_cast<double>(n_bits) + 1e-9))
        throw config_error("choose_ratio: h_effective exceeds n_bits");
    if (!(safety > 0.0 && safety <= 1.0))
        throw config_error("choose_ratio: safety must be in (0,1]");
    constexpr std::size_t out = 512;
    const double max_ratio = safety * h_effective / static_cast<double>(n_bits);
    const double in_min = static_cast<double>(out) / max_ratio;
    std::size_t in = static_cast<std::size_t>(std::ceil(in_min / 128.0)) * 128;
    if (in <= out) in = out + 128;  // ratio 1 still needs in > out for a real compression
    return {in, out};
}

}  // namespace twq
