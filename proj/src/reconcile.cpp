#include "twq/reconcile.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "twq/errors.hpp"
#include "twq/extractor.hpp"
#include "twq/rng.hpp"

namespace twq {

namespace {

// Appends a's bits at positions [begin, end) where the mask bit is set.
void extract_range(const BitStream& a, const BitStream& mask, std::size_t begin,
                   std::size_t end, BitStream& out) {
    std::size_t i = begin;
    // Whole-byte fast path once aligned: copy 8 bits when all agree.
    while (i < end) {
        if ((i & 7) == 0 && i + 8 <= end) {
            const uint8_t mb = mask.bytes()[i >> 3];
            if (mb == 0xFF) {
                out.append_symbol(a.bytes()[i >> 3], 8);
                i += 8;
                continue;
            }
            if (mb == 0x00) {
                i += 8;
                continue;
            }
        }
        if (mask.get(i)) out.push_back(a.get(i));
        ++i;
    }
}

BitStream bitwise_agreement(const BitStream& a, const BitStream& b) {
    BitStream mask(a.bits_per_sample(), a.source());
    mask.resize_bits(a.size());
    const auto& ab = a.bytes();
    const auto& bb = b.bytes();
    auto& mb = mask.mutable_bytes();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(mb.size()); ++i)
        mb[static_cast<std::size_t>(i)] =
            static_cast<uint8_t>(~(ab[static_cast<std::size_t>(i)] ^
                                   bb[static_cast<std::size_t>(i)]));
    const unsigned tail = a.size() & 7;
    if (tail) mb.back() &= static_cast<uint8_t>(0xFFu << (8 - tail));
    return mask;
}

// Demotes the bitwise mask to symbol granularity: a sample's bits stay only if the
// whole symbol agreed.
void to_symbol_granularity(BitStream& mask, int n_bits) {
    const std::size_t n_samples = mask.size() / static_cast<std::size_t>(n_bits);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n_samples); ++s) {
        const std::size_t base = static_cast<std::size_t>(s) * static_cast<std::size_t>(n_bits);
        bool all = true;
        for (int k = 0; k < n_bits && all; ++k) all = mask.get(base + k);
        if (!all)
            for (int k = 0; k < n_bits; ++k) mask.set(base + k, false);
    }
}

std::size_t popcount_bits(const BitStream& s) {
    std::size_t total = 0;
    for (uint8_t b : s.bytes()) total += static_cast<std::size_t>(std::popcount(b));
    return total;
}

ReconcileResult common_bits_impl(const BitStream& a, const BitStream& b,
                                 Granularity granularity, bool parallel) {
    if (a.size() != b.size())
        throw data_error("common_bits: stream lengths differ (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    if (a.bits_per_sample() != b.bits_per_sample())
        throw data_error("common_bits: bits_per_sample differ");
    if (granularity == Granularity::symbol &&
        a.size() % static_cast<std::size_t>(a.bits_per_sample()) != 0)
        throw data_error("common_bits: stream length not divisible by bits_per_sample");

    ReconcileResult r;
    r.agree_mask = bitwise_agreement(a, b);
    if (granularity == Granularity::symbol)
        to_symbol_granularity(r.agree_mask, a.bits_per_sample());

    r.kept = BitStream(a.bits_per_sample(), BitSource::reconciled);
    if (!parallel || a.size() < (std::size_t{1} << 20)) {
        r.kept.reserve_bits(a.size());
        extract_range(a, r.agree_mask, 0, a.size(), r.kept);
    } else {
        constexpr std::size_t kChunkBits = std::size_t{1} << 21;
        const std::size_t n_chunks = (a.size() + kChunkBits - 1) / kChunkBits;
        std::vector<BitStream> locals(n_chunks);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
            const std::size_t begin = static_cast<std::size_t>(c) * kChunkBits;
            const std::size_t end = std::min(begin + kChunkBits, a.size());
            locals[static_cast<std::size_t>(c)].reserve_bits(end - begin);
            extract_range(a, r.agree_mask, begin, end, locals[static_cast<std::size_t>(c)]);
        }
        r.kept.reserve_bits(popcount_bits(r.agree_mask));
        for (auto& local : locals) r.kept.append(local);
    }
    r.agreement_rate =
        a.size() == 0 ? 0.0 : static_cast<double>(r.kept.size()) / static_cast<double>(a.size());
    return r;
}

}  // namespace

ReconcileResult common_bits(const BitStream& a, const BitStream& b, Granularity granularity) {
    return common_bits_impl(a, b, granularity, true);
}

namespace serial {
ReconcileResult common_bits(const BitStream& a, const BitStream& b, Granularity granularity) {
    return common_bits_impl(a, b, granularity, false);
}
}  // namespace serial

std::vector<uint64_t> mask_indices(const BitStream& agree_mask) {
    std::vector<uint64_t> out;
    out.reserve(popcount_bits(agree_mask));
    for (std::size_t i = 0; i < agree_mask.size(); ++i)
        if (agree_mask.get(i)) out.push_back(i);
    return out;
}

void save_mask(const BitStream& agree_mask, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    std::vector<uint8_t> buf;
    buf.reserve(1 << 20);
    for (std::size_t i = 0; i < agree_mask.size(); ++i) {
        if (!agree_mask.get(i)) continue;
        const uint64_t v = i;
        for (int k = 0; k < 8; ++k) buf.push_back(static_cast<uint8_t>(v >> (8 * k)));
        if (buf.size() == (1 << 20)) {
            os.write(reinterpret_cast<const char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size()));
    if (!os) throw data_error("short write to " + path.string());
}

BitStream load_mask(const std::filesystem::path& path, std::size_t stream_bits) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path.string());
    BitStream mask(1, BitSource::external);
    mask.resize_bits(stream_bits);
    uint8_t buf[8];
    uint64_t prev = 0;
    bool first = true;
    std::size_t offset = 0;
    while (is.read(reinterpret_cast<char*>(buf), 8)) {
        uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<uint64_t>(buf[k]) << (8 * k);
        if (v >= stream_bits)
            throw data_error(path.string() + ": index " + std::to_string(v) + " at byte " +
                             std::to_string(offset) + " exceeds stream of " +
                             std::to_string(stream_bits) + " bits");
        if (!first && v <= prev)
            throw data_error(path.string() + ": indices not strictly increasing at byte " +
                             std::to_string(offset));
        mask.set(v, true);
        prev = v;
        first = false;
        offset += 8;
    }
    if (is.gcount() != 0)
        throw data_error(path.string() + ": truncated index at byte " + std::to_string(offset));
    return mask;
}

BitStream apply_mask(const BitStream& s, const BitStream& agree_mask) {
    if (s.size() != agree_mask.size())
        throw data_error("apply_mask: stream (" + std::to_string(s.size()) + ") and mask (" +
                         std::to_string(agree_mask.size()) + ") lengths differ");
    BitStream out(s.bits_per_sample(), BitSource::reconciled);
    out.reserve_bits(popcount_bits(agree_mask));
    extract_range(s, agree_mask, 0, s.size(), out);
    return out;
}

double expected_agreement(double rho, int n_bits, std::size_t n_pairs, uint64_t seed) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw config_error("expected_agreement: rho must be in [0,1)");
    if (n_bits < 1 || n_bits > 16)
        throw config_error("expected_agreement: n_bits must be in [1,16]");
    std::vector<double> x(n_pairs), y(n_pairs);
    const double cross = std::sqrt(1.0 - rho * rho);
    const std::size_t n_chunks = (n_pairs + kChunkSamples - 1) / kChunkSamples;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunkSamples;
        const std::size_t end = std::min(begin + kChunkSamples, n_pairs);
        NormalChunkGenerator gen(chunk_seed(seed, 0, static_cast<uint64_t>(c)));
        for (std::size_t i = begin; i < end; ++i) {
            const double z1 = gen.next();
            const double z2 = gen.next();
            x[i] = z1;
            y[i] = rho * z1 + cross * z2;
        }
    }
    const BinningScheme sx = fit_bins(x, n_bits);
    const BinningScheme sy = fit_bins(y, n_bits);
    std::size_t agree = 0;
#pragma omp parallel for schedule(static) reduction(+ : agree)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_pairs); ++i) {
        const uint32_t d = bin_index(x[static_cast<std::size_t>(i)], sx) ^
                           bin_index(y[static_cast<std::size_t>(i)], sy);
        agree += static_cast<std::size_t>(n_bits - std::popcount(d));
    }
    return static_cast<double>(agree) / (static_cast<double>(n_pairs) * n_bits);
}

}  // namespace twq
