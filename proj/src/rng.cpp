#include "twq/rng.hpp"

#include <cmath>
#include <numbers>

namespace twq {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t chunk_seed(uint64_t master_seed, uint64_t stream_id, uint64_t chunk_index) {
    uint64_t s = master_seed;
    uint64_t a = splitmix64(s);
    s ^= stream_id * 0x9e3779b97f4a7c15ULL;
    uint64_t b = splitmix64(s);
    s ^= chunk_index + 0x632be59bd9b4e019ULL;
    uint64_t c = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (c << 6) + (c >> 2));
}

double NormalChunkGenerator::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 53-bit uniforms; u1 shifted away from 0 so log() stays finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

namespace {

void fill_chunk(std::span<double> out, std::size_t chunk, uint64_t master_seed, uint64_t stream_id) {
    const std::size_t begin = chunk * kChunkSamples;
    const std::size_t end = std::min(begin + kChunkSamples, out.size());
    NormalChunkGenerator gen(chunk_seed(master_seed, stream_id, chunk));
    for (std::size_t i = begin; i < end; ++i) {
        out[i] = gen.next();
    }
}

}  // namespace

void fill_standard_normal(std::span<double> out, uint64_t master_seed, uint64_t stream_id) {
    const std::size_t n_chunks = (out.size() + kChunkSamples - 1) / kChunkSamples;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        fill_chunk(out, static_cast<std::size_t>(c), master_seed, stream_id);
    }
}

namespace serial {
void fill_standard_normal(std::span<double> out, uint64_t master_seed, uint64_t stream_id) {
    const std::size_t n_chunks = (out.size() + kChunkSamples - 1) / kChunkSamples;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        fill_chunk(out, c, master_seed, stream_id);
    }
}
}  // namespace serial

double deterministic_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    const std::size_t n_chunks = (n + kChunkSamples - 1) / kChunkSamples;
    std::vector<double> partials(n_chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunkSamples;
        const std::size_t end = std::min(begin + kChunkSamples, n);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += values[i];
        partials[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partials) total += p;
    return total;
}

double deterministic_dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t n_chunks = (n + kChunkSamples - 1) / kChunkSamples;
    std::vector<double> partials(n_chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunkSamples;
        const std::size_t end = std::min(begin + kChunkSamples, n);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += a[i] * b[i];
        partials[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partials) total += p;
    return total;
}

}  // namespace twq
