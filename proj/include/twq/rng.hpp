#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace twq {

// Streams are generated in fixed-size chunks, each chunk seeded independently from
// (master seed, stream id, chunk index). Chunk k of a stream is identical no matter
// which thread produces it, so parallel generation assembles to the same bytes as
// sequential generation.
inline constexpr std::size_t kChunkSamples = std::size_t{1} << 16;

uint64_t splitmix64(uint64_t& state);

// Mixes (seed, stream, chunk) into one 64-bit chunk seed.
uint64_t chunk_seed(uint64_t master_seed, uint64_t stream_id, uint64_t chunk_index);

// Box-Muller normal generator on top of mt19937_64. Fixed uniform->normal mapping
// so output bytes do not depend on any standard-library distribution internals.
class NormalChunkGenerator {
public:
    explicit NormalChunkGenerator(uint64_t seed) : engine_(seed) {}

    double next();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Fills out[0..n) with standard normals for the given (seed, stream). Parallel over
// chunks; byte-identical results for any thread count.
void fill_standard_normal(std::span<double> out, uint64_t master_seed, uint64_t stream_id);

namespace serial {
void fill_standard_normal(std::span<double> out, uint64_t master_seed, uint64_t stream_id);
}

// Chunk-ordered pairwise reduction: partial sums are taken per fixed chunk and
// combined in chunk order, so the result is independent of thread count.
double deterministic_sum(std::span<const double> values);
double deterministic_dot(std::span<const double> a, std::span<const double> b);

}  // namespace twq
