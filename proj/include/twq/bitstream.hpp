#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace twq {

enum class BitSource : uint8_t {
    probe = 0,
    conjugate = 1,
    reconciled = 2,
    conditioned = 3,
    external = 4,
};

std::string to_string(BitSource s);

// Ordered bit sequence, packed MSB-first within each byte (bit i is byte i/8,
// position 7 - i%8). The packing order matches the big-endian block packing the
// conditioner feeds to the hash.
class BitStream {
public:
    BitStream() = default;
    BitStream(int bits_per_sample, BitSource source)
        : bits_per_sample_(bits_per_sample), source_(source) {}

    std::size_t size() const { return n_bits_; }
    bool empty() const { return n_bits_ == 0; }

    bool get(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1; }

    void set(std::size_t i, bool v) {
        const uint8_t mask = static_cast<uint8_t>(1u << (7 - (i & 7)));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<uint8_t>(~mask);
    }

    void push_back(bool v) {
        if ((n_bits_ & 7) == 0) bytes_.push_back(0);
        ++n_bits_;
        if (v) set(n_bits_ - 1, true);
    }

    // Appends the low n_bits of sym, most-significant first.
    void append_symbol(uint32_t sym, int n_bits) {
        for (int b = n_bits - 1; b >= 0; --b) push_back((sym >> b) & 1);
    }

    // Shift-aware splice of a whole stream.
    void append(const BitStream& other);

    BitStream slice(std::size_t offset, std::size_t len) const;

    // One byte per bit, values 0/1. Convenience for the statistics kernels.
    std::vector<uint8_t> unpack() const;
    void unpack_into(std::size_t offset, std::size_t len, uint8_t* out) const;

    const std::vector<uint8_t>& bytes() const { return bytes_; }
    std::vector<uint8_t>& mutable_bytes() { return bytes_; }

    void reserve_bits(std::size_t n) { bytes_.reserve((n + 7) / 8); }

    // Grows to n bits; new bits are zero. Used by kernels that write bits in place.
    void resize_bits(std::size_t n) {
        bytes_.resize((n + 7) / 8, 0);
        n_bits_ = n;
    }

    int bits_per_sample() const { return bits_per_sample_; }
    void set_bits_per_sample(int n) { bits_per_sample_ = n; }
    BitSource source() const { return source_; }
    void set_source(BitSource s) { source_ = s; }

    bool operator==(const BitStream& other) const {
        return n_bits_ == other.n_bits_ && bytes_ == other.bytes_;
    }

    // Packed persistence: magic TWQB, version, source, bits/sample, bit count, payload.
    void save(const std::filesystem::path& path) const;
    static BitStream load(const std::filesystem::path& path);

    // One '0'/'1' character per bit, no separators (NIST/TestU01 file-driver input).
    void save_ascii(const std::filesystem::path& path) const;
    static BitStream load_ascii(const std::filesystem::path& path,
                                BitSource source = BitSource::external);

private:
    std::vector<uint8_t> bytes_;
    std::size_t n_bits_ = 0;
    int bits_per_sample_ = 1;
    BitSource source_ = BitSource::external;
};

}  // namespace twq
