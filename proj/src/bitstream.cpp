#include "twq/bitstream.hpp"

#include <cstring>
#include <fstream>

#include "twq/errors.hpp"

namespace twq {

namespace {
constexpr char kMagic[4] = {'T', 'W', 'Q', 'B'};
constexpr uint8_t kVersion = 0x01;

void write_u64_le(std::ostream& os, uint64_t v) {
    uint8_t buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<uint8_t>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64_le(std::istream& is) {
    uint8_t buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    return v;
}
}  // namespace

std::string to_string(BitSource s) {
    switch (s) {
        case BitSource::probe: return "probe";
        case BitSource::conjugate: return "conjugate";
        case BitSource::reconciled: return "reconciled";
        case BitSource::conditioned: return "conditioned";
        case BitSource::external: return "external";
    }
    return "unknown";
}

void BitStream::append(const BitStream& other) {
    if (other.n_bits_ == 0) return;
    const unsigned shift = n_bits_ & 7;
    const std::size_t other_bytes = (other.n_bits_ + 7) / 8;
    if (shift == 0) {
        bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.begin() + other_bytes);
        n_bits_ += other.n_bits_;
        return;
    }
    // Carry loop: each source byte contributes to the current tail byte and the next.
    const unsigned inv = 8 - shift;
    for (std::size_t i = 0; i < other_bytes; ++i) {
        const uint8_t b = other.bytes_[i];
        bytes_.back() |= static_cast<uint8_t>(b >> shift);
        bytes_.push_back(static_cast<uint8_t>(b << inv));
    }
    n_bits_ += other.n_bits_;
    bytes_.resize((n_bits_ + 7) / 8);
    // Clear any stray bits past the end of the last byte.
    const unsigned tail = n_bits_ & 7;
    if (tail) bytes_.back() &= static_cast<uint8_t>(0xFFu << (8 - tail));
}

BitStream BitStream::slice(std::size_t offset, std::size_t len) const {
    if (offset + len > n_bits_)
        throw sizing_error("BitStream::slice: range [" + std::to_string(offset) + ", " +
                           std::to_string(offset + len) + ") exceeds stream of " +
                           std::to_string(n_bits_) + " bits");
    BitStream out(bits_per_sample_, source_);
    out.resize_bits(len);
    if ((offset & 7) == 0) {
        std::memcpy(out.bytes_.data(), bytes_.data() + offset / 8, (len + 7) / 8);
    } else {
        const unsigned shift = offset & 7;
        const unsigned inv = 8 - shift;
        const std::size_t out_bytes = (len + 7) / 8;
        const std::size_t base = offset >> 3;
        for (std::size_t i = 0; i < out_bytes; ++i) {
            uint8_t v = static_cast<uint8_t>(bytes_[base + i] << shift);
            if (base + i + 1 < bytes_.size())
                v |= static_cast<uint8_t>(bytes_[base + i + 1] >> inv);
            out.bytes_[i] = v;
        }
    }
    const unsigned tail = len & 7;
    if (tail) out.bytes_.back() &= static_cast<uint8_t>(0xFFu << (8 - tail));
    return out;
}

std::vector<uint8_t> BitStream::unpack() const {
    std::vector<uint8_t> out(n_bits_);
    unpack_into(0, n_bits_, out.data());
    return out;
}

void BitStream::unpack_into(std::size_t offset, std::size_t len, uint8_t* out) const {
    for (std::size_t i = 0; i < len; ++i) out[i] = get(offset + i) ? 1 : 0;
}

void BitStream::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    os.put(static_cast<char>(kVersion));
    os.put(static_cast<char>(source_));
    os.put(static_cast<char>(bits_per_sample_));
    os.put(0);  // reserved
    write_u64_le(os, n_bits_);
    os.write(reinterpret_cast<const char*>(bytes_.data()),
             static_cast<std::streamsize>((n_bits_ + 7) / 8));
    if (!os) throw data_error("short write to " + path.string());
}

BitStream BitStream::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw data_error(path.string() + ": bad magic at byte 0 (not a TWQB bitstream)");
    const int version = is.get();
    if (version != kVersion)
        throw data_error(path.string() + ": unsupported version " + std::to_string(version) +
                         " at byte 4");
    const int source = is.get();
    const int bps = is.get();
    is.get();  // reserved
    const uint64_t n_bits = read_u64_le(is);
    if (!is) throw data_error(path.string() + ": truncated header at byte 8");
    if (source > 4) throw data_error(path.string() + ": invalid source tag at byte 5");
    BitStream out(bps, static_cast<BitSource>(source));
    out.resize_bits(n_bits);
    is.read(reinterpret_cast<char*>(out.bytes_.data()),
            static_cast<std::streamsize>((n_bits + 7) / 8));
    if (static_cast<uint64_t>(is.gcount()) != (n_bits + 7) / 8)
        throw data_error(path.string() + ": truncated payload at byte " +
                         std::to_string(16 + is.gcount()));
    return out;
}

void BitStream::save_ascii(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    constexpr std::size_t kBuf = 1 << 16;
    std::string buf;
    buf.reserve(kBuf);
    for (std::size_t i = 0; i < n_bits_; ++i) {
        buf.push_back(get(i) ? '1' : '0');
        if (buf.size() == kBuf) {
            os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw data_error("short write to " + path.string());
}

BitStream BitStream::load_ascii(const std::filesystem::path& path, BitSource source) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path.string());
    BitStream out(1, source);
    char c;
    std::size_t pos = 0;
    while (is.get(c)) {
        if (c == '0' || c == '1') {
            out.push_back(c == '1');
        } else if (c != '\n' && c != '\r' && c != ' ' && c != '\t') {
            throw data_error(path.string() + ": invalid character at byte " + std::to_string(pos));
        }
        ++pos;
    }
    return out;
}

}  // namespace twq
