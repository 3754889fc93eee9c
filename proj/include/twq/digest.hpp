#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace twq {

std::array<uint8_t, 64> sha512(std::span<const uint8_t> data);

std::string hex(std::span<const uint8_t> bytes);

std::string sha512_file_hex(const std::filesystem::path& path);

}  // namespace twq
