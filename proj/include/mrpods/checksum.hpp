#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace mrpods {

// CRC-32 (IEEE 802.3, reflected, init/xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> data);

// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection).
std::uint16_t crc16(std::span<const std::uint8_t> data);

using Digest16 = std::array<std::uint8_t, 16>;

// First 16 octets of SHA-256.
Digest16 content_digest(std::span<const std::uint8_t> data);

std::string sha256_hex(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);

}  // namespace mrpods
