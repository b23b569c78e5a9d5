#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isho/wire/errors.hpp"

namespace isho::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kGtpuGpdu = 0xff;
inline constexpr std::uint16_t kGtpuPort = 2152;
inline constexpr std::size_t kGtpuHeaderLen = 8;

struct GtpuHeader {
  std::uint8_t version = 1;
  bool pt = true;
  bool e = false;
  bool s = false;
  bool pn = false;
  std::uint8_t message_type = kGtpuGpdu;
  std::uint16_t length = 0;  // octets after the mandatory 8-byte header
  std::uint32_t teid = 0;
  bool operator==(const GtpuHeader&) const = default;
};

struct GtpuPacket {
  GtpuHeader header;
  Bytes inner;
};

// Plain G-PDU: flags 0x30, no optional fields.
Bytes encode_gtpu(std::uint32_t teid, std::span<const std::uint8_t> inner);

// Optional sequence/N-PDU fields and extension headers are skipped.
GtpuPacket decode_gtpu(std::span<const std::uint8_t> bytes);

}  // namespace isho::wire
