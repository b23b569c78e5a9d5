#include "isho/wire/gtpu.hpp"

#include <fmt/format.h>

namespace isho::wire {

std::string_view errc_name(WireErrc e) {
  switch (e) {
    case WireErrc::Truncated: return "truncated";
    case WireErrc::BadVersion: return "bad-version";
    case WireErrc::BadProtocolType: return "bad-protocol-type";
    case WireErrc::LengthMismatch: return "length-mismatch";
    case WireErrc::PayloadTooLarge: return "payload-too-large";
    case WireErrc::EmptyPayload: return "empty-payload";
    case WireErrc::BadNextHeader: return "bad-next-header";
    case WireErrc::UnknownType: return "unknown-type";
    case WireErrc::BadOption: return "bad-option";
    case WireErrc::MissingOption: return "missing-option";
    case WireErrc::BadPrefixLength: return "bad-prefix-length";
  }
  return "?";
}

Bytes encode_gtpu(std::uint32_t teid, std::span<const std::uint8_t> inner) {
  if (inner.empty()) throw WireError(WireErrc::EmptyPayload, "G-PDU needs a non-empty payload");
  if (inner.size() > 0xffff)
    throw WireError(WireErrc::PayloadTooLarge,
                    fmt::format("G-PDU payload of {} octets exceeds 65535", inner.size()));
  Bytes out;
  out.reserve(kGtpuHeaderLen + inner.size());
  auto len = static_cast<std::uint16_t>(inner.size());
  out.push_back(0x30);  // version 1, PT=1
  out.push_back(kGtpuGpdu);
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.push_back(static_cast<std::uint8_t>(teid >> 24));
  out.push_back(static_cast<std::uint8_t>(teid >> 16));
  out.push_back(static_cast<std::uint8_t>(teid >> 8));
  out.push_back(static_cast<std::uint8_t>(teid));
  out.insert(out.end(), inner.begin(), inner.end());
  return out;
}

GtpuPacket decode_gtpu(std::span<const std::uint8_t> b) {
  if (b.size() < kGtpuHeaderLen)
    throw WireError(WireErrc::Truncated,
                    fmt::format("GTP-U header needs 8 octets, got {}", b.size()));
  GtpuPacket p;
  auto& h = p.header;
  h.version = b[0] >> 5;
  h.pt = (b[0] & 0x10) != 0;
  h.e = (b[0] & 0x04) != 0;
  h.s = (b[0] & 0x02) != 0;
  h.pn = (b[0] & 0x01) != 0;
  if (h.version != 1) throw WireError(WireErrc::BadVersion, fmt::format("GTP version {}", h.version));
  if (!h.pt) throw WireError(WireErrc::BadProtocolType, "PT=0 is GTP', not GTP");
  h.message_type = b[1];
  h.length = static_cast<std::uint16_t>(b[2] << 8 | b[3]);
  h.teid = static_cast<std::uint32_t>(b[4]) << 24 | static_cast<std::uint32_t>(b[5]) << 16 |
           static_cast<std::uint32_t>(b[6]) << 8 | b[7];
  if (h.length != b.size() - kGtpuHeaderLen)
    throw WireError(WireErrc::LengthMismatch,
                    fmt::format("length field {} but {} octets follow the header", h.length,
                                b.size() - kGtpuHeaderLen));

  std::size_t pos = kGtpuHeaderLen;
  if (h.e || h.s || h.pn) {
    // Sequence number (2), N-PDU number (1), next extension header type (1).
    if (b.size() < pos + 4) throw WireError(WireErrc::Truncated, "missing optional GTP-U fields");
    std::uint8_t next = h.e ? b[pos + 3] : 0;
    pos += 4;
    while (next != 0) {
      if (pos >= b.size()) throw WireError(WireErrc::Truncated, "truncated extension header");
      std::size_t words = b[pos];
      if (words == 0) throw WireError(WireErrc::LengthMismatch, "zero-length extension header");
      std::size_t len = words * 4;
      if (pos + len > b.size()) throw WireError(WireErrc::Truncated, "truncated extension header");
      next = b[pos + len - 1];
      pos += len;
    }
  }
  p.inner.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.end());
  return p;
}

}  // namespace isho::wire
