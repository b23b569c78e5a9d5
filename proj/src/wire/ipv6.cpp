#include "isho/wire/ipv6.hpp"

#include <arpa/inet.h>

#include <fmt/format.h>

namespace isho::wire {

std::string to_string(const Ipv6Address& a) {
  char buf[INET6_ADDRSTRLEN];
  inet_ntop(AF_INET6, a.data(), buf, sizeof buf);
  return buf;
}

std::optional<Ipv6Address> parse_address(std::string_view s) {
  Ipv6Address a{};
  std::string str(s);
  if (inet_pton(AF_INET6, str.c_str(), a.data()) != 1) return std::nullopt;
  return a;
}

Ipv6Prefix parse_prefix(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos)
    throw WireError(WireErrc::BadPrefixLength, fmt::format("'{}' has no prefix length", s));
  auto addr = parse_address(s.substr(0, slash));
  if (!addr) throw WireError(WireErrc::BadPrefixLength, fmt::format("bad address in '{}'", s));
  std::string len(s.substr(slash + 1));
  char* end = nullptr;
  long n = std::strtol(len.c_str(), &end, 10);
  if (len.empty() || *end != '\0' || n < 0 || n > 128)
    throw WireError(WireErrc::BadPrefixLength, fmt::format("bad prefix length in '{}'", s));
  return Ipv6Prefix{*addr, static_cast<std::uint8_t>(n)};
}

Ipv6Address autoconfigure_address(const Ipv6Prefix& p, std::uint64_t iid) {
  if (p.length > 64)
    throw WireError(WireErrc::BadPrefixLength,
                    fmt::format("prefix length {} leaves no room for a 64-bit interface id",
                                p.length));
  Ipv6Address a{};
  for (int bit = 0; bit < p.length; ++bit) {
    int byte = bit / 8;
    std::uint8_t mask = static_cast<std::uint8_t>(0x80 >> (bit % 8));
    a[static_cast<std::size_t>(byte)] |= p.prefix[static_cast<std::size_t>(byte)] & mask;
  }
  for (int i = 0; i < 8; ++i) a[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(iid >> (56 - 8 * i));
  return a;
}

bool has_prefix(const Ipv6Address& a, const Ipv6Prefix& p) {
  for (int bit = 0; bit < p.length; ++bit) {
    auto byte = static_cast<std::size_t>(bit / 8);
    std::uint8_t mask = static_cast<std::uint8_t>(0x80 >> (bit % 8));
    if ((a[byte] & mask) != (p.prefix[byte] & mask)) return false;
  }
  return true;
}

Bytes ipv6_packet(const Ipv6Address& src, const Ipv6Address& dst, std::uint8_t next_header,
                  std::span<const std::uint8_t> payload) {
  if (payload.size() > 0xffff)
    throw WireError(WireErrc::PayloadTooLarge, "IPv6 payload exceeds 65535 octets");
  Bytes b;
  b.reserve(kIpv6HeaderLen + payload.size());
  b.insert(b.end(), {0x60, 0, 0, 0});
  b.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
  b.push_back(static_cast<std::uint8_t>(payload.size()));
  b.push_back(next_header);
  b.push_back(64);
  b.insert(b.end(), src.begin(), src.end());
  b.insert(b.end(), dst.begin(), dst.end());
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

Bytes udp_packet(const Ipv6Address& src, const Ipv6Address& dst, std::uint16_t sport,
                 std::uint16_t dport, std::span<const std::uint8_t> payload) {
  std::size_t len = kUdpHeaderLen + payload.size();
  if (len > 0xffff) throw WireError(WireErrc::PayloadTooLarge, "UDP datagram exceeds 65535 octets");
  Bytes udp{static_cast<std::uint8_t>(sport >> 8), static_cast<std::uint8_t>(sport),
            static_cast<std::uint8_t>(dport >> 8), static_cast<std::uint8_t>(dport),
            static_cast<std::uint8_t>(len >> 8),   static_cast<std::uint8_t>(len),
            0,                                     0};
  udp.insert(udp.end(), payload.begin(), payload.end());

  // Checksum over the IPv6 pseudo-header.
  std::uint32_t sum = 0;
  auto add16 = [&](std::uint16_t v) { sum += v; };
  for (std::size_t i = 0; i < 16; i += 2) {
    add16(static_cast<std::uint16_t>(src[i] << 8 | src[i + 1]));
    add16(static_cast<std::uint16_t>(dst[i] << 8 | dst[i + 1]));
  }
  add16(static_cast<std::uint16_t>(len >> 16));
  add16(static_cast<std::uint16_t>(len));
  add16(kIpProtoUdp);
  for (std::size_t i = 0; i < udp.size(); i += 2) {
    std::uint16_t hi = udp[i];
    std::uint16_t lo = i + 1 < udp.size() ? udp[i + 1] : 0;
    add16(static_cast<std::uint16_t>(hi << 8 | lo));
  }
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  auto csum = static_cast<std::uint16_t>(~sum);
  if (csum == 0) csum = 0xffff;
  udp[6] = static_cast<std::uint8_t>(csum >> 8);
  udp[7] = static_cast<std::uint8_t>(csum);
  return ipv6_packet(src, dst, kIpProtoUdp, udp);
}

Ipv6View parse_ipv6(std::span<const std::uint8_t> b) {
  if (b.size() < kIpv6HeaderLen)
    throw WireError(WireErrc::Truncated, fmt::format("IPv6 header needs 40 octets, got {}", b.size()));
  if ((b[0] >> 4) != 6) throw WireError(WireErrc::BadVersion, "not an IPv6 packet");
  std::size_t plen = static_cast<std::size_t>(b[4] << 8 | b[5]);
  if (plen != b.size() - kIpv6HeaderLen)
    throw WireError(WireErrc::LengthMismatch, "IPv6 payload length disagrees with the buffer");
  Ipv6View v;
  v.next_header = b[6];
  std::copy(b.begin() + 8, b.begin() + 24, v.src.begin());
  std::copy(b.begin() + 24, b.begin() + 40, v.dst.begin());
  v.payload.assign(b.begin() + 40, b.end());
  return v;
}

Bytes data_packet(const Ipv6Address& src, const Ipv6Address& dst, std::uint32_t seq) {
  std::uint8_t body[4] = {static_cast<std::uint8_t>(seq >> 24), static_cast<std::uint8_t>(seq >> 16),
                          static_cast<std::uint8_t>(seq >> 8), static_cast<std::uint8_t>(seq)};
  return udp_packet(src, dst, kDataPort, kDataPort, body);
}

DataView parse_data_packet(std::span<const std::uint8_t> b) {
  Ipv6View ip = parse_ipv6(b);
  if (ip.next_header != kIpProtoUdp) throw WireError(WireErrc::BadNextHeader, "data packet is not UDP");
  if (ip.payload.size() != kUdpHeaderLen + 4)
    throw WireError(WireErrc::LengthMismatch, "data packet body must be 4 octets");
  const auto& p = ip.payload;
  DataView d;
  d.src = ip.src;
  d.dst = ip.dst;
  d.seq = static_cast<std::uint32_t>(p[8]) << 24 | static_cast<std::uint32_t>(p[9]) << 16 |
          static_cast<std::uint32_t>(p[10]) << 8 | p[11];
  return d;
}

}  // namespace isho::wire
