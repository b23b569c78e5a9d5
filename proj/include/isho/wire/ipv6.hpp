#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isho/wire/errors.hpp"

namespace isho::wire {

using Bytes = std::vector<std::uint8_t>;
using Ipv6Address = std::array<std::uint8_t, 16>;

struct Ipv6Prefix {
  Ipv6Address prefix{};
  std::uint8_t length = 64;
  bool operator==(const Ipv6Prefix&) const = default;
};

std::string to_string(const Ipv6Address& a);
std::optional<Ipv6Address> parse_address(std::string_view s);
Ipv6Prefix parse_prefix(std::string_view s);  // "2001:db8::/64"

// High 64 bits from the prefix (bits past its length cleared), low 64 bits
// from the interface identifier.
Ipv6Address autoconfigure_address(const Ipv6Prefix& prefix, std::uint64_t interface_id);

bool has_prefix(const Ipv6Address& a, const Ipv6Prefix& p);

inline constexpr std::uint8_t kIpProtoUdp = 17;
inline constexpr std::size_t kIpv6HeaderLen = 40;
inline constexpr std::size_t kUdpHeaderLen = 8;

Bytes ipv6_packet(const Ipv6Address& src, const Ipv6Address& dst, std::uint8_t next_header,
                  std::span<const std::uint8_t> payload);
// IPv6 + UDP with a valid checksum.
Bytes udp_packet(const Ipv6Address& src, const Ipv6Address& dst, std::uint16_t sport,
                 std::uint16_t dport, std::span<const std::uint8_t> payload);

struct Ipv6View {
  Ipv6Address src{};
  Ipv6Address dst{};
  std::uint8_t next_header = 0;
  Bytes payload;
};

Ipv6View parse_ipv6(std::span<const std::uint8_t> bytes);

// User-plane packet of the simulated downlink stream: IPv6/UDP carrying a
// 4-byte sequence number.
inline constexpr std::uint16_t kDataPort = 5001;
Bytes data_packet(const Ipv6Address& src, const Ipv6Address& dst, std::uint32_t seq);
struct DataView {
  Ipv6Address src{};
  Ipv6Address dst{};
  std::uint32_t seq = 0;
};
DataView parse_data_packet(std::span<const std::uint8_t> bytes);

}  // namespace isho::wire
