#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "isho/wire/errors.hpp"

namespace isho::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kIpProtoMobility = 135;
inline constexpr std::uint8_t kIpProtoNone = 59;

enum class MhType : std::uint8_t { HoTI = 1, CoTI = 2, HoT = 3, CoT = 4, BU = 5, BAck = 6 };

struct HomeTestInit {
  std::uint64_t cookie = 0;
  bool operator==(const HomeTestInit&) const = default;
};

struct CareOfTestInit {
  std::uint64_t cookie = 0;
  bool operator==(const CareOfTestInit&) const = default;
};

struct HomeTest {
  std::uint16_t nonce_index = 0;
  std::uint64_t cookie = 0;  // echoes the HoTI cookie
  std::uint64_t token = 0;
  bool operator==(const HomeTest&) const = default;
};

struct CareOfTest {
  std::uint16_t nonce_index = 0;
  std::uint64_t cookie = 0;  // echoes the CoTI cookie
  std::uint64_t token = 0;
  bool operator==(const CareOfTest&) const = default;
};

using Authenticator = std::array<std::uint8_t, 12>;

struct BindingUpdate {
  static constexpr std::uint8_t kAck = 0x80;
  static constexpr std::uint8_t kHome = 0x40;

  std::uint16_t sequence = 0;
  std::uint8_t flags = kAck;
  std::uint16_t lifetime = 0;  // units of 4 seconds
  std::uint16_t home_nonce_index = 0;
  std::uint16_t careof_nonce_index = 0;
  Authenticator authenticator{};

  bool ack_requested() const { return (flags & kAck) != 0; }
  bool operator==(const BindingUpdate&) const = default;
};

struct BindingAck {
  std::uint8_t status = 0;  // 0 = accepted
  bool key_mgmt = false;
  std::uint16_t sequence = 0;
  std::uint16_t lifetime = 0;
  bool operator==(const BindingAck&) const = default;
};

using MipMessage =
    std::variant<HomeTestInit, CareOfTestInit, HomeTest, CareOfTest, BindingUpdate, BindingAck>;

MhType mh_type(const MipMessage& m);

// Mobility Header with payload proto 59 and a zero checksum.
Bytes encode_mip(const MipMessage& m);
MipMessage decode_mip(std::span<const std::uint8_t> bytes);

bool acknowledges(const BindingAck& ack, const BindingUpdate& bu);

}  // namespace isho::wire
