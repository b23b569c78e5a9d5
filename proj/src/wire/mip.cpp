#include "isho/wire/mip.hpp"

#include <optional>

#include <fmt/format.h>

namespace isho::wire {

namespace {

constexpr std::uint8_t kOptPad1 = 0;
constexpr std::uint8_t kOptPadN = 1;
constexpr std::uint8_t kOptNonceIndices = 4;
constexpr std::uint8_t kOptBindingAuth = 5;
constexpr std::size_t kCommonLen = 6;

void put16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v >> 8));
  b.push_back(static_cast<std::uint8_t>(v));
}

void put64(Bytes& b, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] << 8 | b[at + 1]);
}

std::uint64_t get64(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = v << 8 | b[at + i];
  return v;
}

Bytes header(MhType t) {
  return Bytes{kIpProtoNone, 0, static_cast<std::uint8_t>(t), 0, 0, 0};
}

// Pads to a multiple of 8 octets and fills in the header length.
Bytes finish(Bytes b) {
  std::size_t rem = b.size() % 8;
  if (rem != 0) {
    std::size_t pad = 8 - rem;
    if (pad == 1) {
      b.push_back(kOptPad1);
    } else {
      b.push_back(kOptPadN);
      b.push_back(static_cast<std::uint8_t>(pad - 2));
      b.insert(b.end(), pad - 2, 0);
    }
  }
  b[1] = static_cast<std::uint8_t>(b.size() / 8 - 1);
  return b;
}

void need(std::span<const std::uint8_t> b, std::size_t n, const char* what) {
  if (b.size() < n)
    throw WireError(WireErrc::Truncated, fmt::format("{} needs {} octets, got {}", what, n, b.size()));
}

struct Options {
  std::optional<std::pair<std::uint16_t, std::uint16_t>> nonces;
  std::optional<Authenticator> auth;
};

Options parse_options(std::span<const std::uint8_t> b, std::size_t pos) {
  Options o;
  while (pos < b.size()) {
    std::uint8_t type = b[pos];
    if (type == kOptPad1) {
      ++pos;
      continue;
    }
    if (pos + 2 > b.size()) throw WireError(WireErrc::Truncated, "truncated mobility option");
    std::size_t len = b[pos + 1];
    if (pos + 2 + len > b.size()) throw WireError(WireErrc::Truncated, "mobility option overruns");
    if (type == kOptNonceIndices) {
      if (len != 4) throw WireError(WireErrc::BadOption, "Nonce Indices option length must be 4");
      o.nonces = std::pair{get16(b, pos + 2), get16(b, pos + 4)};
    } else if (type == kOptBindingAuth) {
      if (len != 12)
        throw WireError(WireErrc::BadOption, "Binding Authorization Data length must be 12");
      Authenticator a;
      for (std::size_t i = 0; i < 12; ++i) a[i] = b[pos + 2 + i];
      o.auth = a;
    }
    pos += 2 + len;
  }
  return o;
}

}  // namespace

MhType mh_type(const MipMessage& m) {
  return std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HomeTestInit>) return MhType::HoTI;
        if constexpr (std::is_same_v<T, CareOfTestInit>) return MhType::CoTI;
        if constexpr (std::is_same_v<T, HomeTest>) return MhType::HoT;
        if constexpr (std::is_same_v<T, CareOfTest>) return MhType::CoT;
        if constexpr (std::is_same_v<T, BindingUpdate>) return MhType::BU;
        return MhType::BAck;
      },
      m);
}

Bytes encode_mip(const MipMessage& m) {
  Bytes b = header(mh_type(m));
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HomeTestInit> || std::is_same_v<T, CareOfTestInit>) {
          put16(b, 0);
          put64(b, x.cookie);
        } else if constexpr (std::is_same_v<T, HomeTest> || std::is_same_v<T, CareOfTest>) {
          put16(b, x.nonce_index);
          put64(b, x.cookie);
          put64(b, x.token);
        } else if constexpr (std::is_same_v<T, BindingUpdate>) {
          put16(b, x.sequence);
          b.push_back(x.flags);
          b.push_back(0);
          put16(b, x.lifetime);
          b.push_back(kOptNonceIndices);
          b.push_back(4);
          put16(b, x.home_nonce_index);
          put16(b, x.careof_nonce_index);
          b.push_back(kOptBindingAuth);
          b.push_back(12);
          b.insert(b.end(), x.authenticator.begin(), x.authenticator.end());
        } else {
          b.push_back(x.status);
          b.push_back(x.key_mgmt ? 0x80 : 0x00);
          put16(b, x.sequence);
          put16(b, x.lifetime);
        }
      },
      m);
  return finish(std::move(b));
}

MipMessage decode_mip(std::span<const std::uint8_t> b) {
  need(b, kCommonLen, "mobility header");
  if (b[0] != kIpProtoNone)
    throw WireError(WireErrc::BadNextHeader, fmt::format("payload proto {} (expected 59)", b[0]));
  std::size_t total = (static_cast<std::size_t>(b[1]) + 1) * 8;
  if (total != b.size())
    throw WireError(b.size() < total ? WireErrc::Truncated : WireErrc::LengthMismatch,
                    fmt::format("header length says {} octets, buffer has {}", total, b.size()));
  switch (b[2]) {
    case 1:
    case 2: {
      need(b, 16, "test init");
      std::uint64_t cookie = get64(b, 8);
      parse_options(b, 16);
      if (b[2] == 1) return HomeTestInit{cookie};
      return CareOfTestInit{cookie};
    }
    case 3:
    case 4: {
      need(b, 24, "test message");
      std::uint16_t idx = get16(b, 6);
      std::uint64_t cookie = get64(b, 8);
      std::uint64_t token = get64(b, 16);
      parse_options(b, 24);
      if (b[2] == 3) return HomeTest{idx, cookie, token};
      return CareOfTest{idx, cookie, token};
    }
    case 5: {
      need(b, 12, "binding update");
      BindingUpdate u;
      u.sequence = get16(b, 6);
      u.flags = b[8];
      u.lifetime = get16(b, 10);
      Options o = parse_options(b, 12);
      if (!o.nonces) throw WireError(WireErrc::MissingOption, "binding update lacks Nonce Indices");
      if (!o.auth)
        throw WireError(WireErrc::MissingOption, "binding update lacks Binding Authorization Data");
      u.home_nonce_index = o.nonces->first;
      u.careof_nonce_index = o.nonces->second;
      u.authenticator = *o.auth;
      return u;
    }
    case 6: {
      need(b, 12, "binding acknowledgement");
      BindingAck a;
      a.status = b[6];
      a.key_mgmt = (b[7] & 0x80) != 0;
      a.sequence = get16(b, 8);
      a.lifetime = get16(b, 10);
      parse_options(b, 12);
      return a;
    }
    default:
      throw WireError(WireErrc::UnknownType, fmt::format("unknown MH type {}", b[2]));
  }
}

bool acknowledges(const BindingAck& ack, const BindingUpdate& bu) {
  return ack.sequence == bu.sequence;
}

}  // namespace isho::wire
