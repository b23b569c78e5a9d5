#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "isho/wire/gtpu.hpp"
#include "isho/wire/ipv6.hpp"
#include "isho/wire/mip.hpp"
#include "isho/wire/pcap.hpp"
#include "support/gen.hpp"

using namespace isho;
using namespace isho::wire;

namespace {

Bytes golden(const std::string& name) {
  std::ifstream in(std::string(ISHO_GOLDEN_DIR) + "/" + name + ".hex");
  EXPECT_TRUE(in) << name;
  std::string hex;
  in >> hex;
  Bytes b;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2)
    b.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  return b;
}

constexpr std::uint64_t kCookie = 0x0101010101010101ULL;
constexpr std::uint64_t kToken = 0x0202020202020202ULL;

template <class F>
WireErrc error_of(F&& f) {
  try {
    f();
  } catch (const WireError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no WireError";
  return WireErrc::Truncated;
}

// Internet checksum over the IPv6 pseudo-header and UDP segment.
std::uint16_t udp6_checksum(const Bytes& packet) {
  std::uint32_t sum = 0;
  auto add16 = [&](std::uint8_t hi, std::uint8_t lo) { sum += static_cast<std::uint32_t>(hi << 8 | lo); };
  for (int i = 8; i < 40; i += 2) add16(packet[i], packet[i + 1]);
  std::size_t len = packet.size() - 40;
  sum += static_cast<std::uint32_t>(len);
  sum += 17;
  for (std::size_t i = 40; i < packet.size(); i += 2)
    add16(packet[i], i + 1 < packet.size() ? packet[i + 1] : 0);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

}  // namespace

TEST(Golden, GtpuMatchesDissector) {
  Bytes zeros(4, 0);
  EXPECT_EQ(encode_gtpu(1, zeros), golden("gtpu_teid1_4zero"));
  Bytes abs(3, 0xab);
  EXPECT_EQ(encode_gtpu(0xDEADBEEF, abs), golden("gtpu_teid_deadbeef_ab"));
  auto p = decode_gtpu(golden("gtpu_teid1_4zero"));
  EXPECT_EQ(p.header.teid, 1u);
  EXPECT_EQ(p.header.length, 4u);
  EXPECT_EQ(p.header.message_type, kGtpuGpdu);
  EXPECT_EQ(p.inner, zeros);
}

TEST(Golden, MipMatchesDissector) {
  EXPECT_EQ(encode_mip(HomeTestInit{kCookie}), golden("mip_hoti"));
  EXPECT_EQ(encode_mip(CareOfTestInit{kCookie}), golden("mip_coti"));
  EXPECT_EQ(encode_mip(HomeTest{3, kCookie, kToken}), golden("mip_hot"));
  EXPECT_EQ(encode_mip(CareOfTest{3, kCookie, kToken}), golden("mip_cot"));
  BindingUpdate bu;
  bu.sequence = 7;
  bu.flags = BindingUpdate::kAck;
  bu.lifetime = 4;
  bu.home_nonce_index = 1;
  bu.careof_nonce_index = 2;
  bu.authenticator.fill(0xaa);
  EXPECT_EQ(encode_mip(bu), golden("mip_bu"));
  EXPECT_EQ(golden("mip_bu")[2], 5);  // MH type of a BU
  EXPECT_EQ(encode_mip(BindingAck{0, false, 7, 4}), golden("mip_back"));
  EXPECT_EQ(encode_mip(BindingAck{1, true, 9, 16}), golden("mip_back_k"));

  for (const char* name : {"mip_hoti", "mip_coti", "mip_hot", "mip_cot", "mip_bu", "mip_back",
                           "mip_back_k"}) {
    auto b = golden(name);
    EXPECT_EQ(encode_mip(decode_mip(b)), b) << name;
  }
  EXPECT_EQ(std::get<BindingUpdate>(decode_mip(golden("mip_bu"))), bu);
}

TEST(Gtpu, Errors) {
  EXPECT_EQ(error_of([] { encode_gtpu(0, Bytes{}); }), WireErrc::EmptyPayload);
  EXPECT_EQ(error_of([] { encode_gtpu(0, Bytes(65536, 0)); }), WireErrc::PayloadTooLarge);
  EXPECT_NO_THROW(encode_gtpu(0, Bytes(65535, 0)));
  EXPECT_EQ(error_of([] { decode_gtpu(Bytes(7, 0)); }), WireErrc::Truncated);
  Bytes pt0{0x20, 0xff, 0, 1, 0, 0, 0, 1, 9};
  EXPECT_EQ(error_of([&] { decode_gtpu(pt0); }), WireErrc::BadProtocolType);
  Bytes v2{0x50, 0xff, 0, 1, 0, 0, 0, 1, 9};
  EXPECT_EQ(error_of([&] { decode_gtpu(v2); }), WireErrc::BadVersion);
  Bytes len{0x30, 0xff, 0, 2, 0, 0, 0, 1, 9};
  EXPECT_EQ(error_of([&] { decode_gtpu(len); }), WireErrc::LengthMismatch);
}

TEST(Gtpu, SkipsOptionalFieldsAndExtensions) {
  // E=1: seq(2) npdu(1) next=0x85, one 4-octet extension ending the chain.
  Bytes b{0x34, 0xff, 0, 10, 0, 0, 0, 42, 0, 1, 0, 0x85, 1, 0xaa, 0xbb, 0, 0x11, 0x22};
  auto p = decode_gtpu(b);
  EXPECT_TRUE(p.header.e);
  EXPECT_EQ(p.header.teid, 42u);
  EXPECT_EQ(p.inner, (Bytes{0x11, 0x22}));
  Bytes s{0x32, 0xff, 0, 5, 0, 0, 0, 7, 0, 9, 0, 0, 0x33};
  EXPECT_EQ(decode_gtpu(s).inner, Bytes{0x33});
  Bytes broken{0x34, 0xff, 0, 6, 0, 0, 0, 42, 0, 1, 0, 0x85, 2, 0xaa};
  EXPECT_EQ(error_of([&] { decode_gtpu(broken); }), WireErrc::Truncated);
}

TEST(Gtpu, RoundTripRandom) {
  testgen::Rng r(31);
  for (int i = 0; i < 2000; ++i) {
    auto inner = testgen::random_bytes(r, 1, 1500);
    auto teid = static_cast<std::uint32_t>(r());
    auto enc = encode_gtpu(teid, inner);
    ASSERT_EQ(enc.size(), inner.size() + 8);
    auto p = decode_gtpu(enc);
    EXPECT_EQ(p.header.teid, teid);
    EXPECT_EQ(p.inner, inner);
  }
}

TEST(Mip, RoundTripEveryKind) {
  testgen::Rng r(32);
  for (int i = 0; i < 3000; ++i) {
    auto m = testgen::random_mip(r);
    auto enc = encode_mip(m);
    EXPECT_EQ(enc.size() % 8, 0u);
    EXPECT_EQ(enc[2], static_cast<std::uint8_t>(mh_type(m)));
    EXPECT_EQ(decode_mip(enc), m);
  }
}

TEST(Mip, Errors) {
  auto hoti = encode_mip(HomeTestInit{1});
  auto bad = hoti;
  bad[0] = 17;
  EXPECT_EQ(error_of([&] { decode_mip(bad); }), WireErrc::BadNextHeader);
  bad = hoti;
  bad[2] = 9;
  EXPECT_EQ(error_of([&] { decode_mip(bad); }), WireErrc::UnknownType);
  bad = Bytes(hoti.begin(), hoti.end() - 1);
  EXPECT_EQ(error_of([&] { decode_mip(bad); }), WireErrc::Truncated);
  EXPECT_EQ(error_of([] { decode_mip(Bytes{59}); }), WireErrc::Truncated);
  // A BU whose only options are padding.
  Bytes bu{59, 1, 5, 0, 0, 0, 0, 1, 0x80, 0, 0, 1, 1, 2, 0, 0};
  EXPECT_EQ(error_of([&] { decode_mip(bu); }), WireErrc::MissingOption);
}

TEST(Mip, AckMatching) {
  BindingUpdate bu;
  bu.sequence = 7;
  EXPECT_TRUE(acknowledges(BindingAck{0, false, 7, 4}, bu));
  EXPECT_FALSE(acknowledges(BindingAck{0, false, 8, 4}, bu));
}

TEST(Ipv6, Autoconfigure) {
  auto p = parse_prefix("2001:db8::/64");
  EXPECT_EQ(to_string(autoconfigure_address(p, 1)), "2001:db8::1");
  EXPECT_EQ(autoconfigure_address(p, 0x1234), autoconfigure_address(p, 0x1234));
  auto a = autoconfigure_address(parse_prefix("2001:db8:aa:bb::/48"), 5);
  EXPECT_EQ(to_string(a), "2001:db8:aa::5");
  EXPECT_TRUE(has_prefix(a, parse_prefix("2001:db8:aa::/48")));
  EXPECT_FALSE(has_prefix(a, parse_prefix("2001:db8:ab::/48")));
  Ipv6Prefix long_prefix = p;
  long_prefix.length = 65;
  EXPECT_EQ(error_of([&] { autoconfigure_address(long_prefix, 1); }), WireErrc::BadPrefixLength);
}

TEST(Ipv6, AddressText) {
  EXPECT_FALSE(parse_address("2001:db8::zz"));
  auto a = parse_address("fd00::1");
  ASSERT_TRUE(a);
  EXPECT_EQ(to_string(*a), "fd00::1");
  EXPECT_THROW(parse_prefix("2001:db8::"), WireError);
  EXPECT_THROW(parse_prefix("2001:db8::/129"), WireError);
}

TEST(Ipv6, AutoconfiguredAddressCarriesPrefix) {
  testgen::Rng r(33);
  for (int i = 0; i < 1000; ++i) {
    Ipv6Prefix p;
    for (auto& b : p.prefix) b = static_cast<std::uint8_t>(r());
    p.length = static_cast<std::uint8_t>(testgen::uniform(r, 0, 64));
    EXPECT_TRUE(has_prefix(autoconfigure_address(p, r()), p));
  }
}

TEST(Ipv6, UdpChecksumAndParse) {
  testgen::Rng r(34);
  for (int i = 0; i < 300; ++i) {
    Ipv6Address s{}, d{};
    for (auto& b : s) b = static_cast<std::uint8_t>(r());
    for (auto& b : d) b = static_cast<std::uint8_t>(r());
    auto payload = testgen::random_bytes(r, 0, 200);
    auto pkt = udp_packet(s, d, 1000, 2152, payload);
    EXPECT_EQ(udp6_checksum(pkt), 0) << "checksum field must cancel the sum";
    auto v = parse_ipv6(pkt);
    EXPECT_EQ(v.src, s);
    EXPECT_EQ(v.dst, d);
    EXPECT_EQ(v.next_header, kIpProtoUdp);
    EXPECT_EQ(v.payload.size(), payload.size() + 8);
  }
}

TEST(Ipv6, DataPacket) {
  auto s = *parse_address("2001:db8:ffff:ffff::1");
  auto d = *parse_address("2001:db8:1::9");
  auto v = parse_data_packet(data_packet(s, d, 0xabcdef01));
  EXPECT_EQ(v.seq, 0xabcdef01u);
  EXPECT_EQ(v.src, s);
  EXPECT_EQ(v.dst, d);
  EXPECT_THROW(parse_data_packet(ipv6_packet(s, d, 59, Bytes{1, 2})), WireError);
  EXPECT_THROW(parse_ipv6(Bytes(39, 0x60)), WireError);
}

TEST(Pcap, FileLayout) {
  auto path = (std::filesystem::temp_directory_path() / "isho_wire_test.pcap").string();
  {
    PcapWriter w(path);
    w.write(1'500'000, Bytes{0x60, 1, 2});
    EXPECT_EQ(w.records(), 1u);
  }
  std::ifstream in(path, std::ios::binary);
  Bytes b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(b.size(), 24u + 16u + 3u);
  std::uint32_t magic = b[0] | b[1] << 8 | b[2] << 16 | static_cast<std::uint32_t>(b[3]) << 24;
  EXPECT_EQ(magic, 0xa1b2c3d4u);
  EXPECT_EQ(b[20], 101);  // LINKTYPE_RAW
  EXPECT_EQ(b[24], 1);     // 1 s
  std::uint32_t usec = b[28] | b[29] << 8 | b[30] << 16;
  EXPECT_EQ(usec, 500000u);
  EXPECT_EQ(b[32], 3);     // captured length
}

TEST(Fuzz, DecodersOnlyThrowTypedErrors) {
  testgen::Rng r(35);
  auto gtpu = encode_gtpu(9, Bytes(20, 1));
  auto bu = golden("mip_bu");
  for (int i = 0; i < 20000; ++i) {
    Bytes b;
    switch (i % 3) {
      case 0: b = testgen::random_bytes(r, 0, 64); break;
      case 1: b = gtpu; break;
      default: b = bu; break;
    }
    if (i % 3 && !b.empty()) {
      int flips = testgen::uniform(r, 1, 4);
      for (int k = 0; k < flips; ++k) b[r() % b.size()] = static_cast<std::uint8_t>(r());
      if (r() % 4 == 0) b.resize(r() % (b.size() + 1));
    }
    try {
      decode_gtpu(b);
    } catch (const WireError&) {
    }
    try {
      decode_mip(b);
    } catch (const WireError&) {
    }
    try {
      parse_ipv6(b);
    } catch (const WireError&) {
    }
  }
  SUCCEED();
}
