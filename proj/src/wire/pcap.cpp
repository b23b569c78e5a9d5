#include "isho/wire/pcap.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace isho::wire {

namespace {

void put32(std::ofstream& o, std::uint32_t v) {
  char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
               static_cast<char>(v >> 24)};
  o.write(b, 4);
}

void put16(std::ofstream& o, std::uint16_t v) {
  char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  o.write(b, 2);
}

}  // namespace

PcapWriter::PcapWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  put32(out_, 0xa1b2c3d4);
  put16(out_, 2);
  put16(out_, 4);
  put32(out_, 0);
  put32(out_, 0);
  put32(out_, 65535);
  put32(out_, 101);  // LINKTYPE_RAW
}

void PcapWriter::write(std::int64_t time_us, std::span<const std::uint8_t> packet) {
  auto len = static_cast<std::uint32_t>(packet.size());
  put32(out_, static_cast<std::uint32_t>(time_us / 1000000));
  put32(out_, static_cast<std::uint32_t>(time_us % 1000000));
  put32(out_, len);
  put32(out_, len);
  out_.write(reinterpret_cast<const char*>(packet.data()), static_cast<std::streamsize>(len));
  ++records_;
}

}  // namespace isho::wire
