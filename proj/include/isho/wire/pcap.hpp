#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>

namespace isho::wire {

// Classic libpcap file with LINKTYPE_RAW: every record is a bare IP packet.
class PcapWriter {
 public:
  explicit PcapWriter(const std::string& path);
  void write(std::int64_t time_us, std::span<const std::uint8_t> packet);
  std::size_t records() const { return records_; }

 private:
  std::ofstream out_;
  std::size_t records_ = 0;
};

}  // namespace isho::wire
