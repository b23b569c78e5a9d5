#include "isho/protocols/payload.hpp"

namespace isho::proto {

wire::Bytes encode_fields(const Fields& f) {
  std::string s;
  for (const auto& [k, v] : f) {
    if (!s.empty()) s += ';';
    s += k;
    s += '=';
    s += v;
  }
  return wire::Bytes(s.begin(), s.end());
}

Fields decode_fields(const wire::Bytes& b) {
  Fields f;
  std::string s(b.begin(), b.end());
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto end = s.find(';', pos);
    if (end == std::string::npos) end = s.size();
    auto item = s.substr(pos, end - pos);
    auto eq = item.find('=');
    if (eq != std::string::npos) f[item.substr(0, eq)] = item.substr(eq + 1);
    pos = end + 1;
  }
  return f;
}

}  // namespace isho::proto
