#pragma once

#include <map>
#include <string>

#include "isho/wire/ipv6.hpp"

namespace isho::proto {

// Control messages without a standard wire format (NAS, SBI, PFCP stand-ins)
// carry "key=value;key=value" text.
using Fields = std::map<std::string, std::string>;

wire::Bytes encode_fields(const Fields& f);
Fields decode_fields(const wire::Bytes& b);

}  // namespace isho::proto
