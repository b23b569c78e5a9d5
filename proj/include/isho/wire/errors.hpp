#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isho::wire {

enum class WireErrc {
  Truncated,
  BadVersion,
  BadProtocolType,
  LengthMismatch,
  PayloadTooLarge,
  EmptyPayload,
  BadNextHeader,
  UnknownType,
  BadOption,
  MissingOption,
  BadPrefixLength,
};

std::string_view errc_name(WireErrc e);

class WireError : public std::runtime_error {
 public:
  WireError(WireErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  WireErrc code() const { return code_; }

 private:
  WireErrc code_;
};

}  // namespace isho::wire
