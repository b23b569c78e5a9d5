#pragma once

#include <cstddef>
#include <string_view>

namespace isho::analytic::detail {

struct EmbeddedFile {
  std::string_view path;  // relative to data/sequences, e.g. "common/A.seq"
  std::string_view text;
};

extern const EmbeddedFile kEmbeddedSequences[];
extern const std::size_t kEmbeddedSequenceCount;

}  // namespace isho::analytic::detail
