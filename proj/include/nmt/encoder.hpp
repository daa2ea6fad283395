#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nmt/layers.hpp"

namespace nmt {

// Per-word source annotations: row j of H is h_j, the concatenation of the
// forward and backward encoder states at position j.
struct Annotations {
  Var H;        // J x 2n
  std::int32_t J = 0;
  std::vector<std::uint8_t> mask;  // 1 for real tokens, 0 for padding slots
};

struct EncoderVars {
  Var src_emb;
  GruVars fwd;
  GruVars bwd;

  static EncoderVars from(const BoundParams& p);
};

// Bidirectional GRU from zero initial states. Padded positions (mask 0) do
// not advance either direction's state, so a padded batch row encodes its
// real prefix exactly as the unpadded sentence would; their annotation rows
// are only ever consumed through attention, which masks them out.
Annotations encode(Tape& tape, const EncoderVars& enc, std::span<const std::int32_t> src,
                   std::span<const std::uint8_t> mask = {});

}  // namespace nmt
