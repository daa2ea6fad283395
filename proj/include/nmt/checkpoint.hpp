#pragma once

#include <optional>
#include <string>

#include "nmt/model.hpp"

namespace nmt {

struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

struct Checkpoint {
  ModelConfig config;
  ParamStore params;
  ParamStore opt_g2;   // AdaDelta E[g^2] (may be empty)
  ParamStore opt_dx2;  // AdaDelta E[dx^2]
  std::int32_t epoch = 0;
  double best_dev_bleu = 0.0;
};

// Versioned binary file: magic string, format version, a length-prefixed
// canonical-text config block (model config plus training metadata), then one
// record per tensor (name length + bytes, rows, cols, row-major little-endian
// doubles). Roundtrip is bit-exact.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws CheckpointError on version mismatch, truncation, or trailing bytes;
// never yields a partial model. When `expected_mode` is given, a checkpoint
// trained in the other mode is rejected.
Checkpoint load_checkpoint(const std::string& path,
                           std::optional<Mode> expected_mode = std::nullopt);

}  // namespace nmt
