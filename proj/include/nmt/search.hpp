#pragma once

#include "nmt/model.hpp"

namespace nmt {

struct Hypothesis {
  std::vector<std::int32_t> tokens;  // emitted ids, EOS excluded
  double score = 0.0;                // sum of chosen log-probs over all steps taken
  std::vector<double> beta_trace;    // sentinel gate per emitted token (adaptive mode)
  bool finished = false;             // ended by emitting EOS
  std::int32_t steps = 0;            // decode steps taken; tokens + 1 when finished
};

// score per decode step; used to rank completed hypotheses so short and long
// candidates compare fairly.
double normalized_score(const Hypothesis& h);

struct DecodeOptions {
  bool pin_sentinel_closed = false;
};

// Argmax decoding; ties go to the lowest token id. Stops at EOS or after
// max_len emitted tokens.
Hypothesis greedy_decode(const ParamStore& params, const ModelConfig& cfg,
                         std::span<const std::int32_t> src, std::int32_t max_len,
                         const DecodeOptions& opt = {});

struct BeamResult {
  Hypothesis best;
  std::vector<Hypothesis> nbest;  // nonincreasing normalized score
};

// Standard beam expansion: per step each live hypothesis proposes every
// continuation, the best `beam` survive (score, then token sequence, for
// determinism), EOS candidates retire to the finished pool. The pool is
// ranked by normalized score.
BeamResult beam_search(const ParamStore& params, const ModelConfig& cfg,
                       std::span<const std::int32_t> src, std::int32_t beam, std::int32_t max_len,
                       const DecodeOptions& opt = {});

}  // namespace nmt
