#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "nmt/attention.hpp"
#include "nmt/encoder.hpp"
#include "nmt/layers.hpp"

namespace nmt {

enum class Mode { kBaseline, kAdaptive };

std::string mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& name);

struct ModelConfig {
  Mode mode = Mode::kAdaptive;
  std::int32_t src_vocab = 0;  // sizes include the 4 specials
  std::int32_t tgt_vocab = 0;
  std::int32_t emb_dim = 32;
  std::int32_t hidden_dim = 64;  // decoder width; also the annotation width 2n
  double dropout_rate = 0.2;
  std::int32_t max_len = 50;
  std::uint64_t seed = 1;

  // hidden_dim must be even: each encoder direction runs at hidden_dim / 2 so
  // annotations, decoder state, and the sentinel all share one width.
  void validate() const;
};

// Fresh parameters: uniform(-0.08, 0.08) weights, zero biases, seeded from
// cfg.seed. Adaptive mode adds the sentinel group on top of the baseline set.
ParamStore init_params(const ModelConfig& cfg);

// The baseline subset of an adaptive parameter store (drops sent.*).
ParamStore strip_sentinel(const ParamStore& params);

// All bound parameter handles of one tape, resolved once.
struct ModelVars {
  EncoderVars enc;
  Var tgt_emb;
  GruVars dec;
  AttentionVars att;
  SentinelVars sent;  // bound only in adaptive mode
  Var W_p;
  Var W_init;
  bool adaptive = false;

  static ModelVars from(const BoundParams& p, const ModelConfig& cfg);
};

struct StepOptions {
  bool training = false;
  Rng* dropout_rng = nullptr;  // must be set when training with dropout_rate > 0
  // Replaces the sentinel's score slot with -1e9, collapsing the adaptive
  // model onto the baseline it extends.
  bool pin_sentinel_closed = false;
};

struct StepResult {
  Var log_probs;  // log P(y_i | ...), length tgt_vocab
  Var state;      // t_i
  Var weights;    // alpha (J) in baseline mode, alpha_hat (J+1) in adaptive
  Var beta;       // sentinel gate, invalid in baseline mode
};

// Host-side copy of one step's observables.
struct StepTrace {
  Vec log_probs;
  Vec weights;
  double beta = 0.0;
  bool has_beta = false;
};

StepTrace to_trace(const StepResult& r);

// t_0 = tanh(W_init * mean_j h_j), mean over real annotation rows.
Var init_decoder_state(Tape& tape, const ModelVars& mv, const Annotations& H);

StepResult decode_step(const ModelVars& mv, const ModelConfig& cfg,
                       std::int32_t y_prev, Var t_prev, const Annotations& H,
                       const StepOptions& opt = {});

// Negative log-likelihood of the target given the source: decoder inputs are
// BOS-prefixed, the predicted sequence is EOS-terminated. Masks (optional)
// mark real tokens in padded rows; padded target positions contribute no loss
// and padded source positions are excluded by the attention mask.
Var sentence_loss(Tape& tape, const ModelVars& mv, const ModelConfig& cfg,
                  std::span<const std::int32_t> src, std::span<const std::int32_t> tgt,
                  const StepOptions& opt = {}, std::span<const std::uint8_t> src_mask = {},
                  std::span<const std::uint8_t> tgt_mask = {});

// One AdaDelta step (Zeiler): E[g2] <- rho E[g2] + (1-rho) g2,
// dx = -(RMS[dx]/RMS[g]) g, E[dx2] <- rho E[dx2] + (1-rho) dx2, theta += dx.
void adadelta_update(ParamStore& params, const ParamStore& grads, ParamStore& acc_g2,
                     ParamStore& acc_dx2, double rho, double eps);

}  // namespace nmt
