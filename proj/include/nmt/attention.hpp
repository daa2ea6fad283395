#pragma once

#include "nmt/encoder.hpp"

namespace nmt {

// Additive alignment parameters: scores e_j = V_a' tanh(W_a t_prev + U_a h_j).
struct AttentionVars {
  Var W_a;  // n x n'
  Var U_a;  // n x 2n
  Var V_a;  // n-vector

  static AttentionVars from(const BoundParams& p);
};

// Sentinel gate and extended-score parameters. W_s_state projects the decoder
// state inside the sentinel (s = g .* tanh(W_s_state t_i)); W_s_score and U_g
// feed the sentinel's slot in the extended score vector; W_h reduces it to a
// scalar.
struct SentinelVars {
  Var W_x;        // n' x |x_i|
  Var W_t;        // n' x n'
  Var W_s_state;  // n' x n'
  Var W_s_score;  // n x n'
  Var U_g;        // n x n'
  Var W_h;        // n-vector

  static SentinelVars from(const BoundParams& p);
};

struct AttentionOutput {
  Var c;      // 2n context vector, sum_j alpha_j h_j
  Var alpha;  // J weights on the simplex
  Var e;      // J raw scores
};

struct AdaptiveOutput {
  Var c_plus;     // adaptive context: beta * s + (1 - beta) * c
  Var alpha_hat;  // J+1 weights; last slot is the sentinel's
  Var beta;       // 1x1 sentinel gate
  Var s;          // sentinel vector
  AttentionOutput base;  // the plain-attention quantities it extends
};

// e_j = V_a' tanh(W_a t_prev + U_a h_j) for every annotation row; the W_a
// t_prev product is formed once per step. Masked positions score -1e9 so the
// softmax assigns them exactly zero weight.
Var align_scores(const AttentionVars& p, Var t_prev, const Annotations& H);

// alpha = softmax(e), c = sum_j alpha_j h_j.
AttentionOutput attend(Var e, const Annotations& H);

// g = sigmoid(W_x x_i + W_t t_prev); s = g .* tanh(W_s_state t_i).
// Returns (gate, sentinel).
std::pair<Var, Var> sentinel_state(const SentinelVars& p, Var x_i, Var t_prev, Var t_i);

// Extends e with the sentinel score z = W_h' tanh(W_s_score s + U_g t_prev),
// takes alpha_hat = softmax([e; z]) and beta = alpha_hat[J+1], and mixes
// c_plus = beta * s + (1 - beta) * c. `pinned_score`, when finite, replaces z
// (used to collapse the model onto the plain-attention baseline).
AdaptiveOutput adaptive_attend(const SentinelVars& p, Var e, const Annotations& H, Var s,
                               Var t_prev, const AttentionOutput* precomputed = nullptr,
                               const double* pinned_score = nullptr);

}  // namespace nmt
