#include "nmt/attention.hpp"

namespace nmt {

namespace {
constexpr double kMaskScore = -1e9;
}

AttentionVars AttentionVars::from(const BoundParams& p) {
  return AttentionVars{p["att.W_a"], p["att.U_a"], p["att.V_a"]};
}

SentinelVars SentinelVars::from(const BoundParams& p) {
  SentinelVars s;
  s.W_x = p["sent.W_x"];
  s.W_t = p["sent.W_t"];
  s.W_s_state = p["sent.W_s_state"];
  s.W_s_score = p["sent.W_s_score"];
  s.U_g = p["sent.U_g"];
  s.W_h = p["sent.W_h"];
  return s;
}

Var align_scores(const AttentionVars& p, Var t_prev, const Annotations& H) {
  Var query = matmul(p.W_a, t_prev);                       // n x 1, once per step
  Var keys = matmul(p.U_a, transpose(H.H));                // n x J
  Var m = tanh(add(expand_cols(query, H.J), keys));        // n x J
  Var e = matmul(transpose(m), p.V_a);                     // J x 1

  if (!H.mask.empty()) {
    bool any_pad = false;
    Mat add_mask = Mat::Zero(H.J, 1);
    for (std::int32_t j = 0; j < H.J; ++j)
      if (H.mask[static_cast<std::size_t>(j)] == 0) {
        add_mask(j, 0) = kMaskScore;
        any_pad = true;
      }
    if (any_pad) e = add(e, e.tape->leaf(std::move(add_mask)));
  }
  return e;
}

AttentionOutput attend(Var e, const Annotations& H) {
  if (e.rows() != H.J)
    throw ShapeError("attend: " + std::to_string(e.rows()) + " scores for " +
                     std::to_string(H.J) + " annotations");
  AttentionOutput out;
  out.e = e;
  out.alpha = softmax(e);
  out.c = matmul(transpose(H.H), out.alpha);
  return out;
}

std::pair<Var, Var> sentinel_state(const SentinelVars& p, Var x_i, Var t_prev, Var t_i) {
  Var g = sigmoid(add(matmul(p.W_x, x_i), matmul(p.W_t, t_prev)));
  Var s = hadamard(g, tanh(matmul(p.W_s_state, t_i)));
  return {g, s};
}

AdaptiveOutput adaptive_attend(const SentinelVars& p, Var e, const Annotations& H, Var s,
                               Var t_prev, const AttentionOutput* precomputed,
                               const double* pinned_score) {
  AdaptiveOutput out;
  out.s = s;
  out.base = precomputed != nullptr ? *precomputed : attend(e, H);

  if (s.rows() != out.base.c.rows())
    throw ShapeError("adaptive_attend: sentinel width " + shape_str(s.value()) +
                     " does not match context width " + shape_str(out.base.c.value()));

  Var z;
  if (pinned_score != nullptr) {
    z = e.tape->leaf(Mat::Constant(1, 1, *pinned_score));
  } else {
    Var hidden = tanh(add(matmul(p.W_s_score, s), matmul(p.U_g, t_prev)));
    z = matmul(transpose(p.W_h), hidden);  // 1 x 1
  }

  out.alpha_hat = softmax(concat(e, z));
  out.beta = pick(out.alpha_hat, H.J);
  // c+ = beta s + (1 - beta) c, written as beta s + c - beta c
  out.c_plus = add(mul_scalar(s, out.beta), sub(out.base.c, mul_scalar(out.base.c, out.beta)));
  return out;
}

}  // namespace nmt
