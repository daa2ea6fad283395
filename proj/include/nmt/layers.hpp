#pragma once

#include <cstdint>

#include "nmt/params.hpp"
#include "nmt/tape.hpp"

namespace nmt {

// One GRU cell's bound parameters: W_* act on the input, U_* on the previous
// state, biases per gate.
struct GruVars {
  Var W_z, U_z, b_z;
  Var W_r, U_r, b_r;
  Var W_h, U_h, b_h;

  static GruVars from(const BoundParams& p, const std::string& prefix);
};

// Registers the nine tensors of one GRU group, uniform(-init_range, init_range)
// weights and zero biases.
void add_gru_params(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
                    Eigen::Index state_dim, double init_range, Rng& rng);

// z = sigmoid(W_z x + U_z h + b_z); r likewise; candidate
// h~ = tanh(W_h x + U_h (r .* h) + b_h); new state (1-z) .* h + z .* h~.
Var gru_step(const GruVars& p, Var x, Var h_prev);

// Embedding row id of `table` as a column vector.
Var embed(Var table, std::int32_t id);

struct DropoutConfig {
  double rate = 0.0;  // probability of zeroing a component, must be < 1
  std::uint64_t seed = 0;
};

// Inverted dropout: zero with probability rate and scale survivors by
// 1/(1-rate) while training, identity otherwise. Mask values come from `rng`
// so separate calls draw successive masks from one stream.
Var dropout_apply(Var x, const DropoutConfig& cfg, bool training, Rng& rng);

}  // namespace nmt
