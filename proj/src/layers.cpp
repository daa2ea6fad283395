#include "nmt/layers.hpp"

#include <random>

namespace nmt {

GruVars GruVars::from(const BoundParams& p, const std::string& prefix) {
  GruVars g;
  g.W_z = p[prefix + "W_z"];
  g.U_z = p[prefix + "U_z"];
  g.b_z = p[prefix + "b_z"];
  g.W_r = p[prefix + "W_r"];
  g.U_r = p[prefix + "U_r"];
  g.b_r = p[prefix + "b_r"];
  g.W_h = p[prefix + "W_h"];
  g.U_h = p[prefix + "U_h"];
  g.b_h = p[prefix + "b_h"];
  return g;
}

void add_gru_params(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
                    Eigen::Index state_dim, double init_range, Rng& rng) {
  const char* gates[] = {"z", "r", "h"};
  for (const char* g : gates) {
    store.add(prefix + "W_" + g, uniform_matrix(state_dim, input_dim, -init_range, init_range, rng));
    store.add(prefix + "U_" + g, uniform_matrix(state_dim, state_dim, -init_range, init_range, rng));
    store.add(prefix + "b_" + g, Mat::Zero(state_dim, 1));
  }
}

Var gru_step(const GruVars& p, Var x, Var h_prev) {
  Var z = sigmoid(add(add(matmul(p.W_z, x), matmul(p.U_z, h_prev)), p.b_z));
  Var r = sigmoid(add(add(matmul(p.W_r, x), matmul(p.U_r, h_prev)), p.b_r));
  Var cand = tanh(add(add(matmul(p.W_h, x), matmul(p.U_h, hadamard(r, h_prev))), p.b_h));
  // h = (1 - z) .* h_prev + z .* cand
  return add(sub(h_prev, hadamard(z, h_prev)), hadamard(z, cand));
}

Var embed(Var table, std::int32_t id) { return lookup_row(table, id); }

Var dropout_apply(Var x, const DropoutConfig& cfg, bool training, Rng& rng) {
  if (!training || cfg.rate <= 0.0) return x;
  if (cfg.rate >= 1.0) throw DomainError("dropout: rate must be < 1");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - cfg.rate);
  Mat mask(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < mask.cols(); ++c)
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
      mask(r, c) = u(rng) < cfg.rate ? 0.0 : keep_scale;
  return hadamard(x, x.tape->leaf(std::move(mask)));
}

}  // namespace nmt
