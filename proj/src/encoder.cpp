#include "nmt/encoder.hpp"

namespace nmt {

EncoderVars EncoderVars::from(const BoundParams& p) {
  EncoderVars e;
  e.src_emb = p["src_emb"];
  e.fwd = GruVars::from(p, "enc_fwd.");
  e.bwd = GruVars::from(p, "enc_bwd.");
  return e;
}

Annotations encode(Tape& tape, const EncoderVars& enc, std::span<const std::int32_t> src,
                   std::span<const std::uint8_t> mask) {
  if (src.empty()) throw DomainError("encode: empty source sentence");
  if (!mask.empty() && mask.size() != src.size())
    throw DomainError("encode: mask length does not match source length");

  const std::size_t J = src.size();
  const Eigen::Index n = enc.fwd.b_z.rows();
  auto real = [&](std::size_t j) { return mask.empty() || mask[j] != 0; };

  std::vector<Var> x(J);
  for (std::size_t j = 0; j < J; ++j)
    if (real(j)) x[j] = embed(enc.src_emb, src[j]);

  std::vector<Var> fwd(J), bwd(J);
  Var h = tape.leaf(Mat::Zero(n, 1));
  for (std::size_t j = 0; j < J; ++j) {
    if (real(j)) h = gru_step(enc.fwd, x[j], h);
    fwd[j] = h;
  }
  h = tape.leaf(Mat::Zero(n, 1));
  for (std::size_t j = J; j-- > 0;) {
    if (real(j)) h = gru_step(enc.bwd, x[j], h);
    bwd[j] = h;
  }

  std::vector<Var> rows(J);
  for (std::size_t j = 0; j < J; ++j) rows[j] = concat(fwd[j], bwd[j]);

  Annotations a;
  a.H = stack_rows(rows);
  a.J = static_cast<std::int32_t>(J);
  a.mask.assign(mask.begin(), mask.end());
  return a;
}

}  // namespace nmt
