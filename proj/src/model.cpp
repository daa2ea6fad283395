#include "nmt/model.hpp"

#include <cmath>

namespace nmt {

std::string mode_name(Mode m) { return m == Mode::kBaseline ? "baseline" : "adaptive"; }

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "baseline") return Mode::kBaseline;
  if (name == "adaptive") return Mode::kAdaptive;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (src_vocab < 5 || tgt_vocab < 5)
    throw DomainError("config: vocabulary sizes must cover the 4 specials plus content");
  if (emb_dim < 1 || hidden_dim < 1) throw DomainError("config: dimensions must be positive");
  if (hidden_dim % 2 != 0)
    throw DomainError("config: hidden_dim must be even (two encoder directions)");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw DomainError("config: dropout_rate must lie in [0, 1)");
  if (max_len < 1) throw DomainError("config: max_len must be positive");
}

ParamStore init_params(const ModelConfig& cfg) {
  cfg.validate();
  constexpr double kRange = 0.08;
  Rng rng(cfg.seed);
  const Eigen::Index E = cfg.emb_dim;
  const Eigen::Index H = cfg.hidden_dim;
  const Eigen::Index n = H / 2;
  ParamStore p;

  auto w = [&](Eigen::Index r, Eigen::Index c) { return uniform_matrix(r, c, -kRange, kRange, rng); };

  p.add("src_emb", w(cfg.src_vocab, E));
  p.add("tgt_emb", w(cfg.tgt_vocab, E));
  add_gru_params(p, "enc_fwd.", E, n, kRange, rng);
  add_gru_params(p, "enc_bwd.", E, n, kRange, rng);
  add_gru_params(p, "dec.", E + H, H, kRange, rng);
  p.add("att.W_a", w(n, H));
  p.add("att.U_a", w(n, H));
  p.add("att.V_a", w(n, 1));
  if (cfg.mode == Mode::kAdaptive) {
    p.add("sent.W_x", w(H, E + H));
    p.add("sent.W_t", w(H, H));
    p.add("sent.W_s_state", w(H, H));
    p.add("sent.W_s_score", w(n, H));
    p.add("sent.U_g", w(n, H));
    p.add("sent.W_h", w(n, 1));
  }
  p.add("out.W_p", w(cfg.tgt_vocab, H));
  p.add("init.W_init", w(H, H));
  return p;
}

ParamStore strip_sentinel(const ParamStore& params) {
  ParamStore out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& name = params.names()[i];
    if (name.rfind("sent.", 0) == 0) continue;
    out.add(name, params.value(i));
  }
  return out;
}

ModelVars ModelVars::from(const BoundParams& p, const ModelConfig& cfg) {
  ModelVars mv;
  mv.enc = EncoderVars::from(p);
  mv.tgt_emb = p["tgt_emb"];
  mv.dec = GruVars::from(p, "dec.");
  mv.att = AttentionVars::from(p);
  mv.adaptive = cfg.mode == Mode::kAdaptive;
  if (mv.adaptive) mv.sent = SentinelVars::from(p);
  mv.W_p = p["out.W_p"];
  mv.W_init = p["init.W_init"];
  return mv;
}

StepTrace to_trace(const StepResult& r) {
  StepTrace t;
  t.log_probs = r.log_probs.value().col(0);
  t.weights = r.weights.value().col(0);
  t.has_beta = r.beta.valid();
  if (t.has_beta) t.beta = r.beta.value()(0, 0);
  return t;
}

Var init_decoder_state(Tape& tape, const ModelVars& mv, const Annotations& H) {
  Mat weights = Mat::Zero(H.J, 1);
  double real = 0.0;
  for (std::int32_t j = 0; j < H.J; ++j)
    if (H.mask.empty() || H.mask[static_cast<std::size_t>(j)] != 0) real += 1.0;
  for (std::int32_t j = 0; j < H.J; ++j)
    if (H.mask.empty() || H.mask[static_cast<std::size_t>(j)] != 0) weights(j, 0) = 1.0 / real;
  Var mean = matmul(transpose(H.H), tape.leaf(std::move(weights)));
  return tanh(matmul(mv.W_init, mean));
}

StepResult decode_step(const ModelVars& mv, const ModelConfig& cfg,
                       std::int32_t y_prev, Var t_prev, const Annotations& H,
                       const StepOptions& opt) {
  if (y_prev < 0 || y_prev >= cfg.tgt_vocab)
    throw IndexError("decode_step: token id " + std::to_string(y_prev) +
                     " outside target vocabulary of " + std::to_string(cfg.tgt_vocab));

  Var e = align_scores(mv.att, t_prev, H);
  AttentionOutput att = attend(e, H);
  Var x_i = concat(embed(mv.tgt_emb, y_prev), att.c);
  Var t_i = gru_step(mv.dec, x_i, t_prev);

  StepResult r;
  r.state = t_i;
  Var context;
  if (mv.adaptive) {
    auto [gate, s] = sentinel_state(mv.sent, x_i, t_prev, t_i);
    constexpr double kClosed = -1e9;
    AdaptiveOutput ao = adaptive_attend(mv.sent, e, H, s, t_prev, &att,
                                        opt.pin_sentinel_closed ? &kClosed : nullptr);
    context = ao.c_plus;
    r.weights = ao.alpha_hat;
    r.beta = ao.beta;
  } else {
    context = att.c;
    r.weights = att.alpha;
  }

  Var readout = add(context, t_i);
  if (opt.training && cfg.dropout_rate > 0.0) {
    if (opt.dropout_rng == nullptr)
      throw DomainError("decode_step: training with dropout requires an RNG");
    readout = dropout_apply(readout, DropoutConfig{cfg.dropout_rate, 0}, true, *opt.dropout_rng);
  }
  r.log_probs = log_softmax(matmul(mv.W_p, readout));
  return r;
}

namespace {

std::size_t real_length(std::span<const std::int32_t> ids, std::span<const std::uint8_t> mask) {
  if (mask.empty()) return ids.size();
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] != 0) ++n;
  return n;
}

}  // namespace

Var sentence_loss(Tape& tape, const ModelVars& mv, const ModelConfig& cfg,
                  std::span<const std::int32_t> src, std::span<const std::int32_t> tgt,
                  const StepOptions& opt, std::span<const std::uint8_t> src_mask,
                  std::span<const std::uint8_t> tgt_mask) {
  constexpr std::int32_t kBos = 2, kEos = 3;
  const std::size_t src_len = real_length(src, src_mask);
  const std::size_t tgt_len = real_length(tgt, tgt_mask);
  if (src_len == 0 || tgt_len == 0) throw DomainError("sentence_loss: empty sentence");
  if (src_len > static_cast<std::size_t>(cfg.max_len) ||
      tgt_len > static_cast<std::size_t>(cfg.max_len))
    throw DomainError("sentence_loss: sentence longer than max_len " +
                      std::to_string(cfg.max_len));

  Annotations H = encode(tape, mv.enc, src, src_mask);
  Var t = init_decoder_state(tape, mv, H);

  // decoder reads [BOS, y_1..y_K], predicts [y_1..y_K, EOS]
  Var total;
  std::int32_t prev = kBos;
  for (std::size_t i = 0; i <= tgt_len; ++i) {
    const std::int32_t target = i < tgt_len ? tgt[i] : kEos;
    StepResult r = decode_step(mv, cfg, prev, t, H, opt);
    Var term = pick(r.log_probs, target);
    total = total.valid() ? add(total, term) : term;
    t = r.state;
    prev = target;
  }
  return scale(total, -1.0);
}

void adadelta_update(ParamStore& params, const ParamStore& grads, ParamStore& acc_g2,
                     ParamStore& acc_dx2, double rho, double eps) {
  if (rho <= 0.0 || rho >= 1.0) throw DomainError("adadelta: rho must lie in (0, 1)");
  if (eps <= 0.0) throw DomainError("adadelta: eps must be positive");
  if (grads.size() != params.size() || acc_g2.size() != params.size() ||
      acc_dx2.size() != params.size())
    throw ShapeError("adadelta: store layouts differ");

  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat& theta = params.value(i);
    const Mat& g = grads.value(i);
    Mat& eg2 = acc_g2.value(i);
    Mat& edx2 = acc_dx2.value(i);
    if (g.rows() != theta.rows() || g.cols() != theta.cols())
      throw ShapeError("adadelta: gradient shape " + shape_str(g) + " for parameter " +
                       params.names()[i] + " of shape " + shape_str(theta));

    eg2 = rho * eg2 + (1.0 - rho) * g.cwiseProduct(g);
    Mat dx = -((edx2.array() + eps).sqrt() / (eg2.array() + eps).sqrt() * g.array()).matrix();
    edx2 = rho * edx2 + (1.0 - rho) * dx.cwiseProduct(dx);
    theta += dx;
  }
}

}  // namespace nmt
