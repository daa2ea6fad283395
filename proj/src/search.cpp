#include "nmt/search.hpp"

#include <algorithm>

namespace nmt {

namespace {

constexpr std::int32_t kBos = 2;
constexpr std::int32_t kEos = 3;

StepOptions step_options(const DecodeOptions& opt) {
  StepOptions s;
  s.training = false;
  s.pin_sentinel_closed = opt.pin_sentinel_closed;
  return s;
}

}  // namespace

double normalized_score(const Hypothesis& h) {
  return h.steps > 0 ? h.score / static_cast<double>(h.steps) : h.score;
}

Hypothesis greedy_decode(const ParamStore& params, const ModelConfig& cfg,
                         std::span<const std::int32_t> src, std::int32_t max_len,
                         const DecodeOptions& opt) {
  Tape tape;
  BoundParams bound = bind_params(tape, params);
  ModelVars mv = ModelVars::from(bound, cfg);
  Annotations H = encode(tape, mv.enc, src);
  Var t = init_decoder_state(tape, mv, H);

  Hypothesis hyp;
  std::int32_t prev = kBos;
  while (static_cast<std::int32_t>(hyp.tokens.size()) < max_len) {
    StepResult r = decode_step(mv, cfg, prev, t, H, step_options(opt));
    const Mat& lp = r.log_probs.value();
    std::int32_t best = 0;
    for (std::int32_t i = 1; i < lp.rows(); ++i)
      if (lp(i, 0) > lp(best, 0)) best = i;  // ties keep the lowest id

    hyp.score += lp(best, 0);
    ++hyp.steps;
    if (best == kEos) {
      hyp.finished = true;
      break;
    }
    hyp.tokens.push_back(best);
    if (r.beta.valid()) hyp.beta_trace.push_back(r.beta.value()(0, 0));
    t = r.state;
    prev = best;
  }
  return hyp;
}

BeamResult beam_search(const ParamStore& params, const ModelConfig& cfg,
                       std::span<const std::int32_t> src, std::int32_t beam, std::int32_t max_len,
                       const DecodeOptions& opt) {
  if (beam < 1) throw DomainError("beam_search: beam width must be at least 1");

  Tape tape;
  BoundParams bound = bind_params(tape, params);
  ModelVars mv = ModelVars::from(bound, cfg);
  Annotations H = encode(tape, mv.enc, src);
  Var t0 = init_decoder_state(tape, mv, H);

  struct Live {
    Hypothesis hyp;
    Var state;
  };
  std::vector<Live> active;
  active.push_back({Hypothesis{}, t0});
  std::vector<Hypothesis> pool;

  for (std::int32_t step = 0; step < max_len && !active.empty(); ++step) {
    struct Expansion {
      Var state;
      Var beta;
      Vec lp;  // copied out: tape node storage may move as more nodes land
    };
    std::vector<Expansion> expanded;
    expanded.reserve(active.size());
    for (Live& live : active) {
      const std::int32_t prev = live.hyp.tokens.empty() ? kBos : live.hyp.tokens.back();
      StepResult r = decode_step(mv, cfg, prev, live.state, H, step_options(opt));
      expanded.push_back({r.state, r.beta, r.log_probs.value().col(0)});
    }

    struct Candidate {
      std::size_t from;
      std::int32_t token;
      double score;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(active.size() * static_cast<std::size_t>(cfg.tgt_vocab));
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::int32_t tok = 0; tok < cfg.tgt_vocab; ++tok)
        candidates.push_back({a, tok, active[a].hyp.score + expanded[a].lp(tok)});

    auto lex_less = [&](const Candidate& x, const Candidate& y) {
      const auto& xt = active[x.from].hyp.tokens;
      const auto& yt = active[y.from].hyp.tokens;
      const std::size_t nx = xt.size() + 1, ny = yt.size() + 1;
      for (std::size_t i = 0; i < std::min(nx, ny); ++i) {
        const std::int32_t xi = i < xt.size() ? xt[i] : x.token;
        const std::int32_t yi = i < yt.size() ? yt[i] : y.token;
        if (xi != yi) return xi < yi;
      }
      return nx < ny;
    };
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
      if (x.score != y.score) return x.score > y.score;
      return lex_less(x, y);
    });
    if (candidates.size() > static_cast<std::size_t>(beam))
      candidates.resize(static_cast<std::size_t>(beam));

    std::vector<Live> next;
    next.reserve(candidates.size());
    for (const Candidate& c : candidates) {
      const Live& src_live = active[c.from];
      Hypothesis h = src_live.hyp;
      h.score = c.score;
      ++h.steps;
      if (c.token == kEos) {
        h.finished = true;
        pool.push_back(std::move(h));
      } else {
        h.tokens.push_back(c.token);
        if (expanded[c.from].beta.valid())
          h.beta_trace.push_back(expanded[c.from].beta.value()(0, 0));
        next.push_back({std::move(h), expanded[c.from].state});
      }
    }
    active = std::move(next);
  }

  for (Live& live : active) pool.push_back(std::move(live.hyp));

  std::sort(pool.begin(), pool.end(), [](const Hypothesis& a, const Hypothesis& b) {
    const double na = normalized_score(a), nb = normalized_score(b);
    if (na != nb) return na > nb;
    return a.tokens < b.tokens;
  });

  BeamResult out;
  out.best = pool.front();
  out.nbest = std::move(pool);
  return out;
}

}  // namespace nmt
