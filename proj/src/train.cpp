#include "nmt/train.hpp"

#include <chrono>
#include <cstdio>

#include "nmt/eval.hpp"
#include "nmt/search.hpp"

namespace nmt {

namespace {

double dev_bleu(const ParamStore& params, const ModelConfig& cfg, const DevSet& dev,
                const Vocabulary& tgt_vocab) {
  if (dev.src.empty()) return 0.0;
  std::vector<std::string> hyps;
  std::vector<std::vector<std::string>> refs;
  hyps.reserve(dev.src.size());
  refs.reserve(dev.src.size());
  for (std::size_t i = 0; i < dev.src.size(); ++i) {
    Hypothesis h = greedy_decode(params, cfg, dev.src[i], cfg.max_len);
    hyps.push_back(decode_ids(tgt_vocab, h.tokens));
    refs.push_back({dev.refs[i]});
  }
  return corpus_bleu(hyps, refs).bleu * 100.0;
}

}  // namespace

TrainResult train(const ParamStore& initial, const ModelConfig& cfg, const EncodedCorpus& corpus,
                  const DevSet& dev, const Vocabulary& tgt_vocab, const TrainOptions& opt,
                  std::ostream* log_stream) {
  if (corpus.empty()) throw DomainError("train: empty corpus");
  if (opt.epochs < 0) throw DomainError("train: negative epoch count");
  if (opt.batch_size < 1) throw DomainError("train: batch_size must be at least 1");
  if (dev.src.size() != dev.refs.size())
    throw DomainError("train: dev sources and references differ in count");

  TrainResult result;
  result.params = initial;
  result.opt_g2 = initial.zeros_like();
  result.opt_dx2 = initial.zeros_like();
  if (opt.epochs == 0) return result;

  ParamStore params = initial;
  ParamStore acc_g2 = initial.zeros_like();
  ParamStore acc_dx2 = initial.zeros_like();
  Rng dropout_rng(derive_seed(cfg.seed, 0xd20));

  double best = -1.0;
  for (std::int32_t epoch = 1; epoch <= opt.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const std::vector<Batch> batches =
        make_batches(corpus, opt.batch_size, derive_seed(cfg.seed, 0xe90c + static_cast<std::uint64_t>(epoch)));

    double loss_sum = 0.0;
    std::size_t sentence_count = 0;
    for (const Batch& batch : batches) {
      ParamStore grads = params.zeros_like();
      const double inv_rows = 1.0 / static_cast<double>(batch.src.size());
      double batch_loss = 0.0;
      for (std::size_t row = 0; row < batch.src.size(); ++row) {
        Tape tape;
        tape.reserve(4096);
        BoundParams bound = bind_params(tape, params);
        ModelVars mv = ModelVars::from(bound, cfg);
        StepOptions step;
        step.training = true;
        step.dropout_rng = &dropout_rng;
        Var loss = sentence_loss(tape, mv, cfg, batch.src[row], batch.tgt[row], step,
                                 batch.src_mask[row], batch.tgt_mask[row]);
        batch_loss += loss.value()(0, 0);
        tape.backward(loss);
        accumulate_grads(bound, grads, inv_rows);
      }
      adadelta_update(params, grads, acc_g2, acc_dx2, opt.rho, opt.eps);
      loss_sum += batch_loss;
      sentence_count += batch.src.size();
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.mean_loss = loss_sum / static_cast<double>(sentence_count);
    entry.dev_bleu = dev_bleu(params, cfg, dev, tgt_vocab);
    entry.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.log.push_back(entry);

    if (log_stream != nullptr) {
      char line[160];
      std::snprintf(line, sizeof(line), "epoch %d  loss %.4f  dev_bleu %.1f  time %.1fs",
                    entry.epoch, entry.mean_loss, entry.dev_bleu, entry.seconds);
      (*log_stream) << line << '\n' << std::flush;
    }

    if (entry.dev_bleu > best) {
      best = entry.dev_bleu;
      result.params = params;
      result.opt_g2 = acc_g2;
      result.opt_dx2 = acc_dx2;
      result.best_epoch = epoch;
      result.best_dev_bleu = entry.dev_bleu;
    }
  }
  return result;
}

}  // namespace nmt
