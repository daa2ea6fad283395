#pragma once

#include <ostream>

#include "nmt/checkpoint.hpp"
#include "nmt/data.hpp"
#include "nmt/model.hpp"

namespace nmt {

struct TrainOptions {
  std::int32_t epochs = 30;
  std::int32_t batch_size = 16;
  double rho = 0.95;
  double eps = 1e-6;
};

struct EpochLog {
  std::int32_t epoch = 0;
  double mean_loss = 0.0;
  double dev_bleu = 0.0;  // x100 scale
  double seconds = 0.0;
};

struct DevSet {
  std::vector<std::vector<std::int32_t>> src;
  std::vector<std::string> refs;  // reference text, one line per sentence
};

struct TrainResult {
  std::vector<EpochLog> log;
  ParamStore params;    // best-dev snapshot
  ParamStore opt_g2;    // optimizer accumulators at that snapshot
  ParamStore opt_dx2;
  std::int32_t best_epoch = 0;
  double best_dev_bleu = 0.0;
};

// Seeded epoch shuffles, per-batch mean sentence loss, AdaDelta updates, and
// a greedy-decode dev BLEU after every epoch; the best dev epoch is the
// returned snapshot. epochs = 0 returns the initial parameters untouched.
TrainResult train(const ParamStore& initial, const ModelConfig& cfg, const EncodedCorpus& corpus,
                  const DevSet& dev, const Vocabulary& tgt_vocab, const TrainOptions& opt,
                  std::ostream* log_stream = nullptr);

}  // namespace nmt
