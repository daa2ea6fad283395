#include "nmt/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "nmt/checkpoint.hpp"
#include "nmt/data.hpp"
#include "nmt/eval.hpp"
#include "nmt/gradcheck.hpp"
#include "nmt/kvconfig.hpp"
#include "nmt/model.hpp"
#include "nmt/search.hpp"
#include "nmt/train.hpp"

namespace nmt {

namespace {

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- run config

struct RunConfig {
  std::string mode = "adaptive";
  std::int32_t emb_dim = 32;
  std::int32_t hidden_dim = 64;
  double dropout_rate = 0.2;
  std::int32_t max_len = 50;
  std::uint64_t seed = 1;
  std::int32_t src_vocab_limit = 16000;
  std::int32_t tgt_vocab_limit = 16000;
  std::int32_t epochs = 30;
  std::int32_t batch_size = 16;
  double rho = 0.95;
  double epsilon = 1e-6;
  std::int32_t beam = 10;
  std::string train_src, train_tgt, dev_src, dev_tgt;
  std::string checkpoint = "model.ckpt";
};

RunConfig parse_run_config(const std::string& path) {
  RunConfig cfg;
  const std::vector<std::string> lines = read_lines(path);
  for (const auto& [key, value] : parse_kv_lines(lines)) {
    if (key == "mode")
      cfg.mode = value;
    else if (key == "emb_dim")
      cfg.emb_dim = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "hidden_dim")
      cfg.hidden_dim = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "dropout_rate")
      cfg.dropout_rate = kv_double(key, value);
    else if (key == "max_len")
      cfg.max_len = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "seed")
      cfg.seed = kv_uint(key, value);
    else if (key == "src_vocab_limit")
      cfg.src_vocab_limit = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "tgt_vocab_limit")
      cfg.tgt_vocab_limit = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "epochs")
      cfg.epochs = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "batch_size")
      cfg.batch_size = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "rho")
      cfg.rho = kv_double(key, value);
    else if (key == "epsilon")
      cfg.epsilon = kv_double(key, value);
    else if (key == "beam")
      cfg.beam = static_cast<std::int32_t>(kv_int(key, value));
    else if (key == "train_src")
      cfg.train_src = value;
    else if (key == "train_tgt")
      cfg.train_tgt = value;
    else if (key == "dev_src")
      cfg.dev_src = value;
    else if (key == "dev_tgt")
      cfg.dev_tgt = value;
    else if (key == "checkpoint")
      cfg.checkpoint = value;
    else
      throw DomainError("config: unknown key '" + key + "'");
  }
  return cfg;
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "mode = " << c.mode << '\n'
      << "emb_dim = " << c.emb_dim << '\n'
      << "hidden_dim = " << c.hidden_dim << '\n'
      << "dropout_rate = " << format_double(c.dropout_rate) << '\n'
      << "max_len = " << c.max_len << '\n'
      << "seed = " << c.seed << '\n'
      << "src_vocab_limit = " << c.src_vocab_limit << '\n'
      << "tgt_vocab_limit = " << c.tgt_vocab_limit << '\n'
      << "epochs = " << c.epochs << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "rho = " << format_double(c.rho) << '\n'
      << "epsilon = " << format_double(c.epsilon) << '\n'
      << "beam = " << c.beam << '\n'
      << "train_src = " << c.train_src << '\n'
      << "train_tgt = " << c.train_tgt << '\n'
      << "dev_src = " << c.dev_src << '\n'
      << "dev_tgt = " << c.dev_tgt << '\n'
      << "checkpoint = " << c.checkpoint << '\n';
  return out.str();
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string signed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.1f", v);
  return buf;
}

// ------------------------------------------------------------------ commands

struct TrainArgs {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::int32_t> epochs, batch_size;
  std::optional<std::uint64_t> seed;
  std::optional<double> dropout;
  std::optional<std::string> checkpoint;
};

int cmd_train(const TrainArgs& args) {
  RunConfig run;
  try {
    run = parse_run_config(args.config_path);
    if (args.mode) run.mode = *args.mode;
    if (args.epochs) run.epochs = *args.epochs;
    if (args.batch_size) run.batch_size = *args.batch_size;
    if (args.seed) run.seed = *args.seed;
    if (args.dropout) run.dropout_rate = *args.dropout;
    if (args.checkpoint) run.checkpoint = *args.checkpoint;
    if (!parse_mode(run.mode)) throw DomainError("config: unknown mode '" + run.mode + "'");
    if (run.train_src.empty() || run.train_tgt.empty())
      throw DomainError("config: train_src and train_tgt are required");
    if (run.dev_src.empty() || run.dev_tgt.empty())
      throw DomainError("config: dev_src and dev_tgt are required");
    if (run.epochs < 0 || run.batch_size < 1 || run.src_vocab_limit < 1 ||
        run.tgt_vocab_limit < 1)
      throw DomainError("config: invalid training sizes");
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }

  std::cout << "resolved config:\n" << format_run_config(run) << std::flush;

  ParallelCorpus corpus = load_parallel(run.train_src, run.train_tgt, run.max_len);
  if (corpus.dropped_too_long > 0 || corpus.dropped_empty > 0)
    std::cerr << "dropped " << corpus.dropped_too_long << " over-length and "
              << corpus.dropped_empty << " empty training pairs\n";
  if (corpus.pairs.empty()) throw DomainError("training corpus is empty after filtering");

  std::vector<Tokens> src_side, tgt_side;
  for (const SentencePair& p : corpus.pairs) {
    src_side.push_back(p.src);
    tgt_side.push_back(p.tgt);
  }
  Vocabulary src_vocab = build_vocab(src_side, run.src_vocab_limit);
  Vocabulary tgt_vocab = build_vocab(tgt_side, run.tgt_vocab_limit);
  std::cerr << "source vocab " << src_vocab.size() << " entries, coverage "
            << fixed1(src_vocab.coverage * 100.0) << "%\n";
  std::cerr << "target vocab " << tgt_vocab.size() << " entries, coverage "
            << fixed1(tgt_vocab.coverage * 100.0) << "%\n";

  ModelConfig cfg;
  cfg.mode = *parse_mode(run.mode);
  cfg.src_vocab = src_vocab.size();
  cfg.tgt_vocab = tgt_vocab.size();
  cfg.emb_dim = run.emb_dim;
  cfg.hidden_dim = run.hidden_dim;
  cfg.dropout_rate = run.dropout_rate;
  cfg.max_len = run.max_len;
  cfg.seed = run.seed;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  EncodedCorpus train_set = encode_corpus(corpus, src_vocab, tgt_vocab);

  ParallelCorpus dev_corpus = load_parallel(run.dev_src, run.dev_tgt, run.max_len);
  DevSet dev;
  for (const SentencePair& p : dev_corpus.pairs) {
    dev.src.push_back(encode_sentence(src_vocab, p.src));
    std::string ref;
    for (std::size_t i = 0; i < p.tgt.size(); ++i) {
      if (i > 0) ref += ' ';
      ref += p.tgt[i];
    }
    dev.refs.push_back(std::move(ref));
  }

  ParamStore params = init_params(cfg);
  std::size_t scalar_count = 0;
  for (std::size_t i = 0; i < params.size(); ++i)
    scalar_count += static_cast<std::size_t>(params.value(i).size());
  std::cerr << mode_name(cfg.mode) << " model with " << params.size() << " tensors, "
            << scalar_count << " parameters\n";

  TrainOptions opt;
  opt.epochs = run.epochs;
  opt.batch_size = run.batch_size;
  opt.rho = run.rho;
  opt.eps = run.epsilon;
  TrainResult result = train(params, cfg, train_set, dev, tgt_vocab, opt, &std::cout);

  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.params = result.params;
  ckpt.opt_g2 = result.opt_g2;
  ckpt.opt_dx2 = result.opt_dx2;
  ckpt.epoch = result.best_epoch;
  ckpt.best_dev_bleu = result.best_dev_bleu;
  save_checkpoint(run.checkpoint, ckpt);
  save_vocab(src_vocab, run.checkpoint + ".src.vocab");
  save_vocab(tgt_vocab, run.checkpoint + ".tgt.vocab");
  std::cout << "best epoch " << result.best_epoch << " dev_bleu "
            << fixed1(result.best_dev_bleu) << ", checkpoint written to " << run.checkpoint
            << "\n";
  return 0;
}

struct TranslateArgs {
  std::string checkpoint;
  std::string input;
  std::string output;  // empty: stdout
  std::string trace;   // empty: no trace
  std::int32_t beam = 10;
  std::optional<std::int32_t> max_len;
};

int cmd_translate(const TranslateArgs& args) {
  if (args.beam < 1) throw UsageError("translate: beam width must be at least 1");

  Checkpoint ckpt = load_checkpoint(args.checkpoint);
  if (!args.trace.empty() && ckpt.config.mode != Mode::kAdaptive)
    throw UsageError("translate: --trace needs an adaptive checkpoint; '" + args.checkpoint +
                     "' was trained as " + mode_name(ckpt.config.mode));
  Vocabulary src_vocab = load_vocab(args.checkpoint + ".src.vocab");
  Vocabulary tgt_vocab = load_vocab(args.checkpoint + ".tgt.vocab");
  if (src_vocab.size() != ckpt.config.src_vocab || tgt_vocab.size() != ckpt.config.tgt_vocab)
    throw DomainError("translate: sidecar vocabularies do not match the checkpoint dimensions");

  const std::int32_t max_len = args.max_len.value_or(ckpt.config.max_len);
  const std::vector<std::string> input = read_lines(args.input);

  std::vector<std::string> output;
  std::vector<GateRecord> records;
  output.reserve(input.size());
  for (std::size_t line = 0; line < input.size(); ++line) {
    const Tokens tokens = tokenize(input[line]);
    if (tokens.empty()) {
      output.emplace_back();
      continue;
    }
    const std::vector<std::int32_t> src = encode_sentence(src_vocab, tokens);
    BeamResult result = beam_search(ckpt.params, ckpt.config, src, args.beam, max_len);
    output.push_back(decode_ids(tgt_vocab, result.best.tokens));
    if (!args.trace.empty()) {
      for (std::size_t step = 0; step < result.best.tokens.size(); ++step)
        records.push_back({static_cast<std::int32_t>(line), static_cast<std::int32_t>(step),
                           tgt_vocab.token(result.best.tokens[step]),
                           result.best.beta_trace[step]});
    }
  }

  if (args.output.empty()) {
    for (const std::string& line : output) std::cout << line << '\n';
  } else {
    write_lines(output, args.output);
  }
  if (!args.trace.empty()) write_trace(records, args.trace);
  return 0;
}

struct EvaluateArgs {
  std::string hyp;
  std::vector<std::string> refs;
  std::string compare;
  std::int32_t bootstrap = 1000;
  std::uint64_t seed = 1;
  bool records = false;
};

std::vector<std::vector<std::string>> read_reference_rows(const EvaluateArgs& args,
                                                          std::size_t hyp_count) {
  std::vector<std::vector<std::string>> rows(hyp_count);
  for (const std::string& path : args.refs) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.size() != hyp_count)
      throw IoError("evaluate: '" + args.hyp + "' has " + std::to_string(hyp_count) +
                    " lines but reference '" + path + "' has " + std::to_string(lines.size()));
    for (std::size_t i = 0; i < hyp_count; ++i) rows[i].push_back(lines[i]);
  }
  return rows;
}

void print_bleu_report(const std::string& label, const BleuReport& rep, bool records) {
  if (records) {
    std::cout << "bleu\t" << fixed1(rep.bleu * 100.0) << '\n';
    for (int n = 0; n < 4; ++n)
      std::cout << "p" << (n + 1) << '\t'
                << format_double(rep.precisions[static_cast<std::size_t>(n)]) << '\n';
    std::cout << "brevity_penalty\t" << format_double(rep.brevity_penalty) << '\n';
    std::cout << "hyp_length\t" << rep.hyp_length << '\n';
    std::cout << "ref_length\t" << rep.ref_length << '\n';
    return;
  }
  std::cout << label << "BLEU = " << fixed1(rep.bleu * 100.0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "  (p1 %.3f  p2 %.3f  p3 %.3f  p4 %.3f  BP %.3f  hyp/ref %lld/%lld)",
                rep.precisions[0], rep.precisions[1], rep.precisions[2], rep.precisions[3],
                rep.brevity_penalty, rep.hyp_length, rep.ref_length);
  std::cout << buf << '\n';
  if (rep.zero_match_flag)
    std::cout << "  note: zero n-gram matches at some order; score reported as 0 (no smoothing)\n";
}

int cmd_evaluate(const EvaluateArgs& args) {
  if (args.refs.empty()) throw UsageError("evaluate: at least one reference file is required");
  if (!args.compare.empty() && args.bootstrap < 100)
    throw UsageError("evaluate: --bootstrap needs at least 100 resamples");

  const std::vector<std::string> hyps = read_lines(args.hyp);
  const std::vector<std::vector<std::string>> refs = read_reference_rows(args, hyps.size());
  const BleuReport rep = corpus_bleu(hyps, refs);
  print_bleu_report(args.compare.empty() ? "" : "base    ", rep, args.records);

  if (!args.compare.empty()) {
    const std::vector<std::string> other = read_lines(args.compare);
    if (other.size() != hyps.size())
      throw IoError("evaluate: '" + args.hyp + "' has " + std::to_string(hyps.size()) +
                    " lines but '" + args.compare + "' has " + std::to_string(other.size()));
    const BleuReport rep_b = corpus_bleu(other, refs);
    print_bleu_report("compare ", rep_b, args.records);
    const SignificanceResult sig =
        bootstrap_significance(hyps, other, refs, args.bootstrap, args.seed);
    if (args.records) {
      std::cout << "delta\t" << signed1(sig.observed_delta * 100.0) << '\n';
      std::cout << "p_value\t" << format_double(sig.p_value) << '\n';
      std::cout << "resamples\t" << sig.samples << '\n';
    } else {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "delta %s  p-value %.4f  (%d resamples, one-sided, ties count against)",
                    signed1(sig.observed_delta * 100.0).c_str(), sig.p_value, sig.samples);
      std::cout << buf << '\n';
    }
  }
  return 0;
}

struct AnalyzeArgs {
  std::string trace;
  double threshold = 0.9;
  std::int32_t top = 15;
  std::string labels;
  bool records = false;
};

int cmd_analyze(const AnalyzeArgs& args) {
  if (args.threshold < 0.0 || args.threshold > 1.0)
    throw UsageError("analyze: --threshold must lie in [0, 1]");
  if (args.top < 1) throw UsageError("analyze: --top must be at least 1");

  const std::vector<GateRecord> records = read_trace(args.trace);
  const GateTable table = gate_analysis(records, args.threshold, args.top);

  if (args.records) {
    for (const GateTableEntry& e : table.top) std::cout << e.token << '\t' << e.count << '\n';
  } else {
    std::cout << "tokens with gate >= " << format_double(args.threshold) << ": " << table.passing
              << " of " << records.size() << " records\n";
    std::size_t width = 5;
    for (const GateTableEntry& e : table.top) width = std::max(width, e.token.size());
    for (const GateTableEntry& e : table.top) {
      std::cout << "  " << e.token;
      for (std::size_t pad = e.token.size(); pad < width + 2; ++pad) std::cout << ' ';
      std::cout << e.count << '\n';
    }
  }

  if (!args.labels.empty()) {
    const GateClassMeans means = gate_class_means(records, load_labels(args.labels));
    char buf[160];
    if (args.records) {
      std::cout << "mean_beta_aligned\t" << format_double(means.aligned_mean) << '\n';
      std::cout << "mean_beta_inserted\t" << format_double(means.inserted_mean) << '\n';
    } else {
      std::snprintf(buf, sizeof(buf), "mean beta: aligned %.4f over %lld, inserted %.4f over %lld",
                    means.aligned_mean, means.aligned_count, means.inserted_mean,
                    means.inserted_count);
      std::cout << buf << '\n';
    }
  }
  return 0;
}

struct GradcheckArgs {
  double step = 1e-3;
  std::uint64_t seed = 99;
  std::int32_t samples = 50;
  double tolerance = 1e-4;
  bool corrupt = false;
};

int cmd_gradcheck(const GradcheckArgs& args) {
  if (args.step <= 0.0) throw UsageError("gradcheck: --step must be positive");

  bool all_pass = true;
  for (const Mode mode : {Mode::kBaseline, Mode::kAdaptive}) {
    ModelConfig cfg;
    cfg.mode = mode;
    cfg.src_vocab = 12;
    cfg.tgt_vocab = 12;
    cfg.emb_dim = 8;
    cfg.hidden_dim = 8;
    cfg.dropout_rate = 0.0;
    cfg.max_len = 16;
    cfg.seed = 42;
    const ParamStore params = init_params(cfg);
    const std::vector<std::int32_t> src = {4, 7, 5, 9};  // J = 4
    const std::vector<std::int32_t> tgt = {6, 4, 8};     // K = 3

    LossFn loss_fn = [&cfg, &src, &tgt](const ParamStore& p, ParamStore* grads) {
      Tape tape;
      BoundParams bound = bind_params(tape, p);
      ModelVars mv = ModelVars::from(bound, cfg);
      Var loss = sentence_loss(tape, mv, cfg, src, tgt);
      if (grads != nullptr) {
        tape.backward(loss);
        accumulate_grads(bound, *grads);
      }
      return loss.value()(0, 0);
    };

    GradCheckOptions opt;
    opt.step = args.step;
    opt.seed = args.seed;
    opt.samples_per_tensor = args.samples;
    opt.corrupt = args.corrupt;
    const GradCheckReport report = grad_check(loss_fn, params, opt);

    std::cout << mode_name(mode) << " mode:\n";
    for (const GradCheckEntry& e : report.per_tensor) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "  %-16s rel_err %.3e  (%d components)", e.name.c_str(),
                    e.max_rel_err, e.checked);
      std::cout << buf << '\n';
    }
    const bool pass = report.passes(args.tolerance);
    std::cout << mode_name(mode) << " worst rel_err " << format_double(report.worst) << " -> "
              << (pass ? "PASS" : "FAIL") << '\n';
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 2;
}

struct GentoyArgs {
  std::string out_dir = ".";
  std::string prefix = "toy";
  SyntheticTaskSpec spec;
};

int cmd_gentoy(const GentoyArgs& args) {
  try {
    args.spec.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const ToyDataset data = generate_toy_corpus(args.spec);

  const std::string base = args.out_dir + "/" + args.prefix;
  const struct {
    const char* name;
    const LabeledCorpus* split;
  } splits[] = {{"train", &data.train}, {"dev", &data.dev}, {"test", &data.test}};

  for (const auto& [name, split] : splits) {
    std::vector<Tokens> src, tgt;
    for (const SentencePair& p : split->corpus.pairs) {
      src.push_back(p.src);
      tgt.push_back(p.tgt);
    }
    save_corpus_side(src, base + "." + name + ".src");
    save_corpus_side(tgt, base + "." + name + ".tgt");
    save_labels(split->labels, base + "." + name + ".labels");
  }

  long long inserted = 0, source_tokens = 0;
  for (const auto& row : data.train.labels)
    for (char c : row) {
      if (c == 'I')
        ++inserted;
      else
        ++source_tokens;
    }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "wrote %s.{train,dev,test}.{src,tgt,labels}: %d/%d/%d pairs, "
                "train insertion rate %.3f",
                base.c_str(), args.spec.train_pairs, args.spec.dev_pairs, args.spec.test_pairs,
                static_cast<double>(inserted) / static_cast<double>(source_tokens));
  std::cout << buf << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"adaptive-attention NMT toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model from a run config");
  train_cmd->add_option("--config", train_args.config_path, "run config file")->required();
  std::string mode_override, ckpt_override;
  std::int32_t epochs_override = -1, batch_override = -1;
  std::int64_t seed_override = -1;
  double dropout_override = -1.0;
  train_cmd->add_option("--mode", mode_override, "override mode (baseline|adaptive)");
  train_cmd->add_option("--epochs", epochs_override, "override epoch count");
  train_cmd->add_option("--batch-size", batch_override, "override batch size");
  train_cmd->add_option("--seed", seed_override, "override seed");
  train_cmd->add_option("--dropout", dropout_override, "override dropout rate");
  train_cmd->add_option("--checkpoint", ckpt_override, "override checkpoint path");

  TranslateArgs tr_args;
  auto* tr_cmd = app.add_subcommand("translate", "decode an input file with a checkpoint");
  tr_cmd->add_option("--checkpoint", tr_args.checkpoint, "checkpoint file")->required();
  tr_cmd->add_option("--input", tr_args.input, "source text, one sentence per line")->required();
  tr_cmd->add_option("--output", tr_args.output, "write translations here instead of stdout");
  tr_cmd->add_option("--beam", tr_args.beam, "beam width")->default_val(10);
  std::int32_t max_len_override = -1;
  tr_cmd->add_option("--max-len", max_len_override, "decode length cap");
  tr_cmd->add_option("--trace", tr_args.trace, "write sentinel gate records here");

  EvaluateArgs ev_args;
  auto* ev_cmd = app.add_subcommand("evaluate", "corpus BLEU, optionally paired bootstrap");
  ev_cmd->add_option("--hyp", ev_args.hyp, "hypothesis file")->required();
  ev_cmd->add_option("--ref", ev_args.refs, "reference file (repeatable)")->required();
  ev_cmd->add_option("--compare", ev_args.compare, "second hypothesis file to test against --hyp");
  ev_cmd->add_option("--bootstrap", ev_args.bootstrap, "bootstrap resamples")->default_val(1000);
  ev_cmd->add_option("--seed", ev_args.seed, "bootstrap seed")->default_val(1);
  ev_cmd->add_flag("--records", ev_args.records, "machine-readable metric TAB value lines");

  AnalyzeArgs an_args;
  auto* an_cmd = app.add_subcommand("analyze", "sentinel-gate frequency table from a trace");
  an_cmd->add_option("--trace", an_args.trace, "gate trace file")->required();
  an_cmd->add_option("--threshold", an_args.threshold, "minimum gate value")->default_val(0.9);
  an_cmd->add_option("--top", an_args.top, "table size")->default_val(15);
  an_cmd->add_option("--labels", an_args.labels, "A/I alignment labels for class means");
  an_cmd->add_flag("--records", an_args.records, "machine-readable token TAB count lines");

  GradcheckArgs gc_args;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check, both modes");
  gc_cmd->add_option("--step", gc_args.step, "central difference step")->default_val(1e-3);
  gc_cmd->add_option("--seed", gc_args.seed, "component sampling seed")->default_val(99);
  gc_cmd->add_option("--samples", gc_args.samples, "components per tensor")->default_val(50);
  gc_cmd->add_option("--tolerance", gc_args.tolerance, "pass threshold")->default_val(1e-4);
  gc_cmd->add_flag("--corrupt", gc_args.corrupt, "negative control: corrupt one gradient")
      ->group("");  // hidden test hook

  GentoyArgs gt_args;
  auto* gt_cmd = app.add_subcommand("gentoy", "generate the synthetic unaligned-words corpus");
  gt_cmd->add_option("--out", gt_args.out_dir, "output directory")->default_val(".");
  gt_cmd->add_option("--prefix", gt_args.prefix, "file name prefix")->default_val("toy");
  gt_cmd->add_option("--pairs", gt_args.spec.train_pairs, "training pairs")->default_val(2000);
  gt_cmd->add_option("--dev", gt_args.spec.dev_pairs, "dev pairs")->default_val(200);
  gt_cmd->add_option("--test", gt_args.spec.test_pairs, "test pairs")->default_val(200);
  gt_cmd->add_option("--insertion-prob", gt_args.spec.insertion_prob, "insertion probability")
      ->default_val(0.25);
  gt_cmd->add_option("--alphabet", gt_args.spec.alphabet, "content alphabet size")
      ->default_val(26);
  gt_cmd->add_option("--min-len", gt_args.spec.min_len, "minimum source length")->default_val(3);
  gt_cmd->add_option("--max-len", gt_args.spec.max_len, "maximum source length")->default_val(12);
  gt_cmd->add_option("--seed", gt_args.spec.seed, "corpus seed")->default_val(7);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (train_cmd->parsed()) {
      if (!mode_override.empty()) train_args.mode = mode_override;
      if (epochs_override >= 0) train_args.epochs = epochs_override;
      if (batch_override >= 0) train_args.batch_size = batch_override;
      if (seed_override >= 0) train_args.seed = static_cast<std::uint64_t>(seed_override);
      if (dropout_override >= 0.0) train_args.dropout = dropout_override;
      if (!ckpt_override.empty()) train_args.checkpoint = ckpt_override;
      return cmd_train(train_args);
    }
    if (tr_cmd->parsed()) {
      if (max_len_override > 0) tr_args.max_len = max_len_override;
      return cmd_translate(tr_args);
    }
    if (ev_cmd->parsed()) return cmd_evaluate(ev_args);
    if (an_cmd->parsed()) return cmd_analyze(an_args);
    if (gc_cmd->parsed()) return cmd_gradcheck(gc_args);
    if (gt_cmd->parsed()) return cmd_gentoy(gt_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace nmt
