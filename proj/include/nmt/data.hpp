#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nmt/tensor.hpp"

namespace nmt {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Bidirectional token map with fixed specials. Ids 0..3 are PAD, UNK, BOS,
// EOS; everything else maps one-to-one onto lowercased tokens.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::int32_t kBos = 2;
  static constexpr std::int32_t kEos = 3;

  Vocabulary();

  std::int32_t size() const { return static_cast<std::int32_t>(id_to_token_.size()); }
  std::int32_t add(const std::string& token);  // no-op if present
  std::int32_t id(const std::string& token) const;  // kUnk when absent
  const std::string& token(std::int32_t id) const;

  // Fraction of training-side word tokens covered by the retained entries.
  double coverage = 1.0;

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, std::int32_t> token_to_id_;
};

using Tokens = std::vector<std::string>;

struct SentencePair {
  Tokens src;
  Tokens tgt;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  std::size_t dropped_too_long = 0;
  std::size_t dropped_empty = 0;
};

struct EncodedPair {
  std::vector<std::int32_t> src;
  std::vector<std::int32_t> tgt;
};

using EncodedCorpus = std::vector<EncodedPair>;

// Lowercased whitespace tokens of one line.
Tokens tokenize(const std::string& line);

// Top-K tokens of one corpus side by frequency, ties broken by earlier first
// occurrence, plus the specials. Sets `coverage`.
Vocabulary build_vocab(const std::vector<Tokens>& side, std::int32_t k);

// Lowercases and maps tokens to ids, UNK for out-of-vocabulary words.
std::vector<std::int32_t> encode_sentence(const Vocabulary& v, std::span<const std::string> tokens);

std::string decode_ids(const Vocabulary& v, std::span<const std::int32_t> ids);

EncodedCorpus encode_corpus(const ParallelCorpus& corpus, const Vocabulary& src_vocab,
                            const Vocabulary& tgt_vocab);

// Line-aligned plain-text pair of files, whitespace tokenized and lowercased.
// Pairs with an empty side or a side longer than max_len words are dropped
// (counted in the result).
ParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                             std::int32_t max_len);

// One token per line: the 4 specials first, then content tokens in id order.
void save_vocab(const Vocabulary& v, const std::string& path);
Vocabulary load_vocab(const std::string& path);

struct Batch {
  // row-per-sentence padded id rectangles plus matching real-token masks
  std::vector<std::vector<std::int32_t>> src, tgt;
  std::vector<std::vector<std::uint8_t>> src_mask, tgt_mask;
};

// Seeded shuffle, then fixed-size groups padded with PAD to the group's max
// lengths. The final group may be smaller.
std::vector<Batch> make_batches(const EncodedCorpus& corpus, std::int32_t batch_size,
                                std::uint64_t seed);

// Synthetic unaligned-words task. Source sentences are random symbols from a
// small alphabet; targets are a fixed per-symbol translation with auxiliary
// insertion tokens injected at positions determined by the preceding symbol,
// so the insertions are predictable from target-side context alone (the
// phenomenon the sentinel gate is meant to absorb).
struct SyntheticTaskSpec {
  std::int32_t alphabet = 26;
  std::vector<std::string> insertion_tokens = {"the", "to", "a"};
  double insertion_prob = 0.25;
  std::uint64_t seed = 7;
  std::int32_t train_pairs = 2000;
  std::int32_t dev_pairs = 200;
  std::int32_t test_pairs = 200;
  std::int32_t min_len = 3;
  std::int32_t max_len = 12;

  void validate() const;
};

struct LabeledCorpus {
  ParallelCorpus corpus;
  // per sentence, per target token: 'A' aligned (a translation) or 'I' inserted
  std::vector<std::vector<char>> labels;
};

struct ToyDataset {
  LabeledCorpus train, dev, test;
};

// The deterministic translation of one source symbol ("c" -> "cc").
std::string toy_image(const std::string& symbol);

ToyDataset generate_toy_corpus(const SyntheticTaskSpec& spec);

void save_corpus_side(const std::vector<Tokens>& side, const std::string& path);
// One line per sentence of space-separated A/I flags.
void save_labels(const std::vector<std::vector<char>>& labels, const std::string& path);
std::vector<std::vector<char>> load_labels(const std::string& path);

std::vector<std::string> read_lines(const std::string& path);
void write_lines(std::span<const std::string> lines, const std::string& path);

}  // namespace nmt
