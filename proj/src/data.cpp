#include "nmt/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace nmt {

namespace {

const char* kSpecials[] = {"<pad>", "<unk>", "<bos>", "<eos>"};

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* s : kSpecials) {
    token_to_id_[s] = static_cast<std::int32_t>(id_to_token_.size());
    id_to_token_.push_back(s);
  }
}

std::int32_t Vocabulary::add(const std::string& token) {
  auto it = token_to_id_.find(token);
  if (it != token_to_id_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(id_to_token_.size());
  token_to_id_[token] = id;
  id_to_token_.push_back(token);
  return id;
}

std::int32_t Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || id >= size())
    throw IndexError("vocabulary: id " + std::to_string(id) + " out of range");
  return id_to_token_[static_cast<std::size_t>(id)];
}

Tokens tokenize(const std::string& line) {
  Tokens out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(lowercase(tok));
  return out;
}

Vocabulary build_vocab(const std::vector<Tokens>& side, std::int32_t k) {
  if (k < 1) throw DomainError("build_vocab: K must be at least 1");

  struct Entry {
    std::int64_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string, Entry> freq;
  std::size_t total = 0;
  for (const Tokens& sent : side)
    for (const std::string& raw : sent) {
      const std::string tok = lowercase(raw);
      auto [it, fresh] = freq.try_emplace(tok);
      if (fresh) it->second.first_seen = total;
      ++it->second.count;
      ++total;
    }
  if (total == 0) throw DomainError("build_vocab: corpus side has no tokens");

  std::vector<std::pair<std::string, Entry>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_seen < b.second.first_seen;
  });
  if (entries.size() > static_cast<std::size_t>(k)) entries.resize(static_cast<std::size_t>(k));

  Vocabulary v;
  std::int64_t covered = 0;
  for (const auto& [tok, e] : entries) {
    v.add(tok);
    covered += e.count;
  }
  v.coverage = static_cast<double>(covered) / static_cast<double>(total);
  return v;
}

std::vector<std::int32_t> encode_sentence(const Vocabulary& v, std::span<const std::string> tokens) {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(v.id(lowercase(t)));
  return ids;
}

std::string decode_ids(const Vocabulary& v, std::span<const std::int32_t> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += v.token(ids[i]);
  }
  return out;
}

EncodedCorpus encode_corpus(const ParallelCorpus& corpus, const Vocabulary& src_vocab,
                            const Vocabulary& tgt_vocab) {
  EncodedCorpus out;
  out.reserve(corpus.pairs.size());
  for (const SentencePair& p : corpus.pairs)
    out.push_back({encode_sentence(src_vocab, p.src), encode_sentence(tgt_vocab, p.tgt)});
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_lines(std::span<const std::string> lines, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const std::string& l : lines) out << l << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

ParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                             std::int32_t max_len) {
  const std::vector<std::string> src_lines = read_lines(src_path);
  const std::vector<std::string> tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size())
    throw IoError("line counts differ: '" + src_path + "' has " +
                  std::to_string(src_lines.size()) + ", '" + tgt_path + "' has " +
                  std::to_string(tgt_lines.size()));

  ParallelCorpus corpus;
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SentencePair pair{tokenize(src_lines[i]), tokenize(tgt_lines[i])};
    if (pair.src.empty() || pair.tgt.empty()) {
      ++corpus.dropped_empty;
      continue;
    }
    if (pair.src.size() > static_cast<std::size_t>(max_len) ||
        pair.tgt.size() > static_cast<std::size_t>(max_len)) {
      ++corpus.dropped_too_long;
      continue;
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

void save_vocab(const Vocabulary& v, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(static_cast<std::size_t>(v.size()));
  for (std::int32_t i = 0; i < v.size(); ++i) lines.push_back(v.token(i));
  write_lines(lines, path);
}

Vocabulary load_vocab(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 4) throw IoError("vocabulary file '" + path + "' lacks the 4 specials");
  for (int i = 0; i < 4; ++i)
    if (lines[static_cast<std::size_t>(i)] != kSpecials[i])
      throw IoError("vocabulary file '" + path + "' line " + std::to_string(i + 1) +
                    " should be " + kSpecials[i]);
  Vocabulary v;
  for (std::size_t i = 4; i < lines.size(); ++i) {
    if (lines[i].empty()) throw IoError("vocabulary file '" + path + "' has an empty line");
    v.add(lines[i]);
  }
  return v;
}

std::vector<Batch> make_batches(const EncodedCorpus& corpus, std::int32_t batch_size,
                                std::uint64_t seed) {
  if (batch_size < 1) throw DomainError("make_batches: batch_size must be at least 1");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Batch> batches;
  for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(batch_size));
    Batch b;
    std::size_t src_w = 0, tgt_w = 0;
    for (std::size_t i = at; i < end; ++i) {
      src_w = std::max(src_w, corpus[order[i]].src.size());
      tgt_w = std::max(tgt_w, corpus[order[i]].tgt.size());
    }
    for (std::size_t i = at; i < end; ++i) {
      const EncodedPair& p = corpus[order[i]];
      std::vector<std::int32_t> src(src_w, Vocabulary::kPad), tgt(tgt_w, Vocabulary::kPad);
      std::vector<std::uint8_t> sm(src_w, 0), tm(tgt_w, 0);
      std::copy(p.src.begin(), p.src.end(), src.begin());
      std::copy(p.tgt.begin(), p.tgt.end(), tgt.begin());
      std::fill(sm.begin(), sm.begin() + static_cast<std::ptrdiff_t>(p.src.size()), 1);
      std::fill(tm.begin(), tm.begin() + static_cast<std::ptrdiff_t>(p.tgt.size()), 1);
      b.src.push_back(std::move(src));
      b.tgt.push_back(std::move(tgt));
      b.src_mask.push_back(std::move(sm));
      b.tgt_mask.push_back(std::move(tm));
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

void SyntheticTaskSpec::validate() const {
  if (alphabet < 1 || alphabet > 26) throw DomainError("toy task: alphabet size must be 1..26");
  if (insertion_tokens.empty()) throw DomainError("toy task: need at least one insertion token");
  if (insertion_prob < 0.0 || insertion_prob > 1.0)
    throw DomainError("toy task: insertion probability must lie in [0, 1]");
  if (min_len < 1 || max_len < min_len) throw DomainError("toy task: bad length range");
  if (train_pairs < 1 || dev_pairs < 0 || test_pairs < 0)
    throw DomainError("toy task: bad split sizes");
  for (std::int32_t i = 0; i < alphabet; ++i) {
    const std::string img = toy_image(std::string(1, static_cast<char>('a' + i)));
    for (const std::string& ins : insertion_tokens)
      if (img == ins)
        throw DomainError("toy task: insertion token '" + ins + "' collides with an image");
  }
}

std::string toy_image(const std::string& symbol) { return symbol + symbol; }

namespace {

// Insertion behavior is a fixed function of the preceding source symbol
// (index `alphabet` stands for sentence start): a seeded subset of contexts
// of size round(p * (alphabet+1)) triggers an insertion, and the inserted
// token is a seeded per-context choice. Targets are therefore deterministic
// given the source, while the token-level insertion rate still matches p on
// random content.
struct InsertionRule {
  std::vector<std::int8_t> inserts;       // per context
  std::vector<std::int32_t> which_token;  // per context

  InsertionRule(const SyntheticTaskSpec& spec) {
    const std::int32_t contexts = spec.alphabet + 1;
    std::vector<std::int32_t> order(static_cast<std::size_t>(contexts));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(spec.seed, 1));
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_insert = static_cast<std::int32_t>(
        std::lround(spec.insertion_prob * static_cast<double>(contexts)));

    inserts.assign(static_cast<std::size_t>(contexts), 0);
    for (std::int32_t i = 0; i < n_insert; ++i)
      inserts[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;

    Rng pick(derive_seed(spec.seed, 2));
    std::uniform_int_distribution<std::int32_t> dist(
        0, static_cast<std::int32_t>(spec.insertion_tokens.size()) - 1);
    which_token.resize(static_cast<std::size_t>(contexts));
    for (std::int32_t c = 0; c < contexts; ++c)
      which_token[static_cast<std::size_t>(c)] = dist(pick);
  }
};

LabeledCorpus generate_split(const SyntheticTaskSpec& spec, const InsertionRule& rule,
                             std::int32_t pairs, std::uint64_t stream) {
  LabeledCorpus out;
  Rng rng(derive_seed(spec.seed, stream));
  std::uniform_int_distribution<std::int32_t> len_dist(spec.min_len, spec.max_len);
  std::uniform_int_distribution<std::int32_t> sym_dist(0, spec.alphabet - 1);

  for (std::int32_t p = 0; p < pairs; ++p) {
    const std::int32_t len = len_dist(rng);
    SentencePair pair;
    std::vector<char> labels;
    std::int32_t context = spec.alphabet;  // sentence start
    for (std::int32_t j = 0; j < len; ++j) {
      const std::int32_t sym = sym_dist(rng);
      if (rule.inserts[static_cast<std::size_t>(context)] != 0) {
        pair.tgt.push_back(spec.insertion_tokens[static_cast<std::size_t>(
            rule.which_token[static_cast<std::size_t>(context)])]);
        labels.push_back('I');
      }
      const std::string symbol(1, static_cast<char>('a' + sym));
      pair.src.push_back(symbol);
      pair.tgt.push_back(toy_image(symbol));
      labels.push_back('A');
      context = sym;
    }
    out.corpus.pairs.push_back(std::move(pair));
    out.labels.push_back(std::move(labels));
  }
  return out;
}

}  // namespace

ToyDataset generate_toy_corpus(const SyntheticTaskSpec& spec) {
  spec.validate();
  InsertionRule rule(spec);
  ToyDataset data;
  data.train = generate_split(spec, rule, spec.train_pairs, 10);
  data.dev = generate_split(spec, rule, spec.dev_pairs, 11);
  data.test = generate_split(spec, rule, spec.test_pairs, 12);
  return data;
}

void save_corpus_side(const std::vector<Tokens>& side, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(side.size());
  for (const Tokens& sent : side) {
    std::string line;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (i > 0) line += ' ';
      line += sent[i];
    }
    lines.push_back(std::move(line));
  }
  write_lines(lines, path);
}

void save_labels(const std::vector<std::vector<char>>& labels, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(labels.size());
  for (const std::vector<char>& row : labels) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += ' ';
      line += row[i];
    }
    lines.push_back(std::move(line));
  }
  write_lines(lines, path);
}

std::vector<std::vector<char>> load_labels(const std::string& path) {
  std::vector<std::vector<char>> out;
  for (const std::string& line : read_lines(path)) {
    std::vector<char> row;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
      if (tok != "A" && tok != "I")
        throw IoError("labels file '" + path + "': flag '" + tok + "' is not A or I");
      row.push_back(tok[0]);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace nmt
