#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nmt/data.hpp"

namespace nmt {

struct BleuReport {
  double bleu = 0.0;  // [0, 1]
  std::array<double, 4> precisions{};
  double brevity_penalty = 1.0;
  long long hyp_length = 0;
  long long ref_length = 0;  // sum of per-sentence closest reference lengths
  std::array<long long, 4> matches{};
  std::array<long long, 4> totals{};
  bool zero_match_flag = false;  // some order had no matches; score reported as 0
};

// Per-sentence clipped n-gram counts, cached so resampling can re-aggregate
// without re-tokenizing.
struct BleuSentenceStats {
  std::array<long long, 4> matches{};
  std::array<long long, 4> totals{};
  long long hyp_length = 0;
  long long closest_ref_length = 0;
};

BleuSentenceStats bleu_sentence_stats(const Tokens& hyp, const std::vector<Tokens>& refs);
BleuReport bleu_from_stats(std::span<const BleuSentenceStats> stats);

// Case-insensitive corpus-level 4-gram BLEU: clipped precisions aggregated
// over the corpus, brevity penalty from closest reference lengths, geometric
// mean. No smoothing; a zero count at any order reports bleu 0 with the flag
// set. `refs[i]` holds one or more references for hypothesis i.
BleuReport corpus_bleu(const std::vector<std::string>& hyps,
                       const std::vector<std::vector<std::string>>& refs);

struct SignificanceResult {
  double p_value = 1.0;
  std::int32_t samples = 0;
  double observed_delta = 0.0;  // BLEU(B) - BLEU(A)
  double mean_delta = 0.0;      // over resamples
  std::int32_t b_not_better = 0;
};

// Paired bootstrap for "B improves on A": resamples sentences with
// replacement and reports the fraction of resamples where BLEU(B) <= BLEU(A).
SignificanceResult bootstrap_significance(const std::vector<std::string>& hyps_a,
                                          const std::vector<std::string>& hyps_b,
                                          const std::vector<std::vector<std::string>>& refs,
                                          std::int32_t samples, std::uint64_t seed);

struct GateRecord {
  std::int32_t sentence = 0;
  std::int32_t step = 0;
  std::string token;
  double beta = 0.0;
};

// One record per line: sentence TAB step TAB token TAB beta (6 decimals).
void write_trace(std::span<const GateRecord> records, const std::string& path);
std::vector<GateRecord> read_trace(const std::string& path);

struct GateTableEntry {
  std::string token;
  long long count = 0;
};

struct GateTable {
  std::vector<GateTableEntry> top;  // by count, ties by token
  long long passing = 0;            // records with beta >= threshold
};

GateTable gate_analysis(std::span<const GateRecord> records, double threshold, std::int32_t top_n);

struct GateClassMeans {
  double aligned_mean = 0.0;
  long long aligned_count = 0;
  double inserted_mean = 0.0;
  long long inserted_count = 0;
};

// Mean gate value per token class, matching records to A/I labels by
// (sentence, step); records beyond a sentence's label row are skipped.
GateClassMeans gate_class_means(std::span<const GateRecord> records,
                                const std::vector<std::vector<char>>& labels);

}  // namespace nmt
