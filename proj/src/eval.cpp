#include "nmt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_map>

namespace nmt {

namespace {

using NgramCounts = std::unordered_map<std::string, long long>;

// n-grams keyed by their tokens joined with an unlikely separator
NgramCounts count_ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0) key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuSentenceStats bleu_sentence_stats(const Tokens& hyp, const std::vector<Tokens>& refs) {
  if (refs.empty()) throw DomainError("bleu: a sentence has no reference");
  BleuSentenceStats s;
  s.hyp_length = static_cast<long long>(hyp.size());

  long long closest = static_cast<long long>(refs[0].size());
  for (const Tokens& r : refs) {
    const long long len = static_cast<long long>(r.size());
    const long long d_new = std::llabs(len - s.hyp_length);
    const long long d_old = std::llabs(closest - s.hyp_length);
    if (d_new < d_old || (d_new == d_old && len < closest)) closest = len;
  }
  s.closest_ref_length = closest;

  for (std::size_t n = 1; n <= 4; ++n) {
    NgramCounts hyp_counts = count_ngrams(hyp, n);
    NgramCounts clip;
    for (const Tokens& r : refs)
      for (const auto& [key, count] : count_ngrams(r, n)) {
        auto it = clip.find(key);
        if (it == clip.end())
          clip[key] = count;
        else
          it->second = std::max(it->second, count);
      }
    long long matched = 0, total = 0;
    for (const auto& [key, count] : hyp_counts) {
      total += count;
      auto it = clip.find(key);
      if (it != clip.end()) matched += std::min(count, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = total;
  }
  return s;
}

BleuReport bleu_from_stats(std::span<const BleuSentenceStats> stats) {
  BleuReport rep;
  for (const BleuSentenceStats& s : stats) {
    rep.hyp_length += s.hyp_length;
    rep.ref_length += s.closest_ref_length;
    for (int n = 0; n < 4; ++n) {
      rep.matches[static_cast<std::size_t>(n)] += s.matches[static_cast<std::size_t>(n)];
      rep.totals[static_cast<std::size_t>(n)] += s.totals[static_cast<std::size_t>(n)];
    }
  }

  double log_sum = 0.0;
  bool any_zero = false;
  for (int n = 0; n < 4; ++n) {
    const auto i = static_cast<std::size_t>(n);
    rep.precisions[i] =
        rep.totals[i] > 0 ? static_cast<double>(rep.matches[i]) / static_cast<double>(rep.totals[i])
                          : 0.0;
    if (rep.matches[i] == 0)
      any_zero = true;
    else
      log_sum += std::log(rep.precisions[i]);
  }

  rep.brevity_penalty =
      rep.hyp_length == 0
          ? 0.0
          : (rep.hyp_length < rep.ref_length
                 ? std::exp(1.0 - static_cast<double>(rep.ref_length) /
                                      static_cast<double>(rep.hyp_length))
                 : 1.0);

  rep.zero_match_flag = any_zero;
  rep.bleu = any_zero ? 0.0 : rep.brevity_penalty * std::exp(log_sum / 4.0);
  return rep;
}

BleuReport corpus_bleu(const std::vector<std::string>& hyps,
                       const std::vector<std::vector<std::string>>& refs) {
  if (hyps.size() != refs.size())
    throw DomainError("bleu: " + std::to_string(hyps.size()) + " hypotheses vs " +
                      std::to_string(refs.size()) + " reference rows");
  std::vector<BleuSentenceStats> stats;
  stats.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    std::vector<Tokens> ref_tokens;
    ref_tokens.reserve(refs[i].size());
    for (const std::string& r : refs[i]) ref_tokens.push_back(tokenize(r));
    stats.push_back(bleu_sentence_stats(tokenize(hyps[i]), ref_tokens));
  }
  return bleu_from_stats(stats);
}

SignificanceResult bootstrap_significance(const std::vector<std::string>& hyps_a,
                                          const std::vector<std::string>& hyps_b,
                                          const std::vector<std::vector<std::string>>& refs,
                                          std::int32_t samples, std::uint64_t seed) {
  if (samples < 100) throw DomainError("bootstrap: need at least 100 resamples");
  if (hyps_a.size() != refs.size() || hyps_b.size() != refs.size())
    throw DomainError("bootstrap: hypothesis/reference sentence counts differ (" +
                      std::to_string(hyps_a.size()) + ", " + std::to_string(hyps_b.size()) +
                      ", " + std::to_string(refs.size()) + ")");
  if (refs.empty()) throw DomainError("bootstrap: empty corpus");

  const std::size_t n = refs.size();
  std::vector<BleuSentenceStats> stats_a(n), stats_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Tokens> ref_tokens;
    for (const std::string& r : refs[i]) ref_tokens.push_back(tokenize(r));
    stats_a[i] = bleu_sentence_stats(tokenize(hyps_a[i]), ref_tokens);
    stats_b[i] = bleu_sentence_stats(tokenize(hyps_b[i]), ref_tokens);
  }

  SignificanceResult res;
  res.samples = samples;
  res.observed_delta = bleu_from_stats(stats_b).bleu - bleu_from_stats(stats_a).bleu;

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<BleuSentenceStats> sample_a(n), sample_b(n);
  double delta_sum = 0.0;
  for (std::int32_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(rng);
      sample_a[i] = stats_a[j];
      sample_b[i] = stats_b[j];
    }
    const double delta = bleu_from_stats(sample_b).bleu - bleu_from_stats(sample_a).bleu;
    delta_sum += delta;
    if (delta <= 0.0) ++res.b_not_better;
  }
  res.mean_delta = delta_sum / static_cast<double>(samples);
  res.p_value = static_cast<double>(res.b_not_better) / static_cast<double>(samples);
  return res;
}

void write_trace(std::span<const GateRecord> records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  char beta_buf[32];
  for (const GateRecord& r : records) {
    std::snprintf(beta_buf, sizeof(beta_buf), "%.6f", r.beta);
    out << r.sentence << '\t' << r.step << '\t' << r.token << '\t' << beta_buf << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::vector<GateRecord> read_trace(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<GateRecord> records;
  records.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    GateRecord r;
    std::size_t f1 = lines[i].find('\t');
    std::size_t f2 = f1 == std::string::npos ? f1 : lines[i].find('\t', f1 + 1);
    std::size_t f3 = f2 == std::string::npos ? f2 : lines[i].find('\t', f2 + 1);
    if (f3 == std::string::npos)
      throw IoError("trace '" + path + "' line " + std::to_string(i + 1) +
                    ": expected 4 tab-separated fields");
    try {
      r.sentence = std::stoi(lines[i].substr(0, f1));
      r.step = std::stoi(lines[i].substr(f1 + 1, f2 - f1 - 1));
      r.token = lines[i].substr(f2 + 1, f3 - f2 - 1);
      r.beta = std::stod(lines[i].substr(f3 + 1));
    } catch (const std::exception&) {
      throw IoError("trace '" + path + "' line " + std::to_string(i + 1) + ": malformed field");
    }
    if (r.token.empty() || r.beta < 0.0 || r.beta > 1.0)
      throw IoError("trace '" + path + "' line " + std::to_string(i + 1) + ": invalid record");
    records.push_back(std::move(r));
  }
  return records;
}

GateTable gate_analysis(std::span<const GateRecord> records, double threshold,
                        std::int32_t top_n) {
  if (threshold < 0.0 || threshold > 1.0)
    throw DomainError("gate_analysis: threshold must lie in [0, 1]");
  if (top_n < 1) throw DomainError("gate_analysis: top_n must be at least 1");

  std::unordered_map<std::string, long long> counts;
  GateTable table;
  for (const GateRecord& r : records)
    if (r.beta >= threshold) {
      ++counts[r.token];
      ++table.passing;
    }

  std::vector<GateTableEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [token, count] : counts) entries.push_back({token, count});
  std::sort(entries.begin(), entries.end(), [](const GateTableEntry& a, const GateTableEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });
  if (entries.size() > static_cast<std::size_t>(top_n))
    entries.resize(static_cast<std::size_t>(top_n));
  table.top = std::move(entries);
  return table;
}

GateClassMeans gate_class_means(std::span<const GateRecord> records,
                                const std::vector<std::vector<char>>& labels) {
  GateClassMeans m;
  double aligned_sum = 0.0, inserted_sum = 0.0;
  for (const GateRecord& r : records) {
    if (r.sentence < 0 || static_cast<std::size_t>(r.sentence) >= labels.size()) continue;
    const std::vector<char>& row = labels[static_cast<std::size_t>(r.sentence)];
    if (r.step < 0 || static_cast<std::size_t>(r.step) >= row.size()) continue;
    if (row[static_cast<std::size_t>(r.step)] == 'I') {
      inserted_sum += r.beta;
      ++m.inserted_count;
    } else {
      aligned_sum += r.beta;
      ++m.aligned_count;
    }
  }
  if (m.aligned_count > 0) m.aligned_mean = aligned_sum / static_cast<double>(m.aligned_count);
  if (m.inserted_count > 0) m.inserted_mean = inserted_sum / static_cast<double>(m.inserted_count);
  return m;
}

}  // namespace nmt
