#include "cryptoseq/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace cryptoseq {

namespace {

std::map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
  std::map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) {
      if (j > 0) key += '\x1f';
      key += tokens[i + static_cast<std::size_t>(j)];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double sentence_bleu_tokens(const std::vector<std::string>& candidate,
                            const std::vector<std::string>& reference, const BleuConfig& cfg) {
  if (cfg.n_max < 1 || cfg.n_max > 9) throw BleuError("n_max must lie in [1, 9]");
  if (reference.empty()) throw BleuError("reference sequence is empty");
  if (candidate.empty()) return 0.0;

  const int effective_n = std::min<int>(cfg.n_max, static_cast<int>(candidate.size()));
  double log_sum = 0.0;
  for (int n = 1; n <= effective_n; ++n) {
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    long matched = 0;
    long total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    double num = static_cast<double>(matched);
    double den = static_cast<double>(total);
    if (matched == 0) {
      if (n == 1) return 0.0;  // no unigram overlap: score is zero
      num += 1.0;              // add-one smoothing for higher orders
      den += 1.0;
    }
    log_sum += std::log(num / den);
  }
  double score = std::exp(log_sum / effective_n);

  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  if (c < r) score *= std::exp(1.0 - r / c);
  return score;
}

double sentence_bleu(const CallSequence& candidate, const CallSequence& reference,
                     const BleuConfig& cfg) {
  return sentence_bleu_tokens(candidate.tokens(), reference.tokens(), cfg);
}

BleuReport dataset_bleu(const Dataset& candidates, const Dataset& references,
                        const BleuConfig& cfg) {
  std::vector<std::string> unmatched;
  for (const auto& cand : candidates.entries) {
    if (!references.find(cand.id)) unmatched.push_back(std::to_string(cand.id));
  }
  if (!unmatched.empty()) {
    std::ostringstream msg;
    msg << "candidate ids missing from the references:";
    for (const auto& id : unmatched) msg << ' ' << id;
    throw BleuError(msg.str());
  }
  BleuReport report;
  for (const auto& cand : candidates.entries) {
    const AnnotatedSequence* ref = references.find(cand.id);
    double score = sentence_bleu(cand.sequence, ref->sequence, cfg);
    report.per_pair_scores.push_back(score);
    if (score == 1.0) ++report.perfect_count;
  }
  if (!report.per_pair_scores.empty()) {
    double sum = 0.0;
    for (double s : report.per_pair_scores) sum += s;
    report.mean_score_pct = 100.0 * sum / static_cast<double>(report.per_pair_scores.size());
  }
  return report;
}

}  // namespace cryptoseq
