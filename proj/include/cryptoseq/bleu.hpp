#pragma once

#include <string>
#include <vector>

#include "cryptoseq/api_call.hpp"
#include "cryptoseq/dataset.hpp"

namespace cryptoseq {

class BleuError : public std::runtime_error {
 public:
  explicit BleuError(const std::string& what) : std::runtime_error(what) {}
};

/// Sentence-level BLEU over call tokens. The effective n-gram order is
/// min(n_max, candidate length). Modified precisions with a raw numerator of
/// zero are add-one smoothed for n >= 2, so score(s, s) stays exactly 1 and
/// short sequences avoid hard zeros.
struct BleuConfig {
  int n_max = 4;  // must lie in [1, 9]
};

struct BleuReport {
  std::vector<double> per_pair_scores;  // in reference id order
  double mean_score_pct = 0.0;
  std::size_t perfect_count = 0;        // pairs with score == 1
};

double sentence_bleu(const CallSequence& candidate, const CallSequence& reference,
                     const BleuConfig& cfg = {});

/// Token-level variant used by both the sequence path and test oracles.
double sentence_bleu_tokens(const std::vector<std::string>& candidate,
                            const std::vector<std::string>& reference, const BleuConfig& cfg = {});

/// Pairs candidates with references by id; every candidate id must be present
/// in the references.
BleuReport dataset_bleu(const Dataset& candidates, const Dataset& references,
                        const BleuConfig& cfg = {});

}  // namespace cryptoseq
