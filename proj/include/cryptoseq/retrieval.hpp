#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cryptoseq/bleu.hpp"
#include "cryptoseq/dataset.hpp"

namespace cryptoseq {

class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// TF-IDF index over annotation tokens (lowercase alphanumeric runs).
class RetrievalIndex {
 public:
  static RetrievalIndex build(const std::vector<AnnotatedSequence>& training);

  struct Generated {
    CallSequence sequence;
    std::int64_t source_id = 0;
    bool low_confidence = false;  // zero similarity everywhere or a tie
  };

  /// Nearest training entry by cosine similarity; ties and all-zero
  /// similarity resolve to the lowest entry id.
  Generated generate(const std::string& query) const;

  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  std::map<std::string, std::size_t> vocabulary_;  // token -> dimension
  std::vector<double> idf_;                        // log(N / df), natural log
  std::vector<std::vector<double>> vectors_;       // one per training entry
  std::vector<AnnotatedSequence> entries_;

  std::vector<double> vectorize(const std::string& text) const;
};

std::vector<std::string> tokenize_annotation(const std::string& text);

struct EvalConfig {
  int k = 10;
  std::uint64_t seed = 0;
  BleuConfig bleu;
};

struct FoldResult {
  std::vector<std::int64_t> test_ids;
  double accuracy_bleu_pct = 0.0;
};

struct EvalReport {
  double accuracy_bleu_pct = 0.0;  // pooled, vs the source dataset
  double security_bleu_pct = 0.0;  // pooled, vs the corrected dataset
  std::vector<FoldResult> folds;
  EvalConfig config;
  std::size_t generated_total = 0;
  std::size_t security_pairs = 0;
};

struct FoldPair {
  Dataset train;
  Dataset test;
};

/// Seeded deterministic split: ids are permuted by a Fisher-Yates shuffle
/// driven by a splitmix64 generator, then cut into k folds whose sizes differ
/// by at most one (the first n mod k folds take the extra entry).
std::vector<FoldPair> kfold_split(const Dataset& d, const EvalConfig& cfg);

/// k-fold retrieval evaluation: per fold, index the training split and
/// generate a sequence for each test annotation; all generated pairs are
/// pooled and scored once against the source dataset (accuracy) and against
/// the corrected dataset restricted to covered ids (security).
EvalReport evaluate(const Dataset& source, const Dataset& corrected, const EvalConfig& cfg);

/// Machine form of the report; identical inputs give identical bytes.
std::string eval_report_to_json(const EvalReport& r);

}  // namespace cryptoseq
