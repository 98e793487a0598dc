#include "cryptoseq/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

namespace cryptoseq {

std::vector<std::string> tokenize_annotation(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

RetrievalIndex RetrievalIndex::build(const std::vector<AnnotatedSequence>& training) {
  if (training.empty()) throw EvalError("cannot build a retrieval index from an empty training set");
  RetrievalIndex index;
  index.entries_ = training;

  std::map<std::string, std::size_t> df;
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(training.size());
  for (const auto& entry : training) {
    auto tokens = tokenize_annotation(entry.annotation);
    std::map<std::string, int> seen;
    for (const auto& t : tokens) ++seen[t];
    for (const auto& [t, count] : seen) ++df[t];
    tokenized.push_back(std::move(tokens));
  }
  for (const auto& [token, count] : df) {
    index.vocabulary_.emplace(token, index.vocabulary_.size());
  }
  index.idf_.resize(index.vocabulary_.size());
  const double n = static_cast<double>(training.size());
  for (const auto& [token, dim] : index.vocabulary_) {
    index.idf_[dim] = std::log(n / static_cast<double>(df[token]));
  }
  for (const auto& tokens : tokenized) {
    std::vector<double> vec(index.vocabulary_.size(), 0.0);
    for (const auto& t : tokens) vec[index.vocabulary_.at(t)] += 1.0;  // raw TF
    for (std::size_t d = 0; d < vec.size(); ++d) vec[d] *= index.idf_[d];
    index.vectors_.push_back(std::move(vec));
  }
  return index;
}

std::vector<double> RetrievalIndex::vectorize(const std::string& text) const {
  std::vector<double> vec(vocabulary_.size(), 0.0);
  for (const auto& t : tokenize_annotation(text)) {
    auto it = vocabulary_.find(t);
    if (it != vocabulary_.end()) vec[it->second] += 1.0;
  }
  for (std::size_t d = 0; d < vec.size(); ++d) vec[d] *= idf_[d];
  return vec;
}

RetrievalIndex::Generated RetrievalIndex::generate(const std::string& query) const {
  std::vector<double> q = vectorize(query);
  double q_norm = 0.0;
  for (double v : q) q_norm += v * v;
  q_norm = std::sqrt(q_norm);

  constexpr double kEps = 1e-12;
  double best_sim = 0.0;
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    double dot = 0.0;
    double norm = 0.0;
    for (std::size_t d = 0; d < vectors_[i].size(); ++d) {
      dot += vectors_[i][d] * q[d];
      norm += vectors_[i][d] * vectors_[i][d];
    }
    double sim = 0.0;
    if (q_norm > 0.0 && norm > 0.0) sim = dot / (q_norm * std::sqrt(norm));
    if (sim > best_sim + kEps) {
      best_sim = sim;
      best = i;
      tie = false;
    } else if (std::abs(sim - best_sim) <= kEps && sim > 0.0 && i != best) {
      // Equal similarity: keep the entry with the lowest id.
      if (entries_[i].id < entries_[best].id) best = i;
      tie = true;
    }
  }
  if (best_sim <= kEps) {
    // No overlap with any training annotation: deterministic fallback.
    best = 0;
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].id < entries_[best].id) best = i;
    }
    return {entries_[best].sequence, entries_[best].id, true};
  }
  return {entries_[best].sequence, entries_[best].id, tie};
}

namespace {

// splitmix64; fixed so splits are portable across standard libraries.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<FoldPair> kfold_split(const Dataset& d, const EvalConfig& cfg) {
  const std::size_t n = d.size();
  if (cfg.k < 2) throw EvalError("fold count must be at least 2");
  if (static_cast<std::size_t>(cfg.k) > n) {
    throw EvalError("fold count " + std::to_string(cfg.k) + " exceeds dataset size " +
                    std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::uint64_t state = cfg.seed;
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(splitmix64(state) % (i + 1));
    std::swap(order[i], order[j]);
  }

  const std::size_t k = static_cast<std::size_t>(cfg.k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;  // first `extra` folds take one more entry
  std::vector<FoldPair> folds;
  std::size_t cursor = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t fold_size = base + (f < extra ? 1 : 0);
    std::vector<bool> in_test(n, false);
    for (std::size_t i = 0; i < fold_size; ++i) in_test[order[cursor + i]] = true;
    cursor += fold_size;
    FoldPair pair;
    pair.train.name = d.name + "/train";
    pair.test.name = d.name + "/test";
    for (std::size_t i = 0; i < n; ++i) {
      (in_test[i] ? pair.test : pair.train).entries.push_back(d.entries[i]);
    }
    folds.push_back(std::move(pair));
  }
  return folds;
}

EvalReport evaluate(const Dataset& source, const Dataset& corrected, const EvalConfig& cfg) {
  for (const auto& entry : corrected.entries) {
    if (!source.find(entry.id)) {
      throw EvalError("corrected dataset id " + std::to_string(entry.id) +
                      " has no entry in the source dataset");
    }
  }
  EvalReport report;
  report.config = cfg;

  Dataset generated;
  generated.name = "generated";
  auto folds = kfold_split(source, cfg);
  for (const auto& fold : folds) {
    RetrievalIndex index = RetrievalIndex::build(fold.train.entries);
    Dataset fold_generated;
    FoldResult fr;
    for (const auto& test_entry : fold.test.entries) {
      auto gen = index.generate(test_entry.annotation);
      AnnotatedSequence out;
      out.id = test_entry.id;
      out.annotation = test_entry.annotation;
      out.sequence = std::move(gen.sequence);
      fr.test_ids.push_back(test_entry.id);
      fold_generated.entries.push_back(out);
      generated.entries.push_back(std::move(out));
    }
    std::sort(fr.test_ids.begin(), fr.test_ids.end());
    fr.accuracy_bleu_pct = dataset_bleu(fold_generated, source, cfg.bleu).mean_score_pct;
    report.folds.push_back(std::move(fr));
  }
  // Deterministic pooled order regardless of fold layout.
  std::sort(generated.entries.begin(), generated.entries.end(),
            [](const AnnotatedSequence& a, const AnnotatedSequence& b) { return a.id < b.id; });

  report.generated_total = generated.size();
  report.accuracy_bleu_pct = dataset_bleu(generated, source, cfg.bleu).mean_score_pct;

  Dataset covered;
  covered.name = "generated/covered";
  for (const auto& entry : generated.entries) {
    if (corrected.find(entry.id)) covered.entries.push_back(entry);
  }
  report.security_pairs = covered.size();
  if (!covered.empty()) {
    report.security_bleu_pct = dataset_bleu(covered, corrected, cfg.bleu).mean_score_pct;
  }
  return report;
}

std::string eval_report_to_json(const EvalReport& r) {
  nlohmann::json rec;
  rec["accuracy_bleu_pct"] = r.accuracy_bleu_pct;
  rec["security_bleu_pct"] = r.security_bleu_pct;
  rec["generated_total"] = r.generated_total;
  rec["security_pairs"] = r.security_pairs;
  rec["k"] = r.config.k;
  rec["seed"] = r.config.seed;
  rec["n_max"] = r.config.bleu.n_max;
  nlohmann::json folds = nlohmann::json::array();
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    folds.push_back({{"fold", i},
                     {"test_ids", r.folds[i].test_ids},
                     {"accuracy_bleu_pct", r.folds[i].accuracy_bleu_pct}});
  }
  rec["folds"] = folds;
  return rec.dump();
}

}  // namespace cryptoseq
