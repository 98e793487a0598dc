#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cryptoseq/api_call.hpp"

namespace cryptoseq {

class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

struct AnnotatedSequence {
  std::int64_t id = 0;
  std::string annotation;  // lowercased at ingestion
  CallSequence sequence;
};

struct Dataset {
  std::string name;
  std::vector<AnnotatedSequence> entries;

  const AnnotatedSequence* find(std::int64_t id) const;
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

struct StatsReport {
  std::size_t entry_count = 0;
  double mean_length = 0.0;
  std::map<int, double> frac_longer_than;
  std::size_t sequence_vocab_size = 0;
  std::size_t annotation_vocab_size = 0;
};

using WarningSink = std::vector<std::string>;

/// JSON Lines interchange format: one object per line with keys id (integer),
/// annotation (string), sequence (array of tokens), optional args (object
/// mapping call index -> array of literal strings) and provenance (object
/// with repo, file, method).
Dataset read_dataset(std::istream& in, const std::string& name, WarningSink* warnings = nullptr);
Dataset load_dataset(const std::filesystem::path& path, WarningSink* warnings = nullptr);
void write_dataset(const Dataset& d, std::ostream& out);
void store_dataset(const Dataset& d, const std::filesystem::path& path);

/// One JSONL record, without trailing newline.
std::string entry_to_jsonl(const AnnotatedSequence& e);

StatsReport dataset_stats(const Dataset& d, const std::vector<int>& thresholds = {7});

}  // namespace cryptoseq
