#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cryptoseq/dataset.hpp"

namespace cryptoseq {

class ExtractionError : public std::runtime_error {
 public:
  explicit ExtractionError(const std::string& what) : std::runtime_error(what) {}
};

/// Import-substring filters used to select candidate files.
struct CorpusFilter {
  std::vector<std::string> keywords = {"javax.crypto", "java.security", "org.bouncycastle"};
};

struct ExtractorConfig {
  CorpusFilter filter;
  /// Class names considered cryptographic in addition to classes imported
  /// from a keyword package; normally the rule pack's class names.
  std::set<std::string> crypto_classes;
};

/// One parsed method of a source file (token-level, tolerant).
struct JavaMethodRecord {
  std::string name;
  std::optional<std::string> javadoc_first_line;
  std::size_t body_begin = 0;  // token indices into the file's token stream
  std::size_t body_end = 0;
  std::map<std::string, std::string> declared_types;  // variable -> class name
};

/// Extracts one annotated sequence per Javadoc'd method that touches the
/// crypto class universe. Same-file helper calls are inlined once per chain;
/// string literals passed directly as arguments are captured.
std::vector<AnnotatedSequence> extract_sequences(const std::string& java_source,
                                                 const ExtractorConfig& config,
                                                 WarningSink* warnings = nullptr);

/// Walks the directory (sorted paths), extracts from every .java file whose
/// text contains a filter keyword, and assigns fresh sequential ids starting
/// at 1. Provenance records the path relative to root and the method name.
Dataset scan_corpus(const std::filesystem::path& root, const ExtractorConfig& config,
                    WarningSink* warnings = nullptr);

}  // namespace cryptoseq
