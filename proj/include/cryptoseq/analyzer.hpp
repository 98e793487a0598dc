#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cryptoseq/api_call.hpp"
#include "cryptoseq/dataset.hpp"
#include "cryptoseq/rule.hpp"

namespace cryptoseq {

/// One detected deviation from the rule pack. `position` is a call index;
/// `at_end` marks the end-of-sequence position used by order-incomplete.
struct Violation {
  enum class Kind {
    OrderIncomplete,
    OrderDiverged,
    UnknownEvent,
    ForbiddenEvent,
    PredicateUnmet,
    ConstraintFailed,
  };

  Kind kind;
  std::string rule_class;
  std::size_t position = 0;
  bool at_end = false;
  std::string detail;
  MisuseCategory category = MisuseCategory::IncorrectMethodCall;

  std::vector<std::string> missing_methods;         // OrderIncomplete
  std::optional<std::string> predicate;             // PredicateUnmet
  std::optional<std::string> replacement_token;     // ForbiddenEvent
  std::optional<int> arg_pos;                       // ConstraintFailed
  std::optional<std::string> repair_literal;        // ConstraintFailed
};

std::string to_string(Violation::Kind k);

struct MisuseDistribution {
  std::map<MisuseCategory, std::size_t> counts;
  std::size_t sequences_total = 0;
  std::size_t sequences_with_misuse = 0;
  double misuse_rate = 0.0;
};

/// Checks one sequence against every applicable rule; the empty list means
/// the sequence is correct. Violations are sorted by position.
std::vector<Violation> check_sequence(const CallSequence& s, const RulePack& pack);

/// Deterministic kind -> category mapping; total on every violation kind.
MisuseCategory classify(const Violation& v);

/// Aggregates check_sequence over a dataset. Throws DatasetError when empty.
MisuseDistribution misuse_report(const Dataset& d, const RulePack& pack);

/// Crypto classes appearing in the sequence that no rule in the pack covers.
/// `universe` is the set of class names considered cryptographic.
std::vector<std::string> uncovered_classes(const CallSequence& s, const RulePack& pack,
                                           const std::set<std::string>& universe);

/// One violation as a JSON object (single line, for JSONL streams).
std::string violation_to_json(const Violation& v);

}  // namespace cryptoseq
