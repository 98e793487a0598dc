#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cryptoseq/api_call.hpp"
#include "cryptoseq/dataset.hpp"
#include "cryptoseq/order_expr.hpp"

namespace cryptoseq {

class RuleError : public std::runtime_error {
 public:
  explicit RuleError(const std::string& what) : std::runtime_error(what) {}
};

/// The six sequence-level misuse categories.
enum class MisuseCategory {
  MissingPredicate,
  InsecureDefaultImplementation,
  IncorrectEncoding,
  IncorrectRandomization,
  IncorrectMethodCall,
  MissingMethodCall,
};

constexpr int kMisuseCategoryCount = 6;

std::string to_string(MisuseCategory c);
MisuseCategory misuse_category_from_string(const std::string& name);
const std::vector<MisuseCategory>& all_misuse_categories();

/// REQUIRES entry: the named predicate must have been produced before the
/// first occurrence of the attached event.
struct PredicateObligation {
  std::string predicate;
  std::string event_alias;
  std::string event_method;
  MisuseCategory category = MisuseCategory::MissingPredicate;
};

/// ENSURES entry: executing the aliased event produces the predicate.
struct EnsuredPredicate {
  std::string predicate;
  std::string event_alias;
  std::string event_method;
};

struct ForbiddenCall {
  std::string method;
  std::optional<std::string> replacement_token;  // e.g. "PBEKeySpec.new"
};

struct ArgConstraint {
  enum class Mode { MustBePresent, MustMatchSet, TripleTransformation };
  std::string method;
  int arg_pos = 0;
  Mode mode = Mode::MustBePresent;
  std::vector<std::string> allowed_values;      // MustMatchSet
  std::vector<std::string> allowed_algorithms;  // TripleTransformation (empty = any)
  std::vector<std::string> allowed_modes;
  std::vector<std::string> allowed_paddings;
  MisuseCategory category = MisuseCategory::InsecureDefaultImplementation;
  std::optional<std::string> escape_event;    // "Class.method" token
  std::optional<std::string> repair_literal;  // value a repair substitutes
};

/// One .crul rule: per-class usage contract compiled to an order automaton.
struct RuleSpec {
  std::string class_name;
  std::vector<std::pair<std::string, std::string>> events;  // alias -> method, declaration order
  std::map<std::string, std::vector<std::string>> aggregates;  // alias -> member aliases
  std::optional<OrderExpr> order;
  OrderAutomaton automaton;  // over method names; empty when no ORDER section
  std::set<std::string> mandatory_aliases;
  std::vector<PredicateObligation> obligations;
  std::vector<EnsuredPredicate> ensured;
  std::vector<ArgConstraint> constraints;
  std::vector<ForbiddenCall> forbidden;
  std::map<std::string, CallSequence> producers;  // predicate -> canonical snippet
  std::vector<std::string> negated;               // parsed but inert at sequence level

  bool has_order() const { return order.has_value(); }
  std::optional<std::string> method_for_alias(const std::string& alias) const;
  bool knows_method(const std::string& method) const;
  const ForbiddenCall* forbidden_entry(const std::string& method) const;
};

struct RulePack {
  std::map<std::string, RuleSpec> rules;          // keyed by class name
  std::map<std::string, CallSequence> producers;  // merged producer snippets

  const RuleSpec* rule_for(const std::string& class_name) const;
  std::set<std::string> class_names() const;
  bool empty() const { return rules.empty(); }
};

/// Parses one rule file. `source` names the file in error messages.
RuleSpec parse_rule(const std::string& text, const std::string& source = "<rule>");

/// Loads every .crul file in the directory; class names must be unique.
RulePack load_rule_pack(const std::filesystem::path& directory, WarningSink* warnings = nullptr);

RulePack make_rule_pack(std::vector<RuleSpec> rules);

}  // namespace cryptoseq
