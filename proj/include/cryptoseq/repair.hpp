#pragma once

#include <string>
#include <vector>

#include "cryptoseq/analyzer.hpp"

namespace cryptoseq {

class RepairError : public std::runtime_error {
 public:
  explicit RepairError(const std::string& what) : std::runtime_error(what) {}
};

struct RepairAction {
  enum class Kind { InsertCalls, ReplaceCall, AppendCalls, SetLiteral };

  Kind kind;
  std::size_t anchor = 0;           // call index; sequence length for appends
  CallSequence payload_calls;       // InsertCalls / AppendCalls
  std::string replacement_token;    // ReplaceCall
  int arg_pos = 0;                  // SetLiteral
  std::string literal;              // SetLiteral
  Violation source_violation;
};

std::string to_string(RepairAction::Kind k);

struct RepairPlan {
  std::vector<RepairAction> actions;
  std::vector<Violation> unrepairable;
};

bool is_repairable(const Violation& v);

/// One repair action per repairable violation. Violations with no recipe
/// (unknown-event, order-diverged, forbidden without replacement, missing
/// producer snippet) land in `unrepairable`.
RepairPlan plan_repairs(const CallSequence& s, const std::vector<Violation>& violations,
                        const RulePack& pack);

/// Applies the actions back-to-front, then re-checks and re-plans until no
/// repairable violation remains. Throws RepairError when the result does not
/// converge, which indicates a rule-pack bug.
CallSequence apply_repairs(const CallSequence& s, const RepairPlan& plan, const RulePack& pack,
                           std::vector<RepairAction>* applied_log = nullptr);

/// plan_repairs + apply_repairs in one step.
struct RepairResult {
  CallSequence sequence;
  std::vector<RepairAction> actions;       // every action applied, all rounds
  std::vector<Violation> unrepairable;     // violations left untouched
};
RepairResult repair_sequence(const CallSequence& s, const RulePack& pack);

std::string repair_action_to_json(const RepairAction& a);

}  // namespace cryptoseq
