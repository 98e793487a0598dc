#include "cryptoseq/repair.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

namespace cryptoseq {

namespace {

const char* kActionNames[] = {"insert-calls", "replace-call", "append-calls", "set-literal"};

constexpr int kMaxRounds = 8;

}  // namespace

std::string to_string(RepairAction::Kind k) { return kActionNames[static_cast<int>(k)]; }

bool is_repairable(const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::PredicateUnmet:
    case Violation::Kind::OrderIncomplete:
      return true;
    case Violation::Kind::ForbiddenEvent:
      return v.replacement_token.has_value();
    case Violation::Kind::ConstraintFailed:
      return v.repair_literal.has_value();
    case Violation::Kind::UnknownEvent:
    case Violation::Kind::OrderDiverged:
      return false;
  }
  return false;
}

RepairPlan plan_repairs(const CallSequence& s, const std::vector<Violation>& violations,
                        const RulePack& pack) {
  RepairPlan plan;
  for (const auto& v : violations) {
    switch (v.kind) {
      case Violation::Kind::PredicateUnmet: {
        auto it = v.predicate ? pack.producers.find(*v.predicate) : pack.producers.end();
        if (it == pack.producers.end()) {
          plan.unrepairable.push_back(v);
          break;
        }
        RepairAction a;
        a.kind = RepairAction::Kind::InsertCalls;
        a.anchor = v.position;  // immediately before the consuming call
        a.payload_calls = it->second;
        a.source_violation = v;
        plan.actions.push_back(std::move(a));
        break;
      }
      case Violation::Kind::OrderIncomplete: {
        RepairAction a;
        a.kind = RepairAction::Kind::AppendCalls;
        a.anchor = s.size();
        for (const auto& method : v.missing_methods) {
          a.payload_calls.calls.push_back(ApiCall{v.rule_class, method, std::nullopt});
        }
        a.source_violation = v;
        plan.actions.push_back(std::move(a));
        break;
      }
      case Violation::Kind::ForbiddenEvent: {
        if (!v.replacement_token) {
          plan.unrepairable.push_back(v);
          break;
        }
        RepairAction a;
        a.kind = RepairAction::Kind::ReplaceCall;
        a.anchor = v.position;
        a.replacement_token = *v.replacement_token;
        a.source_violation = v;
        plan.actions.push_back(std::move(a));
        break;
      }
      case Violation::Kind::ConstraintFailed: {
        if (!v.repair_literal) {
          plan.unrepairable.push_back(v);
          break;
        }
        RepairAction a;
        a.kind = RepairAction::Kind::SetLiteral;
        a.anchor = v.position;
        a.arg_pos = v.arg_pos.value_or(0);
        a.literal = *v.repair_literal;
        a.source_violation = v;
        plan.actions.push_back(std::move(a));
        break;
      }
      case Violation::Kind::UnknownEvent:
      case Violation::Kind::OrderDiverged:
        plan.unrepairable.push_back(v);
        break;
    }
  }
  return plan;
}

namespace {

CallSequence apply_once(const CallSequence& s, const std::vector<RepairAction>& actions) {
  CallSequence out = s;
  // Back-to-front so earlier anchors stay valid; for equal anchors the
  // later-planned action is applied first, which keeps plan order in the
  // final sequence.
  std::vector<std::size_t> order(actions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (actions[a].anchor != actions[b].anchor) return actions[a].anchor > actions[b].anchor;
    return a > b;
  });
  for (std::size_t i : order) {
    const RepairAction& a = actions[i];
    if (a.anchor > out.size()) throw RepairError("repair anchor out of bounds");
    switch (a.kind) {
      case RepairAction::Kind::InsertCalls:
      case RepairAction::Kind::AppendCalls:
        out.calls.insert(out.calls.begin() + static_cast<std::ptrdiff_t>(a.anchor),
                         a.payload_calls.calls.begin(), a.payload_calls.calls.end());
        break;
      case RepairAction::Kind::ReplaceCall: {
        if (a.anchor >= out.size()) throw RepairError("replace-call anchor out of bounds");
        ApiCall replacement = parse_call_token(a.replacement_token);
        replacement.literal_args = out.calls[a.anchor].literal_args;
        out.calls[a.anchor] = std::move(replacement);
        break;
      }
      case RepairAction::Kind::SetLiteral: {
        if (a.anchor >= out.size()) throw RepairError("set-literal anchor out of bounds");
        auto& args = out.calls[a.anchor].literal_args;
        if (!args) args = std::vector<std::string>{};
        if (args->size() <= static_cast<std::size_t>(a.arg_pos)) {
          args->resize(static_cast<std::size_t>(a.arg_pos) + 1);
        }
        (*args)[static_cast<std::size_t>(a.arg_pos)] = a.literal;
        break;
      }
    }
  }
  return out;
}

}  // namespace

CallSequence apply_repairs(const CallSequence& s, const RepairPlan& plan, const RulePack& pack,
                           std::vector<RepairAction>* applied_log) {
  CallSequence current = s;
  std::vector<RepairAction> actions = plan.actions;
  for (int round = 0; round < kMaxRounds; ++round) {
    if (actions.empty()) break;
    current = apply_once(current, actions);
    if (applied_log) {
      applied_log->insert(applied_log->end(), actions.begin(), actions.end());
    }
    // A replacement can expose follow-up obligations (e.g. the substitute
    // class has its own mandatory calls); re-plan until nothing repairable
    // remains.
    auto remaining = check_sequence(current, pack);
    RepairPlan next = plan_repairs(current, remaining, pack);
    actions = std::move(next.actions);
  }
  if (!actions.empty()) {
    throw RepairError("repair did not converge for sequence '" + serialize_sequence(s) +
                      "'; the rule pack's recipes do not reach a fixed point");
  }
  return current;
}

RepairResult repair_sequence(const CallSequence& s, const RulePack& pack) {
  RepairResult result;
  auto violations = check_sequence(s, pack);
  RepairPlan plan = plan_repairs(s, violations, pack);
  result.unrepairable = plan.unrepairable;
  result.sequence = apply_repairs(s, plan, pack, &result.actions);
  return result;
}

std::string repair_action_to_json(const RepairAction& a) {
  nlohmann::json rec;
  rec["action"] = to_string(a.kind);
  rec["anchor"] = a.anchor;
  switch (a.kind) {
    case RepairAction::Kind::InsertCalls:
    case RepairAction::Kind::AppendCalls:
      rec["calls"] = a.payload_calls.tokens();
      break;
    case RepairAction::Kind::ReplaceCall:
      rec["replacement"] = a.replacement_token;
      break;
    case RepairAction::Kind::SetLiteral:
      rec["arg"] = a.arg_pos;
      rec["literal"] = a.literal;
      break;
  }
  rec["violation"] = {{"kind", to_string(a.source_violation.kind)},
                      {"class", a.source_violation.rule_class},
                      {"category", to_string(a.source_violation.category)}};
  return rec.dump();
}

}  // namespace cryptoseq
