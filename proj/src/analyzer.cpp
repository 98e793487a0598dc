#include "cryptoseq/analyzer.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace cryptoseq {

namespace {

const char* kKindNames[] = {
    "order-incomplete", "order-diverged",  "unknown-event",
    "forbidden-event",  "predicate-unmet", "constraint-failed",
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// Predicates available strictly before each position, plus one slot for the
// end of the sequence.
std::vector<std::set<std::string>> predicate_flow(const CallSequence& s, const RulePack& pack) {
  std::vector<std::set<std::string>> available(s.size() + 1);
  std::set<std::string> produced;
  for (std::size_t i = 0; i < s.size(); ++i) {
    available[i] = produced;
    const ApiCall& call = s.calls[i];
    const RuleSpec* rule = pack.rule_for(call.class_name);
    if (rule) {
      for (const auto& en : rule->ensured) {
        if (en.event_method == call.method_name) produced.insert(en.predicate);
      }
    }
  }
  available[s.size()] = produced;
  return available;
}

bool escape_present_before(const CallSequence& s, const std::string& escape_token,
                           std::size_t limit) {
  for (std::size_t i = 0; i < limit && i < s.size(); ++i) {
    if (simple_class_name(s.calls[i].class_name) + "." + s.calls[i].method_name == escape_token ||
        s.calls[i].token() == escape_token) {
      return true;
    }
  }
  return false;
}

bool in_set(const std::vector<std::string>& set, const std::string& value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

void check_constraint(const CallSequence& s, const ArgConstraint& c, const std::string& rule_class,
                      std::size_t idx, std::vector<Violation>& out) {
  const ApiCall& call = s.calls[idx];
  if (!call.literal_args) return;  // arguments never captured: no judgement
  if (c.escape_event && escape_present_before(s, *c.escape_event, idx)) return;
  Violation v;
  v.kind = Violation::Kind::ConstraintFailed;
  v.rule_class = rule_class;
  v.position = idx;
  v.category = c.category;
  v.arg_pos = c.arg_pos;
  v.repair_literal = c.repair_literal;
  const auto& args = *call.literal_args;
  bool has_slot = c.arg_pos >= 0 && static_cast<std::size_t>(c.arg_pos) < args.size();
  switch (c.mode) {
    case ArgConstraint::Mode::MustBePresent:
      if (!has_slot) {
        v.detail = call.token() + " called without argument " + std::to_string(c.arg_pos);
        out.push_back(std::move(v));
      }
      return;
    case ArgConstraint::Mode::MustMatchSet:
      if (has_slot && !in_set(c.allowed_values, args[static_cast<std::size_t>(c.arg_pos)])) {
        v.detail = call.token() + " argument '" + args[static_cast<std::size_t>(c.arg_pos)] +
                   "' not in the allowed set";
        out.push_back(std::move(v));
      }
      return;
    case ArgConstraint::Mode::TripleTransformation: {
      if (!has_slot) {
        v.detail = call.token() + " called without a transformation argument";
        out.push_back(std::move(v));
        return;
      }
      const std::string& value = args[static_cast<std::size_t>(c.arg_pos)];
      std::vector<std::string> parts;
      std::string item;
      std::istringstream in(value);
      while (std::getline(in, item, '/')) parts.push_back(item);
      if (parts.size() < 3) {
        v.detail = call.token() + " transformation '" + value +
                   "' falls back to insecure provider defaults";
        out.push_back(std::move(v));
        return;
      }
      bool ok = (c.allowed_algorithms.empty() || in_set(c.allowed_algorithms, parts[0])) &&
                (c.allowed_modes.empty() || in_set(c.allowed_modes, parts[1])) &&
                (c.allowed_paddings.empty() || in_set(c.allowed_paddings, parts[2]));
      if (!ok) {
        v.detail = call.token() + " transformation '" + value + "' uses a disallowed component";
        out.push_back(std::move(v));
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(Violation::Kind k) { return kKindNames[static_cast<int>(k)]; }

MisuseCategory classify(const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::PredicateUnmet:
    case Violation::Kind::ConstraintFailed:
      return v.category;  // carried from the rule's obligation/constraint tag
    case Violation::Kind::ForbiddenEvent:
    case Violation::Kind::UnknownEvent:
    case Violation::Kind::OrderDiverged:
      return MisuseCategory::IncorrectMethodCall;
    case Violation::Kind::OrderIncomplete:
      return MisuseCategory::MissingMethodCall;
  }
  return MisuseCategory::IncorrectMethodCall;
}

std::vector<Violation> check_sequence(const CallSequence& s, const RulePack& pack) {
  std::vector<Violation> out;
  auto available = predicate_flow(s, pack);

  std::set<std::string> classes_seen;
  for (const auto& call : s.calls) classes_seen.insert(simple_class_name(call.class_name));

  for (const auto& cls : classes_seen) {
    const RuleSpec* rule = pack.rule_for(cls);
    if (!rule) continue;

    // Projection of the sequence onto this class, with original positions.
    std::vector<std::size_t> projection;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (simple_class_name(s.calls[i].class_name) == cls) projection.push_back(i);
    }

    std::vector<std::size_t> order_word;
    for (std::size_t idx : projection) {
      const std::string& method = s.calls[idx].method_name;
      if (const ForbiddenCall* f = rule->forbidden_entry(method)) {
        Violation v;
        v.kind = Violation::Kind::ForbiddenEvent;
        v.rule_class = cls;
        v.position = idx;
        v.detail = s.calls[idx].token() + " is forbidden";
        v.replacement_token = f->replacement_token;
        if (f->replacement_token) v.detail += "; use " + *f->replacement_token;
        v.category = classify(v);
        out.push_back(std::move(v));
        continue;
      }
      if (!rule->events.empty() && !rule->knows_method(method)) {
        Violation v;
        v.kind = Violation::Kind::UnknownEvent;
        v.rule_class = cls;
        v.position = idx;
        v.detail = s.calls[idx].token() + " is not an event of the " + cls + " rule";
        v.category = classify(v);
        out.push_back(std::move(v));
        continue;
      }
      order_word.push_back(idx);
    }

    if (rule->has_order() && !order_word.empty()) {
      int state = rule->automaton.start();
      bool diverged = false;
      for (std::size_t idx : order_word) {
        auto next = rule->automaton.step(state, s.calls[idx].method_name);
        if (!next) {
          Violation v;
          v.kind = Violation::Kind::OrderDiverged;
          v.rule_class = cls;
          v.position = idx;
          v.detail = s.calls[idx].token() + " is not allowed at this point of the " + cls + " call order";
          v.category = classify(v);
          out.push_back(std::move(v));
          diverged = true;
          break;
        }
        state = *next;
      }
      if (!diverged && !rule->automaton.accepting(state)) {
        Violation v;
        v.kind = Violation::Kind::OrderIncomplete;
        v.rule_class = cls;
        v.position = s.size();
        v.at_end = true;
        v.missing_methods = rule->automaton.shortest_completion(state);
        v.detail = cls + " call order is incomplete; missing " + join(v.missing_methods, ", ");
        v.category = classify(v);
        out.push_back(std::move(v));
      }
    }

    for (const auto& ob : rule->obligations) {
      // Consumed at the attached event's first occurrence.
      std::optional<std::size_t> consumer;
      for (std::size_t idx : projection) {
        if (s.calls[idx].method_name == ob.event_method) {
          consumer = idx;
          break;
        }
      }
      if (!consumer) continue;
      if (available[*consumer].count(ob.predicate) == 0) {
        Violation v;
        v.kind = Violation::Kind::PredicateUnmet;
        v.rule_class = cls;
        v.position = *consumer;
        v.predicate = ob.predicate;
        v.category = ob.category;
        v.detail = s.calls[*consumer].token() + " requires predicate '" + ob.predicate +
                   "' which no earlier call produced";
        out.push_back(std::move(v));
      }
    }

    for (const auto& c : rule->constraints) {
      for (std::size_t idx : projection) {
        if (s.calls[idx].method_name == c.method) check_constraint(s, c, cls, idx, out);
      }
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.position != b.position) return a.position < b.position;
    if (a.at_end != b.at_end) return !a.at_end;
    if (a.rule_class != b.rule_class) return a.rule_class < b.rule_class;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return out;
}

MisuseDistribution misuse_report(const Dataset& d, const RulePack& pack) {
  if (d.empty()) throw DatasetError("misuse_report: dataset is empty");
  MisuseDistribution dist;
  for (MisuseCategory c : all_misuse_categories()) dist.counts[c] = 0;
  dist.sequences_total = d.size();
  for (const auto& entry : d.entries) {
    auto violations = check_sequence(entry.sequence, pack);
    if (!violations.empty()) ++dist.sequences_with_misuse;
    for (const auto& v : violations) ++dist.counts[v.category];
  }
  dist.misuse_rate =
      static_cast<double>(dist.sequences_with_misuse) / static_cast<double>(dist.sequences_total);
  return dist;
}

std::vector<std::string> uncovered_classes(const CallSequence& s, const RulePack& pack,
                                           const std::set<std::string>& universe) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& call : s.calls) {
    std::string cls = simple_class_name(call.class_name);
    if (!seen.insert(cls).second) continue;
    if (universe.count(cls) > 0 && pack.rule_for(cls) == nullptr) out.push_back(cls);
  }
  return out;
}

std::string violation_to_json(const Violation& v) {
  nlohmann::json rec;
  rec["kind"] = to_string(v.kind);
  rec["class"] = v.rule_class;
  if (v.at_end) {
    rec["position"] = "end";
  } else {
    rec["position"] = v.position;
  }
  rec["category"] = to_string(v.category);
  rec["detail"] = v.detail;
  if (!v.missing_methods.empty()) rec["missing"] = v.missing_methods;
  if (v.predicate) rec["predicate"] = *v.predicate;
  if (v.replacement_token) rec["replacement"] = *v.replacement_token;
  if (v.arg_pos) rec["arg"] = *v.arg_pos;
  return rec.dump();
}

}  // namespace cryptoseq
