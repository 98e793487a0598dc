#include "cryptoseq/rule.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cryptoseq {

namespace {

const char* kCategoryNames[kMisuseCategoryCount] = {
    "MissingPredicate",       "InsecureDefaultImplementation",
    "IncorrectEncoding",      "IncorrectRandomization",
    "IncorrectMethodCall",    "MissingMethodCall",
};

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string to_string(MisuseCategory c) { return kCategoryNames[static_cast<int>(c)]; }

MisuseCategory misuse_category_from_string(const std::string& name) {
  for (int i = 0; i < kMisuseCategoryCount; ++i) {
    if (name == kCategoryNames[i]) return static_cast<MisuseCategory>(i);
  }
  throw RuleError("unknown misuse category: " + name);
}

const std::vector<MisuseCategory>& all_misuse_categories() {
  static const std::vector<MisuseCategory> all = {
      MisuseCategory::MissingPredicate,     MisuseCategory::InsecureDefaultImplementation,
      MisuseCategory::IncorrectEncoding,    MisuseCategory::IncorrectRandomization,
      MisuseCategory::IncorrectMethodCall,  MisuseCategory::MissingMethodCall,
  };
  return all;
}

std::optional<std::string> RuleSpec::method_for_alias(const std::string& alias) const {
  for (const auto& [a, m] : events) {
    if (a == alias) return m;
  }
  return std::nullopt;
}

bool RuleSpec::knows_method(const std::string& method) const {
  for (const auto& [a, m] : events) {
    if (m == method) return true;
  }
  return false;
}

const ForbiddenCall* RuleSpec::forbidden_entry(const std::string& method) const {
  for (const auto& f : forbidden) {
    if (f.method == method) return &f;
  }
  return nullptr;
}

const RuleSpec* RulePack::rule_for(const std::string& class_name) const {
  auto it = rules.find(simple_class_name(class_name));
  return it == rules.end() ? nullptr : &it->second;
}

std::set<std::string> RulePack::class_names() const {
  std::set<std::string> out;
  for (const auto& [name, rule] : rules) out.insert(name);
  return out;
}

namespace {

enum class Section { None, Events, Order, Requires, Ensures, Constraints, Forbidden, Producers, Negates };

struct RuleParser {
  const std::string& source;
  RuleSpec rule;
  std::string order_text;
  std::size_t order_line = 0;

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw RuleError(source + ":" + std::to_string(line) + ": " + msg);
  }

  bool is_alias(const std::string& name) const {
    return rule.method_for_alias(name).has_value() || rule.aggregates.count(name) > 0;
  }

  MisuseCategory parse_category(const std::string& name, std::size_t line) const {
    try {
      return misuse_category_from_string(name);
    } catch (const RuleError& e) {
      fail(line, e.what());
    }
  }

  void parse_event(const std::string& body, std::size_t line) {
    auto pos = body.find(":=");
    if (pos == std::string::npos) fail(line, "EVENTS entry must be 'alias := method'");
    std::string alias = trim(body.substr(0, pos));
    std::string rhs = trim(body.substr(pos + 2));
    if (alias.empty() || rhs.empty()) fail(line, "empty alias or method in EVENTS entry");
    if (is_alias(alias)) fail(line, "duplicate alias '" + alias + "'");
    if (rhs.find('|') != std::string::npos) {
      // Aggregate: alternation over previously declared aliases.
      std::vector<std::string> members = split(rhs, '|');
      for (const auto& m : members) {
        if (!rule.method_for_alias(m)) fail(line, "aggregate '" + alias + "' references unknown alias '" + m + "'");
      }
      rule.aggregates[alias] = std::move(members);
      return;
    }
    // Drop an optional argument-name annotation: "getInstance(transformation)".
    std::string method = rhs;
    auto paren = method.find('(');
    if (paren != std::string::npos) method = trim(method.substr(0, paren));
    if (method.empty()) fail(line, "empty method name in EVENTS entry");
    rule.events.emplace_back(alias, method);
  }

  void parse_requires(const std::string& body, std::size_t line) {
    // predicate @ alias [: Category]
    auto at = body.find('@');
    if (at == std::string::npos) fail(line, "REQUIRES entry must be 'predicate @ alias'");
    PredicateObligation ob;
    ob.predicate = trim(body.substr(0, at));
    std::string rest = trim(body.substr(at + 1));
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      ob.category = parse_category(trim(rest.substr(colon + 1)), line);
      rest = trim(rest.substr(0, colon));
    } else {
      ob.category = ob.predicate == "randomized" ? MisuseCategory::IncorrectRandomization
                                                 : MisuseCategory::MissingPredicate;
    }
    ob.event_alias = rest;
    if (ob.predicate.empty() || ob.event_alias.empty()) fail(line, "empty predicate or alias in REQUIRES");
    auto method = rule.method_for_alias(ob.event_alias);
    if (!method) fail(line, "REQUIRES references unknown alias '" + ob.event_alias + "'");
    ob.event_method = *method;
    rule.obligations.push_back(std::move(ob));
  }

  void parse_ensures(const std::string& body, std::size_t line) {
    auto at = body.find('@');
    if (at == std::string::npos) fail(line, "ENSURES entry must be 'predicate @ alias'");
    EnsuredPredicate en;
    en.predicate = trim(body.substr(0, at));
    en.event_alias = trim(body.substr(at + 1));
    if (en.predicate.empty() || en.event_alias.empty()) fail(line, "empty predicate or alias in ENSURES");
    auto method = rule.method_for_alias(en.event_alias);
    if (!method) fail(line, "ENSURES references unknown alias '" + en.event_alias + "'");
    en.event_method = *method;
    rule.ensured.push_back(std::move(en));
  }

  void parse_constraint(const std::string& body, std::size_t line) {
    // alias[pos] mode [: Category] key=value...
    std::vector<std::string> toks = split_ws(body);
    if (toks.size() < 2) fail(line, "unparseable constraint");
    ArgConstraint c;
    const std::string& target = toks[0];
    auto lb = target.find('[');
    auto rb = target.find(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
      fail(line, "constraint target must be 'alias[pos]'");
    }
    std::string alias = target.substr(0, lb);
    auto method = rule.method_for_alias(alias);
    if (!method) fail(line, "constraint references unknown alias '" + alias + "'");
    c.method = *method;
    try {
      c.arg_pos = std::stoi(target.substr(lb + 1, rb - lb - 1));
    } catch (...) {
      fail(line, "constraint argument position is not an integer");
    }
    const std::string& mode = toks[1];
    if (mode == "present") {
      c.mode = ArgConstraint::Mode::MustBePresent;
      c.category = MisuseCategory::IncorrectEncoding;
    } else if (mode == "match") {
      c.mode = ArgConstraint::Mode::MustMatchSet;
      c.category = MisuseCategory::InsecureDefaultImplementation;
    } else if (mode == "triple") {
      c.mode = ArgConstraint::Mode::TripleTransformation;
      c.category = MisuseCategory::InsecureDefaultImplementation;
    } else {
      fail(line, "unknown constraint mode '" + mode + "'");
    }
    std::size_t i = 2;
    if (i < toks.size() && toks[i] == ":") {
      if (i + 1 >= toks.size()) fail(line, "missing category after ':'");
      c.category = parse_category(toks[i + 1], line);
      i += 2;
    }
    for (; i < toks.size(); ++i) {
      auto eq = toks[i].find('=');
      if (eq == std::string::npos) fail(line, "expected key=value in constraint, got '" + toks[i] + "'");
      std::string key = toks[i].substr(0, eq);
      std::string value = toks[i].substr(eq + 1);
      if (key == "values") {
        c.allowed_values = split(value, ',');
      } else if (key == "algos") {
        c.allowed_algorithms = split(value, ',');
      } else if (key == "modes") {
        c.allowed_modes = split(value, ',');
      } else if (key == "pads") {
        c.allowed_paddings = split(value, ',');
      } else if (key == "escape") {
        c.escape_event = value;
      } else if (key == "fix") {
        c.repair_literal = value;
      } else {
        fail(line, "unknown constraint key '" + key + "'");
      }
    }
    if (!c.repair_literal) {
      if (c.mode == ArgConstraint::Mode::MustBePresent) c.repair_literal = "UTF-8";
      if (c.mode == ArgConstraint::Mode::TripleTransformation) c.repair_literal = "AES/CBC/PKCS5Padding";
      if (c.mode == ArgConstraint::Mode::MustMatchSet && !c.allowed_values.empty()) {
        c.repair_literal = c.allowed_values.front();
      }
    }
    rule.constraints.push_back(std::move(c));
  }

  void parse_forbidden(const std::string& body, std::size_t line) {
    ForbiddenCall f;
    auto arrow = body.find("->");
    if (arrow == std::string::npos) {
      f.method = trim(body);
    } else {
      f.method = trim(body.substr(0, arrow));
      std::string repl = trim(body.substr(arrow + 2));
      try {
        parse_call_token(repl);
      } catch (const SequenceError& e) {
        fail(line, std::string("bad replacement token: ") + e.what());
      }
      f.replacement_token = repl;
    }
    if (f.method.empty()) fail(line, "empty method in FORBIDDEN entry");
    rule.forbidden.push_back(std::move(f));
  }

  void parse_producer(const std::string& body, std::size_t line) {
    auto pos = body.find(":=");
    if (pos == std::string::npos) fail(line, "PRODUCERS entry must be 'predicate := token...'");
    std::string predicate = trim(body.substr(0, pos));
    std::string snippet = trim(body.substr(pos + 2));
    if (predicate.empty()) fail(line, "empty predicate in PRODUCERS entry");
    try {
      CallSequence seq = parse_sequence(snippet);
      if (seq.empty()) fail(line, "empty producer snippet");
      rule.producers[predicate] = std::move(seq);
    } catch (const SequenceError& e) {
      fail(line, std::string("bad producer snippet: ") + e.what());
    }
  }

  // Replaces aggregate aliases by alternations and plain aliases by their
  // method names, yielding an expression over the method alphabet.
  OrderExpr expand(const OrderExpr& e) const {
    if (e.kind != OrderExpr::Kind::Symbol) {
      OrderExpr out = e;
      out.children.clear();
      for (const auto& c : e.children) out.children.push_back(expand(c));
      return out;
    }
    auto agg = rule.aggregates.find(e.symbol);
    if (agg != rule.aggregates.end()) {
      std::vector<OrderExpr> members;
      for (const auto& alias : agg->second) {
        members.push_back(OrderExpr::sym(*rule.method_for_alias(alias)));
      }
      return OrderExpr::alt(std::move(members));
    }
    auto method = rule.method_for_alias(e.symbol);
    if (!method) throw RuleError(source + ": ORDER references unknown alias '" + e.symbol + "'");
    return OrderExpr::sym(*method);
  }

  void finish() {
    if (!order_text.empty()) {
      OrderExpr alias_expr;
      try {
        alias_expr = parse_order_expr(order_text);
      } catch (const OrderError& e) {
        fail(order_line, e.what());
      }
      for (const auto& sym : alias_expr.symbols()) {
        if (!is_alias(sym)) fail(order_line, "ORDER references unknown alias '" + sym + "'");
      }
      rule.order = alias_expr;
      OrderExpr method_expr = expand(alias_expr);
      std::vector<std::string> alphabet;
      for (const auto& [alias, method] : rule.events) {
        if (std::find(alphabet.begin(), alphabet.end(), method) == alphabet.end()) {
          alphabet.push_back(method);
        }
      }
      rule.automaton = OrderAutomaton::compile(method_expr, alphabet);
      for (const auto& method : rule.automaton.mandatory_symbols()) {
        for (const auto& [alias, m] : rule.events) {
          if (m == method) rule.mandatory_aliases.insert(alias);
        }
      }
    }
  }
};

}  // namespace

RuleSpec parse_rule(const std::string& text, const std::string& source) {
  RuleParser parser{source, {}, "", 0};
  Section section = Section::None;
  bool saw_spec = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (!saw_spec) {
      if (line.rfind("SPEC", 0) != 0) parser.fail(line_no, "rule must start with 'SPEC <ClassName>'");
      parser.rule.class_name = trim(line.substr(4));
      if (parser.rule.class_name.empty()) parser.fail(line_no, "missing class name after SPEC");
      saw_spec = true;
      continue;
    }
    if (line == "EVENTS") { section = Section::Events; continue; }
    if (line == "ORDER") { section = Section::Order; continue; }
    if (line == "REQUIRES") { section = Section::Requires; continue; }
    if (line == "ENSURES") { section = Section::Ensures; continue; }
    if (line == "CONSTRAINTS") { section = Section::Constraints; continue; }
    if (line == "FORBIDDEN") { section = Section::Forbidden; continue; }
    if (line == "PRODUCERS") { section = Section::Producers; continue; }
    if (line == "NEGATES") { section = Section::Negates; continue; }
    switch (section) {
      case Section::Events: parser.parse_event(line, line_no); break;
      case Section::Order:
        if (!parser.order_text.empty()) parser.order_text += " ";
        else parser.order_line = line_no;
        parser.order_text += line;
        break;
      case Section::Requires: parser.parse_requires(line, line_no); break;
      case Section::Ensures: parser.parse_ensures(line, line_no); break;
      case Section::Constraints: parser.parse_constraint(line, line_no); break;
      case Section::Forbidden: parser.parse_forbidden(line, line_no); break;
      case Section::Producers: parser.parse_producer(line, line_no); break;
      case Section::Negates: parser.rule.negated.push_back(line); break;
      case Section::None: parser.fail(line_no, "content outside of any section");
    }
  }
  if (!saw_spec) throw RuleError(source + ":1: rule must start with 'SPEC <ClassName>'");
  parser.finish();
  return std::move(parser.rule);
}

RulePack make_rule_pack(std::vector<RuleSpec> rules) {
  RulePack pack;
  for (auto& rule : rules) {
    std::string name = rule.class_name;
    auto [it, inserted] = pack.rules.emplace(name, std::move(rule));
    if (!inserted) throw RuleError("duplicate rule for class '" + name + "'");
    for (const auto& [predicate, snippet] : it->second.producers) {
      pack.producers.emplace(predicate, snippet);  // first declaration wins
    }
  }
  return pack;
}

RulePack load_rule_pack(const std::filesystem::path& directory, WarningSink* warnings) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".crul") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RuleSpec> rules;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw RuleError("cannot open rule file: " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    rules.push_back(parse_rule(buffer.str(), file.filename().string()));
  }
  if (rules.empty() && warnings) {
    warnings->push_back("rule pack at " + directory.string() + " is empty");
  }
  return make_rule_pack(std::move(rules));
}

}  // namespace cryptoseq
