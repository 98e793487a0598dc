#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cryptoseq/order_expr.hpp"
#include "cryptoseq/rule.hpp"

using namespace cryptoseq;

namespace {

// Independent oracle: recursive matcher computing every end position an
// expression can reach from a start position. No automata involved.
std::set<std::size_t> match_ends(const OrderExpr& e, const std::vector<std::string>& word,
                                 std::size_t start) {
  std::set<std::size_t> ends;
  switch (e.kind) {
    case OrderExpr::Kind::Symbol:
      if (start < word.size() && word[start] == e.symbol) ends.insert(start + 1);
      break;
    case OrderExpr::Kind::Seq: {
      std::set<std::size_t> frontier = {start};
      for (const auto& child : e.children) {
        std::set<std::size_t> next;
        for (std::size_t pos : frontier) {
          for (std::size_t end : match_ends(child, word, pos)) next.insert(end);
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
      }
      ends = frontier;
      break;
    }
    case OrderExpr::Kind::Alt:
      for (const auto& child : e.children) {
        for (std::size_t end : match_ends(child, word, start)) ends.insert(end);
      }
      break;
    case OrderExpr::Kind::Star:
    case OrderExpr::Kind::Plus: {
      std::set<std::size_t> frontier = {start};
      std::set<std::size_t> reached;
      if (e.kind == OrderExpr::Kind::Star) reached.insert(start);
      while (!frontier.empty()) {
        std::set<std::size_t> next;
        for (std::size_t pos : frontier) {
          for (std::size_t end : match_ends(e.children[0], word, pos)) {
            if (!reached.count(end) && end > pos) {
              reached.insert(end);
              next.insert(end);
            } else if (end > pos) {
              reached.insert(end);
            }
          }
        }
        frontier = std::move(next);
      }
      if (e.kind == OrderExpr::Kind::Plus) {
        // at least one iteration: recompute with one mandatory round first
        std::set<std::size_t> once = match_ends(e.children[0], word, start);
        std::set<std::size_t> all;
        for (std::size_t pos : once) {
          all.insert(pos);
          OrderExpr star = OrderExpr::star(e.children[0]);
          for (std::size_t end : match_ends(star, word, pos)) all.insert(end);
        }
        ends = all;
      } else {
        ends = reached;
      }
      break;
    }
    case OrderExpr::Kind::Opt:
      ends.insert(start);
      for (std::size_t end : match_ends(e.children[0], word, start)) ends.insert(end);
      break;
  }
  return ends;
}

bool oracle_accepts(const OrderExpr& e, const std::vector<std::string>& word) {
  return match_ends(e, word, 0).count(word.size()) > 0;
}

OrderExpr random_expr(std::mt19937& rng, const std::vector<std::string>& alphabet, int depth) {
  std::uniform_int_distribution<int> kind_dist(0, depth <= 0 ? 0 : 5);
  std::uniform_int_distribution<int> sym_dist(0, static_cast<int>(alphabet.size()) - 1);
  std::uniform_int_distribution<int> arity_dist(2, 3);
  switch (kind_dist(rng)) {
    case 1: {
      std::vector<OrderExpr> parts;
      int arity = arity_dist(rng);
      for (int i = 0; i < arity; ++i) parts.push_back(random_expr(rng, alphabet, depth - 1));
      return OrderExpr::seq(std::move(parts));
    }
    case 2: {
      std::vector<OrderExpr> parts;
      int arity = arity_dist(rng);
      for (int i = 0; i < arity; ++i) parts.push_back(random_expr(rng, alphabet, depth - 1));
      return OrderExpr::alt(std::move(parts));
    }
    case 3:
      return OrderExpr::star(random_expr(rng, alphabet, depth - 1));
    case 4:
      return OrderExpr::plus(random_expr(rng, alphabet, depth - 1));
    case 5:
      return OrderExpr::opt(random_expr(rng, alphabet, depth - 1));
    default:
      return OrderExpr::sym(alphabet[static_cast<std::size_t>(sym_dist(rng))]);
  }
}

void enumerate_words(const std::vector<std::string>& alphabet, std::size_t max_len,
                     const std::function<void(const std::vector<std::string>&)>& visit) {
  std::vector<std::string> word;
  std::function<void()> rec = [&]() {
    visit(word);
    if (word.size() == max_len) return;
    for (const auto& s : alphabet) {
      word.push_back(s);
      rec();
      word.pop_back();
    }
  };
  rec();
}

std::filesystem::path rules_dir() {
  return std::filesystem::path(CRYPTOSEQ_ASSETS_DIR) / "rules";
}

}  // namespace

TEST_CASE("order expression parser") {
  OrderExpr e = parse_order_expr("g, i?, (u | r)*, d+");
  auto syms = e.symbols();
  CHECK(syms == std::set<std::string>{"g", "i", "u", "r", "d"});

  CHECK_THROWS_AS(parse_order_expr(""), OrderError);
  CHECK_THROWS_AS(parse_order_expr("a,,b"), OrderError);
  CHECK_THROWS_AS(parse_order_expr("(a"), OrderError);
  CHECK_THROWS_AS(parse_order_expr("a |"), OrderError);
  CHECK_THROWS_AS(parse_order_expr("*a"), OrderError);
}

TEST_CASE("automaton equals oracle on 20 seeded random expressions") {
  std::mt19937 rng(424242);
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    OrderExpr e = random_expr(rng, alphabet, 3);
    OrderAutomaton dfa = OrderAutomaton::compile(e, alphabet);
    enumerate_words(alphabet, 5, [&](const std::vector<std::string>& word) {
      bool fast = dfa.accepts(word);
      bool slow = oracle_accepts(e, word);
      if (fast != slow) ++mismatches;
    });
  }
  CHECK(mismatches == 0);
}

TEST_CASE("mandatory symbols appear in every accepted word") {
  std::mt19937 rng(7);
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 10; ++trial) {
    OrderExpr e = random_expr(rng, alphabet, 3);
    OrderAutomaton dfa = OrderAutomaton::compile(e, alphabet);
    auto mandatory = dfa.mandatory_symbols();
    enumerate_words(alphabet, 5, [&](const std::vector<std::string>& word) {
      if (!dfa.accepts(word)) return;
      for (const auto& m : mandatory) {
        CHECK(std::find(word.begin(), word.end(), m) != word.end());
      }
    });
  }

  OrderAutomaton simple =
      OrderAutomaton::compile(parse_order_expr("a, b?, c"), {"a", "b", "c"});
  CHECK(simple.mandatory_symbols() == std::set<std::string>{"a", "c"});
}

TEST_CASE("shortest completion is minimal and declaration-order deterministic") {
  OrderAutomaton dfa = OrderAutomaton::compile(parse_order_expr("x | y"), {"y", "x"});
  auto completion = dfa.shortest_completion(dfa.start());
  REQUIRE(completion.size() == 1);
  CHECK(completion[0] == "y");  // tie broken by alphabet declaration order

  OrderAutomaton chain =
      OrderAutomaton::compile(parse_order_expr("n, g, s, c"), {"n", "g", "s", "c"});
  int state = chain.start();
  state = *chain.step(state, "n");
  CHECK(chain.shortest_completion(state) == std::vector<std::string>{"g", "s", "c"});
  CHECK(chain.shortest_completion(chain.start()).size() == 4);

  OrderAutomaton done = OrderAutomaton::compile(parse_order_expr("a"), {"a"});
  CHECK(done.shortest_completion(*done.step(done.start(), "a")).empty());
}

TEST_CASE("divergence is a missing transition") {
  OrderAutomaton dfa = OrderAutomaton::compile(parse_order_expr("a, b"), {"a", "b"});
  CHECK_FALSE(dfa.step(dfa.start(), "b").has_value());
  int s1 = *dfa.step(dfa.start(), "a");
  CHECK(dfa.step(s1, "b").has_value());
  CHECK_FALSE(dfa.step(s1, "a").has_value());
}

TEST_CASE("rule parsing covers the full section grammar") {
  const std::string text =
      "# usage contract, aggregate and every section exercised\n"
      "SPEC Cipher\n"
      "EVENTS\n"
      "  g := getInstance\n"
      "  i := init\n"
      "  u := update\n"
      "  d := doFinal\n"
      "  go := create\n"
      "  start := g | go\n"
      "ORDER\n"
      "  start, i, u*, d\n"
      "REQUIRES\n"
      "  generatedKey @ i : MissingPredicate\n"
      "ENSURES\n"
      "  encrypted @ d\n"
      "CONSTRAINTS\n"
      "  g[0] triple : InsecureDefaultImplementation modes=CBC,GCM pads=PKCS5Padding "
      "escape=BouncyCastleProvider.new fix=AES/CBC/PKCS5Padding\n"
      "FORBIDDEN\n"
      "  legacyInit -> Cipher.init\n"
      "PRODUCERS\n"
      "  generatedKey := KeyGenerator.getInstance KeyGenerator.generateKey\n"
      "NEGATES\n"
      "  plaintextKey\n";
  RuleSpec rule = parse_rule(text, "cipher.crul");
  CHECK(rule.class_name == "Cipher");
  CHECK(rule.events.size() == 5);
  CHECK(rule.aggregates.count("start") == 1);
  CHECK(rule.method_for_alias("g") == "getInstance");
  CHECK(rule.has_order());
  CHECK(rule.obligations.size() == 1);
  CHECK(rule.obligations[0].predicate == "generatedKey");
  CHECK(rule.obligations[0].category == MisuseCategory::MissingPredicate);
  CHECK(rule.ensured.size() == 1);
  CHECK(rule.constraints.size() == 1);
  CHECK(rule.constraints[0].mode == ArgConstraint::Mode::TripleTransformation);
  CHECK(rule.constraints[0].escape_event == "BouncyCastleProvider.new");
  REQUIRE(rule.forbidden.size() == 1);
  CHECK(rule.forbidden[0].replacement_token == "Cipher.init");
  CHECK(rule.producers.count("generatedKey") == 1);
  CHECK(rule.negated == std::vector<std::string>{"plaintextKey"});

  // the aggregate expands: a word through either branch is accepted
  CHECK(rule.automaton.accepts(
      std::vector<std::string>{"getInstance", "init", "doFinal"}));
  CHECK(rule.automaton.accepts(std::vector<std::string>{"create", "init", "doFinal"}));
  CHECK(rule.mandatory_aliases.count("i") == 1);
  CHECK(rule.mandatory_aliases.count("d") == 1);
  CHECK(rule.mandatory_aliases.count("u") == 0);
}

TEST_CASE("malformed rules are rejected with file and line context") {
  auto reject = [](const std::string& text, const std::string& needle) {
    try {
      parse_rule(text, "bad.crul");
      FAIL_CHECK("expected RuleError for: " << text);
    } catch (const RuleError& e) {
      std::string msg = e.what();
      CHECK(msg.find("bad.crul:") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  reject("EVENTS\n  g := getInstance\n", "SPEC");
  reject("SPEC A\nORDER\n  g\n", "unknown alias 'g'");        // symbol never declared
  reject("SPEC A\nEVENTS\n  g := \n", "empty alias or method");
  reject("SPEC A\nEVENTS\n  g := a\nORDER\n  g,\n", "ORDER");  // dangling comma
  reject("SPEC A\nBOGUS\n", "outside");                        // unknown section
  reject("SPEC A\nEVENTS\n  g := a\nREQUIRES\n  p\n", "@");    // missing event
  reject("SPEC A\nEVENTS\n  g := a\nCONSTRAINTS\n  g[x] present\n", "not an integer");
  reject("SPEC A\nEVENTS\n  g := a\nREQUIRES\n  p @ g : NotACategory\n", "NotACategory");
}

TEST_CASE("bundled rule pack loads and covers the expected classes") {
  WarningSink warnings;
  RulePack pack = load_rule_pack(rules_dir(), &warnings);
  CHECK(warnings.empty());
  std::set<std::string> expected = {
      "Cipher",        "DESKeySpec",   "IvParameterSpec",  "KeyGenerator",
      "KeyPairGenerator", "Mac",       "MessageDigest",    "PBEKeySpec",
      "SecretKey",     "SecureRandom", "SecretKeyFactory", "SecretKeySpec",
      "String"};
  CHECK(pack.class_names() == expected);
  CHECK(pack.producers.count("randomized") == 1);
  CHECK(pack.producers.count("generatedKey") == 1);

  const RuleSpec* pbe = pack.rule_for("PBEKeySpec");
  REQUIRE(pbe != nullptr);
  CHECK(pbe->mandatory_aliases.size() >= 2);  // new and clearPassword

  CHECK(pack.rule_for("NoSuchClass") == nullptr);
}

TEST_CASE("empty rule directories warn") {
  auto dir = std::filesystem::temp_directory_path() / "cryptoseq-empty-rules";
  std::filesystem::create_directories(dir);
  WarningSink warnings;
  RulePack pack = load_rule_pack(dir, &warnings);
  CHECK(pack.empty());
  CHECK(warnings.size() == 1);
}
