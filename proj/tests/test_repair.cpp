#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "cryptoseq/repair.hpp"

using namespace cryptoseq;

namespace {

const RulePack& pack() {
  static RulePack p = load_rule_pack(std::filesystem::path(CRYPTOSEQ_ASSETS_DIR) / "rules");
  return p;
}

const char* kPbeSequence =
    "SecureRandom.getInstance SecureRandom.nextBytes PBEKeySpec.new "
    "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret "
    "SecretKey.getEncoded SecretKeySpec.new PBEKeySpec.clearPassword";

}  // namespace

TEST_CASE("a correct sequence is a fixed point") {
  CallSequence s = parse_sequence(kPbeSequence);
  RepairResult r = repair_sequence(s, pack());
  CHECK(r.actions.empty());
  CHECK(r.unrepairable.empty());
  CHECK(token_equal(r.sequence, s));
}

TEST_CASE("dropping clearPassword repairs back to the original verbatim") {
  CallSequence s = parse_sequence(
      "SecureRandom.getInstance SecureRandom.nextBytes PBEKeySpec.new "
      "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret "
      "SecretKey.getEncoded SecretKeySpec.new");
  RepairResult r = repair_sequence(s, pack());
  CHECK(serialize_sequence(r.sequence) == kPbeSequence);
  CHECK(r.unrepairable.empty());
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].kind == RepairAction::Kind::AppendCalls);
  CHECK(r.actions[0].anchor == s.size());
}

TEST_CASE("the five-token IV sequence repairs to the documented eight tokens") {
  CallSequence s = parse_sequence(
      "KeyGenerator.getInstance KeyGenerator.generateKey IvParameterSpec.new "
      "Cipher.getInstance Cipher.init");
  auto violations = check_sequence(s, pack());
  RepairPlan plan = plan_repairs(s, violations, pack());
  REQUIRE(plan.actions.size() == 2);
  CHECK(plan.unrepairable.empty());
  CHECK(plan.actions[0].kind == RepairAction::Kind::InsertCalls);
  CHECK(plan.actions[0].anchor == 2);  // immediately before IvParameterSpec.new
  CHECK(serialize_sequence(plan.actions[0].payload_calls) ==
        "SecureRandom.new SecureRandom.nextBytes");
  CHECK(plan.actions[1].kind == RepairAction::Kind::AppendCalls);
  CHECK(plan.actions[1].anchor == 5);
  CHECK(serialize_sequence(plan.actions[1].payload_calls) == "Cipher.doFinal");

  CallSequence repaired = apply_repairs(s, plan, pack());
  CHECK(serialize_sequence(repaired) ==
        "KeyGenerator.getInstance KeyGenerator.generateKey SecureRandom.new "
        "SecureRandom.nextBytes IvParameterSpec.new Cipher.getInstance Cipher.init "
        "Cipher.doFinal");
  CHECK(check_sequence(repaired, pack()).empty());
}

TEST_CASE("repair is idempotent and reaches a fixed point") {
  for (const char* text : {
           "KeyGenerator.getInstance KeyGenerator.generateKey IvParameterSpec.new "
           "Cipher.getInstance Cipher.init",
           "PBEKeySpec.new SecretKeyFactory.getInstance SecretKeyFactory.generateSecret",
           "Mac.getInstance Mac.init Mac.doFinal",
           "SecretKeySpec.new Cipher.getInstance Cipher.init",
       }) {
    CallSequence s = parse_sequence(text);
    RepairResult first = repair_sequence(s, pack());
    CHECK(check_sequence(first.sequence, pack()).empty());
    RepairResult second = repair_sequence(first.sequence, pack());
    CHECK(second.actions.empty());
    CHECK(token_equal(second.sequence, first.sequence));
  }
}

TEST_CASE("forbidden replacement triggers follow-up obligations of the substitute") {
  CallSequence s = parse_sequence(
      "SecureRandom.getInstance SecureRandom.nextBytes DESKeySpec.new "
      "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret");
  RepairResult r = repair_sequence(s, pack());
  CHECK(serialize_sequence(r.sequence) ==
        "SecureRandom.getInstance SecureRandom.nextBytes PBEKeySpec.new "
        "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret "
        "PBEKeySpec.clearPassword");
  CHECK(check_sequence(r.sequence, pack()).empty());
  // two rounds: replace-call, then the substitute's append-calls
  REQUIRE(r.actions.size() == 2);
  CHECK(r.actions[0].kind == RepairAction::Kind::ReplaceCall);
  CHECK(r.actions[1].kind == RepairAction::Kind::AppendCalls);
}

TEST_CASE("set-literal repairs keep the token stream unchanged") {
  CallSequence s = parse_sequence(
      "KeyGenerator.getInstance KeyGenerator.generateKey Cipher.getInstance "
      "Cipher.init Cipher.doFinal");
  s.calls[2].literal_args = std::vector<std::string>{"AES"};
  RepairResult r = repair_sequence(s, pack());
  CHECK(token_equal(r.sequence, s));
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].kind == RepairAction::Kind::SetLiteral);
  REQUIRE(r.sequence.calls[2].literal_args.has_value());
  CHECK(r.sequence.calls[2].literal_args->at(0) == "AES/CBC/PKCS5Padding");
  CHECK(check_sequence(r.sequence, pack()).empty());

  // missing charset argument: the literal is added at the required slot
  CallSequence str = parse_sequence(
      "MessageDigest.getInstance String.getBytes MessageDigest.update MessageDigest.digest");
  str.calls[1].literal_args = std::vector<std::string>{};
  RepairResult rs = repair_sequence(str, pack());
  CHECK(token_equal(rs.sequence, str));
  REQUIRE(rs.sequence.calls[1].literal_args.has_value());
  CHECK(rs.sequence.calls[1].literal_args->at(0) == "UTF-8");
  CHECK(check_sequence(rs.sequence, pack()).empty());
}

TEST_CASE("unrepairable violations are reported and left untouched") {
  CallSequence s = parse_sequence("Cipher.doFinal Cipher.getInstance");
  RepairResult r = repair_sequence(s, pack());
  CHECK_FALSE(r.unrepairable.empty());
  CHECK(r.unrepairable[0].kind == Violation::Kind::OrderDiverged);

  CallSequence unknown = parse_sequence("Mac.getInstance Mac.sign");
  auto violations = check_sequence(unknown, pack());
  RepairPlan plan = plan_repairs(unknown, violations, pack());
  bool saw_unknown = false;
  for (const auto& v : plan.unrepairable) {
    if (v.kind == Violation::Kind::UnknownEvent) saw_unknown = true;
  }
  CHECK(saw_unknown);
}

TEST_CASE("is_repairable matches the plan") {
  Violation v;
  v.kind = Violation::Kind::PredicateUnmet;
  CHECK(is_repairable(v));
  v.kind = Violation::Kind::OrderIncomplete;
  CHECK(is_repairable(v));
  v.kind = Violation::Kind::OrderDiverged;
  CHECK_FALSE(is_repairable(v));
  v.kind = Violation::Kind::UnknownEvent;
  CHECK_FALSE(is_repairable(v));
  v.kind = Violation::Kind::ForbiddenEvent;
  CHECK_FALSE(is_repairable(v));
  v.replacement_token = "PBEKeySpec.new";
  CHECK(is_repairable(v));
  v.kind = Violation::Kind::ConstraintFailed;
  CHECK_FALSE(is_repairable(v));
  v.repair_literal = "UTF-8";
  CHECK(is_repairable(v));
}

TEST_CASE("repair actions serialize to single-line JSON") {
  CallSequence s = parse_sequence(
      "KeyGenerator.getInstance KeyGenerator.generateKey IvParameterSpec.new "
      "Cipher.getInstance Cipher.init");
  RepairResult r = repair_sequence(s, pack());
  for (const auto& a : r.actions) {
    std::string line = repair_action_to_json(a);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(line.find("\"action\"") != std::string::npos);
  }
}
