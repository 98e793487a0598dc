#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "cryptoseq/analyzer.hpp"
#include "cryptoseq/rule.hpp"

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

TEST_CASE("the password-based-key sequence lints clean") {
  CallSequence s = parse_sequence(kPbeSequence);
  CHECK(check_sequence(s, pack()).empty());
  CHECK(uncovered_classes(s, pack(), pack().class_names()).empty());
}

TEST_CASE("dropping clearPassword yields exactly one missing-method-call") {
  CallSequence s = parse_sequence(
      "SecureRandom.getInstance SecureRandom.nextBytes PBEKeySpec.new "
      "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret "
      "SecretKey.getEncoded SecretKeySpec.new");
  auto violations = check_sequence(s, pack());
  REQUIRE(violations.size() == 1);
  const Violation& v = violations[0];
  CHECK(v.kind == Violation::Kind::OrderIncomplete);
  CHECK(v.rule_class == "PBEKeySpec");
  CHECK(v.position == s.size());
  CHECK(v.at_end);
  CHECK(v.missing_methods == std::vector<std::string>{"clearPassword"});
  CHECK(v.category == MisuseCategory::MissingMethodCall);
}

TEST_CASE("dropping the SecureRandom calls yields an incorrect-randomization") {
  CallSequence s = parse_sequence(
      "PBEKeySpec.new SecretKeyFactory.getInstance SecretKeyFactory.generateSecret "
      "SecretKey.getEncoded SecretKeySpec.new PBEKeySpec.clearPassword");
  auto violations = check_sequence(s, pack());
  REQUIRE(violations.size() == 1);
  const Violation& v = violations[0];
  CHECK(v.kind == Violation::Kind::PredicateUnmet);
  CHECK(v.rule_class == "PBEKeySpec");
  CHECK(v.position == 0);
  CHECK(v.predicate == "randomized");
  CHECK(v.category == MisuseCategory::IncorrectRandomization);
}

TEST_CASE("the five-token IV sequence yields exactly the two documented violations") {
  CallSequence s = parse_sequence(
      "KeyGenerator.getInstance KeyGenerator.generateKey IvParameterSpec.new "
      "Cipher.getInstance Cipher.init");
  auto violations = check_sequence(s, pack());
  REQUIRE(violations.size() == 2);
  CHECK(violations[0].kind == Violation::Kind::PredicateUnmet);
  CHECK(violations[0].rule_class == "IvParameterSpec");
  CHECK(violations[0].position == 2);
  CHECK(violations[0].predicate == "randomized");
  CHECK(violations[0].category == MisuseCategory::IncorrectRandomization);
  CHECK(violations[1].kind == Violation::Kind::OrderIncomplete);
  CHECK(violations[1].rule_class == "Cipher");
  CHECK(violations[1].at_end);
  CHECK(violations[1].missing_methods == std::vector<std::string>{"doFinal"});
  CHECK(violations[1].category == MisuseCategory::MissingMethodCall);
}

TEST_CASE("forbidden calls are flagged with their replacement") {
  CallSequence s = parse_sequence(
      "SecureRandom.new SecureRandom.nextBytes DESKeySpec.new "
      "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret");
  auto violations = check_sequence(s, pack());
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == Violation::Kind::ForbiddenEvent);
  CHECK(violations[0].rule_class == "DESKeySpec");
  CHECK(violations[0].position == 2);
  CHECK(violations[0].replacement_token == "PBEKeySpec.new");
  CHECK(violations[0].category == MisuseCategory::IncorrectMethodCall);
}

TEST_CASE("unknown events and order divergence classify as incorrect-method-call") {
  CallSequence unknown = parse_sequence("Cipher.getInstance Cipher.encrypt");
  auto v1 = check_sequence(unknown, pack());
  REQUIRE(v1.size() >= 1);
  CHECK(v1[0].position == 1);
  CHECK(v1[0].kind == Violation::Kind::UnknownEvent);
  CHECK(v1[0].category == MisuseCategory::IncorrectMethodCall);

  // init before getInstance diverges immediately; init's unmet key predicate
  // is reported alongside it at the same position
  CallSequence diverged = parse_sequence("Cipher.init Cipher.getInstance Cipher.doFinal");
  auto v2 = check_sequence(diverged, pack());
  REQUIRE(v2.size() == 2);
  CHECK(v2[0].kind == Violation::Kind::OrderDiverged);
  CHECK(v2[0].position == 0);
  CHECK(v2[0].category == MisuseCategory::IncorrectMethodCall);
  CHECK(v2[1].kind == Violation::Kind::PredicateUnmet);
}

TEST_CASE("cipher transformation constraint") {
  RulePack p = pack();

  auto lint = [&](CallSequence s) { return check_sequence(s, p); };

  CallSequence full = parse_sequence(
      "KeyGenerator.getInstance KeyGenerator.generateKey Cipher.getInstance "
      "Cipher.init Cipher.doFinal");

  SUBCASE("full transformation is accepted") {
    full.calls[2].literal_args = std::vector<std::string>{"AES/CBC/PKCS5Padding"};
    CHECK(lint(full).empty());
  }
  SUBCASE("algorithm-only string falls back to provider defaults") {
    full.calls[2].literal_args = std::vector<std::string>{"AES"};
    auto violations = lint(full);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == Violation::Kind::ConstraintFailed);
    CHECK(violations[0].category == MisuseCategory::InsecureDefaultImplementation);
    CHECK(violations[0].repair_literal == "AES/CBC/PKCS5Padding");
  }
  SUBCASE("a disallowed mode is rejected") {
    full.calls[2].literal_args = std::vector<std::string>{"AES/ECB/PKCS5Padding"};
    auto violations = lint(full);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].category == MisuseCategory::InsecureDefaultImplementation);
  }
  SUBCASE("uncaptured arguments pass without judgement") {
    full.calls[2].literal_args = std::nullopt;
    CHECK(lint(full).empty());
  }
  SUBCASE("a provider escape event suppresses the constraint") {
    CallSequence escaped = parse_sequence(
        "KeyGenerator.getInstance KeyGenerator.generateKey BouncyCastleProvider.new "
        "Cipher.getInstance Cipher.init Cipher.doFinal");
    escaped.calls[3].literal_args = std::vector<std::string>{"AES"};
    CHECK(lint(escaped).empty());
  }
}

TEST_CASE("string encoding constraint needs an explicit charset") {
  CallSequence s = parse_sequence(
      "MessageDigest.getInstance String.getBytes MessageDigest.update MessageDigest.digest");

  SUBCASE("captured empty argument list violates") {
    s.calls[1].literal_args = std::vector<std::string>{};
    auto violations = check_sequence(s, pack());
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == Violation::Kind::ConstraintFailed);
    CHECK(violations[0].rule_class == "String");
    CHECK(violations[0].category == MisuseCategory::IncorrectEncoding);
    CHECK(violations[0].repair_literal == "UTF-8");
  }
  SUBCASE("explicit charset passes") {
    s.calls[1].literal_args = std::vector<std::string>{"UTF-8"};
    CHECK(check_sequence(s, pack()).empty());
  }
  SUBCASE("uncaptured arguments pass") {
    CHECK(check_sequence(s, pack()).empty());
  }
}

TEST_CASE("predicates only count when produced strictly earlier") {
  // nextBytes after the consumer does not satisfy the salt obligation
  CallSequence s = parse_sequence(
      "PBEKeySpec.new SecureRandom.new SecureRandom.nextBytes "
      "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret PBEKeySpec.clearPassword");
  auto violations = check_sequence(s, pack());
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == Violation::Kind::PredicateUnmet);
  CHECK(violations[0].position == 0);
}

TEST_CASE("classify is total over every violation kind") {
  for (auto kind : {Violation::Kind::OrderIncomplete, Violation::Kind::OrderDiverged,
                    Violation::Kind::UnknownEvent, Violation::Kind::ForbiddenEvent,
                    Violation::Kind::PredicateUnmet, Violation::Kind::ConstraintFailed}) {
    Violation v;
    v.kind = kind;
    v.category = MisuseCategory::IncorrectEncoding;
    MisuseCategory c = classify(v);
    bool known = false;
    for (MisuseCategory m : all_misuse_categories()) {
      if (m == c) known = true;
    }
    CHECK(known);
  }
}

TEST_CASE("misuse_report aggregates over a dataset") {
  AnnotatedSequence clean;
  clean.id = 1;
  clean.annotation = "clean";
  clean.sequence = parse_sequence(kPbeSequence);
  AnnotatedSequence broken;
  broken.id = 2;
  broken.annotation = "broken";
  broken.sequence = parse_sequence(
      "SecureRandom.getInstance SecureRandom.nextBytes PBEKeySpec.new "
      "SecretKeyFactory.getInstance SecretKeyFactory.generateSecret "
      "SecretKey.getEncoded SecretKeySpec.new");
  Dataset d;
  d.entries = {clean, broken};

  MisuseDistribution dist = misuse_report(d, pack());
  CHECK(dist.sequences_total == 2);
  CHECK(dist.sequences_with_misuse == 1);
  CHECK(dist.misuse_rate == doctest::Approx(0.5));
  CHECK(dist.counts.at(MisuseCategory::MissingMethodCall) == 1);
  for (MisuseCategory c : all_misuse_categories()) {
    if (c != MisuseCategory::MissingMethodCall) CHECK(dist.counts.at(c) == 0);
  }

  Dataset empty;
  CHECK_THROWS_AS(misuse_report(empty, pack()), DatasetError);
}

TEST_CASE("uncovered classes are reported, not flagged") {
  CallSequence s = parse_sequence("Cipher.getInstance Cipher.init Cipher.doFinal KeyStore.load");
  std::set<std::string> universe = pack().class_names();
  universe.insert("KeyStore");
  auto uncovered = uncovered_classes(s, pack(), universe);
  CHECK(uncovered == std::vector<std::string>{"KeyStore"});
  // KeyStore.load itself produces no violation
  for (const auto& v : check_sequence(s, pack())) CHECK(v.rule_class != "KeyStore");
}

TEST_CASE("violations serialize to single-line JSON") {
  CallSequence s = parse_sequence("Cipher.getInstance Cipher.init");
  auto violations = check_sequence(s, pack());
  bool saw_end = false;
  for (const auto& v : violations) {
    std::string line = violation_to_json(v);
    CHECK(line.find('\n') == std::string::npos);
    if (v.at_end) {
      saw_end = true;
      CHECK(line.find("\"position\":\"end\"") != std::string::npos);
    }
  }
  CHECK(saw_end);
}
