#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cryptoseq {

class SequenceError : public std::runtime_error {
 public:
  explicit SequenceError(const std::string& what) : std::runtime_error(what) {}
};

/// One API invocation token. The distinguished method name "new" denotes a
/// constructor call. literal_args is nullopt when the call's arguments were
/// never captured; an empty vector means the argument list was seen and
/// contained no string literals.
struct ApiCall {
  std::string class_name;
  std::string method_name;
  std::optional<std::vector<std::string>> literal_args;

  std::string token() const { return class_name + "." + method_name; }
  std::string simple_class() const;
  bool is_constructor() const { return method_name == "new"; }
};

struct Provenance {
  std::string repo;
  std::string file;
  std::string method;
};

/// Ordered list of ApiCalls covering one task, with optional origin info.
struct CallSequence {
  std::vector<ApiCall> calls;
  std::optional<Provenance> provenance;

  std::size_t size() const { return calls.size(); }
  bool empty() const { return calls.empty(); }
  std::vector<std::string> tokens() const;
};

/// Strips any package qualifier: "java.security.SecureRandom" -> "SecureRandom".
std::string simple_class_name(const std::string& qualified);

/// Splits a "Class.method" token at the last dot. Throws SequenceError on a
/// token without a separator or with an empty class/method part.
ApiCall parse_call_token(const std::string& token);

/// Parses a whitespace-separated token string; "" yields an empty sequence.
CallSequence parse_sequence(const std::string& text);

/// Space-joined token form; inverse of parse_sequence on the token level.
std::string serialize_sequence(const CallSequence& s);

/// Token-level equality (ignores provenance and captured literals).
bool token_equal(const CallSequence& a, const CallSequence& b);

}  // namespace cryptoseq
