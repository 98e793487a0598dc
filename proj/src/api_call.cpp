#include "cryptoseq/api_call.hpp"

#include <cctype>
#include <sstream>

namespace cryptoseq {

std::string simple_class_name(const std::string& qualified) {
  auto pos = qualified.find_last_of('.');
  if (pos == std::string::npos) return qualified;
  return qualified.substr(pos + 1);
}

std::string ApiCall::simple_class() const { return simple_class_name(class_name); }

namespace {

bool has_whitespace(const std::string& s) {
  for (unsigned char c : s) {
    if (std::isspace(c)) return true;
  }
  return false;
}

}  // namespace

ApiCall parse_call_token(const std::string& token) {
  auto pos = token.find_last_of('.');
  if (pos == std::string::npos) {
    throw SequenceError("malformed token '" + token + "': missing '.' separator");
  }
  ApiCall call;
  call.class_name = token.substr(0, pos);
  call.method_name = token.substr(pos + 1);
  if (call.class_name.empty() || call.method_name.empty()) {
    throw SequenceError("malformed token '" + token + "': empty class or method part");
  }
  if (has_whitespace(call.class_name) || has_whitespace(call.method_name)) {
    throw SequenceError("malformed token '" + token + "': contains whitespace");
  }
  return call;
}

CallSequence parse_sequence(const std::string& text) {
  CallSequence seq;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    seq.calls.push_back(parse_call_token(token));
  }
  return seq;
}

std::string serialize_sequence(const CallSequence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.calls.size(); ++i) {
    if (i > 0) out += ' ';
    out += s.calls[i].token();
  }
  return out;
}

std::vector<std::string> CallSequence::tokens() const {
  std::vector<std::string> out;
  out.reserve(calls.size());
  for (const auto& c : calls) out.push_back(c.token());
  return out;
}

bool token_equal(const CallSequence& a, const CallSequence& b) {
  if (a.calls.size() != b.calls.size()) return false;
  for (std::size_t i = 0; i < a.calls.size(); ++i) {
    if (a.calls[i].class_name != b.calls[i].class_name ||
        a.calls[i].method_name != b.calls[i].method_name) {
      return false;
    }
  }
  return true;
}

}  // namespace cryptoseq
