#include "cryptoseq/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace cryptoseq {

namespace {

void warn(WarningSink* warnings, const std::string& msg) {
  if (warnings) warnings->push_back(msg);
}

const std::unordered_set<std::string>& java_keywords() {
  static const std::unordered_set<std::string> kw = {
      "abstract", "assert",    "boolean",  "break",      "byte",      "case",    "catch",
      "char",     "class",     "const",    "continue",   "default",   "do",      "double",
      "else",     "enum",      "extends",  "final",      "finally",   "float",   "for",
      "goto",     "if",        "implements", "import",   "instanceof", "int",    "interface",
      "long",     "native",    "new",      "package",    "private",   "protected", "public",
      "return",   "short",     "static",   "strictfp",   "super",     "switch",  "synchronized",
      "this",     "throw",     "throws",   "transient",  "try",       "void",    "volatile",
      "while",    "var",       "record",   "yield",
  };
  return kw;
}

struct Token {
  enum class Kind { Ident, Str, Num, Punct };
  Kind kind;
  std::string text;
};

struct Lexed {
  std::vector<Token> tokens;
  std::map<std::size_t, std::string> javadoc_before;  // token index -> comment body
};

Lexed lex(const std::string& src) {
  Lexed out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      bool javadoc = i + 2 < n && src[i + 2] == '*' && !(i + 3 < n && src[i + 3] == '/');
      std::size_t end = src.find("*/", i + 2);
      if (end == std::string::npos) {
        i = n;
        continue;
      }
      if (javadoc) {
        out.javadoc_before[out.tokens.size()] = src.substr(i + 3, end - i - 3);
      }
      i = end + 2;
      continue;
    }
    if (c == '"') {
      std::string value;
      ++i;
      while (i < n && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < n) {
          value += src[i + 1];
          i += 2;
        } else {
          value += src[i];
          ++i;
        }
      }
      ++i;  // closing quote
      out.tokens.push_back({Token::Kind::Str, value});
      continue;
    }
    if (c == '\'') {
      ++i;
      while (i < n && src[i] != '\'') {
        if (src[i] == '\\') ++i;
        ++i;
      }
      ++i;
      out.tokens.push_back({Token::Kind::Num, "'c'"});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t begin = i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                       src[i] == '$')) {
        ++i;
      }
      out.tokens.push_back({Token::Kind::Ident, src.substr(begin, i - begin)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t begin = i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '.' ||
                       src[i] == '_')) {
        ++i;
      }
      out.tokens.push_back({Token::Kind::Num, src.substr(begin, i - begin)});
      continue;
    }
    out.tokens.push_back({Token::Kind::Punct, std::string(1, c)});
    ++i;
  }
  return out;
}

bool is_ident(const Token& t) { return t.kind == Token::Kind::Ident; }
bool is_punct(const Token& t, const char* p) {
  return t.kind == Token::Kind::Punct && t.text == p;
}
bool is_keyword(const Token& t) { return is_ident(t) && java_keywords().count(t.text) > 0; }
bool starts_upper(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

std::size_t find_matching(const std::vector<Token>& tokens, std::size_t open,
                          const char* open_p, const char* close_p) {
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (is_punct(tokens[i], open_p)) ++depth;
    if (is_punct(tokens[i], close_p)) {
      --depth;
      if (depth == 0) return i;
    }
  }
  return tokens.size();
}

std::string strip_html(const std::string& s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) out += c;
  }
  return out;
}

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// First non-empty line of the Javadoc body, HTML-stripped and lowercased.
std::optional<std::string> javadoc_first_line(const std::string& body) {
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t*");
    if (pos == std::string::npos) continue;
    std::string text = strip_html(line.substr(pos));
    auto end = text.find_last_not_of(" \t\r");
    if (end == std::string::npos) continue;
    text = text.substr(0, end + 1);
    if (text.empty() || text[0] == '@') continue;
    return to_lower(text);
  }
  return std::nullopt;
}

struct FileModel {
  Lexed lexed;
  std::vector<JavaMethodRecord> methods;
  std::map<std::string, std::size_t> method_by_name;  // first declaration wins
  std::set<std::string> crypto_imports;               // simple names from keyword packages
  std::map<std::string, std::string> declared_types;  // fields + locals, file-wide
};

void collect_imports(FileModel& model, const CorpusFilter& filter) {
  const auto& tokens = model.lexed.tokens;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (!is_ident(tokens[i]) || tokens[i].text != "import") continue;
    std::string qualified;
    std::size_t j = i + 1;
    if (is_ident(tokens[j]) && tokens[j].text == "static") ++j;
    while (j < tokens.size() && !is_punct(tokens[j], ";")) {
      qualified += tokens[j].text;
      ++j;
    }
    for (const auto& keyword : filter.keywords) {
      if (qualified.rfind(keyword, 0) == 0) {
        auto dot = qualified.find_last_of('.');
        std::string simple = dot == std::string::npos ? qualified : qualified.substr(dot + 1);
        if (simple != "*" && starts_upper(simple)) model.crypto_imports.insert(simple);
      }
    }
    i = j;
  }
}

// Scans any token range for "Type name" declarations (locals and fields).
void collect_declarations(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
                          std::map<std::string, std::string>& types) {
  for (std::size_t i = begin; i + 1 < end; ++i) {
    if (!is_ident(tokens[i]) || is_keyword(tokens[i]) || !starts_upper(tokens[i].text)) continue;
    std::string type = tokens[i].text;
    std::size_t j = i + 1;
    if (j < end && is_punct(tokens[j], "<")) {
      j = find_matching(tokens, j, "<", ">");
      if (j >= end) continue;
      ++j;
    }
    while (j + 1 < end && is_punct(tokens[j], "[") && is_punct(tokens[j + 1], "]")) j += 2;
    if (j >= end || !is_ident(tokens[j]) || is_keyword(tokens[j])) continue;
    std::size_t after = j + 1;
    if (after < end && (is_punct(tokens[after], "=") || is_punct(tokens[after], ";") ||
                        is_punct(tokens[after], ":"))) {
      types.emplace(tokens[j].text, type);
    }
  }
}

void collect_params(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
                    std::map<std::string, std::string>& types) {
  std::size_t item_begin = begin;
  int depth = 0;
  for (std::size_t i = begin; i <= end; ++i) {
    bool at_end = i == end;
    if (!at_end) {
      if (is_punct(tokens[i], "(") || is_punct(tokens[i], "<") || is_punct(tokens[i], "[")) ++depth;
      if (is_punct(tokens[i], ")") || is_punct(tokens[i], ">") || is_punct(tokens[i], "]")) --depth;
    }
    if (at_end || (depth == 0 && is_punct(tokens[i], ","))) {
      // One parameter: first non-final identifier is the type, last identifier the name.
      std::string type;
      std::string name;
      for (std::size_t j = item_begin; j < i; ++j) {
        if (!is_ident(tokens[j]) || tokens[j].text == "final") continue;
        if (type.empty()) type = tokens[j].text;
        name = tokens[j].text;
      }
      if (!type.empty() && !name.empty() && name != type) types.emplace(name, type);
      item_begin = i + 1;
    }
  }
}

FileModel parse_file(const std::string& source, const CorpusFilter& filter) {
  FileModel model;
  model.lexed = lex(source);
  const auto& tokens = model.lexed.tokens;

  long balance = 0;
  for (const auto& t : tokens) {
    if (is_punct(t, "{")) ++balance;
    if (is_punct(t, "}")) --balance;
    if (balance < 0) break;
  }
  if (balance != 0) throw ExtractionError("unbalanced braces in source file");

  collect_imports(model, filter);
  collect_declarations(tokens, 0, tokens.size(), model.declared_types);

  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (!is_ident(tokens[i]) || is_keyword(tokens[i])) continue;
    if (!is_punct(tokens[i + 1], "(")) continue;
    if (i > 0 && (is_punct(tokens[i - 1], ".") || is_punct(tokens[i - 1], "@"))) continue;
    if (i > 0 && is_ident(tokens[i - 1]) && tokens[i - 1].text == "new") continue;
    std::size_t close = find_matching(tokens, i + 1, "(", ")");
    if (close >= tokens.size()) continue;
    std::size_t j = close + 1;
    if (j < tokens.size() && is_ident(tokens[j]) && tokens[j].text == "throws") {
      ++j;
      while (j < tokens.size() && (is_ident(tokens[j]) || is_punct(tokens[j], ",") ||
                                   is_punct(tokens[j], "."))) {
        ++j;
      }
    }
    if (j >= tokens.size() || !is_punct(tokens[j], "{")) continue;
    std::size_t body_close = find_matching(tokens, j, "{", "}");
    if (body_close >= tokens.size()) continue;

    JavaMethodRecord method;
    method.name = tokens[i].text;
    method.body_begin = j + 1;
    method.body_end = body_close;
    method.declared_types = model.declared_types;
    collect_params(tokens, i + 2, close, method.declared_types);

    // Attach the closest preceding Javadoc with no statement tokens between.
    auto it = model.lexed.javadoc_before.upper_bound(i);
    if (it != model.lexed.javadoc_before.begin()) {
      --it;
      bool adjacent = true;
      for (std::size_t k = it->first; k < i && adjacent; ++k) {
        if (is_punct(tokens[k], ";") || is_punct(tokens[k], "{") || is_punct(tokens[k], "}")) {
          adjacent = false;
        }
      }
      if (adjacent) method.javadoc_first_line = javadoc_first_line(it->second);
    }

    model.method_by_name.emplace(method.name, model.methods.size());
    model.methods.push_back(std::move(method));
    i = j;  // resume at the body; nested scans handled by the call extractor
  }
  return model;
}

struct CallExtractor {
  const FileModel& model;
  WarningSink* warnings;
  std::vector<ApiCall> out;

  void extract(const JavaMethodRecord& method, std::set<std::string>& chain) {
    walk(method.body_begin, method.body_end, method, chain);
  }

  void process_args(std::size_t open, std::size_t close, const JavaMethodRecord& method,
                    std::set<std::string>& chain, std::vector<std::string>* literals,
                    std::size_t* arg_count) {
    const auto& tokens = model.lexed.tokens;
    std::size_t item_begin = open + 1;
    int depth = 0;
    for (std::size_t i = open + 1; i <= close; ++i) {
      bool at_end = i == close;
      if (!at_end) {
        if (is_punct(tokens[i], "(") || is_punct(tokens[i], "[")) ++depth;
        if (is_punct(tokens[i], ")") || is_punct(tokens[i], "]")) --depth;
      }
      if (at_end || (depth == 0 && is_punct(tokens[i], ","))) {
        if (i > item_begin) {
          ++*arg_count;
          walk(item_begin, i, method, chain);  // nested calls evaluate first
          if (i == item_begin + 1 && tokens[item_begin].kind == Token::Kind::Str) {
            literals->push_back(tokens[item_begin].text);
          }
        }
        item_begin = i + 1;
      }
    }
  }

  std::optional<std::vector<std::string>> captured(std::vector<std::string> literals,
                                                   std::size_t arg_count) const {
    // Arguments count as captured when the list is empty or at least one
    // string literal was visible; otherwise the values are unknown.
    if (arg_count == 0) return std::vector<std::string>{};
    if (!literals.empty()) return literals;
    return std::nullopt;
  }

  void walk(std::size_t begin, std::size_t end, const JavaMethodRecord& method,
            std::set<std::string>& chain) {
    const auto& tokens = model.lexed.tokens;
    std::size_t i = begin;
    while (i < end) {
      if (is_ident(tokens[i]) && tokens[i].text == "new" && i + 1 < end &&
          is_ident(tokens[i + 1]) && !is_keyword(tokens[i + 1])) {
        std::size_t j = i + 1;
        std::string cls = tokens[j].text;
        while (j + 2 < end && is_punct(tokens[j + 1], ".") && is_ident(tokens[j + 2])) {
          cls = tokens[j + 2].text;
          j += 2;
        }
        if (j + 1 < end && is_punct(tokens[j + 1], "(")) {
          std::size_t close = find_matching(tokens, j + 1, "(", ")");
          std::vector<std::string> literals;
          std::size_t arg_count = 0;
          process_args(j + 1, close, method, chain, &literals, &arg_count);
          out.push_back(ApiCall{cls, "new", captured(std::move(literals), arg_count)});
          i = close + 1;
          i = skip_chained(i, end, method, chain);
          continue;
        }
        i = j + 1;
        continue;
      }
      if (is_ident(tokens[i]) && !is_keyword(tokens[i])) {
        std::size_t j = i;
        std::vector<std::string> parts{tokens[i].text};
        while (j + 2 < end && is_punct(tokens[j + 1], ".") && is_ident(tokens[j + 2])) {
          parts.push_back(tokens[j + 2].text);
          j += 2;
        }
        if (j + 1 < end && is_punct(tokens[j + 1], "(")) {
          std::size_t close = find_matching(tokens, j + 1, "(", ")");
          std::string method_name = parts.back();
          parts.pop_back();
          std::vector<std::string> literals;
          std::size_t arg_count = 0;
          process_args(j + 1, close, method, chain, &literals, &arg_count);
          if (parts.empty()) {
            inline_helper(method_name, chain);
          } else {
            std::string cls = resolve_receiver(parts, method);
            if (cls.empty()) {
              warn(warnings, "unresolvable receiver for call to '" + method_name +
                                 "' in method " + method.name + "; call dropped");
            } else {
              out.push_back(ApiCall{cls, method_name, captured(std::move(literals), arg_count)});
            }
          }
          i = close + 1;
          i = skip_chained(i, end, method, chain);
          continue;
        }
        i = j + 1;
        continue;
      }
      ++i;
    }
  }

  // Calls chained on a return value have no trackable receiver type; their
  // arguments are still scanned for nested calls.
  std::size_t skip_chained(std::size_t i, std::size_t end, const JavaMethodRecord& method,
                           std::set<std::string>& chain) {
    const auto& tokens = model.lexed.tokens;
    while (i + 2 < end && is_punct(tokens[i], ".") && is_ident(tokens[i + 1]) &&
           is_punct(tokens[i + 2], "(")) {
      std::size_t close = find_matching(tokens, i + 2, "(", ")");
      std::vector<std::string> literals;
      std::size_t arg_count = 0;
      process_args(i + 2, close, method, chain, &literals, &arg_count);
      warn(warnings, "chained call '." + tokens[i + 1].text + "(...)' dropped in method " +
                         method.name + ": receiver type unknown");
      i = close + 1;
    }
    return i;
  }

  std::string resolve_receiver(const std::vector<std::string>& parts,
                               const JavaMethodRecord& method) const {
    if (parts.size() == 1) {
      const std::string& r = parts[0];
      auto it = method.declared_types.find(r);
      if (it != method.declared_types.end()) return it->second;
      if (starts_upper(r)) return r;  // static call on a class
      return "";
    }
    if (parts.size() == 2 && parts[0] == "this") {
      auto it = method.declared_types.find(parts[1]);
      if (it != method.declared_types.end()) return it->second;
      return "";
    }
    if (starts_upper(parts.back())) {
      // Package-qualified static call; keep the qualified name.
      std::string qualified;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) qualified += '.';
        qualified += parts[i];
      }
      return qualified;
    }
    return "";
  }

  void inline_helper(const std::string& name, std::set<std::string>& chain) {
    auto it = model.method_by_name.find(name);
    if (it == model.method_by_name.end()) return;  // library/static import call, ignored
    if (chain.count(name) > 0) return;             // inlined at most once per chain
    chain.insert(name);
    extract(model.methods[it->second], chain);
    chain.erase(name);
  }
};

}  // namespace

std::vector<AnnotatedSequence> extract_sequences(const std::string& java_source,
                                                 const ExtractorConfig& config,
                                                 WarningSink* warnings) {
  FileModel model = parse_file(java_source, config.filter);

  std::set<std::string> universe = config.crypto_classes;
  universe.insert(model.crypto_imports.begin(), model.crypto_imports.end());

  std::vector<AnnotatedSequence> out;
  for (const auto& method : model.methods) {
    if (!method.javadoc_first_line || method.javadoc_first_line->empty()) continue;
    CallExtractor extractor{model, warnings, {}};
    std::set<std::string> chain{method.name};
    try {
      extractor.extract(method, chain);
    } catch (const std::exception& e) {
      warn(warnings, "extraction failed for method " + method.name + ": " + e.what());
      continue;
    }
    bool crypto = std::any_of(extractor.out.begin(), extractor.out.end(), [&](const ApiCall& c) {
      return universe.count(simple_class_name(c.class_name)) > 0;
    });
    if (!crypto) continue;
    AnnotatedSequence entry;
    entry.annotation = *method.javadoc_first_line;
    entry.sequence.calls = std::move(extractor.out);
    entry.sequence.provenance = Provenance{"", "", method.name};
    out.push_back(std::move(entry));
  }
  return out;
}

Dataset scan_corpus(const std::filesystem::path& root, const ExtractorConfig& config,
                    WarningSink* warnings) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".java") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Dataset d;
  d.name = root.filename().string();
  std::int64_t next_id = 1;
  std::size_t matched_files = 0;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) {
      warn(warnings, "cannot read " + file.string() + "; skipped");
      continue;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    bool keyword_hit = std::any_of(
        config.filter.keywords.begin(), config.filter.keywords.end(),
        [&](const std::string& k) { return text.find(k) != std::string::npos; });
    if (!keyword_hit) continue;
    ++matched_files;
    std::vector<AnnotatedSequence> extracted;
    try {
      extracted = extract_sequences(text, config, warnings);
    } catch (const ExtractionError& e) {
      warn(warnings, file.string() + ": " + e.what() + "; file skipped");
      continue;
    }
    std::string relative = std::filesystem::relative(file, root).generic_string();
    for (auto& entry : extracted) {
      entry.id = next_id++;
      if (entry.sequence.provenance) entry.sequence.provenance->file = relative;
      d.entries.push_back(std::move(entry));
    }
  }
  if (matched_files == 0) {
    warn(warnings, "no Java files matching the corpus filter under " + root.string());
  }
  return d;
}

}  // namespace cryptoseq
