#include "cryptoseq/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace cryptoseq {

namespace {

using nlohmann::json;

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void warn(WarningSink* warnings, const std::string& msg) {
  if (warnings) warnings->push_back(msg);
}

AnnotatedSequence entry_from_json(const json& rec, const std::string& name, std::size_t line_no) {
  auto fail = [&](const std::string& msg) -> DatasetError {
    return DatasetError(name + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (!rec.is_object()) throw fail("record is not a JSON object");
  if (!rec.contains("id") || !rec["id"].is_number_integer()) throw fail("missing integer 'id'");
  if (!rec.contains("annotation") || !rec["annotation"].is_string()) {
    throw fail("missing string 'annotation'");
  }
  if (!rec.contains("sequence") || !rec["sequence"].is_array()) {
    throw fail("missing array 'sequence'");
  }
  AnnotatedSequence entry;
  entry.id = rec["id"].get<std::int64_t>();
  if (entry.id < 0) throw fail("negative id");
  entry.annotation = to_lower(rec["annotation"].get<std::string>());
  if (entry.annotation.empty()) throw fail("empty annotation");
  for (const auto& tok : rec["sequence"]) {
    if (!tok.is_string()) throw fail("sequence token is not a string");
    try {
      entry.sequence.calls.push_back(parse_call_token(tok.get<std::string>()));
    } catch (const SequenceError& e) {
      throw fail(e.what());
    }
  }
  if (rec.contains("args")) {
    if (!rec["args"].is_object()) throw fail("'args' is not an object");
    for (const auto& [key, val] : rec["args"].items()) {
      std::size_t idx = 0;
      try {
        idx = static_cast<std::size_t>(std::stoul(key));
      } catch (...) {
        throw fail("'args' key '" + key + "' is not a call index");
      }
      if (idx >= entry.sequence.calls.size()) throw fail("'args' index out of range: " + key);
      if (!val.is_array()) throw fail("'args' value for index " + key + " is not an array");
      std::vector<std::string> literals;
      for (const auto& lit : val) {
        if (!lit.is_string()) throw fail("literal argument is not a string");
        literals.push_back(lit.get<std::string>());
      }
      entry.sequence.calls[idx].literal_args = std::move(literals);
    }
  }
  if (rec.contains("provenance")) {
    const auto& p = rec["provenance"];
    if (!p.is_object()) throw fail("'provenance' is not an object");
    Provenance prov;
    prov.repo = p.value("repo", "");
    prov.file = p.value("file", "");
    prov.method = p.value("method", "");
    entry.sequence.provenance = prov;
  }
  return entry;
}

}  // namespace

const AnnotatedSequence* Dataset::find(std::int64_t id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Dataset read_dataset(std::istream& in, const std::string& name, WarningSink* warnings) {
  Dataset d;
  d.name = name;
  std::unordered_map<std::int64_t, std::size_t> seen;  // id -> line number
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(name + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    AnnotatedSequence entry = entry_from_json(rec, name, line_no);
    auto [it, inserted] = seen.emplace(entry.id, line_no);
    if (!inserted) {
      throw DatasetError(name + ": duplicate id " + std::to_string(entry.id) + " on lines " +
                         std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    if (entry.sequence.empty()) {
      warn(warnings, name + ":" + std::to_string(line_no) + ": entry " +
                         std::to_string(entry.id) + " has an empty sequence");
    }
    d.entries.push_back(std::move(entry));
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, WarningSink* warnings) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file: " + path.string());
  return read_dataset(in, path.filename().string(), warnings);
}

std::string entry_to_jsonl(const AnnotatedSequence& e) {
  json rec;
  rec["id"] = e.id;
  rec["annotation"] = e.annotation;
  rec["sequence"] = e.sequence.tokens();
  json args = json::object();
  for (std::size_t i = 0; i < e.sequence.calls.size(); ++i) {
    if (e.sequence.calls[i].literal_args) {
      args[std::to_string(i)] = *e.sequence.calls[i].literal_args;
    }
  }
  if (!args.empty()) rec["args"] = args;
  if (e.sequence.provenance) {
    rec["provenance"] = {{"repo", e.sequence.provenance->repo},
                         {"file", e.sequence.provenance->file},
                         {"method", e.sequence.provenance->method}};
  }
  return rec.dump();
}

void write_dataset(const Dataset& d, std::ostream& out) {
  for (const auto& e : d.entries) out << entry_to_jsonl(e) << '\n';
}

void store_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write dataset file: " + path.string());
  write_dataset(d, out);
}

StatsReport dataset_stats(const Dataset& d, const std::vector<int>& thresholds) {
  if (d.empty()) throw DatasetError("dataset_stats: dataset is empty");
  StatsReport r;
  r.entry_count = d.size();
  std::size_t total_calls = 0;
  std::set<std::string> seq_vocab;
  std::set<std::string> ann_vocab;
  std::map<int, std::size_t> longer;
  for (int t : thresholds) longer[t] = 0;
  for (const auto& e : d.entries) {
    total_calls += e.sequence.size();
    for (const auto& c : e.sequence.calls) seq_vocab.insert(c.token());
    std::istringstream words(to_lower(e.annotation));
    std::string w;
    while (words >> w) ann_vocab.insert(w);
    for (int t : thresholds) {
      if (e.sequence.size() > static_cast<std::size_t>(t)) ++longer[t];
    }
  }
  r.mean_length = static_cast<double>(total_calls) / static_cast<double>(d.size());
  for (int t : thresholds) {
    r.frac_longer_than[t] = static_cast<double>(longer[t]) / static_cast<double>(d.size());
  }
  r.sequence_vocab_size = seq_vocab.size();
  r.annotation_vocab_size = ann_vocab.size();
  return r;
}

}  // namespace cryptoseq
