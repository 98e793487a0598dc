#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cryptoseq/analyzer.hpp"
#include "cryptoseq/bleu.hpp"
#include "cryptoseq/extractor.hpp"
#include "cryptoseq/repair.hpp"
#include "cryptoseq/retrieval.hpp"

using namespace cryptoseq;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

struct Options {
  std::string rules = std::string(CRYPTOSEQ_ASSETS_DIR) + "/rules";
  std::string dataset;
  std::string dir;
  std::string out;
  int k = 10;
  std::uint64_t seed = 0;
  bool pretty = false;
  bool quiet = false;
};

void emit_warnings(const WarningSink& warnings, const Options& opt) {
  if (opt.quiet) return;
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

RulePack load_pack(const Options& opt) {
  WarningSink warnings;
  RulePack pack = load_rule_pack(opt.rules, &warnings);
  emit_warnings(warnings, opt);
  return pack;
}

ExtractorConfig extractor_config(const RulePack& pack) {
  ExtractorConfig cfg;
  cfg.crypto_classes = pack.class_names();
  return cfg;
}

Dataset load_input_dataset(const std::string& path, const Options& opt) {
  WarningSink warnings;
  Dataset d = load_dataset(path, &warnings);
  emit_warnings(warnings, opt);
  return d;
}

std::ostream& open_out(const Options& opt, std::ofstream& file) {
  if (opt.out.empty()) return std::cout;
  file.open(opt.out);
  if (!file) throw std::runtime_error("cannot write output file: " + opt.out);
  return file;
}

json distribution_json(const MisuseDistribution& dist) {
  json counts = json::object();
  for (const auto& [category, count] : dist.counts) counts[to_string(category)] = count;
  return json{{"sequences_total", dist.sequences_total},
              {"sequences_with_misuse", dist.sequences_with_misuse},
              {"misuse_rate", dist.misuse_rate},
              {"counts", counts}};
}

int cmd_extract(const Options& opt) {
  RulePack pack = load_pack(opt);
  WarningSink warnings;
  Dataset d = scan_corpus(opt.dir, extractor_config(pack), &warnings);
  emit_warnings(warnings, opt);
  std::ofstream file;
  write_dataset(d, open_out(opt, file));
  return kExitOk;
}

int cmd_lint(const Options& opt) {
  RulePack pack = load_pack(opt);
  Dataset d;
  if (!opt.dataset.empty()) {
    d = load_input_dataset(opt.dataset, opt);
  } else {
    WarningSink warnings;
    d = scan_corpus(opt.dir, extractor_config(pack), &warnings);
    emit_warnings(warnings, opt);
  }
  std::ofstream file;
  std::ostream& out = open_out(opt, file);

  MisuseDistribution dist = misuse_report(d, pack);
  if (opt.pretty) {
    out << "sequences: " << dist.sequences_total << "\n"
        << dist.sequences_with_misuse << " sequences with misuses (rate "
        << dist.misuse_rate << ")\n";
    for (const auto& [category, count] : dist.counts) {
      out << "  " << to_string(category) << ": " << count << "\n";
    }
    for (const auto& entry : d.entries) {
      for (const auto& v : check_sequence(entry.sequence, pack)) {
        out << "  #" << entry.id << " " << to_string(v.kind) << " [" << to_string(v.category)
            << "] " << v.detail << "\n";
      }
    }
  } else {
    for (const auto& entry : d.entries) {
      for (const auto& v : check_sequence(entry.sequence, pack)) {
        json rec = json::parse(violation_to_json(v));
        rec["id"] = entry.id;
        out << rec.dump() << '\n';
      }
    }
    out << distribution_json(dist).dump() << '\n';
  }
  return dist.sequences_with_misuse > 0 ? kExitFindings : kExitOk;
}

int cmd_fix(const Options& opt) {
  RulePack pack = load_pack(opt);
  Dataset d = load_input_dataset(opt.dataset, opt);
  Dataset corrected;
  corrected.name = d.name;
  for (const auto& entry : d.entries) {
    RepairResult r = repair_sequence(entry.sequence, pack);
    for (const auto& action : r.actions) {
      if (!opt.quiet) {
        std::cerr << "#" << entry.id << " " << repair_action_to_json(action) << '\n';
      }
    }
    for (const auto& v : r.unrepairable) {
      if (!opt.quiet) {
        std::cerr << "warning: #" << entry.id << " unrepairable: " << violation_to_json(v)
                  << '\n';
      }
    }
    AnnotatedSequence fixed = entry;
    fixed.sequence = std::move(r.sequence);
    corrected.entries.push_back(std::move(fixed));
  }
  std::ofstream file;
  write_dataset(corrected, open_out(opt, file));
  return kExitOk;
}

int cmd_bleu(const Options& opt, const std::string& candidates, const std::string& references) {
  Dataset cand = load_input_dataset(candidates, opt);
  Dataset refs = load_input_dataset(references, opt);
  BleuReport report = dataset_bleu(cand, refs, {});
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  if (opt.pretty) {
    out << "pairs: " << report.per_pair_scores.size() << "\n"
        << "mean BLEU: " << report.mean_score_pct << "%\n"
        << "perfect: " << report.perfect_count << "\n";
  } else {
    out << json{{"pairs", report.per_pair_scores.size()},
                {"mean_score_pct", report.mean_score_pct},
                {"perfect_count", report.perfect_count},
                {"per_pair_scores", report.per_pair_scores}}
               .dump()
        << '\n';
  }
  return kExitOk;
}

int cmd_eval(const Options& opt, const std::string& source, const std::string& corrected) {
  Dataset src = load_input_dataset(source, opt);
  Dataset fix = load_input_dataset(corrected, opt);
  EvalConfig cfg;
  cfg.k = opt.k;
  cfg.seed = opt.seed;
  EvalReport report = evaluate(src, fix, cfg);
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  if (opt.pretty) {
    out << "folds: " << report.folds.size() << " (k=" << cfg.k << ", seed=" << cfg.seed << ")\n"
        << "accuracy BLEU: " << report.accuracy_bleu_pct << "%\n"
        << "security BLEU: " << report.security_bleu_pct << "% over " << report.security_pairs
        << " pairs\n";
  } else {
    out << eval_report_to_json(report) << '\n';
  }
  return kExitOk;
}

int cmd_stats(const Options& opt) {
  Dataset d = load_input_dataset(opt.dataset, opt);
  StatsReport r = dataset_stats(d, {7});
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  if (opt.pretty) {
    out << "entries: " << r.entry_count << "\n"
        << "mean sequence length: " << r.mean_length << "\n"
        << "sequences longer than 7: " << r.frac_longer_than.at(7) << "\n"
        << "sequence vocabulary: " << r.sequence_vocab_size << "\n"
        << "annotation vocabulary: " << r.annotation_vocab_size << "\n";
  } else {
    json longer = json::object();
    for (const auto& [threshold, frac] : r.frac_longer_than) {
      longer[std::to_string(threshold)] = frac;
    }
    out << json{{"entry_count", r.entry_count},
                {"mean_length", r.mean_length},
                {"frac_longer_than", longer},
                {"sequence_vocab_size", r.sequence_vocab_size},
                {"annotation_vocab_size", r.annotation_vocab_size}}
               .dump()
        << '\n';
  }
  return kExitOk;
}

int cmd_rules(const Options& opt) {
  RulePack pack = load_pack(opt);
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  if (opt.pretty) {
    out << "rules: " << pack.rules.size() << "\n";
    for (const auto& [name, rule] : pack.rules) {
      out << "  " << name << ": " << rule.events.size() << " events, "
          << (rule.has_order() ? "ordered" : "no order") << ", " << rule.constraints.size()
          << " constraints, " << rule.forbidden.size() << " forbidden\n";
    }
  } else {
    json rules = json::array();
    for (const auto& [name, rule] : pack.rules) {
      rules.push_back({{"class", name},
                       {"events", rule.events.size()},
                       {"has_order", rule.has_order()},
                       {"obligations", rule.obligations.size()},
                       {"constraints", rule.constraints.size()},
                       {"forbidden", rule.forbidden.size()}});
    }
    json producers = json::array();
    for (const auto& [predicate, snippet] : pack.producers) producers.push_back(predicate);
    out << json{{"rule_count", pack.rules.size()}, {"rules", rules}, {"producers", producers}}
               .dump()
        << '\n';
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--rules", opt.rules, "Rule pack directory");
  cmd->add_option("--out", opt.out, "Write machine output to this file instead of stdout");
  cmd->add_flag("--pretty", opt.pretty, "Human-readable tables instead of JSON");
  cmd->add_flag("--quiet", opt.quiet, "Silence warnings on the error stream");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crypto API call-sequence toolkit: extraction, linting, repair, evaluation"};
  app.require_subcommand(1);

  Options opt;
  std::string bleu_candidates, bleu_references, eval_source, eval_corrected;

  CLI::App* extract = app.add_subcommand("extract", "Scan a directory of Java sources");
  extract->add_option("--dir", opt.dir, "Directory to scan")->required();
  add_common(extract, opt);

  CLI::App* lint = app.add_subcommand("lint", "Check sequences against the rule pack");
  lint->add_option("--dataset", opt.dataset, "Dataset file (JSON Lines)");
  lint->add_option("--dir", opt.dir, "Directory of Java sources to extract and check");
  add_common(lint, opt);

  CLI::App* fix = app.add_subcommand("fix", "Repair sequences and write the corrected dataset");
  fix->add_option("--dataset", opt.dataset, "Dataset file (JSON Lines)")->required();
  add_common(fix, opt);

  CLI::App* bleu = app.add_subcommand("bleu", "Score candidates against references");
  bleu->add_option("candidates", bleu_candidates, "Candidate dataset")->required();
  bleu->add_option("references", bleu_references, "Reference dataset")->required();
  add_common(bleu, opt);

  CLI::App* eval = app.add_subcommand("eval", "k-fold retrieval evaluation");
  eval->add_option("source", eval_source, "Source dataset")->required();
  eval->add_option("corrected", eval_corrected, "Corrected dataset")->required();
  eval->add_option("--k", opt.k, "Fold count");
  eval->add_option("--seed", opt.seed, "Shuffle seed");
  add_common(eval, opt);

  CLI::App* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--dataset", opt.dataset, "Dataset file (JSON Lines)")->required();
  add_common(stats, opt);

  CLI::App* rules = app.add_subcommand("rules", "Validate and summarize the rule pack");
  add_common(rules, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (extract->parsed()) return cmd_extract(opt);
    if (lint->parsed()) {
      if (opt.dataset.empty() == opt.dir.empty()) {
        std::cerr << "lint needs exactly one of --dataset or --dir\n";
        return kExitError;
      }
      return cmd_lint(opt);
    }
    if (fix->parsed()) return cmd_fix(opt);
    if (bleu->parsed()) return cmd_bleu(opt, bleu_candidates, bleu_references);
    if (eval->parsed()) return cmd_eval(opt, eval_source, eval_corrected);
    if (stats->parsed()) return cmd_stats(opt);
    if (rules->parsed()) return cmd_rules(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
