#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "archweave/catalog.hpp"
#include "archweave/consistency.hpp"
#include "archweave/engine.hpp"
#include "archweave/json_io.hpp"
#include "archweave/model_io.hpp"
#include "archweave/pattern.hpp"
#include "archweave/plantuml.hpp"
#include "archweave/rule.hpp"

namespace archweave {

enum ExitCode { kExitOk = 0, kExitError = 1, kExitIncomplete = 2 };

struct CliConfig {
  std::string command;
  std::string input;
  std::string out_dir;
  std::string pattern_dir;
  std::vector<std::string> formats;
  std::string rule_id;
  std::string what;
  bool trace = false;
  int max_passes = 100;
  bool verbose = false;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

inline Architecture load_input(const std::string& path) {
  auto text = read_file(path);
  auto arch = std::filesystem::path(path).extension() == ".json" ? parse_json(text) : parse_model(text);
  if (arch.diagrams.empty()) throw Error(ErrorKind::Schema, path + ": model has no diagrams");
  return arch;
}

inline PatternLibrary patterns_for(const CliConfig& cfg) {
  std::string dir = cfg.pattern_dir;
  if (dir.empty())
    if (const char* env = std::getenv("ARCHWEAVE_PATTERNS")) dir = env;
  return dir.empty() ? builtin_patterns() : load_library(dir);
}

inline std::string trace_text(const Architecture& arch) {
  std::ostringstream os;
  for (const auto& t : arch.traces) {
    os << "pass " << t.pass << " " << t.rule_text << " @" << t.anchor.value << " ->";
    for (auto id : t.targets) os << " @" << id.value;
    if (t.pattern) os << " pattern " << *t.pattern;
    os << "\n";
  }
  return os.str();
}

inline int cmd_apply(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  auto arch = load_input(cfg.input);
  auto lib = patterns_for(cfg);
  std::set<char> before;
  for (const auto& d : arch.diagrams) before.insert(d.letter);
  RunOptions options;
  options.max_passes = cfg.max_passes;
  options.patterns = &lib;
  auto report = run_to_fixpoint(arch, options);

  std::set<std::string> formats(cfg.formats.begin(), cfg.formats.end());
  if (formats.empty()) formats = {"arch", "puml", "json"};
  namespace fs = std::filesystem;
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::string stem = fs::path(cfg.input).stem().string();
  if (formats.count("arch")) write_file(dir / (stem + ".arch"), write_model(arch));
  if (formats.count("json")) write_file(dir / (stem + ".json"), emit_json(arch));
  if (formats.count("puml"))
    for (const auto& d : arch.diagrams) write_file(dir / plantuml_file_name(d), emit_plantuml(arch, d));

  std::ostringstream summary;
  summary << "passes: " << report.passes.size() << "\n";
  summary << report.fired_count(arch) << "/" << arch.attachments.size() << " rules fired\n";
  summary << "diagrams: " << arch.diagrams.size();
  std::string created;
  for (const auto& d : arch.diagrams)
    if (!before.count(d.letter)) created += d.letter;
  summary << " (created " << (created.empty() ? "none" : created) << ")\n";
  for (std::size_t k = 0; k < report.never_fired.size(); ++k) {
    summary << "never fired: " << arch.attachments[report.never_fired[k]].describe();
    if (k < report.pending_reasons.size() && !report.pending_reasons[k].empty())
      summary << " (" << report.pending_reasons[k] << ")";
    summary << "\n";
  }
  write_file(dir / "summary.txt", summary.str());
  out << summary.str();
  if (cfg.trace) out << trace_text(arch);
  if (!report.never_fired.empty()) {
    err << "archweave: " << report.never_fired.size() << " attachment(s) never fired\n";
    return kExitIncomplete;
  }
  return kExitOk;
}

inline int cmd_check(const CliConfig& cfg, std::ostream& out) {
  auto arch = load_input(cfg.input);
  auto lib = patterns_for(cfg);
  RunOptions options;
  options.max_passes = cfg.max_passes;
  options.patterns = &lib;
  run_to_fixpoint(arch, options);
  auto r = check(arch);
  if (std::find(cfg.formats.begin(), cfg.formats.end(), "json") != cfg.formats.end())
    out << to_json(r, arch).dump(2) << "\n";
  else
    out << to_text(r, arch);
  if (cfg.trace) out << trace_text(arch);
  return r.ok ? kExitOk : kExitIncomplete;
}

inline int cmd_rules(std::ostream& out) {
  for (const auto& e : builtin_catalog()) {
    out << e.key;
    if (e.index && *e.index != e.key) out << " " << *e.index;
    out << "  " << (e.short_form.empty() ? "(no notation)" : e.short_form) << "\n";
  }
  return kExitOk;
}

inline int cmd_patterns(const CliConfig& cfg, std::ostream& out) {
  auto lib = patterns_for(cfg);
  for (const auto& p : lib.patterns()) {
    out << p.category << " " << p.letter() << " " << p.name;
    for (const auto& [role, values] : p.placeholders) {
      out << "  " << role << ":";
      for (const auto& v : values) out << " " << render(v);
    }
    out << "\n";
  }
  return kExitOk;
}

inline int cmd_explain(const CliConfig& cfg, std::ostream& out) {
  const auto& e = catalog_entry(cfg.rule_id);
  out << e.key;
  if (e.index && *e.index != e.key) out << " (" << *e.index << ")";
  out << "\n";
  if (e.ast) {
    out << "form   " << e.short_form << "\n";
    if (e.long_form) out << "long   " << *e.long_form << "\n";
    out << "ast\n" << dump_ast(*e.ast);
    out << "source " << walk_text(e.ast->source()) << "\n";
    for (std::size_t i = 1; i < e.ast->parts.size(); ++i) out << "target " << walk_text(e.ast->parts[i]) << "\n";
  } else {
    out << "form   (notation not available)\n";
  }
  out << "about  " << e.description << "\n";
  return kExitOk;
}

}  // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"archweave: composite consistency rules for layered UML architectures", "archweave"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", cfg.verbose, "More diagnostics");

  auto* apply = app.add_subcommand("apply", "Run all attached rules to a fixpoint and write the results");
  apply->add_option("input", cfg.input, "Model file (.arch or .json)")->required();
  apply->add_option("-o,--out", cfg.out_dir, "Output directory")->required();
  apply->add_option("--patterns", cfg.pattern_dir, "Directory of *.pat files");
  apply->add_option("--format", cfg.formats, "puml, json or arch (repeatable)")
      ->check(CLI::IsMember({"puml", "json", "arch"}))
      ->take_all();
  apply->add_flag("--trace", cfg.trace, "Print trace links");
  apply->add_option("--max-passes", cfg.max_passes, "Pass limit")->check(CLI::PositiveNumber);

  auto* chk = app.add_subcommand("check", "Run to a fixpoint and report consistency");
  chk->add_option("input", cfg.input, "Model file (.arch or .json)")->required();
  chk->add_option("--patterns", cfg.pattern_dir, "Directory of *.pat files");
  chk->add_option("--format", cfg.formats, "text or json")->check(CLI::IsMember({"text", "json"}));
  chk->add_flag("--trace", cfg.trace, "Print trace links");
  chk->add_option("--max-passes", cfg.max_passes, "Pass limit")->check(CLI::PositiveNumber);

  auto* rules = app.add_subcommand("rules", "Rule catalog");
  rules->add_option("what", cfg.what, "list")->check(CLI::IsMember({"list"}))->required();

  auto* pats = app.add_subcommand("patterns", "Pattern library");
  pats->add_option("what", cfg.what, "list")->check(CLI::IsMember({"list"}))->required();
  pats->add_option("--patterns", cfg.pattern_dir, "Directory of *.pat files");

  auto* explain = app.add_subcommand("explain", "Show a catalog rule");
  explain->add_option("id", cfg.rule_id, "Key, index or short form")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "archweave: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (apply->parsed()) return detail::cmd_apply(cfg, out, err);
    if (chk->parsed()) return detail::cmd_check(cfg, out);
    if (rules->parsed()) return detail::cmd_rules(out);
    if (pats->parsed()) return detail::cmd_patterns(cfg, out);
    if (explain->parsed()) return detail::cmd_explain(cfg, out);
  } catch (const Error& e) {
    err << "archweave: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "archweave: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace archweave
