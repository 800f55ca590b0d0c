#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "archweave/archweave.hpp"

namespace archweave::testing {

inline std::string scenario_path(const std::string& file) { return std::string(ARCHWEAVE_SCENARIOS) + "/" + file; }
inline std::string data_path(const std::string& file) { return std::string(ARCHWEAVE_TESTDATA) + "/" + file; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Architecture load_scenario(const std::string& file) { return parse_model(slurp(scenario_path(file))); }

inline Architecture run_scenario(const std::string& file) {
  auto arch = load_scenario(file);
  run_to_fixpoint(arch);
  return arch;
}

/// The 13 rule strings attached in the office scenario, in file order.
inline const std::vector<std::string>& office_rule_strings() {
  static const std::vector<std::string> rules = [] {
    std::vector<std::string> out;
    for (const auto& a : load_scenario("office.arch").attachments) out.push_back(a.rule_text);
    return out;
  }();
  return rules;
}

/// Catalog key of each office attachment, in file order.
inline const std::vector<std::string>& office_rule_keys() {
  static const std::vector<std::string> keys = {"C1", "C2",  "C4",  "C5",  "C6",  "C7", "C8",
                                                "C9", "C10", "C11", "C12", "C13", "C14"};
  return keys;
}

inline const std::map<std::string, std::vector<std::string>>& office_prerequisites() {
  static const std::map<std::string, std::vector<std::string>> deps = {
      {"C1", {}},
      {"C2", {"C1"}},
      {"C4", {"C1", "C2"}},
      {"C5", {"C1", "C2", "C4"}},
      {"C6", {"C1", "C2", "C4", "C5"}},
      {"C7", {"C1", "C2", "C4", "C5"}},
      {"C8", {"C1", "C2", "C4", "C5"}},
      {"C9", {"C1", "C2", "C4", "C5", "C6"}},
      {"C10", {"C1", "C2", "C4", "C5", "C7"}},
      {"C11", {"C1", "C2", "C4", "C5", "C8"}},
      {"C12", {"C1", "C2", "C4", "C5", "C6", "C9"}},
      {"C13", {"C1", "C2", "C4", "C5", "C6", "C9", "C12"}},
      {"C14", {"C1", "C2", "C4", "C5", "C6", "C9", "C12", "C13"}},
  };
  return deps;
}

/// Smallest seed on which catalog rule `key` fires: the context diagram,
/// the rules it depends on, and the rule itself.
inline Architecture canonical_seed(const std::string& key) {
  if (key.size() == 2 && key[0] == 'S' && key[1] >= '1' && key[1] <= '5') {
    static const std::map<std::string, std::string> needs = {
        {"S1", "S1"}, {"S2", "S2"}, {"S3", "S3"}, {"S4", "S1S2S4"}, {"S5", "S2S3S5"}};
    auto arch = load_scenario("simple_s1_s5.arch");
    std::vector<Attachment> keep;
    for (std::size_t i = 0; i < arch.attachments.size(); ++i)
      if (needs.at(key).find("S" + std::to_string(i + 1)) != std::string::npos) keep.push_back(arch.attachments[i]);
    arch.attachments = keep;
    return arch;
  }
  if (key == "S6" || key == "C3") {
    auto arch = load_scenario("scenario_flow.arch");
    std::vector<Attachment> keep;
    for (const auto& a : arch.attachments)
      if ((key == "S6") == (a.host_diagram == 'X')) keep.push_back(a);
    arch.attachments = keep;
    return arch;
  }
  auto arch = load_scenario("office.arch");
  std::set<std::string> wanted(office_prerequisites().at(key).begin(), office_prerequisites().at(key).end());
  wanted.insert(key);
  std::vector<Attachment> keep;
  for (std::size_t i = 0; i < arch.attachments.size(); ++i)
    if (wanted.count(office_rule_keys()[i])) keep.push_back(arch.attachments[i]);
  arch.attachments = keep;
  return arch;
}

inline std::size_t count_kind(const Diagram& d, ElementKind k) {
  std::size_t n = 0;
  for (const auto& e : d.elements) n += e.kind == k;
  return n;
}

inline std::size_t count_edges(const Diagram& d, EdgeKind k) {
  std::size_t n = 0;
  for (const auto& e : d.edges) n += e.kind == k;
  return n;
}

inline std::vector<std::string> names_of(const Diagram& d, ElementKind k) {
  std::vector<std::string> out;
  for (const auto& e : d.elements)
    if (e.kind == k) out.push_back(render(e.spec));
  return out;
}

inline std::string letters_of(const Architecture& arch) {
  std::string s;
  for (const auto& d : arch.diagrams) s += d.letter;
  return s;
}

/// Per-letter isomorphism between two architectures.
inline bool same_diagrams(const Architecture& a, const Architecture& b) { return equivalent(a, b).equal; }

/// Differences between a run result and the hand-traced fixture table.
inline std::vector<std::string> fixture_mismatches(const Architecture& arch, const std::string& fixture_file) {
  std::vector<std::string> out;
  auto fx = nlohmann::json::parse(slurp(data_path(fixture_file)));
  if (letters_of(arch) != fx["letters"].get<std::string>())
    out.push_back("letters " + letters_of(arch) + " expected " + fx["letters"].get<std::string>());
  for (const auto& [letter, spec] : fx["diagrams"].items()) {
    const auto* d = arch.find_diagram(letter[0]);
    if (!d) {
      out.push_back("missing diagram " + letter);
      continue;
    }
    std::map<std::string, std::size_t> elements, edges;
    std::map<std::string, std::vector<std::string>> names;
    for (const auto& e : d->elements) {
      auto kw = std::string(keyword_of(e.kind));
      ++elements[kw];
      names[kw].push_back(render(e.spec));
    }
    for (const auto& e : d->edges) ++edges[std::string(keyword_of(e.kind))];
    std::map<std::string, std::size_t> want_el, want_ed;
    for (const auto& [k, v] : spec["elements"].items()) want_el[k] = v.get<std::size_t>();
    for (const auto& [k, v] : spec["edges"].items()) want_ed[k] = v.get<std::size_t>();
    auto show = [](const std::map<std::string, std::size_t>& m) {
      std::string t;
      for (const auto& [k, v] : m) t += k + "=" + std::to_string(v) + " ";
      return t;
    };
    if (elements != want_el) out.push_back(letter + " elements " + show(elements) + "expected " + show(want_el));
    if (edges != want_ed) out.push_back(letter + " edges " + show(edges) + "expected " + show(want_ed));
    if (spec.contains("names")) {
      for (const auto& [k, v] : spec["names"].items()) {
        auto want = v.get<std::vector<std::string>>();
        auto got = names[k];
        std::sort(want.begin(), want.end());
        std::sort(got.begin(), got.end());
        if (got != want) {
          std::string g;
          for (const auto& n : got) g += n + " ";
          out.push_back(letter + " " + k + " names " + g);
        }
      }
    }
    if (spec.contains("multiplicity")) {
      bool found = false;
      for (const auto& e : d->edges) found = found || e.multiplicity == spec["multiplicity"].get<std::string>();
      if (!found) out.push_back(letter + " multiplicity missing");
    }
  }
  return out;
}

}  // namespace archweave::testing
