#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "archweave/change_set.hpp"
#include "archweave/error.hpp"
#include "archweave/model.hpp"
#include "archweave/model_io.hpp"
#include "archweave/rule.hpp"

namespace archweave {

// Pattern files (`*.pat`):
//
//   pattern 1 "Office"
//   placeholders { p: "Actor1", "Actor2"; i: ":ObjectA"; }
//   diagram A "Office" { ... }
//
// Category 1, 2, 3 patterns instantiate into diagrams A, Z and Q.

inline char category_letter(int category) {
  switch (category) {
    case 1: return 'A';
    case 2: return 'Z';
    case 3: return 'Q';
  }
  throw Error(ErrorKind::Schema, "pattern category must be 1, 2 or 3, got " + std::to_string(category));
}

inline constexpr std::string_view kRoleLetters = "pvilm";

inline std::optional<ElementKind> role_kind(char role) {
  switch (role) {
    case 'p': return ElementKind::Partition;
    case 'v': return ElementKind::Action;
    case 'i': return ElementKind::Instance;
    case 'l': return ElementKind::Lifeline;
  }
  return std::nullopt;  // m names message edges
}

struct Pattern {
  std::string name;
  int category = 1;
  std::vector<std::pair<char, std::vector<NameSpec>>> placeholders;
  Architecture templ;  // exactly one diagram

  char letter() const { return category_letter(category); }
  const Diagram& diagram() const { return templ.diagrams.front(); }

  std::vector<NameSpec> placeholders_for(char role) const {
    for (const auto& [r, list] : placeholders)
      if (r == role) return list;
    return {};
  }
};

namespace detail {

// Every field the placeholder declares is present and equal in `spec`.
inline bool declares_match(const NameSpec& placeholder, const NameSpec& spec) {
  auto field = [](const auto& want, const auto& have) { return !want || want == have; };
  return !placeholder.empty() && field(placeholder.name, spec.name) && field(placeholder.state, spec.state) &&
         field(placeholder.classifier, spec.classifier);
}

inline NameSpec substitute(const NameSpec& placeholder, const NameSpec& replacement, NameSpec spec) {
  if (placeholder.name && replacement.name) spec.name = replacement.name;
  if (placeholder.state && replacement.state) spec.state = replacement.state;
  if (placeholder.classifier && replacement.classifier) spec.classifier = replacement.classifier;
  return spec;
}

inline NameSpec fill(NameSpec explicit_value, const NameSpec& derived) {
  if (!explicit_value.name) explicit_value.name = derived.name;
  if (!explicit_value.state) explicit_value.state = derived.state;
  if (!explicit_value.classifier) explicit_value.classifier = derived.classifier;
  return explicit_value;
}

inline void validate_pattern(const Pattern& p) {
  if (p.templ.diagrams.size() != 1) throw Error(ErrorKind::Schema, "pattern " + p.name + " needs one diagram");
  if (p.diagram().letter != p.letter())
    throw Error(ErrorKind::Schema, "pattern " + p.name + " of category " + std::to_string(p.category) +
                                       " must use diagram " + std::string(1, p.letter()));
  for (const auto& [role, list] : p.placeholders) {
    for (const auto& ph : list) {
      bool found = false;
      if (auto kind = role_kind(role)) {
        for (const auto& e : p.diagram().elements) found = found || (e.kind == *kind && declares_match(ph, e.spec));
      } else {
        for (const auto& e : p.diagram().edges) found = found || (e.label && ph.name && *e.label == *ph.name);
      }
      if (!found)
        throw Error(ErrorKind::Schema, "placeholder \"" + render(ph) + "\" does not occur in pattern " + p.name);
    }
  }
}

}  // namespace detail

/// Image of a template name under a rename map; the first matching
/// placeholder of the role wins.
inline NameSpec apply_renames(const RenameMap& map, char role, const NameSpec& spec) {
  for (const auto& r : map)
    if (r.role == role && detail::declares_match(r.placeholder, spec))
      return detail::substitute(r.placeholder, r.replacement, spec);
  return spec;
}

inline Pattern parse_pattern(std::string_view text) {
  detail::ModelReader reader(text);
  auto& lex = reader.lexer();
  using detail::Token;
  Pattern p;
  lex.expect_word("pattern");
  p.category = std::stoi(lex.expect(Token::Int, "pattern category").text);
  if (p.category < 1 || p.category > 3) lex.fail(lex.peek(), "pattern category must be 1, 2 or 3");
  p.name = lex.expect(Token::String, "pattern name").text;
  if (lex.accept_word("placeholders")) {
    lex.expect(Token::LBrace, "'{'");
    while (lex.peek().type == Token::Word) {
      Token role = lex.next();
      if (role.text.size() != 1 || kRoleLetters.find(role.text[0]) == std::string_view::npos)
        lex.fail(role, "placeholder role must be one of p, v, i, l, m");
      lex.expect(Token::Colon, "':'");
      std::vector<NameSpec> list;
      do {
        Token name = lex.expect(Token::String, "placeholder name");
        try {
          list.push_back(parse_name_spec(name.text));
        } catch (const Error& e) {
          lex.fail(name, e.what());
        }
      } while (lex.peek().type == Token::Comma && (lex.next(), true));
      lex.expect(Token::Semi, "';'");
      p.placeholders.emplace_back(role.text[0], std::move(list));
    }
    lex.expect(Token::RBrace, "'}'");
  }
  p.templ = reader.read_diagram_only();
  p.templ.name = p.name;
  detail::validate_pattern(p);
  return p;
}

class PatternLibrary {
public:
  void add(Pattern p) {
    if (find(p.category, p.name))
      throw Error(ErrorKind::Conflict,
                  "duplicate pattern " + std::to_string(p.category) + " \"" + p.name + "\"");
    patterns_.push_back(std::move(p));
  }

  const Pattern* find(int category, std::string_view name) const {
    for (const auto& p : patterns_)
      if (p.category == category && p.name == name) return &p;
    return nullptr;
  }

  const Pattern& get(int category, std::string_view name) const {
    if (const auto* p = find(category, name)) return *p;
    throw Error(ErrorKind::PatternNotFound,
                "no pattern \"" + std::string(name) + "\" in category " + std::to_string(category));
  }

  const std::vector<Pattern>& patterns() const { return patterns_; }

private:
  std::vector<Pattern> patterns_;
};

namespace detail {

inline constexpr std::string_view kOfficePattern = R"(pattern 1 "Office"
placeholders { p: "Actor1", "Actor2", "Actor3"; i: ":ObjectA", ":ObjectZ"; }
diagram A "Office" {
  partition "Actor1" {
    activity "Send_request"
    activity "Receive"
  }
  partition "Actor2" {
    activity "Registration"
    activity "Send_decision"
  }
  partition "Actor3" {
    activity "Approve"
  }
  instance "[Sent]:ObjectA"
  instance "[Registered]:ObjectA"
  instance "[Approved]:ObjectA"
  instance "[Approved]:ObjectZ"
  instance "[Sent]:ObjectZ"
  instance "[Received]:ObjectZ"
  edge control "Send_request" -> "Registration"
  edge control "Registration" -> "Approve"
  edge control "Approve" -> "Send_decision"
  edge control "Send_decision" -> "Receive"
  edge data "Send_request" -> "[Sent]:ObjectA"
  edge data "[Sent]:ObjectA" -> "Registration"
  edge data "Registration" -> "[Registered]:ObjectA"
  edge data "[Registered]:ObjectA" -> "Approve"
  edge data "Approve" -> "[Approved]:ObjectA"
  edge data "Approve" -> "[Approved]:ObjectZ"
  edge data "[Approved]:ObjectA" -> "Send_decision"
  edge data "[Approved]:ObjectZ" -> "Send_decision"
  edge data "Send_decision" -> "[Sent]:ObjectZ"
  edge data "[Sent]:ObjectZ" -> "Receive"
  edge data "Receive" -> "[Received]:ObjectZ"
}
)";

inline constexpr std::string_view kRequestRegistrationPattern = R"(pattern 2 "RequestRegistration"
placeholders { i: "[Input]:ObjectA", "[Output]:ObjectZ"; }
diagram Z "RequestRegistration" {
  partition "System" {
    activity "1.Form_display"
    activity "3.Data_verification"
    activity "5.Data_recording"
  }
  partition "User" {
    activity "2.Data_completion"
    activity "4.Record_approval"
    activity "6.End_of_action"
  }
  instance "[Input]:ObjectA"
  instance "[Output]:ObjectZ"
  edge control "1.Form_display" -> "2.Data_completion"
  edge control "2.Data_completion" -> "3.Data_verification"
  edge control "3.Data_verification" -> "4.Record_approval"
  edge control "4.Record_approval" -> "5.Data_recording"
  edge control "5.Data_recording" -> "6.End_of_action"
  edge data "[Input]:ObjectA" -> "1.Form_display"
  edge data "5.Data_recording" -> "[Output]:ObjectZ"
}
)";

inline constexpr std::string_view kRequestDownloadingPattern = R"(pattern 3 "RequestDownloading"
diagram Q "RequestDownloading" {
  lifeline "Registration"
  lifeline ":MQRabbit"
  lifeline "Database"
  edge message "Registration" -> ":MQRabbit" label "downLoad<Requests>" returns "Request"
  edge message ":MQRabbit" -> "Database" label "downLoad<Request>" returns "Request"
}
)";

}  // namespace detail

inline const PatternLibrary& builtin_patterns() {
  static const PatternLibrary lib = [] {
    PatternLibrary l;
    l.add(parse_pattern(detail::kOfficePattern));
    l.add(parse_pattern(detail::kRequestRegistrationPattern));
    l.add(parse_pattern(detail::kRequestDownloadingPattern));
    return l;
  }();
  return lib;
}

/// Built-ins plus every `*.pat` file of `dir` (sorted by file name).
inline PatternLibrary load_library(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  PatternLibrary lib = builtin_patterns();
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::Io, "pattern directory not readable: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pat") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      lib.add(parse_pattern(ss.str()));
    } catch (const Error& e) {
      if (e.line()) throw Error(e.kind(), f.filename().string() + ": " + e.what(), *e.line(), *e.column());
      throw Error(e.kind(), f.filename().string() + ": " + e.what());
    }
  }
  return lib;
}

namespace detail {

inline void push_unique(std::vector<Id>& ids, Id id) {
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
}

// Keep the first n-1 and the last value: input objects first, output last.
inline std::vector<NameSpec> truncate_io(std::vector<NameSpec> values, std::size_t n) {
  if (values.size() <= n) return values;
  if (n == 0) return {};
  std::vector<NameSpec> out(values.begin(), values.begin() + static_cast<long>(n - 1));
  out.push_back(values.back());
  return out;
}

inline std::vector<NameSpec> derived_values(const Architecture& arch, const Binding& b, char role) {
  const Diagram* d = arch.owner(b.anchor);
  if (!d) return {};
  auto wanted = [&](const Element& e) {
    switch (role) {
      case 'p': return e.kind == ElementKind::Actor || e.kind == ElementKind::Partition;
      case 'v': return e.kind == ElementKind::Action;
      case 'i': return e.kind == ElementKind::Instance;
      case 'l': return e.kind == ElementKind::Lifeline;
    }
    return false;
  };
  std::vector<Id> ids;
  for (auto id : b.source_ids())
    if (const auto* e = d->element(id); e && wanted(*e)) push_unique(ids, id);
  for (const auto& edge : d->edges) {
    if (edge.to == b.anchor)
      if (const auto* e = d->element(edge.from); e && wanted(*e)) push_unique(ids, e->id);
    if (edge.from == b.anchor)
      if (const auto* e = d->element(edge.to); e && wanted(*e)) push_unique(ids, e->id);
  }
  std::vector<NameSpec> out;
  for (auto id : ids) {
    const auto* e = d->element(id);
    if (role == 'i') {
      out.push_back(NameSpec{std::nullopt, e->spec.state, class_of(*d, *e)});
    } else {
      out.push_back(NameSpec{e->spec.display(), std::nullopt, std::nullopt});
    }
  }
  if (out.empty() && role == 'i') {
    for (auto id : b.source_ids()) {
      const auto* e = d->element(id);
      if (!e) continue;
      if (e->kind == ElementKind::Class || e->kind == ElementKind::Region || e->kind == ElementKind::Event) {
        out.assign(2, NameSpec{std::nullopt, std::nullopt, class_of(*d, *e)});
        break;
      }
    }
  }
  return out;
}

inline std::vector<NameSpec> explicit_values(const DiagramPart& part, char role) {
  std::vector<NameSpec> out;
  auto visit = [&](const auto& self, const std::vector<Item>& items) -> void {
    for (const auto& item : items) {
      if (const auto* g = item.group()) {
        for (const auto& alt : g->alternatives) self(self, alt);
        continue;
      }
      const auto& el = *item.element();
      if (el.letter != role) continue;
      for (const auto& arg : el.args) {
        if (const auto* ns = std::get_if<NameSpec>(&arg)) out.push_back(*ns);
        if (const auto* sl = std::get_if<StateList>(&arg))
          for (const auto& s : sl->states) out.push_back(NameSpec{std::nullopt, s, std::nullopt});
      }
    }
  };
  visit(visit, part.items);
  return out;
}

inline bool part_has_letter(const std::vector<Item>& items, char letter) {
  for (const auto& item : items) {
    if (const auto* el = item.element(); el && el->letter == letter) return true;
    if (const auto* g = item.group())
      for (const auto& alt : g->alternatives)
        if (part_has_letter(alt, letter)) return true;
  }
  return false;
}

}  // namespace detail

/// Placeholder renames for one pattern-driven target part. Only roles whose
/// letter appears in the part are renamed; explicit arguments come first and
/// are completed field by field from the bound source elements.
inline RenameMap build_rename_map(const Architecture& arch, const Pattern& pattern, const Binding& binding,
                                  const DiagramPart& part) {
  RenameMap map;
  for (const auto& [role, placeholders] : pattern.placeholders) {
    if (!detail::part_has_letter(part.items, role)) continue;
    auto given = detail::explicit_values(part, role);
    if (given.size() > placeholders.size())
      throw Error(ErrorKind::Arity, std::to_string(given.size()) + " " + std::string(1, role) +
                                        " values for " + std::to_string(placeholders.size()) +
                                        " placeholders of pattern " + pattern.name);
    auto derived = detail::truncate_io(detail::derived_values(arch, binding, role), placeholders.size());
    for (std::size_t j = 0; j < placeholders.size(); ++j) {
      std::optional<NameSpec> value;
      if (j < given.size()) {
        value = j < derived.size() ? detail::fill(given[j], derived[j]) : given[j];
      } else if (j < derived.size()) {
        value = derived[j];
      }
      if (value && apply_renames({{role, placeholders[j], *value}}, role, placeholders[j]) != placeholders[j])
        map.push_back({role, placeholders[j], *value});
    }
  }
  return map;
}

namespace detail {

inline void replace_id(std::vector<Id>& ids, Id from, Id to) {
  std::vector<Id> out;
  for (auto id : ids) push_unique(out, id == from ? to : id);
  ids = std::move(out);
}

// Folds element `from` into `to` (same diagram): edges, members and traces
// are redirected, duplicates dropped.
inline void merge_element_into(Architecture& arch, Diagram& d, Id from, Id to) {
  for (auto& diagram : arch.diagrams) {
    for (auto& e : diagram.edges) {
      if (e.from == from) e.from = to;
      if (e.to == from) e.to = to;
    }
    std::vector<Edge> kept;
    for (auto& e : diagram.edges) {
      bool dup = std::any_of(kept.begin(), kept.end(), [&](const Edge& k) {
        return k.kind == e.kind && k.from == e.from && k.to == e.to && k.label == e.label;
      });
      if (!dup) kept.push_back(std::move(e));
    }
    diagram.edges = std::move(kept);
  }
  for (auto& e : d.elements)
    if (e.container == from) e.container = to;
  for (auto& t : arch.traces) {
    if (t.anchor == from) t.anchor = to;
    replace_id(t.sources, from, to);
    replace_id(t.targets, from, to);
  }
  d.elements.erase(std::remove_if(d.elements.begin(), d.elements.end(), [&](const Element& e) { return e.id == from; }),
                   d.elements.end());
}

}  // namespace detail

/// Copies the pattern template into its diagram under the accumulated
/// renames of earlier uses of the same pattern. Elements that still carry a
/// name the new renames replace are renamed in place.
inline void instantiate(Architecture& arch, const Pattern& pattern, const RenameMap& renames, ChangeSet& cs) {
  char letter = pattern.letter();
  if (!arch.find_diagram(letter)) cs.created_diagrams.push_back(letter);
  auto& d = ensure_diagram(arch, letter);
  auto use_it = std::find_if(arch.pattern_uses.begin(), arch.pattern_uses.end(), [&](const PatternUse& u) {
    return u.category == pattern.category && u.name == pattern.name && u.diagram == letter;
  });
  if (use_it == arch.pattern_uses.end()) {
    arch.pattern_uses.push_back(PatternUse{pattern.category, pattern.name, letter, {}});
    use_it = arch.pattern_uses.end() - 1;
  }
  RenameMap old_map = use_it->renames;
  RenameMap new_map = old_map;
  for (const auto& r : renames) {
    auto it = std::find_if(new_map.begin(), new_map.end(), [&](const RenameEntry& x) {
      return x.role == r.role && x.placeholder == r.placeholder;
    });
    if (it == new_map.end())
      new_map.push_back(r);
    else
      *it = r;
  }
  const auto& tmpl = pattern.diagram();
  if (new_map != old_map) {
    for (const auto& te : tmpl.elements) {
      char role = letter_of(te.kind);
      NameSpec before = apply_renames(old_map, role, te.spec);
      NameSpec after = apply_renames(new_map, role, te.spec);
      if (before == after) continue;
      const auto* current = d.find_by_key(te.kind, before, te.stereotype);
      if (!current) continue;
      Id id = current->id;
      if (const auto* existing = d.find_by_key(te.kind, after, te.stereotype)) {
        detail::merge_element_into(arch, d, id, existing->id);
      } else {
        d.element(id)->spec = after;
      }
      ++cs.renamed;
    }
    for (const auto& te : tmpl.edges) {
      if (!te.label) continue;
      NameSpec label{*te.label, std::nullopt, std::nullopt};
      auto before = apply_renames(old_map, 'm', label).name;
      auto after = apply_renames(new_map, 'm', label).name;
      if (before == after) continue;
      for (auto& e : d.edges)
        if (e.kind == te.kind && e.label == before) {
          e.label = after;
          ++cs.renamed;
        }
    }
    use_it->renames = new_map;
  }
  std::map<std::uint32_t, Id> image;
  auto copy = [&](const Element& te) {
    std::optional<Id> container;
    if (te.container) container = image.at(te.container->value);
    auto r = find_or_create_element(arch, letter, te.kind, apply_renames(new_map, letter_of(te.kind), te.spec),
                                    te.stereotype, container);
    image[te.id.value] = r.id;
    cs.note_element(r);
  };
  for (const auto& te : tmpl.elements)
    if (!te.container) copy(te);
  for (const auto& te : tmpl.elements)
    if (te.container) copy(te);
  for (const auto& te : tmpl.edges) {
    std::optional<std::string> label = te.label;
    if (label) label = apply_renames(new_map, 'm', NameSpec{*label, std::nullopt, std::nullopt}).name;
    cs.note_edge(create_edge(arch, letter, te.kind, image.at(te.from.value), image.at(te.to.value), label,
                             te.multiplicity, te.returns));
  }
  cs.trace.pattern = pattern.name;
}

}  // namespace archweave
