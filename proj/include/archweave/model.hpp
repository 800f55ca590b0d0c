#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "archweave/error.hpp"
#include "archweave/name_spec.hpp"
#include "archweave/rule.hpp"

namespace archweave {

// ---------------------------------------------------------------------------
// Diagram kinds: the 13 letters of the layered architecture model.

enum class View { Context, Business, System, Development };
enum class Family { Activity, UseCase, Class, State, Sequence, Component };

struct DiagramKind {
  char letter;
  View view;
  std::string_view layer;
  Family family;
  std::string_view display_name;
  int layer_rank;  // sweep order of the fixpoint driver
};

inline constexpr std::array<DiagramKind, 13> kDiagramKinds{{
    {'X', View::Context, "Context", Family::Activity, "Context Diagram", 0},
    {'R', View::Context, "Process Decomposition", Family::Activity,
     "Business Use Case Process Decomposition Diagram", 1},
    {'B', View::Context, "Process Decomposition", Family::UseCase, "Business Use Case Diagram", 2},
    {'A', View::Business, "Business Process", Family::Activity, "Business Use Case Realization Diagram", 3},
    {'U', View::Business, "Logic", Family::UseCase, "System Use Case Diagram", 4},
    {'C', View::Business, "Logic", Family::Class, "Business Class Diagram", 4},
    {'S', View::Business, "Logic", Family::State, "Business State Machine Diagram", 4},
    {'Z', View::System, "User", Family::Activity, "System Use Case Realization Diagram", 5},
    {'Y', View::System, "Internal", Family::UseCase, "Implementation Use Case Diagram", 6},
    {'J', View::System, "Internal", Family::Class, "System Class Diagram", 6},
    {'T', View::System, "Internal", Family::State, "System State Machine Diagram", 6},
    {'Q', View::Development, "Sequence", Family::Sequence, "Implementation Use Case Realization Diagram", 7},
    {'M', View::Development, "Component", Family::Component, "Component Diagram", 8},
}};

inline const DiagramKind& diagram_kind(char letter) {
  for (const auto& k : kDiagramKinds)
    if (k.letter == letter) return k;
  throw Error(ErrorKind::NotFound, std::string("unknown diagram letter '") + letter + "'");
}

inline std::size_t table_position(char letter) {
  for (std::size_t i = 0; i < kDiagramKinds.size(); ++i)
    if (kDiagramKinds[i].letter == letter) return i;
  throw Error(ErrorKind::NotFound, std::string("unknown diagram letter '") + letter + "'");
}

inline std::string_view to_string(View v) {
  switch (v) {
    case View::Context: return "Context";
    case View::Business: return "Business";
    case View::System: return "System";
    case View::Development: return "Development";
  }
  return "";
}

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Activity: return "Activity";
    case Family::UseCase: return "UseCase";
    case Family::Class: return "Class";
    case Family::State: return "State";
    case Family::Sequence: return "Sequence";
    case Family::Component: return "Component";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Element and edge kinds.

enum class ElementKind { Event, Action, Class, Instance, Actor, UseCase, ControlNode, Region, State,
                         Lifeline, Component, Partition };

inline constexpr std::array<std::pair<ElementKind, char>, 12> kElementLetters{{
    {ElementKind::Event, 'e'},     {ElementKind::Action, 'v'},      {ElementKind::Class, 'c'},
    {ElementKind::Instance, 'i'},  {ElementKind::Actor, 'a'},       {ElementKind::UseCase, 'u'},
    {ElementKind::ControlNode, 'n'}, {ElementKind::Region, 'r'},    {ElementKind::State, 's'},
    {ElementKind::Lifeline, 'l'},  {ElementKind::Component, 'q'},   {ElementKind::Partition, 'p'},
}};

inline char letter_of(ElementKind k) {
  for (auto [kind, letter] : kElementLetters)
    if (kind == k) return letter;
  return '?';
}

inline std::optional<ElementKind> element_kind_from_letter(char c) {
  for (auto [kind, letter] : kElementLetters)
    if (letter == c) return kind;
  return std::nullopt;
}

/// Keyword used by the model file format.
inline std::string_view keyword_of(ElementKind k) {
  switch (k) {
    case ElementKind::Event: return "event";
    case ElementKind::Action: return "activity";
    case ElementKind::Class: return "class";
    case ElementKind::Instance: return "instance";
    case ElementKind::Actor: return "actor";
    case ElementKind::UseCase: return "usecase";
    case ElementKind::ControlNode: return "node";
    case ElementKind::Region: return "region";
    case ElementKind::State: return "state";
    case ElementKind::Lifeline: return "lifeline";
    case ElementKind::Component: return "component";
    case ElementKind::Partition: return "partition";
  }
  return "";
}

inline std::optional<ElementKind> element_kind_from_keyword(std::string_view w) {
  if (w == "action") return ElementKind::Action;
  for (auto [kind, letter] : kElementLetters)
    if (keyword_of(kind) == w) return kind;
  return std::nullopt;
}

enum class EdgeKind { ControlFlow, DataFlow, Association, Include, Extend, Transition, Message, Dependency,
                      Realization, Containment };

inline constexpr std::array<EdgeKind, 10> kEdgeKinds{
    EdgeKind::ControlFlow, EdgeKind::DataFlow,  EdgeKind::Association, EdgeKind::Include,
    EdgeKind::Extend,      EdgeKind::Transition, EdgeKind::Message,    EdgeKind::Dependency,
    EdgeKind::Realization, EdgeKind::Containment};

inline std::string_view keyword_of(EdgeKind k) {
  switch (k) {
    case EdgeKind::ControlFlow: return "control";
    case EdgeKind::DataFlow: return "data";
    case EdgeKind::Association: return "association";
    case EdgeKind::Include: return "include";
    case EdgeKind::Extend: return "extend";
    case EdgeKind::Transition: return "transition";
    case EdgeKind::Message: return "message";
    case EdgeKind::Dependency: return "dependency";
    case EdgeKind::Realization: return "realization";
    case EdgeKind::Containment: return "containment";
  }
  return "";
}

inline std::optional<EdgeKind> edge_kind_from_keyword(std::string_view w) {
  for (auto k : kEdgeKinds)
    if (keyword_of(k) == w) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Compatibility tables.

inline bool element_allowed(Family family, ElementKind kind) {
  using K = ElementKind;
  switch (family) {
    case Family::Activity:
      return kind == K::Event || kind == K::Action || kind == K::Instance || kind == K::ControlNode ||
             kind == K::Partition;
    case Family::UseCase: return kind == K::Actor || kind == K::UseCase;
    case Family::Class: return kind == K::Class;
    case Family::State: return kind == K::Region || kind == K::State || kind == K::ControlNode;
    case Family::Sequence: return kind == K::Lifeline;
    case Family::Component: return kind == K::Component;
  }
  return false;
}

struct EdgeRule {
  Family family;
  EdgeKind kind;
  ElementKind from;
  ElementKind to;
};

inline constexpr std::array<EdgeRule, 17> kEdgeRules{{
    {Family::Activity, EdgeKind::ControlFlow, ElementKind::Event, ElementKind::Action},
    {Family::Activity, EdgeKind::ControlFlow, ElementKind::Action, ElementKind::Action},
    {Family::Activity, EdgeKind::ControlFlow, ElementKind::ControlNode, ElementKind::Action},
    {Family::Activity, EdgeKind::ControlFlow, ElementKind::Action, ElementKind::ControlNode},
    {Family::Activity, EdgeKind::DataFlow, ElementKind::Action, ElementKind::Instance},
    {Family::Activity, EdgeKind::DataFlow, ElementKind::Instance, ElementKind::Action},
    {Family::UseCase, EdgeKind::Association, ElementKind::Actor, ElementKind::UseCase},
    {Family::UseCase, EdgeKind::Include, ElementKind::UseCase, ElementKind::UseCase},
    {Family::UseCase, EdgeKind::Extend, ElementKind::UseCase, ElementKind::UseCase},
    {Family::Class, EdgeKind::Association, ElementKind::Class, ElementKind::Class},
    {Family::State, EdgeKind::Transition, ElementKind::State, ElementKind::State},
    {Family::State, EdgeKind::Transition, ElementKind::ControlNode, ElementKind::State},
    {Family::State, EdgeKind::Transition, ElementKind::State, ElementKind::ControlNode},
    {Family::State, EdgeKind::Containment, ElementKind::Region, ElementKind::State},
    {Family::Sequence, EdgeKind::Message, ElementKind::Lifeline, ElementKind::Lifeline},
    {Family::Component, EdgeKind::Dependency, ElementKind::Component, ElementKind::Component},
    {Family::UseCase, EdgeKind::Realization, ElementKind::UseCase, ElementKind::UseCase},
}};

inline bool edge_allowed(Family family, EdgeKind kind, ElementKind from, ElementKind to) {
  return std::any_of(kEdgeRules.begin(), kEdgeRules.end(), [&](const EdgeRule& r) {
    return r.family == family && r.kind == kind && r.from == from && r.to == to;
  });
}

// ---------------------------------------------------------------------------
// Graph content.

/// Elements and edges draw from one counter per architecture, so an Id
/// names exactly one of them.
struct Id {
  std::uint32_t value = 0;
  auto operator<=>(const Id&) const = default;
};

struct Element {
  Id id;
  ElementKind kind = ElementKind::Action;
  NameSpec spec;
  std::optional<std::string> stereotype;
  std::optional<Id> container;        // partition or region
  std::vector<std::string> scenario;  // use cases
  std::vector<NameSpec> operations;   // classes

  std::string label() const {
    std::string s = std::string(1, letter_of(kind)) + " " + render(spec);
    if (stereotype) s += " <<" + *stereotype + ">>";
    return s;
  }
};

struct Edge {
  Id id;
  EdgeKind kind = EdgeKind::ControlFlow;
  Id from;
  Id to;
  std::optional<std::string> label;
  std::optional<std::string> multiplicity;
  std::optional<std::string> returns;  // message return classifier
};

struct Diagram {
  char letter = 'X';
  std::string name;
  std::vector<Element> elements;  // creation order
  std::vector<Edge> edges;

  const DiagramKind& kind() const { return diagram_kind(letter); }

  Element* element(Id id) {
    auto it = std::find_if(elements.begin(), elements.end(), [&](const Element& e) { return e.id == id; });
    return it == elements.end() ? nullptr : &*it;
  }
  const Element* element(Id id) const { return const_cast<Diagram*>(this)->element(id); }

  Edge* edge(Id id) {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.id == id; });
    return it == edges.end() ? nullptr : &*it;
  }
  const Edge* edge(Id id) const { return const_cast<Diagram*>(this)->edge(id); }

  const Element* find_by_key(ElementKind kind, const NameSpec& spec,
                             const std::optional<std::string>& stereotype) const {
    for (const auto& e : elements)
      if (e.kind == kind && e.spec == spec && e.stereotype == stereotype) return &e;
    return nullptr;
  }
};

/// Rename applied to one pattern placeholder. `role` is the rule letter
/// (p, v, i, l, m) whose elements the placeholder names.
struct RenameEntry {
  char role = 'p';
  NameSpec placeholder;
  NameSpec replacement;
  bool operator==(const RenameEntry&) const = default;
};
using RenameMap = std::vector<RenameEntry>;

/// Accumulated renames of a pattern instantiated into a diagram, so later
/// pattern-driven rules on the same pattern refine instead of duplicating.
struct PatternUse {
  int category = 1;
  std::string name;
  char diagram = 'A';
  RenameMap renames;
  bool operator==(const PatternUse&) const = default;
};

/// A rule placed on a (possibly not yet existing) element of a diagram.
/// host_kind is a rule letter; `z` and `m` place the rule on an edge.
struct Attachment {
  char host_diagram = 'X';
  std::optional<char> host_kind;
  NameSpec host_name;
  std::string rule_text;
  RuleAst rule;
  bool fired = false;

  std::string describe() const {
    std::string s = std::string(1, host_diagram);
    if (host_kind) s += std::string(1, ' ') + *host_kind;
    return s + " \"" + render(host_name) + "\": " + rule_text;
  }
};

/// Builds an attachment, parsing the rule text and checking that the host
/// diagram is the rule's source diagram.
inline Attachment make_attachment(char host_diagram, std::optional<char> host_kind, NameSpec host_name,
                                  std::string rule_text) {
  Attachment a;
  a.host_diagram = host_diagram;
  a.host_kind = host_kind;
  a.host_name = std::move(host_name);
  a.rule = parse_rule(rule_text);
  a.rule_text = std::move(rule_text);
  if (a.rule.source().diagram != host_diagram)
    throw Error(ErrorKind::Schema, std::string("rule '") + a.rule_text + "' has source diagram " +
                                       a.rule.source().diagram + " but is placed on diagram " + host_diagram);
  return a;
}

struct TraceLink {
  std::string rule_text;
  Id anchor;
  std::vector<Id> sources;
  std::vector<Id> targets;  // elements and edges created or merged
  int pass = 0;
  std::optional<std::string> pattern;
  bool operator==(const TraceLink&) const = default;
};

class Architecture {
public:
  std::string name;
  std::vector<Diagram> diagrams;  // layer order, at most one per letter
  std::vector<Attachment> attachments;
  std::vector<TraceLink> traces;
  std::vector<PatternUse> pattern_uses;

  Id next_id() { return Id{++last_id_}; }
  std::uint32_t last_id() const { return last_id_; }
  /// Used by readers that restore explicit ids.
  void reserve_id(Id id) { last_id_ = std::max(last_id_, id.value); }

  Diagram* find_diagram(char letter) {
    auto it = std::find_if(diagrams.begin(), diagrams.end(), [&](const Diagram& d) { return d.letter == letter; });
    return it == diagrams.end() ? nullptr : &*it;
  }
  const Diagram* find_diagram(char letter) const { return const_cast<Architecture*>(this)->find_diagram(letter); }

  Diagram& diagram(char letter) {
    if (auto* d = find_diagram(letter)) return *d;
    throw Error(ErrorKind::NotFound, std::string("no diagram ") + letter);
  }
  const Diagram& diagram(char letter) const { return const_cast<Architecture*>(this)->diagram(letter); }

  Element* element(Id id) {
    for (auto& d : diagrams)
      if (auto* e = d.element(id)) return e;
    return nullptr;
  }
  const Element* element(Id id) const { return const_cast<Architecture*>(this)->element(id); }

  Edge* edge(Id id) {
    for (auto& d : diagrams)
      if (auto* e = d.edge(id)) return e;
    return nullptr;
  }
  const Edge* edge(Id id) const { return const_cast<Architecture*>(this)->edge(id); }

  /// Diagram holding the element or edge with this id.
  const Diagram* owner(Id id) const {
    for (const auto& d : diagrams)
      if (d.element(id) || d.edge(id)) return &d;
    return nullptr;
  }

private:
  std::uint32_t last_id_ = 0;
};

// ---------------------------------------------------------------------------
// Operations.

/// Returns the diagram for `letter`, creating it with its standard
/// display name, in layer order, when absent.
inline Diagram& ensure_diagram(Architecture& arch, char letter) {
  const auto& kind = diagram_kind(letter);
  if (auto* d = arch.find_diagram(letter)) return *d;
  auto pos = table_position(letter);
  auto it = std::find_if(arch.diagrams.begin(), arch.diagrams.end(),
                         [&](const Diagram& d) { return table_position(d.letter) > pos; });
  Diagram d;
  d.letter = letter;
  d.name = std::string(kind.display_name);
  return *arch.diagrams.insert(it, std::move(d));
}

struct ElementResult {
  Id id;
  bool created = false;
  bool refined = false;  // an unset container was filled in
};

inline ElementResult find_or_create_element(Architecture& arch, char letter, ElementKind kind, const NameSpec& spec,
                                            const std::optional<std::string>& stereotype = std::nullopt,
                                            std::optional<Id> container = std::nullopt) {
  auto& d = arch.diagram(letter);
  if (!element_allowed(d.kind().family, kind))
    throw Error(ErrorKind::Schema, std::string(keyword_of(kind)) + " elements are not allowed in " +
                                       std::string(to_string(d.kind().family)) + " diagram " + letter);
  if (container) {
    const auto* c = d.element(*container);
    if (!c) throw Error(ErrorKind::NotFound, "container element is not in diagram " + std::string(1, letter));
    bool ok = (c->kind == ElementKind::Partition && d.kind().family == Family::Activity) ||
              (c->kind == ElementKind::Region && d.kind().family == Family::State);
    if (!ok) throw Error(ErrorKind::Schema, "container must be a partition or region, got " + c->label());
  }
  if (const auto* existing = d.find_by_key(kind, spec, stereotype)) {
    auto* e = d.element(existing->id);
    ElementResult r{e->id, false, false};
    if (container && e->container != container) {
      if (e->container) {
        throw Error(ErrorKind::Conflict, e->label() + " is already contained in " +
                                             d.element(*e->container)->label() + ", not " +
                                             d.element(*container)->label());
      }
      e->container = container;
      r.refined = true;
    }
    return r;
  }
  Element e;
  e.id = arch.next_id();
  e.kind = kind;
  e.spec = spec;
  e.stereotype = stereotype;
  e.container = container;
  d.elements.push_back(std::move(e));
  return {d.elements.back().id, true, false};
}

struct EdgeResult {
  Id id;
  bool created = false;
};

/// Creates (or merges with) an edge stored in diagram `letter`. Only
/// realization edges may point into another diagram (Y use case to U use case).
inline EdgeResult create_edge(Architecture& arch, char letter, EdgeKind kind, Id from, Id to,
                              const std::optional<std::string>& label = std::nullopt,
                              const std::optional<std::string>& multiplicity = std::nullopt,
                              const std::optional<std::string>& returns = std::nullopt) {
  auto& d = arch.diagram(letter);
  const auto* f = d.element(from);
  if (!f) throw Error(ErrorKind::NotFound, "edge source is not an element of diagram " + std::string(1, letter));
  const Element* t = d.element(to);
  if (!t && kind == EdgeKind::Realization) {
    const auto* owner = arch.owner(to);
    if (owner && letter == 'Y' && owner->letter == 'U') t = owner->element(to);
  }
  if (!t) throw Error(ErrorKind::NotFound, "edge target is not an element of diagram " + std::string(1, letter));
  auto family = d.kind().family;
  // Use-case associations are stored actor -> use case.
  if (kind == EdgeKind::Association && family == Family::UseCase && f->kind == ElementKind::UseCase &&
      t->kind == ElementKind::Actor) {
    std::swap(from, to);
    std::swap(f, t);
  }
  if (!edge_allowed(family, kind, f->kind, t->kind))
    throw Error(ErrorKind::Schema, std::string(keyword_of(kind)) + " edge not allowed from " + f->label() + " to " +
                                       t->label() + " in diagram " + letter);
  if (multiplicity) {
    auto dots = multiplicity->find("..");
    bool ok = dots != std::string::npos && dots > 0;
    auto lo = ok ? multiplicity->substr(0, dots) : std::string{};
    auto hi = ok ? multiplicity->substr(dots + 2) : std::string{};
    ok = ok && std::all_of(lo.begin(), lo.end(), ::isdigit) && !hi.empty() &&
         (hi == "*" || (std::all_of(hi.begin(), hi.end(), ::isdigit) && std::stoul(hi) >= std::stoul(lo)));
    if (!ok) throw Error(ErrorKind::Schema, "bad multiplicity '" + *multiplicity + "'");
  }
  for (const auto& e : d.edges)
    if (e.kind == kind && e.from == from && e.to == to && e.label == label) return {e.id, false};
  Edge e;
  e.id = arch.next_id();
  e.kind = kind;
  e.from = from;
  e.to = to;
  e.label = label;
  e.multiplicity = multiplicity;
  e.returns = returns;
  d.edges.push_back(std::move(e));
  return {d.edges.back().id, true};
}

/// Re-checks every element and edge of an architecture against the
/// compatibility tables. Returns one message per violation.
inline std::vector<std::string> validate(const Architecture& arch) {
  std::vector<std::string> problems;
  for (const auto& d : arch.diagrams) {
    auto family = d.kind().family;
    for (const auto& e : d.elements) {
      if (!element_allowed(family, e.kind))
        problems.push_back(std::string(1, d.letter) + ": element not allowed: " + e.label());
      if (e.container) {
        const auto* c = d.element(*e.container);
        if (!c || (c->kind != ElementKind::Partition && c->kind != ElementKind::Region))
          problems.push_back(std::string(1, d.letter) + ": bad container for " + e.label());
      }
      if (!e.scenario.empty() && e.kind != ElementKind::UseCase)
        problems.push_back(std::string(1, d.letter) + ": scenario on non-use-case " + e.label());
      if (!e.operations.empty() && e.kind != ElementKind::Class)
        problems.push_back(std::string(1, d.letter) + ": operations on non-class " + e.label());
    }
    for (const auto& e : d.edges) {
      const auto* f = d.element(e.from);
      const auto* t = d.element(e.to);
      if (!t && e.kind == EdgeKind::Realization) t = arch.element(e.to);
      if (!f || !t) {
        problems.push_back(std::string(1, d.letter) + ": dangling edge");
        continue;
      }
      if (!edge_allowed(family, e.kind, f->kind, t->kind))
        problems.push_back(std::string(1, d.letter) + ": edge not allowed: " + f->label() + " -> " + t->label());
    }
  }
  return problems;
}

/// Class an element stands for: an instance's classifier, the region of a
/// state, the name of a class, event or region.
inline std::string class_of(const Diagram& d, const Element& e) {
  switch (e.kind) {
    case ElementKind::Instance:
    case ElementKind::Lifeline:
      if (e.spec.classifier) return *e.spec.classifier;
      return e.spec.display();
    case ElementKind::State:
      if (e.container)
        if (const auto* r = d.element(*e.container)) return r->spec.display();
      return e.spec.display();
    default: return e.spec.display();
  }
}

// ---------------------------------------------------------------------------
// Isomorphism. The merge key makes (kind, spec, stereotype) unique within a
// diagram, so a bijection exists iff the canonical descriptor sets agree.

namespace detail {

inline std::string element_key(const Element& e) {
  return e.label();
}

inline std::string endpoint_key(const Architecture& arch, const Diagram& d, Id id) {
  if (const auto* e = d.element(id)) return element_key(*e);
  if (const auto* owner = arch.owner(id)) return std::string(1, owner->letter) + ":" + element_key(*owner->element(id));
  return "?";
}

}  // namespace detail

inline std::vector<std::string> element_descriptors(const Diagram& d) {
  std::vector<std::string> out;
  for (const auto& e : d.elements) {
    std::string s = detail::element_key(e);
    if (e.container) s += " in " + detail::element_key(*d.element(*e.container));
    for (const auto& step : e.scenario) s += " step:" + step;
    for (const auto& op : e.operations) s += " op:" + render(op);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> edge_descriptors(const Architecture& arch, const Diagram& d) {
  std::vector<std::string> out;
  for (const auto& e : d.edges) {
    std::string s = std::string(keyword_of(e.kind)) + " " + detail::endpoint_key(arch, d, e.from) + " -> " +
                    detail::endpoint_key(arch, d, e.to);
    if (e.label) s += " label:" + *e.label;
    if (e.multiplicity) s += " mult:" + *e.multiplicity;
    if (e.returns) s += " returns:" + *e.returns;
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool diagram_isomorphic(const Architecture& a1, const Diagram& d1, const Architecture& a2,
                               const Diagram& d2) {
  if (d1.letter != d2.letter) return false;
  return element_descriptors(d1) == element_descriptors(d2) &&
         edge_descriptors(a1, d1) == edge_descriptors(a2, d2);
}

inline bool diagram_isomorphic(const Architecture& arch, const Diagram& d1, const Diagram& d2) {
  return diagram_isomorphic(arch, d1, arch, d2);
}

}  // namespace archweave
