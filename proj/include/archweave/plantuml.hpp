#pragma once

#include <cctype>
#include <sstream>
#include <string>

#include "archweave/model.hpp"

namespace archweave {

namespace detail {

inline std::string puml_alias(Id id) { return "e" + std::to_string(id.value); }

inline std::string puml_text(std::string s) {
  for (char& c : s)
    if (c == '"') c = '\'';
  return "\"" + s + "\"";
}

// Object nodes read `name [State]`; a bare classifier keeps its colon.
inline std::string node_text(const Element& e) {
  std::string s;
  if (e.spec.name) s += *e.spec.name;
  if (e.spec.classifier) s += ":" + *e.spec.classifier;
  if (e.spec.state) s += (s.empty() ? "" : " ") + std::string("[") + *e.spec.state + "]";
  return s;
}

inline std::string stereo_suffix(const Element& e) {
  return e.stereotype ? " <<" + *e.stereotype + ">>" : std::string{};
}

inline void emit_activity(std::ostream& os, const Diagram& d) {
  os << "allowmixing\n";
  auto declare = [&](const Element& e, const std::string& indent) {
    switch (e.kind) {
      case ElementKind::Event:
        os << indent << "rectangle " << puml_text(render(e.spec)) << " as " << puml_alias(e.id) << " <<event>>\n";
        break;
      case ElementKind::Action:
        os << indent << "rectangle " << puml_text(render(e.spec)) << " as " << puml_alias(e.id) << stereo_suffix(e)
           << "\n";
        break;
      case ElementKind::Instance:
        os << indent << "object " << puml_text(node_text(e)) << " as " << puml_alias(e.id) << stereo_suffix(e) << "\n";
        break;
      case ElementKind::ControlNode:
        os << indent << "circle " << puml_text(render(e.spec)) << " as " << puml_alias(e.id) << "\n";
        break;
      default: break;
    }
  };
  for (const auto& p : d.elements) {
    if (p.kind != ElementKind::Partition) continue;
    os << "package " << puml_text(render(p.spec)) << " as " << puml_alias(p.id) << " {\n";
    for (const auto& e : d.elements)
      if (e.container == p.id) declare(e, "  ");
    os << "}\n";
  }
  for (const auto& e : d.elements)
    if (e.kind != ElementKind::Partition && !e.container) declare(e, "");
  for (const auto& e : d.edges) {
    os << puml_alias(e.from) << (e.kind == EdgeKind::DataFlow ? " ..> " : " --> ") << puml_alias(e.to);
    if (e.label) os << " : " << *e.label;
    os << "\n";
  }
}

inline void emit_use_case(std::ostream& os, const Architecture& arch, const Diagram& d) {
  for (const auto& e : d.elements) {
    os << (e.kind == ElementKind::Actor ? "actor " : "usecase ") << puml_text(render(e.spec)) << " as "
       << puml_alias(e.id) << stereo_suffix(e) << "\n";
  }
  for (const auto& e : d.edges) {
    if (!d.element(e.to)) {
      const auto* owner = arch.owner(e.to);
      const auto* t = owner ? owner->element(e.to) : nullptr;
      if (t)
        os << "usecase " << puml_text(render(t->spec)) << " as " << puml_alias(t->id) << " <<" << owner->letter
           << ">>\n";
    }
  }
  for (const auto& e : d.edges) {
    switch (e.kind) {
      case EdgeKind::Association: os << puml_alias(e.from) << " -- " << puml_alias(e.to); break;
      case EdgeKind::Include: os << puml_alias(e.from) << " ..> " << puml_alias(e.to) << " : <<include>>"; break;
      case EdgeKind::Extend: os << puml_alias(e.from) << " ..> " << puml_alias(e.to) << " : <<extend>>"; break;
      default: os << puml_alias(e.from) << " ..|> " << puml_alias(e.to); break;
    }
    if (e.label) os << " : " << *e.label;
    os << "\n";
  }
}

inline void emit_class(std::ostream& os, const Diagram& d) {
  for (const auto& e : d.elements) {
    os << "class " << puml_text(render(e.spec)) << " as " << puml_alias(e.id) << stereo_suffix(e);
    if (e.operations.empty()) {
      os << "\n";
      continue;
    }
    os << " {\n";
    for (const auto& op : e.operations) os << "  +" << render(op) << "()\n";
    os << "}\n";
  }
  for (const auto& e : d.edges) {
    os << puml_alias(e.from) << " --";
    if (e.multiplicity) os << " " << puml_text(*e.multiplicity);
    os << " " << puml_alias(e.to);
    if (e.label) os << " : " << *e.label;
    os << "\n";
  }
}

inline void emit_state(std::ostream& os, const Diagram& d) {
  auto declare = [&](const Element& e, const std::string& indent) {
    os << indent << "state " << puml_text(render(e.spec)) << " as " << puml_alias(e.id);
    if (e.kind == ElementKind::ControlNode) os << " <<start>>";
    os << "\n";
  };
  for (const auto& r : d.elements) {
    if (r.kind != ElementKind::Region) continue;
    os << "state " << puml_text(render(r.spec)) << " as " << puml_alias(r.id) << " {\n";
    for (const auto& e : d.elements)
      if (e.container == r.id) declare(e, "  ");
    os << "}\n";
  }
  for (const auto& e : d.elements)
    if (e.kind != ElementKind::Region && !e.container) declare(e, "");
  for (const auto& e : d.edges) {
    if (e.kind == EdgeKind::Containment) continue;
    os << puml_alias(e.from) << " --> " << puml_alias(e.to);
    if (e.label) os << " : " << *e.label;
    os << "\n";
  }
}

inline void emit_sequence(std::ostream& os, const Diagram& d) {
  for (const auto& e : d.elements) os << "participant " << puml_text(render(e.spec)) << " as " << puml_alias(e.id) << "\n";
  for (const auto& e : d.edges) {
    os << puml_alias(e.from) << " -> " << puml_alias(e.to);
    if (e.label) os << " : " << *e.label;
    os << "\n";
    if (e.returns) os << puml_alias(e.to) << " --> " << puml_alias(e.from) << " : " << *e.returns << "\n";
  }
}

inline void emit_component(std::ostream& os, const Diagram& d) {
  for (const auto& e : d.elements) os << "component " << puml_text(render(e.spec)) << " as " << puml_alias(e.id) << "\n";
  for (const auto& e : d.edges) {
    os << puml_alias(e.from) << " ..> " << puml_alias(e.to);
    if (e.label) os << " : " << *e.label;
    os << "\n";
  }
}

}  // namespace detail

inline std::string emit_plantuml(const Architecture& arch, const Diagram& d) {
  std::ostringstream os;
  os << "@startuml\n";
  os << "title " << d.name << "\n";
  switch (d.kind().family) {
    case Family::Activity: detail::emit_activity(os, d); break;
    case Family::UseCase: detail::emit_use_case(os, arch, d); break;
    case Family::Class: detail::emit_class(os, d); break;
    case Family::State: detail::emit_state(os, d); break;
    case Family::Sequence: detail::emit_sequence(os, d); break;
    case Family::Component: detail::emit_component(os, d); break;
  }
  os << "@enduml\n";
  return os.str();
}

/// `<letter>_<slug>.puml`, slug = lower-cased name with runs of other
/// characters folded to `_`.
inline std::string plantuml_file_name(const Diagram& d) {
  std::string slug;
  for (char c : d.name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      slug += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!slug.empty() && slug.back() != '_') {
      slug += '_';
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  if (slug.empty()) slug = "diagram";
  return std::string(1, d.letter) + "_" + slug + ".puml";
}

}  // namespace archweave
