#pragma once

#include <string>

#include "json.hpp"

#include "archweave/consistency.hpp"
#include "archweave/error.hpp"
#include "archweave/model.hpp"

namespace archweave {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json opt(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

inline std::optional<std::string> opt_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

inline Json ids_json(const std::vector<Id>& ids) {
  Json a = Json::array();
  for (auto id : ids) a.push_back(id.value);
  return a;
}

inline std::vector<Id> ids_from(const Json& a) {
  std::vector<Id> out;
  for (const auto& v : a) out.push_back(Id{v.get<std::uint32_t>()});
  return out;
}

inline Json spec_json(const NameSpec& s) {
  return Json{{"name", opt(s.name)}, {"state", opt(s.state)}, {"classifier", opt(s.classifier)}};
}

inline NameSpec spec_from(const Json& j) {
  return NameSpec{opt_string(j, "name"), opt_string(j, "state"), opt_string(j, "classifier")};
}

}  // namespace detail

inline Json to_json(const Architecture& arch) {
  using detail::opt;
  Json diagrams = Json::array();
  for (const auto& d : arch.diagrams) {
    Json elements = Json::array();
    for (const auto& e : d.elements) {
      Json ops = Json::array();
      for (const auto& op : e.operations) ops.push_back(render(op));
      elements.push_back(Json{{"id", e.id.value},
                              {"kind", keyword_of(e.kind)},
                              {"name", opt(e.spec.name)},
                              {"state", opt(e.spec.state)},
                              {"classifier", opt(e.spec.classifier)},
                              {"stereotype", opt(e.stereotype)},
                              {"container", e.container ? Json(e.container->value) : Json(nullptr)},
                              {"scenario", e.scenario},
                              {"operations", ops}});
    }
    Json edges = Json::array();
    for (const auto& e : d.edges) {
      edges.push_back(Json{{"id", e.id.value},
                           {"kind", keyword_of(e.kind)},
                           {"from", e.from.value},
                           {"to", e.to.value},
                           {"label", opt(e.label)},
                           {"multiplicity", opt(e.multiplicity)},
                           {"returns", opt(e.returns)}});
    }
    diagrams.push_back(Json{{"letter", std::string(1, d.letter)},
                            {"name", d.name},
                            {"view", to_string(d.kind().view)},
                            {"layer", d.kind().layer},
                            {"family", to_string(d.kind().family)},
                            {"elements", elements},
                            {"edges", edges}});
  }
  Json attachments = Json::array();
  for (const auto& a : arch.attachments) {
    attachments.push_back(Json{{"host_diagram", std::string(1, a.host_diagram)},
                               {"host_kind", a.host_kind ? Json(std::string(1, *a.host_kind)) : Json(nullptr)},
                               {"host_name", detail::spec_json(a.host_name)},
                               {"rule", a.rule_text},
                               {"fired", a.fired}});
  }
  Json traces = Json::array();
  for (const auto& t : arch.traces) {
    traces.push_back(Json{{"rule", t.rule_text},
                          {"anchor", t.anchor.value},
                          {"sources", detail::ids_json(t.sources)},
                          {"targets", detail::ids_json(t.targets)},
                          {"pass", t.pass},
                          {"pattern", opt(t.pattern)}});
  }
  Json uses = Json::array();
  for (const auto& u : arch.pattern_uses) {
    Json renames = Json::array();
    for (const auto& r : u.renames)
      renames.push_back(Json{{"role", std::string(1, r.role)},
                             {"placeholder", render(r.placeholder)},
                             {"replacement", render(r.replacement)}});
    uses.push_back(Json{{"category", u.category},
                        {"name", u.name},
                        {"diagram", std::string(1, u.diagram)},
                        {"renames", renames}});
  }
  return Json{{"diagrams", diagrams},
              {"attachments", attachments},
              {"traces", traces},
              {"pattern_uses", uses},
              {"name", arch.name}};
}

inline std::string emit_json(const Architecture& arch) { return to_json(arch).dump(2) + "\n"; }

inline Architecture from_json(const Json& j) {
  try {
    Architecture arch;
    arch.name = j.value("name", std::string{});
    std::uint32_t max_id = 0;
    for (const auto& jd : j.at("diagrams")) {
      auto letter = jd.at("letter").get<std::string>();
      if (letter.size() != 1) throw Error(ErrorKind::Schema, "bad diagram letter '" + letter + "'");
      auto& d = ensure_diagram(arch, letter[0]);
      d.name = jd.at("name").get<std::string>();
      for (const auto& je : jd.at("elements")) {
        Element e;
        e.id = Id{je.at("id").get<std::uint32_t>()};
        auto kind = element_kind_from_keyword(je.at("kind").get<std::string>());
        if (!kind) throw Error(ErrorKind::Schema, "unknown element kind " + je.at("kind").dump());
        e.kind = *kind;
        e.spec = detail::spec_from(je);
        e.stereotype = detail::opt_string(je, "stereotype");
        if (je.contains("container") && !je.at("container").is_null()) e.container = Id{je.at("container").get<std::uint32_t>()};
        e.scenario = je.value("scenario", std::vector<std::string>{});
        for (const auto& op : je.value("operations", Json::array())) e.operations.push_back(parse_name_spec(op.get<std::string>()));
        max_id = std::max(max_id, e.id.value);
        d.elements.push_back(std::move(e));
      }
      for (const auto& je : jd.at("edges")) {
        Edge e;
        e.id = Id{je.at("id").get<std::uint32_t>()};
        auto kind = edge_kind_from_keyword(je.at("kind").get<std::string>());
        if (!kind) throw Error(ErrorKind::Schema, "unknown edge kind " + je.at("kind").dump());
        e.kind = *kind;
        e.from = Id{je.at("from").get<std::uint32_t>()};
        e.to = Id{je.at("to").get<std::uint32_t>()};
        e.label = detail::opt_string(je, "label");
        e.multiplicity = detail::opt_string(je, "multiplicity");
        e.returns = detail::opt_string(je, "returns");
        max_id = std::max(max_id, e.id.value);
        d.edges.push_back(std::move(e));
      }
    }
    arch.reserve_id(Id{max_id});
    for (const auto& ja : j.value("attachments", Json::array())) {
      std::optional<char> kind;
      if (auto k = detail::opt_string(ja, "host_kind")) kind = k->at(0);
      auto a = make_attachment(ja.at("host_diagram").get<std::string>().at(0), kind,
                               detail::spec_from(ja.at("host_name")), ja.at("rule").get<std::string>());
      a.fired = ja.value("fired", false);
      arch.attachments.push_back(std::move(a));
    }
    for (const auto& jt : j.value("traces", Json::array())) {
      TraceLink t;
      t.rule_text = jt.at("rule").get<std::string>();
      t.anchor = Id{jt.at("anchor").get<std::uint32_t>()};
      t.sources = detail::ids_from(jt.at("sources"));
      t.targets = detail::ids_from(jt.at("targets"));
      t.pass = jt.at("pass").get<int>();
      t.pattern = detail::opt_string(jt, "pattern");
      arch.traces.push_back(std::move(t));
    }
    for (const auto& ju : j.value("pattern_uses", Json::array())) {
      PatternUse u;
      u.category = ju.at("category").get<int>();
      u.name = ju.at("name").get<std::string>();
      u.diagram = ju.at("diagram").get<std::string>().at(0);
      for (const auto& jr : ju.at("renames"))
        u.renames.push_back({jr.at("role").get<std::string>().at(0), parse_name_spec(jr.at("placeholder").get<std::string>()),
                             parse_name_spec(jr.at("replacement").get<std::string>())});
      arch.pattern_uses.push_back(std::move(u));
    }
    auto problems = validate(arch);
    if (!problems.empty()) throw Error(ErrorKind::Schema, problems.front());
    return arch;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("bad architecture JSON: ") + e.what());
  }
}

inline Architecture parse_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Syntax, std::string("bad JSON: ") + e.what(), e.byte);
  }
  return from_json(j);
}

inline Json to_json(const ConsistencyReport& r, const Architecture& arch) {
  Json orphans = Json::array();
  for (const auto& o : r.orphans)
    orphans.push_back(Json{{"id", o.id.value}, {"diagram", std::string(1, o.diagram)}, {"element", o.label}});
  Json never = Json::array();
  for (auto i : r.never_fired) never.push_back(arch.attachments[i].describe());
  Json coverage = Json::object();
  for (const auto& c : r.coverage) coverage[std::string(1, c.diagram)] = c.fraction();
  return Json{{"orphans", orphans}, {"never_fired", never}, {"coverage", coverage}, {"ok", r.ok}};
}

}  // namespace archweave
