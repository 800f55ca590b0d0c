#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archweave/change_set.hpp"
#include "archweave/error.hpp"
#include "archweave/model.hpp"
#include "archweave/pattern.hpp"
#include "archweave/rule.hpp"

namespace archweave {

namespace detail {

inline std::optional<ElementKind> item_kind(char letter) {
  if (letter == 'h' || is_link_letter(letter)) return std::nullopt;
  return element_kind_from_letter(letter);
}

// `e` also accepts an instance: the input product of a subprocess plays the
// role of its triggering event.
inline bool item_accepts_kind(char letter, ElementKind kind) {
  if (letter == 'e') return kind == ElementKind::Event || kind == ElementKind::Instance;
  auto k = item_kind(letter);
  return k && *k == kind;
}

inline bool link_accepts(const ElementItem& item, const Edge& e) {
  switch (item.letter) {
    case 'm': return e.kind == EdgeKind::Message;
    case 't': return e.kind == EdgeKind::Transition;
    case 'y': return e.kind == EdgeKind::Dependency;
    case 'z':
      if (item.stereotype) return edge_kind_from_keyword(*item.stereotype) == e.kind;
      return e.kind == EdgeKind::ControlFlow || e.kind == EdgeKind::DataFlow || e.kind == EdgeKind::Association ||
             e.kind == EdgeKind::Include || e.kind == EdgeKind::Extend || e.kind == EdgeKind::Realization;
  }
  return false;
}

// A state written as `[State]` stands for any state.
inline bool is_state_variable(const std::optional<std::string>& s) { return s && *s == "State"; }

inline bool arg_matches(const NameSpec& arg, const NameSpec& spec) {
  if (is_state_variable(arg.state)) {
    if (!spec.state) return false;
    NameSpec rest = arg;
    rest.state.reset();
    return spec_matches(rest, spec);
  }
  return spec_matches(arg, spec);
}

inline std::vector<NameSpec> name_args(const ElementItem& item) {
  std::vector<NameSpec> out;
  for (const auto& a : item.args) {
    if (const auto* ns = std::get_if<NameSpec>(&a)) out.push_back(*ns);
    if (const auto* sl = std::get_if<StateList>(&a))
      for (const auto& s : sl->states) out.push_back(NameSpec{std::nullopt, s, std::nullopt});
  }
  return out;
}

inline const PatternRef* pattern_arg(const ElementItem& item) {
  for (const auto& a : item.args)
    if (const auto* p = std::get_if<PatternRef>(&a)) return p;
  return nullptr;
}

inline bool element_fits(const ElementItem& item, const Element& e) {
  if (!item_accepts_kind(item.letter, e.kind)) return false;
  if (item.stereotype && item.stereotype != e.stereotype) return false;
  auto args = name_args(item);
  if (args.empty()) return true;
  return std::any_of(args.begin(), args.end(), [&](const NameSpec& a) { return arg_matches(a, e.spec); });
}

inline std::string item_text(const ElementItem& item, std::size_t index) {
  RuleAst tmp;
  tmp.parts.push_back(DiagramPart{'X', {Item{item}}});
  std::string s = render_rule(tmp).substr(1);
  return "item " + std::to_string(index + 1) + " '" + s + "'";
}

[[noreturn]] inline void match_failure(const std::string& what) { throw Error(ErrorKind::MatchFailure, what); }

class SourceMatcher {
public:
  SourceMatcher(const Architecture& arch, const Diagram& d, std::vector<const ElementItem*> items)
      : arch_(arch), d_(d), items_(std::move(items)) {
    binding_.slots.resize(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) binding_.slots[i].letter = items_[i]->letter;
  }

  Binding match_element(Id anchor) {
    const Element& a = *d_.element(anchor);
    std::size_t k = items_.size();
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (element_fits(*items_[i], a)) {
        k = i;
        break;
      }
    }
    if (k == items_.size()) match_failure("anchor " + a.label() + " fits no source item");
    binding_.anchor = anchor;
    bind(k, {anchor});
    extend(k, +1, anchor);
    extend(k, -1, anchor);
    add_implicit_members();
    return binding_;
  }

  Binding match_edge(Id anchor) {
    const Edge& e = *d_.edge(anchor);
    std::size_t k = items_.size();
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (is_link_letter(items_[i]->letter) && link_accepts(*items_[i], e)) {
        k = i;
        break;
      }
    }
    if (k == items_.size()) match_failure(std::string("anchor edge fits no source item"));
    binding_.anchor = anchor;
    bind(k, {anchor});
    bind_endpoint(k, +1, e.to);
    bind_endpoint(k, -1, e.from);
    return binding_;
  }

private:
  const Architecture& arch_;
  const Diagram& d_;
  std::vector<const ElementItem*> items_;
  Binding binding_;
  std::set<Id> used_;

  void bind(std::size_t i, const std::vector<Id>& ids) {
    for (auto id : ids) {
      binding_.slots[i].ids.push_back(id);
      used_.insert(id);
    }
  }

  void bind_endpoint(std::size_t k, int dir, Id endpoint) {
    long j = static_cast<long>(k) + dir;
    if (j < 0 || j >= static_cast<long>(items_.size())) return;
    const auto* el = d_.element(endpoint);
    if (!el || !element_fits(*items_[j], *el)) match_failure(item_text(*items_[j], j) + " does not fit the edge end");
    bind(j, {endpoint});
    extend(static_cast<std::size_t>(j), dir, endpoint);
  }

  std::vector<Id> neighbours(Id cur, bool forward) const {
    std::vector<Id> out, back;
    for (const auto& e : d_.edges) {
      if (e.from == cur) push_unique(out, e.to);
      if (e.to == cur) push_unique(back, e.from);
    }
    if (!forward) std::swap(out, back);
    for (auto id : back) push_unique(out, id);
    const auto* c = d_.element(cur);
    for (const auto& e : d_.elements)
      if (e.container == cur) push_unique(out, e.id);
    if (c && c->container) push_unique(out, *c->container);
    return out;
  }

  std::vector<Id> candidates(Id cur, const ElementItem& item, bool forward) const {
    std::vector<Id> out;
    for (auto id : neighbours(cur, forward)) {
      if (used_.count(id)) continue;
      const auto* e = d_.element(id);
      if (!e || !item_accepts_kind(item.letter, e->kind)) continue;
      if (item.stereotype && item.stereotype != e->stereotype) continue;
      out.push_back(id);
    }
    if (item.letter == 'e')
      std::stable_partition(out.begin(), out.end(),
                            [&](Id id) { return d_.element(id)->kind == ElementKind::Event; });
    return out;
  }

  std::optional<ElementKind> member_kind(char container_letter, char letter) const {
    if (container_letter == 'p' && letter == 'v') return ElementKind::Action;
    if (container_letter == 'r' && letter == 's') return ElementKind::State;
    return std::nullopt;
  }

  void extend(std::size_t from, int dir, Id start) {
    std::optional<Id> cur = start;
    long j = static_cast<long>(from) + dir;
    long n = static_cast<long>(items_.size());
    while (j >= 0 && j < n) {
      const ElementItem& item = *items_[j];
      const ElementItem& prev = *items_[j - dir];
      if (!cur) match_failure(item_text(item, j) + " has nothing to attach to");
      if (is_link_letter(item.letter)) {
        std::optional<Id> edge_id;
        std::vector<const Edge*> order;
        for (const auto& e : d_.edges)
          if ((dir > 0 ? e.from : e.to) == *cur) order.push_back(&e);
        for (const auto& e : d_.edges)
          if ((dir > 0 ? e.to : e.from) == *cur) order.push_back(&e);
        for (const auto* e : order) {
          if (used_.count(e->id) || !link_accepts(item, *e)) continue;
          edge_id = e->id;
          break;
        }
        if (!edge_id) {
          if (item.quant == Quant::Opt) {
            j += dir;
            continue;
          }
          match_failure(item_text(item, j) + " has no matching edge");
        }
        const Edge& e = *d_.edge(*edge_id);
        bind(j, {e.id});
        Id other = e.from == *cur ? e.to : e.from;
        long k = j + dir;
        if (k >= 0 && k < n) {
          const auto* el = d_.element(other);
          if (!el || !element_fits(*items_[k], *el))
            match_failure(item_text(*items_[k], k) + " does not fit the linked element");
          bind(k, {other});
        }
        cur = other;
        j = k + dir;
        continue;
      }
      if (dir > 0 && prev.letter == 'c' && item.letter == 'h') {
        binding_.slots[j].operations = d_.element(*cur)->operations;
        j += dir;
        continue;
      }
      if (dir > 0 && member_kind(prev.letter, item.letter)) {
        auto kind = *member_kind(prev.letter, item.letter);
        std::vector<Id> members;
        for (const auto& e : d_.elements)
          if (e.container == *cur && e.kind == kind && !used_.count(e.id) && element_fits(item, e))
            members.push_back(e.id);
        if (members.empty() && item.quant != Quant::Opt)
          match_failure(item_text(item, j) + " has no member in " + d_.element(*cur)->label());
        bind(j, members);
        if (!members.empty()) cur = members.back();
        j += dir;
        continue;
      }
      if (dir < 0 && member_kind(item.letter, prev.letter)) {
        const auto* c = d_.element(*cur);
        const auto* container = c && c->container ? d_.element(*c->container) : nullptr;
        if (container && !used_.count(container->id) && element_fits(item, *container)) {
          bind(j, {container->id});
          cur = container->id;
          j += dir;
          continue;
        }
      }
      auto cands = candidates(*cur, item, dir > 0);
      auto args = name_args(item);
      std::vector<Id> chosen;
      if (args.size() >= 2 && std::none_of(item.args.begin(), item.args.end(),
                                           [](const Arg& a) { return std::holds_alternative<StateList>(a); })) {
        for (const auto& a : args) {
          auto it = std::find_if(cands.begin(), cands.end(), [&](Id id) {
            return std::find(chosen.begin(), chosen.end(), id) == chosen.end() && arg_matches(a, d_.element(id)->spec);
          });
          if (it == cands.end()) match_failure(item_text(item, j) + " has no element named " + render(a));
          chosen.push_back(*it);
        }
      } else {
        std::erase_if(cands, [&](Id id) { return !element_fits(item, *d_.element(id)); });
        if (!cands.empty()) {
          chosen.push_back(cands.front());
          if (item.quant == Quant::Plus) {
            while (true) {
              used_.insert(chosen.back());
              auto more = candidates(chosen.back(), item, dir > 0);
              std::erase_if(more, [&](Id id) { return !element_fits(item, *d_.element(id)); });
              if (more.empty()) break;
              chosen.push_back(more.front());
            }
          }
        }
      }
      if (chosen.empty()) {
        if (item.quant == Quant::Opt) {
          j += dir;
          continue;
        }
        match_failure(item_text(item, j) + " is not linked to " + d_.element(*cur)->label());
      }
      bind(j, chosen);
      cur = chosen.back();
      j += dir;
    }
  }

  // A trailing partition or region brings its members along.
  void add_implicit_members() {
    const ElementItem& last = *items_.back();
    if (last.letter != 'p' && last.letter != 'r') return;
    const auto& slot = binding_.slots.back();
    if (slot.ids.empty()) return;
    Slot members;
    members.letter = last.letter == 'p' ? 'v' : 's';
    members.implicit = true;
    auto kind = last.letter == 'p' ? ElementKind::Action : ElementKind::State;
    for (const auto& e : d_.elements)
      if (e.container == slot.ids.front() && e.kind == kind) members.ids.push_back(e.id);
    if (!members.ids.empty()) binding_.slots.push_back(std::move(members));
  }
};

inline bool host_matches_edge(const Diagram& d, const Attachment& a, const Edge& e) {
  std::string want = normalize_name(a.host_name.name.value_or(render(a.host_name)));
  if (*a.host_kind == 'm') return e.kind == EdgeKind::Message && e.label && normalize_name(*e.label) == want;
  if (e.label && normalize_name(*e.label) == want) return true;
  const auto* f = d.element(e.from);
  const auto* t = d.element(e.to);
  if (!f || !t) return false;
  return normalize_name(render(f->spec) + "->" + render(t->spec)) == want;
}

}  // namespace detail

/// Element (or edge, for `z`/`m` hosts) the attachment is placed on, if it
/// exists yet.
inline std::optional<Id> find_host(const Architecture& arch, const Attachment& a) {
  const auto* d = arch.find_diagram(a.host_diagram);
  if (!d) return std::nullopt;
  if (a.host_kind && is_link_letter(*a.host_kind)) {
    for (const auto& e : d->edges)
      if (detail::host_matches_edge(*d, a, e)) return e.id;
    return std::nullopt;
  }
  std::optional<ElementKind> kind;
  if (a.host_kind) kind = element_kind_from_letter(*a.host_kind);
  for (const auto& e : d->elements)
    if ((!kind || e.kind == *kind) && spec_matches(a.host_name, e.spec)) return e.id;
  return std::nullopt;
}

/// Assigns source items to elements around the host. Failures raise
/// MatchFailure naming the first unsatisfiable item.
inline Binding match_source(const Architecture& arch, const Attachment& a) {
  auto host = find_host(arch, a);
  if (!host)
    throw Error(ErrorKind::MatchFailure, "host " + a.describe() + " does not exist yet");
  const auto& d = arch.diagram(a.host_diagram);
  std::vector<const ElementItem*> items;
  for (const auto& item : a.rule.source().items) {
    if (!item.element()) throw Error(ErrorKind::MatchFailure, "groups are not supported in a source part");
    items.push_back(item.element());
  }
  detail::SourceMatcher m(arch, d, std::move(items));
  if (d.edge(*host)) return m.match_edge(*host);
  return m.match_element(*host);
}

/// Edge kind linking two elements of a diagram when the rule does not name it.
inline EdgeKind infer_edge(char letter, ElementKind from, ElementKind to) {
  auto family = diagram_kind(letter).family;
  std::optional<EdgeKind> kind;
  switch (family) {
    case Family::Activity:
      if (edge_allowed(family, EdgeKind::ControlFlow, from, to)) kind = EdgeKind::ControlFlow;
      else if (edge_allowed(family, EdgeKind::DataFlow, from, to)) kind = EdgeKind::DataFlow;
      break;
    case Family::UseCase:
      if ((from == ElementKind::Actor && to == ElementKind::UseCase) ||
          (from == ElementKind::UseCase && to == ElementKind::Actor))
        kind = EdgeKind::Association;
      break;
    case Family::Class: kind = EdgeKind::Association; break;
    case Family::State: kind = EdgeKind::Transition; break;
    case Family::Sequence: kind = EdgeKind::Message; break;
    case Family::Component: kind = EdgeKind::Dependency; break;
  }
  if (!kind || (!edge_allowed(family, *kind, from, to) &&
                !(family == Family::UseCase && edge_allowed(family, *kind, to, from))))
    throw Error(ErrorKind::Schema, std::string("no edge links ") + std::string(keyword_of(from)) + " to " +
                                       std::string(keyword_of(to)) + " in diagram " + letter);
  return *kind;
}

namespace detail {

// Source letters a target letter may take its name from.
inline std::string_view affinity(char letter) {
  switch (letter) {
    case 'i': return "eicrs";
    case 'v': return "vuh";
    case 'u': return "vu";
    case 'a': return "apei";
    case 'p': return "ap";
    case 'c': return "cie";
    case 'r': return "ric";
    case 's': return "si";
    case 't': return "vme";
    case 'y': return "m";
    case 'm': return "mvh";
    case 'z': return "z";
    case 'l': return "lua";
    case 'q': return "lq";
    case 'e': return "e";
  }
  return "";
}

struct SourceValue {
  std::optional<Id> id;  // element or edge
  std::optional<NameSpec> operation;
};

struct TargetName {
  NameSpec spec;
  std::optional<std::string> stereotype;
};

struct PendingLink {
  char letter = 'z';
  std::optional<EdgeKind> kind;
  std::optional<std::string> label, multiplicity, returns;
  std::optional<Id> source_edge;
};

inline std::optional<std::string> default_stereotype(char diagram, char letter) {
  if (diagram == 'R' && letter == 'v') return "subprocess";
  if (diagram == 'R' && letter == 'i') return "product";
  return std::nullopt;
}

class TargetBuilder {
public:
  TargetBuilder(Architecture& arch, const Attachment& att, const Binding& b, const PatternLibrary& lib,
                ChangeSet& cs)
      : arch_(arch), att_(att), b_(b), lib_(lib), cs_(cs), consumed_(b.slots.size(), false) {
    src_letter_ = att.host_diagram;
  }

  void build() {
    // Everything that can fail without a schema violation is settled before
    // the first mutation.
    std::vector<const Pattern*> patterns(att_.rule.parts.size(), nullptr);
    std::vector<std::optional<std::pair<Id, Id>>> lone(att_.rule.parts.size());
    for (std::size_t pi = 1; pi < att_.rule.parts.size(); ++pi) {
      const auto& part = att_.rule.parts[pi];
      if (const auto* ref = find_pattern_ref(part.items)) {
        const auto& p = lib_.get(ref->depth, ref->name);
        if (p.letter() != part.diagram)
          throw Error(ErrorKind::Schema, "pattern " + p.name + " builds diagram " + std::string(1, p.letter()) +
                                             ", not " + std::string(1, part.diagram));
        patterns[pi] = &p;
      } else if (is_lone_link(part)) {
        lone[pi] = lone_link_endpoints(part);
      }
    }
    std::vector<Id> prev_cursor;
    char prev_letter = 0;
    for (std::size_t pi = 1; pi < att_.rule.parts.size(); ++pi) {
      const auto& part = att_.rule.parts[pi];
      if (!arch_.find_diagram(part.diagram)) cs_.created_diagrams.push_back(part.diagram);
      ensure_diagram(arch_, part.diagram);
      if (patterns[pi]) {
        instantiate(arch_, *patterns[pi], build_rename_map(arch_, *patterns[pi], b_, part), cs_);
        prev_cursor.clear();
      } else if (lone[pi]) {
        PartState st;
        st.letter = part.diagram;
        st.pending = make_link(*part.items.front().element(), st);
        link(st, lone[pi]->first, lone[pi]->second);
        prev_cursor.clear();
      } else {
        PartState st;
        st.letter = part.diagram;
        st.cross_letter = prev_letter;
        st.cross = prev_cursor;
        run_items(part.items, st, -1, std::nullopt, true);
        finish_pending(st);
        prev_cursor = st.cursor;
      }
      prev_letter = part.diagram;
    }
  }

private:
  struct PartState {
    char letter = 'X';
    std::vector<Id> cursor;
    std::optional<Id> context;
    std::optional<PendingLink> pending;
    char cross_letter = 0;
    std::vector<Id> cross;
    bool first_element = true;
  };

  Architecture& arch_;
  const Attachment& att_;
  const Binding& b_;
  const PatternLibrary& lib_;
  ChangeSet& cs_;
  std::vector<bool> consumed_;
  char src_letter_;

  static const PatternRef* find_pattern_ref(const std::vector<Item>& items) {
    for (const auto& item : items) {
      if (const auto* el = item.element()) {
        if (const auto* p = pattern_arg(*el)) return p;
      } else {
        for (const auto& alt : item.group()->alternatives)
          if (const auto* p = find_pattern_ref(alt)) return p;
      }
    }
    return nullptr;
  }

  static bool is_lone_link(const DiagramPart& part) {
    return part.items.size() == 1 && part.items.front().element() &&
           is_link_letter(part.items.front().element()->letter);
  }

  // Elements of `letter` produced from `src` by earlier rule applications.
  std::vector<Id> images(Id src, char letter) const {
    std::vector<Id> out;
    const auto* d = arch_.find_diagram(letter);
    if (!d) return out;
    for (const auto& t : arch_.traces) {
      if (t.anchor != src && std::find(t.sources.begin(), t.sources.end(), src) == t.sources.end()) continue;
      for (auto id : t.targets)
        if (d->element(id)) push_unique(out, id);
    }
    return out;
  }

  std::pair<Id, Id> lone_link_endpoints(const DiagramPart& part) {
    const auto& item = *part.items.front().element();
    std::optional<Id> edge_id;
    for (std::size_t s = 0; s < b_.slots.size() && !edge_id; ++s)
      for (auto id : b_.slots[s].ids)
        if (arch_.edge(id)) {
          edge_id = id;
          break;
        }
    if (!edge_id) throw Error(ErrorKind::MatchFailure, "a lone link target needs a source edge");
    const Edge& e = *arch_.edge(*edge_id);
    auto from = images(e.from, part.diagram);
    auto to = images(e.to, part.diagram);
    const auto* d = arch_.find_diagram(part.diagram);
    for (auto f : from)
      for (auto t : to) {
        if (f == t) continue;
        auto fk = d->element(f)->kind;
        auto tk = d->element(t)->kind;
        std::optional<EdgeKind> kind;
        if (item.stereotype) kind = edge_kind_from_keyword(*item.stereotype);
        if (item.letter == 'm') kind = EdgeKind::Message;
        if (item.letter == 't') kind = EdgeKind::Transition;
        if (item.letter == 'y') kind = EdgeKind::Dependency;
        if (kind ? edge_allowed(d->kind().family, *kind, fk, tk) : (try_infer(part.diagram, fk, tk).has_value()))
          return {f, t};
      }
    throw Error(ErrorKind::MatchFailure, "edge ends have no linkable images in diagram " +
                                             std::string(1, part.diagram) + " yet");
  }

  static std::optional<EdgeKind> try_infer(char letter, ElementKind f, ElementKind t) {
    try {
      return infer_edge(letter, f, t);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  std::optional<std::size_t> take_slot(char letter) {
    auto aff = affinity(letter);
    for (std::size_t s = 0; s < b_.slots.size(); ++s) {
      if (consumed_[s] || b_.slots[s].empty()) continue;
      if (aff.find(b_.slots[s].letter) == std::string_view::npos) continue;
      consumed_[s] = true;
      return s;
    }
    return std::nullopt;
  }

  std::vector<SourceValue> slot_values(std::size_t s, int rep) const {
    std::vector<SourceValue> out;
    for (auto id : b_.slots[s].ids) out.push_back({id, std::nullopt});
    for (const auto& op : b_.slots[s].operations) out.push_back({std::nullopt, op});
    if (rep >= 0 && out.size() > 1) return {out[static_cast<std::size_t>(rep) % out.size()]};
    return out;
  }

  NameSpec derive(char letter, const SourceValue& v) const {
    if (v.operation) return NameSpec{v.operation->display(), std::nullopt, std::nullopt};
    if (const auto* edge = arch_.edge(*v.id)) return NameSpec{edge->label, std::nullopt, std::nullopt};
    const auto* d = arch_.owner(*v.id);
    const Element& e = *d->element(*v.id);
    std::string cls = class_of(*d, e);
    switch (letter) {
      case 'i': {
        std::optional<std::string> state;
        if (e.kind == ElementKind::Instance) state = e.spec.state;
        if (e.kind == ElementKind::State) state = e.spec.display();
        return NameSpec{std::nullopt, state, cls};
      }
      case 'c':
      case 'r': return NameSpec{cls, std::nullopt, std::nullopt};
      case 's':
        if (e.kind == ElementKind::Instance) return NameSpec{e.spec.state.value_or(cls), std::nullopt, std::nullopt};
        return NameSpec{e.spec.display(), std::nullopt, std::nullopt};
      case 'q':
        return NameSpec{e.spec.classifier ? *e.spec.classifier : e.spec.display(), std::nullopt, std::nullopt};
      case 'l':
        if (e.kind == ElementKind::Lifeline) return e.spec;
        return NameSpec{e.spec.display(), std::nullopt, std::nullopt};
    }
    return NameSpec{e.spec.display(), std::nullopt, std::nullopt};
  }

  // Element of the wanted kind in `letter` that the anchor (transitively)
  // came from.
  std::optional<Id> trace_ancestor(char letter, ElementKind kind) const {
    const auto* d = arch_.find_diagram(letter);
    if (!d) return std::nullopt;
    std::deque<Id> queue{b_.anchor};
    for (auto id : b_.source_ids()) queue.push_back(id);
    std::set<Id> seen(queue.begin(), queue.end());
    while (!queue.empty()) {
      Id id = queue.front();
      queue.pop_front();
      if (const auto* e = d->element(id); e && e->kind == kind) return id;
      for (const auto& t : arch_.traces) {
        if (std::find(t.targets.begin(), t.targets.end(), id) == t.targets.end()) continue;
        std::vector<Id> next{t.anchor};
        next.insert(next.end(), t.sources.begin(), t.sources.end());
        for (auto n : next)
          if (seen.insert(n).second) queue.push_back(n);
      }
    }
    return std::nullopt;
  }

  std::vector<TargetName> fallback(char letter, char diagram) const {
    auto kind = letter == 'e' ? ElementKind::Event : *element_kind_from_letter(letter);
    if (auto id = trace_ancestor(diagram, kind)) {
      const auto* e = arch_.element(*id);
      return {{e->spec, e->stereotype}};
    }
    return {{derive(letter, SourceValue{b_.anchor, std::nullopt}), default_stereotype(diagram, letter)}};
  }

  std::vector<TargetName> resolve(const ElementItem& el, const PartState& st, int rep,
                                  const std::optional<std::string>& step, bool first, bool last) {
    auto stereo = el.stereotype ? el.stereotype : default_stereotype(st.letter, el.letter);
    if (el.letter == 'n') {
      std::string name = el.stereotype ? *el.stereotype : (first ? "start" : (last ? "stop" : "node"));
      return {{NameSpec{name, std::nullopt, std::nullopt}, el.stereotype}};
    }
    auto given = name_args(el);
    if (step) {
      given.clear();
      if (step->find_first_of("[:") != std::string::npos)
        given.push_back(parse_name_spec(*step));
      else
        given.push_back(NameSpec{*step, std::nullopt, std::nullopt});
    }
    std::vector<SourceValue> values;
    if (auto s = take_slot(el.letter)) values = slot_values(*s, rep);
    std::vector<TargetName> out;
    if (!given.empty()) {
      for (std::size_t j = 0; j < given.size(); ++j) {
        NameSpec spec = given[j];
        if (el.letter == 'i') {
          NameSpec basis = values.empty() ? fallback('i', st.letter).front().spec
                                          : derive('i', values[std::min(j, values.size() - 1)]);
          if (is_state_variable(spec.state)) spec.state.reset();
          spec = fill(NameSpec{spec.name, spec.state, spec.classifier},
                      NameSpec{std::nullopt, basis.state, basis.classifier});
        }
        out.push_back({spec, stereo});
      }
      return out;
    }
    if (values.empty()) return fallback(el.letter, st.letter);
    for (const auto& v : values) out.push_back({derive(el.letter, v), stereo});
    return out;
  }

  PendingLink make_link(const ElementItem& el, PartState& st) {
    PendingLink pl;
    pl.letter = el.letter;
    switch (el.letter) {
      case 't': pl.kind = EdgeKind::Transition; break;
      case 'm': pl.kind = EdgeKind::Message; break;
      case 'y': pl.kind = EdgeKind::Dependency; break;
      default:
        if (el.stereotype) {
          pl.kind = edge_kind_from_keyword(*el.stereotype);
          if (!pl.kind) throw Error(ErrorKind::Schema, "unknown edge stereotype <<" + *el.stereotype + ">>");
        }
    }
    bool named = false;
    for (const auto& a : el.args) {
      if (const auto* ns = std::get_if<NameSpec>(&a)) {
        named = true;
        if (el.letter == 'm') {
          pl.label = ns->name;
          pl.returns = ns->classifier;
        } else {
          pl.label = ns->display();
        }
      }
      if (const auto* m = std::get_if<Multiplicity>(&a)) pl.multiplicity = m->text;
    }
    if (auto s = take_slot(el.letter)) {
      auto values = slot_values(*s, -1);
      if (!values.empty()) {
        if (values.front().id && arch_.edge(*values.front().id)) pl.source_edge = values.front().id;
        if (!named) pl.label = derive(el.letter, values.front()).name;
      }
    }
    (void)st;
    return pl;
  }

  void link(PartState& st, Id from, Id to) {
    const auto& d = arch_.diagram(st.letter);
    auto fk = d.element(from)->kind;
    auto tk = d.element(to)->kind;
    EdgeKind kind = st.pending && st.pending->kind ? *st.pending->kind : infer_edge(st.letter, fk, tk);
    std::optional<std::string> label, mult, returns;
    if (st.pending) {
      label = st.pending->label;
      mult = st.pending->multiplicity;
      returns = st.pending->returns;
    }
    cs_.note_edge(create_edge(arch_, st.letter, kind, from, to, label, mult, returns));
  }

  void finish_pending(PartState& st) {
    if (!st.pending) return;
    const auto& d = arch_.diagram(st.letter);
    if (d.kind().family == Family::State) {
      for (auto s : std::vector<Id>(st.cursor)) {
        const auto* state = arch_.diagram(st.letter).element(s);
        std::optional<Id> from;
        for (const auto& e : arch_.diagram(st.letter).elements)
          if (e.kind == ElementKind::State && e.container == state->container && e.id < s) from = e.id;
        if (!from) {
          auto r = find_or_create_element(arch_, st.letter, ElementKind::ControlNode,
                                          NameSpec{"initial", std::nullopt, std::nullopt}, std::nullopt,
                                          arch_.diagram(st.letter).element(s)->container);
          cs_.note_element(r);
          from = r.id;
        }
        link(st, *from, s);
      }
    } else {
      for (auto c : std::vector<Id>(st.cursor)) link(st, c, c);
    }
    st.pending.reset();
  }

  void run_items(const std::vector<Item>& items, PartState& st, int rep, std::optional<std::string> step,
                 bool top) {
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
      const auto& item = items[idx];
      if (const auto* g = item.group()) {
        run_group(*g, st);
        continue;
      }
      const auto& el = *item.element();
      if (is_link_letter(el.letter)) {
        st.pending = make_link(el, st);
        continue;
      }
      if (el.letter == 'h') {
        add_operations(el, st, rep);
        continue;
      }
      bool first = top && idx == 0;
      bool last = top && idx + 1 == items.size();
      auto names = resolve(el, st, rep, step, first, last);
      step.reset();
      auto kind = el.letter == 'e' ? ElementKind::Event : *element_kind_from_letter(el.letter);
      std::optional<Id> container;
      if (st.context) {
        auto ck = arch_.diagram(st.letter).element(*st.context)->kind;
        if ((ck == ElementKind::Partition && kind == ElementKind::Action) ||
            (ck == ElementKind::Region && (kind == ElementKind::State || kind == ElementKind::ControlNode)))
          container = st.context;
      }
      std::vector<Id> ids;
      for (const auto& n : names) {
        auto r = find_or_create_element(arch_, st.letter, kind, n.spec, n.stereotype, container);
        cs_.note_element(r);
        push_unique(ids, r.id);
      }
      if (kind == ElementKind::Partition || kind == ElementKind::Region) {
        st.context = ids.back();
        continue;
      }
      if (st.first_element && st.cross_letter == 'Y' && st.letter == 'U') {
        for (auto from : st.cross)
          for (auto to : ids)
            if (arch_.element(from)->kind == ElementKind::UseCase && arch_.element(to)->kind == ElementKind::UseCase)
              cs_.note_edge(create_edge(arch_, 'Y', EdgeKind::Realization, from, to));
      }
      st.first_element = false;
      bool chain = el.quant == Quant::Plus && ids.size() > 1;
      for (auto from : st.cursor) {
        if (chain) {
          link(st, from, ids.front());
        } else {
          for (auto to : ids) link(st, from, to);
        }
      }
      st.pending.reset();
      if (chain) {
        for (std::size_t k = 1; k < ids.size(); ++k) link(st, ids[k - 1], ids[k]);
        st.cursor = {ids.back()};
      } else {
        st.cursor = ids;
      }
    }
  }

  void run_group(const Group& g, PartState& st) {
    const Element* anchor = arch_.element(b_.anchor);
    if (anchor && !anchor->scenario.empty() && g.alternatives.size() >= 2) {
      auto steps = anchor->scenario;
      for (const auto& s : steps) {
        bool instance = s.find_first_of("[:") != std::string::npos;
        const std::vector<Item>* alt = &g.alternatives.front();
        for (const auto& a : g.alternatives)
          if (const auto* el = a.front().element(); el && el->letter == (instance ? 'i' : 'v')) alt = &a;
        run_items(*alt, st, -1, s, false);
      }
      return;
    }
    std::size_t n = 1;
    for (std::size_t s = 0; s < b_.slots.size(); ++s)
      if (!consumed_[s] && b_.slots[s].ids.size() > 1) {
        n = b_.slots[s].ids.size();
        break;
      }
    auto saved = consumed_;
    std::vector<bool> after = consumed_;
    for (std::size_t r = 0; r < n; ++r) {
      consumed_ = saved;
      run_items(g.alternatives.front(), st, n > 1 ? static_cast<int>(r) : -1, std::nullopt, false);
      after = consumed_;
    }
    consumed_ = after;
  }

  void add_operations(const ElementItem& el, PartState& st, int rep) {
    std::vector<NameSpec> ops = name_args(el);
    if (ops.empty())
      if (auto s = take_slot('h'))
        for (const auto& v : slot_values(*s, rep)) ops.push_back(derive('h', v));
    auto& d = arch_.diagram(st.letter);
    for (auto id : st.cursor) {
      auto* e = d.element(id);
      if (!e || e->kind != ElementKind::Class) continue;
      for (const auto& op : ops)
        if (std::find(e->operations.begin(), e->operations.end(), op) == e->operations.end()) {
          e->operations.push_back(op);
          ++cs_.refined;
        }
    }
  }
};

}  // namespace detail

/// Builds every target part of the attached rule from a binding.
inline ChangeSet build_target(Architecture& arch, const Attachment& att, const Binding& binding,
                              const PatternLibrary& lib = builtin_patterns()) {
  ChangeSet cs;
  cs.trace.rule_text = att.rule_text;
  cs.trace.anchor = binding.anchor;
  cs.trace.sources = binding.source_ids();
  detail::TargetBuilder(arch, att, binding, lib, cs).build();
  return cs;
}

struct ApplyReport {
  bool fired = false;
  std::string message;  // why the attachment is still pending
  ChangeSet changes;
};

/// Matches and builds one attachment. A failed match leaves the
/// architecture untouched and the attachment pending; any other error also
/// rolls the architecture back and propagates.
inline ApplyReport apply_rule(Architecture& arch, std::size_t index, const PatternLibrary& lib = builtin_patterns(),
                              int pass = 1) {
  const Attachment att = arch.attachments.at(index);
  ApplyReport report;
  Binding binding;
  try {
    binding = match_source(arch, att);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MatchFailure) throw;
    report.message = e.what();
    return report;
  }
  Architecture backup = arch;
  try {
    report.changes = build_target(arch, att, binding, lib);
  } catch (const Error& e) {
    arch = std::move(backup);
    if (e.kind() != ErrorKind::MatchFailure) throw Error(e.kind(), att.describe() + ": " + e.what());
    report.message = e.what();
    return report;
  }
  report.fired = true;
  report.changes.trace.pass = pass;
  auto& stored = arch.attachments[index];
  bool first = !stored.fired;
  stored.fired = true;
  if (first || report.changes.changed()) arch.traces.push_back(report.changes.trace);
  return report;
}

struct RunOptions {
  int max_passes = 100;
  const PatternLibrary* patterns = nullptr;  // built-ins when null
};

struct Application {
  std::size_t attachment = 0;
  ApplyReport report;
};

struct PassReport {
  int pass = 0;
  bool changed = false;
  std::vector<Application> applications;
};

struct RunReport {
  std::vector<PassReport> passes;
  std::vector<std::size_t> never_fired;  // attachment indices
  std::vector<std::string> pending_reasons;

  std::size_t fired_count(const Architecture& arch) const {
    return static_cast<std::size_t>(
        std::count_if(arch.attachments.begin(), arch.attachments.end(), [](const Attachment& a) { return a.fired; }));
  }
};

/// Sweeps all attachments in layer order of their host diagram until a pass
/// changes nothing.
inline RunReport run_to_fixpoint(Architecture& arch, const RunOptions& options = {}) {
  const PatternLibrary& lib = options.patterns ? *options.patterns : builtin_patterns();
  std::vector<std::size_t> order(arch.attachments.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return diagram_kind(arch.attachments[a].host_diagram).layer_rank <
           diagram_kind(arch.attachments[b].host_diagram).layer_rank;
  });
  RunReport report;
  for (int pass = 1; pass <= options.max_passes; ++pass) {
    PassReport pr;
    pr.pass = pass;
    for (auto i : order) {
      auto r = apply_rule(arch, i, lib, pass);
      pr.changed = pr.changed || r.changes.changed();
      pr.applications.push_back({i, std::move(r)});
    }
    bool done = !pr.changed;
    report.passes.push_back(std::move(pr));
    if (done) {
      for (std::size_t i = 0; i < arch.attachments.size(); ++i) {
        if (arch.attachments[i].fired) continue;
        report.never_fired.push_back(i);
        for (const auto& app : report.passes.back().applications)
          if (app.attachment == i) report.pending_reasons.push_back(app.report.message);
      }
      return report;
    }
  }
  std::string still;
  for (const auto& app : report.passes.back().applications)
    if (app.report.changes.changed()) still += "\n  " + arch.attachments[app.attachment].describe();
  throw Error(ErrorKind::NonTermination,
              "no fixpoint after " + std::to_string(options.max_passes) + " passes; still changing:" + still);
}

}  // namespace archweave
