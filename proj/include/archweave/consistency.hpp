#pragma once

#include <algorithm>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "archweave/model.hpp"

namespace archweave {

struct Orphan {
  Id id;
  char diagram = 'X';
  std::string label;
};

struct Coverage {
  char diagram = 'R';
  std::size_t traced = 0;
  std::size_t total = 0;
  double fraction() const { return total == 0 ? 1.0 : static_cast<double>(traced) / static_cast<double>(total); }
};

struct ConsistencyReport {
  std::vector<Orphan> orphans;          // untraced elements outside X
  std::vector<std::size_t> never_fired; // attachment indices
  std::vector<Coverage> coverage;       // every diagram except X
  bool ok = true;
};

/// Elements of the context diagram are given; every other element must be
/// the target of some trace, and every attachment must have fired.
inline ConsistencyReport check(const Architecture& arch) {
  ConsistencyReport r;
  std::set<Id> traced;
  for (const auto& t : arch.traces) traced.insert(t.targets.begin(), t.targets.end());
  for (const auto& d : arch.diagrams) {
    if (d.letter == 'X') continue;
    Coverage c{d.letter, 0, d.elements.size()};
    for (const auto& e : d.elements) {
      if (traced.count(e.id)) {
        ++c.traced;
      } else {
        r.orphans.push_back({e.id, d.letter, e.label()});
      }
    }
    r.coverage.push_back(c);
  }
  // A fired attachment must also have left a trace.
  for (std::size_t i = 0; i < arch.attachments.size(); ++i) {
    const auto& a = arch.attachments[i];
    bool traced_rule = std::any_of(arch.traces.begin(), arch.traces.end(),
                                   [&](const TraceLink& t) { return t.rule_text == a.rule_text; });
    if (!a.fired || !traced_rule) r.never_fired.push_back(i);
  }
  r.ok = r.orphans.empty() && r.never_fired.empty();
  return r;
}

inline std::string to_text(const ConsistencyReport& r, const Architecture& arch) {
  std::ostringstream os;
  os << (r.ok ? "consistent" : "NOT consistent") << "\n";
  for (const auto& c : r.coverage) {
    os << "  " << c.diagram << " coverage " << c.traced << "/" << c.total;
    os.precision(3);
    os << " (" << c.fraction() << ")\n";
  }
  for (const auto& o : r.orphans) os << "orphan " << o.diagram << " @" << o.id.value << " " << o.label << "\n";
  for (auto i : r.never_fired) os << "never fired: " << arch.attachments[i].describe() << "\n";
  return os.str();
}

struct Equivalence {
  bool equal = true;
  std::optional<char> first_difference;
  std::vector<std::string> element_diff;  // "-" only in the first, "+" only in the second
  std::vector<std::string> edge_diff;
};

namespace detail {

inline std::vector<std::string> diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::vector<std::string> only_a, only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  for (auto& s : only_a) out.push_back("- " + s);
  for (auto& s : only_b) out.push_back("+ " + s);
  return out;
}

}  // namespace detail

/// Diagram-wise isomorphism over all 13 letters; reports the first letter
/// (layer order) that differs.
inline Equivalence equivalent(const Architecture& a1, const Architecture& a2) {
  Equivalence eq;
  for (const auto& kind : kDiagramKinds) {
    const auto* d1 = a1.find_diagram(kind.letter);
    const auto* d2 = a2.find_diagram(kind.letter);
    if (!d1 && !d2) continue;
    Diagram e1, e2;
    e1.letter = e2.letter = kind.letter;
    const Diagram& x = d1 ? *d1 : e1;
    const Diagram& y = d2 ? *d2 : e2;
    if (d1 && d2 && diagram_isomorphic(a1, x, a2, y)) continue;
    eq.equal = false;
    eq.first_difference = kind.letter;
    if (!d1 || !d2) eq.element_diff.push_back(std::string(d1 ? "- diagram " : "+ diagram ") + kind.letter);
    auto els = detail::diff_lines(element_descriptors(x), element_descriptors(y));
    auto eds = detail::diff_lines(edge_descriptors(a1, x), edge_descriptors(a2, y));
    eq.element_diff.insert(eq.element_diff.end(), els.begin(), els.end());
    eq.edge_diff = std::move(eds);
    return eq;
  }
  return eq;
}

}  // namespace archweave
