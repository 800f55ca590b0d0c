#pragma once

#include <optional>
#include <string>
#include <vector>

#include "archweave/model.hpp"
#include "archweave/name_spec.hpp"

namespace archweave {

/// Source elements matched for one source item. Member items (an action
/// inside a partition, a state inside a region) bind every member; `h`
/// binds the operations of its class.
struct Slot {
  char letter = 'v';
  std::vector<Id> ids;
  std::vector<NameSpec> operations;
  bool implicit = false;  // members added for a trailing container item

  bool empty() const { return ids.empty() && operations.empty(); }
};

struct Binding {
  Id anchor;
  std::vector<Slot> slots;  // source item order

  std::vector<Id> source_ids() const {
    std::vector<Id> out;
    for (const auto& s : slots)
      for (auto id : s.ids)
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    return out;
  }
};

struct ChangeSet {
  std::vector<Id> created_elements;
  std::vector<Id> merged_elements;
  std::vector<Id> created_edges;
  std::vector<Id> merged_edges;
  std::size_t refined = 0;  // containers filled in on merge
  std::size_t renamed = 0;  // pattern placeholders renamed in place
  std::vector<char> created_diagrams;
  TraceLink trace;

  bool changed() const {
    return !created_elements.empty() || !created_edges.empty() || refined > 0 || renamed > 0 ||
           !created_diagrams.empty();
  }
  std::size_t merged() const { return merged_elements.size() + merged_edges.size(); }

  void note_element(ElementResult r) {
    auto& list = r.created ? created_elements : merged_elements;
    if (std::find(created_elements.begin(), created_elements.end(), r.id) == created_elements.end() &&
        std::find(list.begin(), list.end(), r.id) == list.end())
      list.push_back(r.id);
    if (r.refined) ++refined;
    if (std::find(trace.targets.begin(), trace.targets.end(), r.id) == trace.targets.end())
      trace.targets.push_back(r.id);
  }

  void note_edge(EdgeResult r) {
    auto& list = r.created ? created_edges : merged_edges;
    if (std::find(created_edges.begin(), created_edges.end(), r.id) == created_edges.end() &&
        std::find(list.begin(), list.end(), r.id) == list.end())
      list.push_back(r.id);
    if (std::find(trace.targets.begin(), trace.targets.end(), r.id) == trace.targets.end())
      trace.targets.push_back(r.id);
  }
};

}  // namespace archweave
