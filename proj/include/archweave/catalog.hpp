#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "archweave/error.hpp"
#include "archweave/rule.hpp"

namespace archweave {

struct CatalogEntry {
  std::string key;                  // S1..S6, C1..C14, or the index of a stub
  std::optional<std::string> index; // catalog index such as "R2.5a"
  std::string short_form;           // empty for stubs
  std::optional<std::string> long_form;
  std::string description;
  std::optional<RuleAst> ast;       // absent for stubs

  bool executable() const { return ast.has_value(); }
};

namespace detail {

inline CatalogEntry entry(std::string key, std::optional<std::string> index, std::string form,
                          std::optional<std::string> long_form, std::string description) {
  CatalogEntry e{std::move(key), std::move(index), std::move(form), std::move(long_form), std::move(description),
                 std::nullopt};
  e.ast = parse_rule(e.short_form);
  return e;
}

inline CatalogEntry stub(std::string index, std::string description) {
  return CatalogEntry{index, index, "", std::nullopt, std::move(description), std::nullopt};
}

}  // namespace detail

/// Every rule form with a printed notation, plus stubs for indexed rules
/// whose notation is not available.
inline const std::vector<CatalogEntry>& builtin_catalog() {
  using detail::entry;
  using detail::stub;
  static const std::vector<CatalogEntry> catalog = {
      entry("S1", std::nullopt, "XeRi", std::nullopt, "context event -> input object of the same class"),
      entry("S2", std::nullopt, "XevRv", std::nullopt, "context event and main process -> subprocess"),
      entry("S3", std::nullopt, "XiRi", std::nullopt, "context object -> output object of the same class"),
      entry("S4", std::nullopt, "Xz<<control>>Rz<<data>>", std::nullopt,
            "control flow in the context diagram -> data flow between the mapped elements"),
      entry("S5", std::nullopt, "Xz<<data>>Rz<<data>>", std::nullopt,
            "data flow in the context diagram -> data flow between the mapped elements"),
      entry("S6", std::nullopt, "Xi([State])Ri([State])", std::nullopt, "context object in a state -> object in that state"),
      entry("C1", std::nullopt, "XeviRivi", std::nullopt,
            "event, process and output object -> subprocess with its input and output objects"),
      entry("C2", "R1.20", "ReviBaua", "Rev<<subprocess>>i<<product>>Baua",
            "subprocess -> business use case; event and product -> associated actors"),
      entry("C3", "R2.5", "BuAn(v+|i+)+n", "Bu<<scenarios>>An<<start>>(v+|i+)+n<<stop>>",
            "use case scenario -> activity flow between start and stop nodes"),
      entry("C4", "R2.5a", "BauA(pv+)+", std::nullopt,
            "use case and its actors -> partitions holding actions (pattern capable)"),
      entry("C5", "R2.9a", "RiviA(v+i+)+", std::nullopt,
            "subprocess with input and output objects -> object flow through actions (pattern capable)"),
      entry("C6", std::nullopt, "ApUau", std::nullopt,
            "partition -> actor associated with one system use case per contained action"),
      entry("C7", std::nullopt, "AiviCczc", std::nullopt, "action with input and output objects -> associated classes"),
      entry("C8", std::nullopt, "AivSrst", std::nullopt,
            "object in a state consumed by an action -> state and transition in the class region"),
      entry("C9", "R3.5a", "UauZ(pv+)+", std::nullopt,
            "system use case and its actor -> partitions holding actions (pattern capable)"),
      entry("C10", std::nullopt, "CchZ(iv)+i", "CchZiv", "class and operations -> object flow through actions"),
      entry("C11", "R3.12b", "SrsZ(v+i+)+", std::nullopt,
            "region and states -> object flow with input and output states (pattern capable)"),
      entry("C12", std::nullopt, "ZpvYuUu", std::nullopt,
            "partition actions -> implementation use cases realizing the system use case"),
      entry("C13", "R4.6a", "YuQ(lm+)+", std::nullopt,
            "implementation use case -> messages between lifelines (pattern capable)"),
      entry("C14", std::nullopt, "QlmlMqyq", std::nullopt,
            "message between lifelines -> dependency between components"),
      stub("R1.5a", "decomposition of the main process into subprocesses by products"),
      stub("R1.5c", "decomposition of the main process by event and product"),
      stub("R1.22", "several instances connected to a process -> actors of one use case"),
      stub("R2.26a", "data flow through instances of one class -> life cycle of that class"),
  };
  return catalog;
}

/// Looks an entry up by key (C7), index (R2.5a) or exact short form.
inline const CatalogEntry* find_catalog_entry(std::string_view id) {
  for (const auto& e : builtin_catalog())
    if (e.key == id || (e.index && *e.index == id) || (!e.short_form.empty() && e.short_form == id)) return &e;
  return nullptr;
}

inline const CatalogEntry& catalog_entry(std::string_view id) {
  if (const auto* e = find_catalog_entry(id)) return *e;
  throw Error(ErrorKind::NotFound, "no catalog rule '" + std::string(id) + "'");
}

/// The parsed rule of an executable entry; stubs raise NotExecutable.
inline const RuleAst& executable_rule(const CatalogEntry& e) {
  if (!e.ast) throw Error(ErrorKind::NotExecutable, "catalog rule " + e.key + " has no executable form");
  return *e.ast;
}

}  // namespace archweave
