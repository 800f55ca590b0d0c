#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "archweave/error.hpp"
#include "archweave/name_spec.hpp"

namespace archweave {

// Rule notation: uppercase letters name diagrams, lowercase letters name
// elements, `+`/`?`/`|` and parentheses have their regular-expression
// meaning, and parenthesized lists after an element are its arguments.

inline constexpr std::string_view kDiagramLetters = "XRBAUCSZYJTQM";
// z, y, m and t are link items (association/flow, dependency, message,
// transition); h is an operation of the preceding class.
inline constexpr std::string_view kItemLetters = "evcizaunrshlmqpty";

inline bool is_diagram_letter(char c) { return kDiagramLetters.find(c) != std::string_view::npos; }
inline bool is_item_letter(char c) { return kItemLetters.find(c) != std::string_view::npos; }
inline bool is_link_letter(char c) { return c == 'z' || c == 'y' || c == 'm' || c == 't'; }

enum class Quant { One, Plus, Opt };

/// `{name}`, `{{name}}`, `{{{name}}}`: business process, system use case
/// realization and sequence diagram patterns.
struct PatternRef {
  int depth = 1;
  std::string name;
  bool operator==(const PatternRef&) const = default;
};

struct Multiplicity {
  std::string text;
  bool operator==(const Multiplicity&) const = default;
};

struct StateList {
  std::vector<std::string> states;
  bool operator==(const StateList&) const = default;
};

using Arg = std::variant<NameSpec, PatternRef, Multiplicity, StateList>;

struct Item;

struct ElementItem {
  char letter = 'v';
  std::optional<std::string> stereotype;
  std::vector<Arg> args;
  Quant quant = Quant::One;
  bool operator==(const ElementItem&) const = default;
};

struct Group {
  std::vector<std::vector<Item>> alternatives;  // size 1 when there is no `|`
  Quant quant = Quant::One;
  bool operator==(const Group&) const;
};

struct Item {
  std::variant<ElementItem, Group> node;
  bool operator==(const Item&) const = default;

  const ElementItem* element() const { return std::get_if<ElementItem>(&node); }
  const Group* group() const { return std::get_if<Group>(&node); }
};

inline bool Group::operator==(const Group& o) const {
  return quant == o.quant && alternatives == o.alternatives;
}

struct DiagramPart {
  char diagram = 'X';
  std::vector<Item> items;
  bool operator==(const DiagramPart&) const = default;
};

struct RuleAst {
  std::vector<DiagramPart> parts;  // parts[0] is the source

  const DiagramPart& source() const { return parts.front(); }
  bool operator==(const RuleAst&) const = default;
};

namespace detail {

class RuleParser {
public:
  explicit RuleParser(std::string_view text) : text_(text) {}

  RuleAst parse() {
    RuleAst ast;
    skip_ws();
    if (at_end()) throw Error(ErrorKind::Syntax, "empty rule", 0);
    while (!at_end()) {
      char c = peek();
      if (!std::isupper(static_cast<unsigned char>(c)))
        throw Error(ErrorKind::Syntax, std::string("expected diagram letter, found '") + c + "'", pos_);
      if (!is_diagram_letter(c))
        throw Error(ErrorKind::Syntax, std::string("unknown diagram letter '") + c + "'", pos_);
      DiagramPart part;
      part.diagram = c;
      std::size_t start = pos_++;
      parse_sequence(part.items, /*in_group=*/false);
      if (part.items.empty())
        throw Error(ErrorKind::Syntax, std::string("diagram part '") + c + "' has no elements", start);
      ast.parts.push_back(std::move(part));
    }
    if (ast.parts.size() < 2)
      throw Error(ErrorKind::Syntax, "a rule needs a source and at least one target part (fewer than 2 parts)",
                  text_.size());
    if (ast.parts[0].diagram == ast.parts[1].diagram)
      throw Error(ErrorKind::Syntax, "source and first target diagram must differ", 0);
    return ast;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool at_end() { skip_ws(); return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  // Parses items until an uppercase letter (part boundary), ')' or '|'.
  void parse_sequence(std::vector<Item>& out, bool in_group) {
    while (!at_end()) {
      char c = peek();
      if (std::isupper(static_cast<unsigned char>(c))) {
        if (in_group) throw Error(ErrorKind::Syntax, "diagram letter inside a group", pos_);
        return;
      }
      if (c == ')' || c == '|') {
        if (!in_group) throw Error(ErrorKind::Syntax, std::string("unbalanced '") + c + "'", pos_);
        return;
      }
      if (c == '(') {
        parse_group(out);
      } else if (std::islower(static_cast<unsigned char>(c))) {
        parse_element(out);
      } else {
        throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", pos_);
      }
    }
  }

  Quant parse_quant() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '+') { ++pos_; return Quant::Plus; }
    if (pos_ < text_.size() && text_[pos_] == '?') { ++pos_; return Quant::Opt; }
    return Quant::One;
  }

  void parse_group(std::vector<Item>& out) {
    std::size_t open = pos_++;
    Group g;
    while (true) {
      std::vector<Item> alt;
      parse_sequence(alt, /*in_group=*/true);
      if (pos_ >= text_.size()) throw Error(ErrorKind::Syntax, "unbalanced '('", open);
      if (alt.empty()) throw Error(ErrorKind::Syntax, "empty group alternative", pos_);
      g.alternatives.push_back(std::move(alt));
      if (text_[pos_] == '|') { ++pos_; continue; }
      ++pos_;  // ')'
      break;
    }
    g.quant = parse_quant();
    // A plain group with no quantifier is just its items.
    if (g.quant == Quant::One && g.alternatives.size() == 1) {
      for (auto& it : g.alternatives.front()) out.push_back(std::move(it));
      return;
    }
    out.push_back(Item{std::move(g)});
  }

  std::optional<std::string> parse_stereotype() {
    struct Delim { std::string_view open, close; };
    static constexpr Delim delims[] = {{"\xC2\xAB", "\xC2\xBB"},
                                       {"<<", ">>"},
                                       {"\xE2\x9F\xA8\xE2\x9F\xA8", "\xE2\x9F\xA9\xE2\x9F\xA9"}};
    skip_ws();
    for (const auto& d : delims) {
      if (!starts_with(d.open)) continue;
      std::size_t start = pos_;
      pos_ += d.open.size();
      auto close = text_.find(d.close, pos_);
      if (close == std::string_view::npos) throw Error(ErrorKind::Syntax, "unterminated stereotype", start);
      std::string s = trim(text_.substr(pos_, close - pos_));
      if (s.empty()) throw Error(ErrorKind::Syntax, "empty stereotype", start);
      pos_ = close + d.close.size();
      return s;
    }
    return std::nullopt;
  }

  static std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  }

  // Index of the ')' matching the '(' at `open`.
  std::size_t matching_paren(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < text_.size(); ++i) {
      if (text_[i] == '(') ++depth;
      if (text_[i] == ')' && --depth == 0) return i;
    }
    throw Error(ErrorKind::Syntax, "unbalanced '('", open);
  }

  // After an element, '(' opens a group only when its content has a
  // top-level '|' or it is quantified and reads as an item sequence.
  bool paren_is_group(std::size_t open) const {
    std::size_t close = matching_paren(open);
    std::string_view content = text_.substr(open + 1, close - open - 1);
    int depth = 0;
    for (char c : content) {
      if (c == '(' || c == '{') ++depth;
      if (c == ')' || c == '}') --depth;
      if (c == '|' && depth == 0) return true;
    }
    std::size_t after = close + 1;
    while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
    if (after >= text_.size() || (text_[after] != '+' && text_[after] != '?')) return false;
    try {
      RuleParser sub(content);
      std::vector<Item> items;
      sub.parse_sequence(items, /*in_group=*/true);
      return sub.at_end() && !items.empty();
    } catch (const Error&) {
      return false;
    }
  }

  void parse_element(std::vector<Item>& out) {
    std::size_t start = pos_;
    char letter = text_[pos_++];
    if (!is_item_letter(letter))
      throw Error(ErrorKind::Syntax, std::string("unknown element letter '") + letter + "'", start);
    ElementItem el;
    el.letter = letter;
    el.stereotype = parse_stereotype();
    std::vector<Item> hoisted;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(' && !paren_is_group(pos_)) {
      parse_args(el, hoisted);
    }
    el.quant = parse_quant();
    out.push_back(Item{std::move(el)});
    for (auto& h : hoisted) out.push_back(std::move(h));
  }

  void parse_args(ElementItem& el, std::vector<Item>& hoisted) {
    std::size_t open = pos_;
    std::size_t close = matching_paren(open);
    std::size_t entry_start = open + 1;
    int depth = 0;
    std::vector<std::pair<std::size_t, std::string_view>> entries;
    for (std::size_t i = open + 1; i <= close; ++i) {
      char c = text_[i];
      if (i == close || (c == ',' && depth == 0)) {
        entries.emplace_back(entry_start, text_.substr(entry_start, i - entry_start));
        entry_start = i + 1;
        continue;
      }
      if (c == '(' || c == '{' || c == '[' || c == '<') ++depth;
      if (c == ')' || c == '}' || c == ']' || c == '>') --depth;
      if (depth < 0) throw Error(ErrorKind::Syntax, std::string("unbalanced '") + c + "'", i);
    }
    if (depth != 0) throw Error(ErrorKind::Syntax, "unbalanced brackets in arguments", open);
    for (auto [offset, raw] : entries) {
      std::string entry = trim(raw);
      std::size_t lead = raw.find_first_not_of(" \t\r\n");
      std::size_t at = lead == std::string_view::npos ? offset : offset + lead;
      if (entry.empty()) throw Error(ErrorKind::Syntax, "empty argument", at);
      if (entry.front() == '{') {
        el.args.push_back(parse_pattern_ref(entry, at, hoisted));
      } else if (is_multiplicity(entry)) {
        el.args.push_back(Multiplicity{entry});
      } else {
        try {
          el.args.push_back(parse_name_spec(entry));
        } catch (const Error& e) {
          throw Error(ErrorKind::Syntax, std::string(e.what()), at + e.offset().value_or(0));
        }
      }
    }
    // `([Sent],[Registered])` is a list of states.
    if (el.args.size() >= 2) {
      StateList list;
      for (const auto& a : el.args) {
        const auto* ns = std::get_if<NameSpec>(&a);
        if (!ns || ns->name || ns->classifier || !ns->state) { list.states.clear(); break; }
        list.states.push_back(*ns->state);
      }
      if (!list.states.empty()) el.args = {Arg{std::move(list)}};
    }
    pos_ = close + 1;
  }

  static bool is_multiplicity(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == 0 || s.substr(i, 2) != "..") return false;
    auto rest = s.substr(i + 2);
    if (rest == "*") return true;
    if (rest.empty()) return false;
    for (char c : rest)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return std::stoul(std::string(rest)) >= std::stoul(std::string(s.substr(0, i)));
  }

  // `{Office}` optionally followed by element letters, as in `v({Office}i)`;
  // the trailing letters become items after the element.
  static PatternRef parse_pattern_ref(std::string_view entry, std::size_t at, std::vector<Item>& hoisted) {
    std::size_t open = 0;
    while (open < entry.size() && entry[open] == '{') ++open;
    auto close = entry.find('}', open);
    if (close == std::string_view::npos) throw Error(ErrorKind::Syntax, "unbalanced '{'", at);
    std::size_t end = close;
    while (end < entry.size() && entry[end] == '}') ++end;
    if (end - close != open) throw Error(ErrorKind::Syntax, "mismatched pattern braces", at + close);
    if (open > 3) throw Error(ErrorKind::Syntax, "pattern brace depth must be 1..3", at);
    std::string name = trim(entry.substr(open, close - open));
    if (name.empty()) throw Error(ErrorKind::Syntax, "empty pattern name", at);
    auto tail = entry.substr(end);
    if (!tail.empty()) {
      RuleParser sub(tail);
      try {
        sub.parse_sequence(hoisted, /*in_group=*/true);
      } catch (const Error& e) {
        throw Error(ErrorKind::Syntax, "after pattern reference: " + std::string(e.what()), at + end);
      }
      if (!sub.at_end()) throw Error(ErrorKind::Syntax, "unexpected text after pattern reference", at + end);
    }
    return PatternRef{static_cast<int>(open), std::move(name)};
  }
};

inline void render_items(const std::vector<Item>& items, std::string& out);

inline void render_quant(Quant q, std::string& out) {
  if (q == Quant::Plus) out += '+';
  if (q == Quant::Opt) out += '?';
}

inline void render_arg(const Arg& arg, char letter, std::string& out) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, NameSpec>) {
          out += render(a, letter == 'm' ? "::" : ":");
        } else if constexpr (std::is_same_v<T, PatternRef>) {
          out += std::string(a.depth, '{') + a.name + std::string(a.depth, '}');
        } else if constexpr (std::is_same_v<T, Multiplicity>) {
          out += a.text;
        } else {
          for (std::size_t i = 0; i < a.states.size(); ++i) {
            if (i) out += ',';
            out += "[" + a.states[i] + "]";
          }
        }
      },
      arg);
}

inline void render_items(const std::vector<Item>& items, std::string& out) {
  for (const auto& item : items) {
    if (const auto* el = item.element()) {
      out += el->letter;
      if (el->stereotype) out += "<<" + *el->stereotype + ">>";
      if (!el->args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < el->args.size(); ++i) {
          if (i) out += ',';
          render_arg(el->args[i], el->letter, out);
        }
        out += ')';
      }
      render_quant(el->quant, out);
    } else {
      const auto& g = *item.group();
      out += '(';
      for (std::size_t i = 0; i < g.alternatives.size(); ++i) {
        if (i) out += '|';
        render_items(g.alternatives[i], out);
      }
      out += ')';
      render_quant(g.quant, out);
    }
  }
}

}  // namespace detail

inline RuleAst parse_rule(std::string_view text) { return detail::RuleParser(text).parse(); }

/// Canonical text; stereotypes use ASCII `<< >>`.
inline std::string render_rule(const RuleAst& ast) {
  std::string out;
  for (const auto& part : ast.parts) {
    out += part.diagram;
    detail::render_items(part.items, out);
  }
  return out;
}

namespace detail {

inline void walk_items(const std::vector<Item>& items, std::string& out, std::string_view sep = " ") {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    if (const auto* el = items[i].element()) {
      out += el->letter;
      render_quant(el->quant, out);
    } else {
      const auto& g = *items[i].group();
      out += '(';
      for (std::size_t a = 0; a < g.alternatives.size(); ++a) {
        if (a) out += " | ";
        walk_items(g.alternatives[a], out);
      }
      out += ')';
      render_quant(g.quant, out);
    }
  }
}

inline void dump_items(const std::vector<Item>& items, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& item : items) {
    if (const auto* el = item.element()) {
      out += pad + "element " + el->letter;
      if (el->quant != Quant::One) out += el->quant == Quant::Plus ? " plus" : " opt";
      if (el->stereotype) out += " <<" + *el->stereotype + ">>";
      for (const auto& arg : el->args) {
        out += ' ';
        std::visit(
            [&](const auto& a) {
              using T = std::decay_t<decltype(a)>;
              if constexpr (std::is_same_v<T, NameSpec>) out += "name ";
              else if constexpr (std::is_same_v<T, PatternRef>) out += "pattern ";
              else if constexpr (std::is_same_v<T, Multiplicity>) out += "multiplicity ";
              else out += "states ";
            },
            arg);
        render_arg(arg, el->letter, out);
      }
      out += '\n';
    } else {
      const auto& g = *item.group();
      out += pad + "group";
      if (g.quant != Quant::One) out += g.quant == Quant::Plus ? " plus" : " opt";
      out += '\n';
      for (std::size_t a = 0; a < g.alternatives.size(); ++a) {
        out += pad + "  alternative " + std::to_string(a + 1) + '\n';
        dump_items(g.alternatives[a], depth + 2, out);
      }
    }
  }
}

}  // namespace detail

/// Letters of a part in walk order, e.g. `S[r, s]` or `Z[(v+ i+)+]`.
inline std::string walk_text(const DiagramPart& part) {
  std::string out(1, part.diagram);
  out += '[';
  detail::walk_items(part.items, out, ", ");
  out += ']';
  return out;
}

/// Indented tree view of the parsed rule.
inline std::string dump_ast(const RuleAst& ast) {
  std::string out;
  for (std::size_t i = 0; i < ast.parts.size(); ++i) {
    out += std::string(i == 0 ? "source " : "target ") + ast.parts[i].diagram + '\n';
    detail::dump_items(ast.parts[i].items, 1, out);
  }
  return out;
}

}  // namespace archweave
