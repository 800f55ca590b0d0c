#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "archweave/error.hpp"
#include "archweave/model.hpp"

namespace archweave {

// Line-oriented model format (`*.arch`):
//
//   architecture "Office"
//   diagram X "Context Diagram" {
//     event "Request"
//     activity "Office"
//     instance ":Decision"
//     edge control "Request" -> "Office"
//     rule on event "Request": XeviRivi
//   }
//   rule on R activity "1.Request_service": ReviBaua
//
// Writers additionally emit `@N` ids, `trace` lines and `pattern-use`
// blocks so that a written architecture reads back unchanged.

namespace detail {

struct Token {
  enum Type { Word, String, LBrace, RBrace, Arrow, Colon, Comma, Semi, Stereo, IdRef, Int, End } type = End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

class ModelLexer {
public:
  explicit ModelLexer(std::string_view src) : src_(src) {}

  const Token& peek() {
    if (!ahead_) ahead_ = lex();
    return *ahead_;
  }

  Token next() {
    Token t = peek();
    ahead_.reset();
    return t;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw Error(ErrorKind::Syntax, msg, t.line, t.col);
  }

  Token expect(Token::Type type, std::string_view what) {
    Token t = next();
    if (t.type != type) fail(t, "expected " + std::string(what) + describe(t));
    return t;
  }

  void expect_word(std::string_view w) {
    Token t = next();
    if (t.type != Token::Word || t.text != w) fail(t, "expected '" + std::string(w) + "'" + describe(t));
  }

  bool accept_word(std::string_view w) {
    if (peek().type == Token::Word && peek().text == w) {
      next();
      return true;
    }
    return false;
  }

  /// Raw text up to the end of the current line (rule text).
  std::string rest_of_line() {
    ahead_.reset();
    std::size_t end = src_.find('\n', pos_);
    if (end == std::string_view::npos) end = src_.size();
    std::string_view s = src_.substr(pos_, end - pos_);
    col_ += s.size();
    pos_ = end;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  }

  static std::string describe(const Token& t) {
    if (t.type == Token::End) return ", found end of input";
    return ", found '" + t.text + "'";
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::optional<Token> ahead_;

  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  void advance() {
    if (cur() == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token lex() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(cur()))) {
        advance();
      } else if (cur() == '#') {
        while (pos_ < src_.size() && cur() != '\n') advance();
      } else {
        break;
      }
    }
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    char c = cur();
    if (c == '{' || c == '}') {
      t.type = c == '{' ? Token::LBrace : Token::RBrace;
      t.text = std::string(1, c);
      advance();
    } else if (c == ':' || c == ',' || c == ';') {
      t.type = c == ':' ? Token::Colon : (c == ',' ? Token::Comma : Token::Semi);
      t.text = std::string(1, c);
      advance();
    } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      t.type = Token::Arrow;
      t.text = "->";
      advance();
      advance();
    } else if (c == '<' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '<') {
      advance();
      advance();
      std::size_t end = src_.find(">>", pos_);
      if (end == std::string_view::npos) throw Error(ErrorKind::Syntax, "unterminated stereotype", t.line, t.col);
      t.type = Token::Stereo;
      t.text = std::string(src_.substr(pos_, end - pos_));
      while (pos_ < end + 2) advance();
    } else if (c == '"') {
      advance();
      t.type = Token::String;
      while (true) {
        if (pos_ >= src_.size() || cur() == '\n') throw Error(ErrorKind::Syntax, "unterminated string", t.line, t.col);
        char ch = cur();
        advance();
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= src_.size()) throw Error(ErrorKind::Syntax, "unterminated string", t.line, t.col);
          ch = cur();
          advance();
          if (ch == 'n') ch = '\n';
        }
        t.text += ch;
      }
    } else if (c == '@') {
      advance();
      t.type = Token::IdRef;
      while (std::isdigit(static_cast<unsigned char>(cur()))) {
        t.text += cur();
        advance();
      }
      if (t.text.empty()) throw Error(ErrorKind::Syntax, "expected digits after '@'", t.line, t.col);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.type = Token::Int;
      while (std::isdigit(static_cast<unsigned char>(cur()))) {
        t.text += cur();
        advance();
      }
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      t.type = Token::Word;
      while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_' || cur() == '-') {
        t.text += cur();
        advance();
      }
    } else {
      throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", t.line, t.col);
    }
    return t;
  }
};

inline bool is_letter_token(const Token& t) {
  return t.type == Token::Word && t.text.size() == 1 && is_diagram_letter(t.text[0]);
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

/// Rule letter for a host keyword in `rule on`: element keywords plus
/// `edge` (z) and `message` (m).
inline std::optional<char> host_letter(std::string_view w) {
  if (auto k = element_kind_from_keyword(w)) return letter_of(*k);
  if (w == "edge") return 'z';
  if (w == "message") return 'm';
  return std::nullopt;
}

inline std::string_view host_keyword(char letter) {
  if (letter == 'z') return "edge";
  if (letter == 'm') return "message";
  if (auto k = element_kind_from_letter(letter)) return keyword_of(*k);
  return "";
}

class ModelReader {
public:
  explicit ModelReader(std::string_view text) : lex_(text) {}

  Architecture read() {
    lex_.expect_word("architecture");
    arch_.name = lex_.expect(Token::String, "architecture name").text;
    read_body(/*allow_header_end=*/false);
    finish();
    return std::move(arch_);
  }

  /// Reads a single `diagram` block (pattern files) into `arch`.
  Architecture read_diagram_only() {
    arch_.name = "pattern";
    const Token& t = lex_.peek();
    if (t.type != Token::Word || t.text != "diagram") lex_.fail(t, "expected 'diagram'" + ModelLexer::describe(t));
    read_body(false);
    finish();
    if (arch_.diagrams.size() != 1) throw Error(ErrorKind::Syntax, "pattern must contain exactly one diagram");
    if (!arch_.attachments.empty()) throw Error(ErrorKind::Syntax, "pattern must not contain rules");
    return std::move(arch_);
  }

  ModelLexer& lexer() { return lex_; }

private:
  struct PendingElement {
    char diagram;
    std::size_t index;
    std::optional<std::size_t> container_index;
  };
  struct Endpoint {
    char diagram;
    std::optional<ElementKind> kind;
    NameSpec spec;
    std::optional<std::string> stereotype;
    Token at;
  };
  struct PendingEdge {
    char diagram;
    EdgeKind kind;
    Endpoint from, to;
    std::optional<std::string> label, multiplicity, returns;
    std::optional<Id> id;
    Token at;
  };
  struct PendingList {
    char diagram;
    bool scenario;
    std::string owner;
    std::vector<std::string> items;
    Token at;
  };
  struct PendingTrace {
    TraceLink link;
    Token at;
  };

  ModelLexer lex_;
  Architecture arch_;
  std::vector<PendingElement> elements_;
  std::vector<PendingEdge> edges_;
  std::vector<PendingList> lists_;
  std::vector<PendingTrace> traces_;

  void read_body(bool) {
    while (true) {
      Token t = lex_.peek();
      if (t.type == Token::End) return;
      if (t.type != Token::Word) lex_.fail(t, "expected a declaration" + ModelLexer::describe(t));
      if (t.text == "diagram") {
        read_diagram();
      } else if (t.text == "rule") {
        read_rule(std::nullopt);
      } else if (t.text == "trace") {
        read_trace();
      } else if (t.text == "pattern-use") {
        read_pattern_use();
      } else {
        lex_.fail(t, "unknown declaration '" + t.text + "'");
      }
    }
  }

  char read_letter() {
    Token t = lex_.next();
    if (!is_letter_token(t)) lex_.fail(t, "expected a diagram letter" + ModelLexer::describe(t));
    return t.text[0];
  }

  std::optional<Id> read_id() {
    if (lex_.peek().type != Token::IdRef) return std::nullopt;
    return Id{static_cast<std::uint32_t>(std::stoul(lex_.next().text))};
  }

  NameSpec read_spec(const Token& t) {
    try {
      return parse_name_spec(t.text);
    } catch (const Error& e) {
      lex_.fail(t, e.what());
    }
  }

  void read_diagram() {
    lex_.expect_word("diagram");
    Token letter_tok = lex_.peek();
    char letter = read_letter();
    if (arch_.find_diagram(letter)) lex_.fail(letter_tok, std::string("duplicate diagram ") + letter);
    auto& d = ensure_diagram(arch_, letter);
    d.name = lex_.expect(Token::String, "diagram name").text;
    lex_.expect(Token::LBrace, "'{'");
    while (true) {
      Token t = lex_.peek();
      if (t.type == Token::RBrace) {
        lex_.next();
        return;
      }
      if (t.type != Token::Word) lex_.fail(t, "expected a diagram statement" + ModelLexer::describe(t));
      if (t.text == "edge") {
        read_edge(letter);
      } else if (t.text == "rule") {
        read_rule(letter);
      } else if (t.text == "scenario" || t.text == "operations") {
        read_list(letter);
      } else {
        read_element(letter, std::nullopt, /*nested=*/false);
      }
    }
  }

  void read_element(char letter, std::optional<std::size_t> container, bool nested) {
    Token kw = lex_.next();
    auto kind = element_kind_from_keyword(kw.text);
    if (kw.type != Token::Word || !kind) lex_.fail(kw, "unknown element kind '" + kw.text + "'");
    Token name = lex_.expect(Token::String, "element name");
    Element e;
    e.kind = *kind;
    e.spec = read_spec(name);
    if (lex_.peek().type == Token::Stereo) e.stereotype = lex_.next().text;
    if (auto id = read_id()) e.id = *id;
    auto& d = arch_.diagram(letter);
    if (!element_allowed(d.kind().family, e.kind))
      lex_.fail(kw, std::string(kw.text) + " elements are not allowed in diagram " + letter);
    if (d.find_by_key(e.kind, e.spec, e.stereotype)) lex_.fail(name, "duplicate element " + e.label());
    d.elements.push_back(e);
    std::size_t index = d.elements.size() - 1;
    elements_.push_back({letter, index, container});
    if (lex_.peek().type == Token::LBrace) {
      if (nested || (e.kind != ElementKind::Partition && e.kind != ElementKind::Region))
        lex_.fail(lex_.peek(), "only a top-level partition or region may contain elements");
      lex_.next();
      while (lex_.peek().type != Token::RBrace) {
        if (lex_.peek().type == Token::End) lex_.fail(lex_.peek(), "unterminated block");
        read_element(letter, index, /*nested=*/true);
      }
      lex_.next();
    }
  }

  Endpoint read_endpoint(char letter) {
    Endpoint ep{letter, std::nullopt, {}, std::nullopt, lex_.peek()};
    if (is_letter_token(lex_.peek())) ep.diagram = lex_.next().text[0];
    if (lex_.peek().type == Token::Word) {
      Token kw = lex_.next();
      ep.kind = element_kind_from_keyword(kw.text);
      if (!ep.kind) lex_.fail(kw, "unknown element kind '" + kw.text + "'");
    }
    Token name = lex_.expect(Token::String, "endpoint name");
    ep.spec = read_spec(name);
    if (lex_.peek().type == Token::Stereo) ep.stereotype = lex_.next().text;
    return ep;
  }

  void read_edge(char letter) {
    Token at = lex_.next();
    Token kw = lex_.next();
    auto kind = edge_kind_from_keyword(kw.text);
    if (kw.type != Token::Word || !kind) lex_.fail(kw, "unknown edge kind '" + kw.text + "'");
    PendingEdge e{letter, *kind, read_endpoint(letter), {}, {}, {}, {}, {}, at};
    lex_.expect(Token::Arrow, "'->'");
    e.to = read_endpoint(letter);
    while (lex_.peek().type == Token::Word) {
      const auto& w = lex_.peek().text;
      if (w == "label") {
        lex_.next();
        e.label = lex_.expect(Token::String, "label").text;
      } else if (w == "mult") {
        lex_.next();
        e.multiplicity = lex_.expect(Token::String, "multiplicity").text;
      } else if (w == "returns") {
        lex_.next();
        e.returns = lex_.expect(Token::String, "return classifier").text;
      } else {
        break;
      }
    }
    e.id = read_id();
    edges_.push_back(std::move(e));
  }

  void read_list(char letter) {
    Token kw = lex_.next();
    PendingList list{letter, kw.text == "scenario", lex_.expect(Token::String, "owner name").text, {}, kw};
    lex_.expect(Token::LBrace, "'{'");
    while (lex_.peek().type == Token::String) list.items.push_back(lex_.next().text);
    lex_.expect(Token::RBrace, "'}'");
    lists_.push_back(std::move(list));
  }

  void read_rule(std::optional<char> diagram) {
    Token at = lex_.next();
    lex_.expect_word("on");
    char letter = 0;
    if (is_letter_token(lex_.peek())) {
      letter = lex_.next().text[0];
    } else if (diagram) {
      letter = *diagram;
    } else {
      lex_.fail(lex_.peek(), "a rule outside a diagram block needs the host diagram letter");
    }
    std::optional<char> kind;
    if (lex_.peek().type == Token::Word) {
      Token kw = lex_.next();
      kind = host_letter(kw.text);
      if (!kind) lex_.fail(kw, "unknown host kind '" + kw.text + "'");
    }
    Token name = lex_.expect(Token::String, "host element name");
    NameSpec host = (kind == 'z') ? NameSpec{name.text, std::nullopt, std::nullopt} : read_spec(name);
    lex_.expect(Token::Colon, "':'");
    std::string text = lex_.rest_of_line();
    try {
      arch_.attachments.push_back(make_attachment(letter, kind, std::move(host), text));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()), at.line, at.col);
    }
  }

  void read_trace() {
    Token at = lex_.next();
    PendingTrace pt{{}, at};
    lex_.expect_word("pass");
    pt.link.pass = std::stoi(lex_.expect(Token::Int, "pass number").text);
    lex_.expect_word("rule");
    pt.link.rule_text = lex_.expect(Token::String, "rule text").text;
    lex_.expect_word("anchor");
    auto anchor = read_id();
    if (!anchor) lex_.fail(lex_.peek(), "expected anchor id");
    pt.link.anchor = *anchor;
    lex_.expect_word("sources");
    while (auto id = read_id()) pt.link.sources.push_back(*id);
    lex_.expect_word("targets");
    while (auto id = read_id()) pt.link.targets.push_back(*id);
    if (lex_.accept_word("pattern")) pt.link.pattern = lex_.expect(Token::String, "pattern name").text;
    traces_.push_back(std::move(pt));
  }

  void read_pattern_use() {
    lex_.next();
    PatternUse use;
    use.category = std::stoi(lex_.expect(Token::Int, "pattern category").text);
    use.name = lex_.expect(Token::String, "pattern name").text;
    use.diagram = read_letter();
    lex_.expect(Token::LBrace, "'{'");
    while (lex_.peek().type == Token::Word) {
      Token role = lex_.next();
      if (role.text.size() != 1) lex_.fail(role, "expected a role letter");
      Token from = lex_.expect(Token::String, "placeholder");
      lex_.expect(Token::Arrow, "'->'");
      Token to = lex_.expect(Token::String, "replacement");
      use.renames.push_back({role.text[0], read_spec(from), read_spec(to)});
    }
    lex_.expect(Token::RBrace, "'}'");
    arch_.pattern_uses.push_back(std::move(use));
  }

  Id resolve(const Endpoint& ep) {
    auto* d = arch_.find_diagram(ep.diagram);
    if (!d) lex_.fail(ep.at, std::string("edge endpoint refers to missing diagram ") + ep.diagram);
    const Element* found = nullptr;
    int count = 0;
    for (const auto& e : d->elements) {
      if (ep.kind && e.kind != *ep.kind) continue;
      if (e.spec != ep.spec) continue;
      if (ep.stereotype && e.stereotype != ep.stereotype) continue;
      // Without an explicit stereotype prefer the unstereotyped element.
      if (!ep.stereotype && found && !found->stereotype && e.stereotype) continue;
      if (!ep.stereotype && found && found->stereotype && !e.stereotype) {
        found = &e;
        count = 1;
        continue;
      }
      found = &e;
      ++count;
    }
    if (!found) lex_.fail(ep.at, "dangling edge endpoint \"" + render(ep.spec) + "\"");
    if (count > 1) lex_.fail(ep.at, "ambiguous edge endpoint \"" + render(ep.spec) + "\"");
    return found->id;
  }

  void finish() {
    // Explicit ids first, then fresh ids in declaration order.
    std::uint32_t max_id = 0;
    for (const auto& d : arch_.diagrams)
      for (const auto& e : d.elements) max_id = std::max(max_id, e.id.value);
    for (const auto& e : edges_)
      if (e.id) max_id = std::max(max_id, e.id->value);
    arch_.reserve_id(Id{max_id});
    for (const auto& pe : elements_) {
      auto& el = arch_.diagram(pe.diagram).elements[pe.index];
      if (el.id.value == 0) el.id = arch_.next_id();
    }
    for (const auto& pe : elements_) {
      auto& d = arch_.diagram(pe.diagram);
      if (pe.container_index) d.elements[pe.index].container = d.elements[*pe.container_index].id;
    }
    for (const auto& list : lists_) {
      auto& d = arch_.diagram(list.diagram);
      NameSpec owner = parse_name_spec(list.owner);
      auto kind = list.scenario ? ElementKind::UseCase : ElementKind::Class;
      auto it = std::find_if(d.elements.begin(), d.elements.end(),
                             [&](const Element& e) { return e.kind == kind && e.spec == owner; });
      if (it == d.elements.end())
        lex_.fail(list.at, std::string(list.scenario ? "scenario" : "operations") + " for unknown element \"" +
                               list.owner + "\"");
      for (const auto& item : list.items) {
        if (list.scenario)
          it->scenario.push_back(item);
        else
          it->operations.push_back(parse_name_spec(item));
      }
    }
    for (auto& pe : edges_) {
      Id from = resolve(pe.from);
      Id to = resolve(pe.to);
      if (pe.from.diagram != pe.diagram) lex_.fail(pe.at, "edge source must belong to the enclosing diagram");
      auto& d = arch_.diagram(pe.diagram);
      Edge e;
      e.id = pe.id ? *pe.id : arch_.next_id();
      e.kind = pe.kind;
      e.from = from;
      e.to = to;
      e.label = pe.label;
      e.multiplicity = pe.multiplicity;
      e.returns = pe.returns;
      d.edges.push_back(std::move(e));
    }
    for (auto& d : arch_.diagrams) {
      std::stable_sort(d.edges.begin(), d.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
      std::stable_sort(d.elements.begin(), d.elements.end(),
                       [](const Element& a, const Element& b) { return a.id < b.id; });
    }
    auto problems = validate(arch_);
    if (!problems.empty()) throw Error(ErrorKind::Schema, problems.front());
    for (auto& pt : traces_) arch_.traces.push_back(std::move(pt.link));
    // Attachments that left a trace have fired.
    for (auto& a : arch_.attachments)
      a.fired = std::any_of(arch_.traces.begin(), arch_.traces.end(),
                            [&](const TraceLink& t) { return t.rule_text == a.rule_text; });
  }
};

}  // namespace detail

inline Architecture parse_model(std::string_view text) { return detail::ModelReader(text).read(); }

namespace detail {

inline std::string endpoint_text(const Architecture& arch, const Diagram& d, Id id) {
  const Element* e = d.element(id);
  std::string prefix;
  if (!e) {
    const auto* owner = arch.owner(id);
    e = owner ? owner->element(id) : nullptr;
    if (!e) return "\"?\"";
    prefix = std::string(1, owner->letter) + " ";
  }
  std::string s = prefix + std::string(keyword_of(e->kind)) + " " + quote(render(e->spec));
  if (e->stereotype) s += " <<" + *e->stereotype + ">>";
  return s;
}

}  // namespace detail

/// Writes one diagram block. `ids` controls the `@N` annotations.
inline void write_diagram(std::ostream& os, const Architecture& arch, const Diagram& d, bool ids = true) {
  using detail::quote;
  os << "diagram " << d.letter << ' ' << quote(d.name) << " {\n";
  auto id_suffix = [&](Id id) { return ids ? " @" + std::to_string(id.value) : std::string{}; };
  for (const auto& e : d.elements) {
    if (e.container) continue;
    os << "  " << keyword_of(e.kind) << ' ' << quote(render(e.spec));
    if (e.stereotype) os << " <<" << *e.stereotype << ">>";
    os << id_suffix(e.id);
    bool has_members = std::any_of(d.elements.begin(), d.elements.end(),
                                   [&](const Element& m) { return m.container == e.id; });
    if (has_members) {
      os << " {\n";
      for (const auto& m : d.elements) {
        if (m.container != e.id) continue;
        os << "    " << keyword_of(m.kind) << ' ' << quote(render(m.spec));
        if (m.stereotype) os << " <<" << *m.stereotype << ">>";
        os << id_suffix(m.id) << '\n';
      }
      os << "  }";
    }
    os << '\n';
  }
  for (const auto& e : d.elements) {
    auto list = [&](std::string_view kw, const auto& items, auto text) {
      if (items.empty()) return;
      os << "  " << kw << ' ' << quote(render(e.spec)) << " {";
      for (const auto& item : items) os << ' ' << quote(text(item));
      os << " }\n";
    };
    list("scenario", e.scenario, [](const std::string& s) { return s; });
    list("operations", e.operations, [](const NameSpec& s) { return render(s); });
  }
  for (const auto& e : d.edges) {
    os << "  edge " << keyword_of(e.kind) << ' ' << detail::endpoint_text(arch, d, e.from) << " -> "
       << detail::endpoint_text(arch, d, e.to);
    if (e.label) os << " label " << quote(*e.label);
    if (e.multiplicity) os << " mult " << quote(*e.multiplicity);
    if (e.returns) os << " returns " << quote(*e.returns);
    os << id_suffix(e.id) << '\n';
  }
  os << "}\n";
}

inline std::string write_model(const Architecture& arch) {
  using detail::quote;
  std::ostringstream os;
  os << "architecture " << quote(arch.name) << "\n";
  for (const auto& d : arch.diagrams) {
    os << '\n';
    write_diagram(os, arch, d);
  }
  if (!arch.attachments.empty()) os << '\n';
  for (const auto& a : arch.attachments) {
    os << "rule on " << a.host_diagram;
    if (a.host_kind) os << ' ' << detail::host_keyword(*a.host_kind);
    os << ' ' << quote(a.host_kind == 'z' ? a.host_name.name.value_or("") : render(a.host_name)) << ": "
       << a.rule_text << '\n';
  }
  if (!arch.traces.empty()) os << '\n';
  for (const auto& t : arch.traces) {
    os << "trace pass " << t.pass << " rule " << quote(t.rule_text) << " anchor @" << t.anchor.value << " sources";
    for (auto id : t.sources) os << " @" << id.value;
    os << " targets";
    for (auto id : t.targets) os << " @" << id.value;
    if (t.pattern) os << " pattern " << quote(*t.pattern);
    os << '\n';
  }
  for (const auto& use : arch.pattern_uses) {
    os << "\npattern-use " << use.category << ' ' << quote(use.name) << ' ' << use.diagram << " {\n";
    for (const auto& r : use.renames)
      os << "  " << r.role << ' ' << quote(render(r.placeholder)) << " -> " << quote(render(r.replacement)) << '\n';
    os << "}\n";
  }
  return os.str();
}

/// Structural equality: same diagrams (isomorphic), attachments, traces and
/// pattern renames. Ids are compared through the trace lists.
inline bool structurally_equal(const Architecture& a, const Architecture& b) {
  if (a.name != b.name || a.diagrams.size() != b.diagrams.size()) return false;
  for (std::size_t i = 0; i < a.diagrams.size(); ++i) {
    const auto& da = a.diagrams[i];
    const auto& db = b.diagrams[i];
    if (da.name != db.name || !diagram_isomorphic(a, da, b, db)) return false;
  }
  if (a.attachments.size() != b.attachments.size()) return false;
  for (std::size_t i = 0; i < a.attachments.size(); ++i) {
    const auto& x = a.attachments[i];
    const auto& y = b.attachments[i];
    if (x.host_diagram != y.host_diagram || x.host_kind != y.host_kind || x.host_name != y.host_name ||
        x.rule != y.rule)
      return false;
  }
  return a.traces == b.traces && a.pattern_uses == b.pattern_uses;
}

}  // namespace archweave
