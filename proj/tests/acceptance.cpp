// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <functional>
#include <iostream>

#include "support.hpp"

using namespace archweave;
namespace t = archweave::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome golden_run() {
  auto start = std::chrono::steady_clock::now();
  auto arch = t::load_scenario("office.arch");
  auto report = run_to_fixpoint(arch);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  auto fired = report.fired_count(arch);
  bool ok = t::letters_of(arch) == "XRBAUCSZYQM" && arch.diagrams.size() == 11 && fired == 13 &&
            arch.attachments.size() == 13 && ms < 1000;
  return {ok, std::to_string(arch.diagrams.size()) + " diagrams " + t::letters_of(arch) + ", " +
                  std::to_string(fired) + "/" + std::to_string(arch.attachments.size()) + " fired, " +
                  std::to_string(ms) + " ms"};
}

Outcome fixture_table() {
  auto arch = t::run_scenario("office.arch");
  auto problems = t::fixture_mismatches(arch, "office_fixture.json");
  if (problems.empty()) return {true, "all diagram counts and names match the fixture table"};
  std::string d;
  for (const auto& p : problems) d += p + "; ";
  return {false, d};
}

Outcome composite_vs_simple() {
  auto composite = t::run_scenario("composite_c1.arch");
  auto simple = t::run_scenario("simple_s1_s5.arch");
  auto eq = equivalent(composite, simple);
  std::string d = eq.equal ? "equivalent = true" : "first difference in " + std::string(1, *eq.first_difference);
  return {eq.equal, d};
}

Outcome business_shape() {
  auto arch = t::run_scenario("business_actors.arch");
  const auto* b = arch.find_diagram('B');
  if (!b) return {false, "no B diagram"};
  auto u = t::count_kind(*b, ElementKind::UseCase);
  auto a = t::count_kind(*b, ElementKind::Actor);
  auto e = t::count_edges(*b, EdgeKind::Association);
  bool ok = u == 1 && a == 3 && e == 3 && b->elements.size() == 4 && b->edges.size() == 3;
  return {ok, std::to_string(u) + " use case, " + std::to_string(a) + " actors, " + std::to_string(e) +
                  " associations"};
}

Outcome pattern_cascade() {
  auto patterns = t::run_scenario("office_patterns.arch");
  auto explicit_rules = t::run_scenario("office_explicit.arch");
  const auto* a1 = patterns.find_diagram('A');
  const auto* a2 = explicit_rules.find_diagram('A');
  bool ok = a1 && a2 && diagram_isomorphic(patterns, *a1, explicit_rules, *a2);
  return {ok, ok ? "A diagrams isomorphic" : "A diagrams differ"};
}

Outcome idempotence() {
  std::size_t total = 0, good = 0;
  std::string bad;
  for (const auto& e : builtin_catalog()) {
    if (!e.ast) continue;
    ++total;
    auto arch = t::canonical_seed(e.key);
    auto first = run_to_fixpoint(arch);
    auto snapshot = arch;
    auto second = run_to_fixpoint(arch);
    bool same = !second.passes[0].changed && snapshot.diagrams.size() == arch.diagrams.size() &&
                first.never_fired.empty() && arch.attachments.back().fired;
    for (const auto& d : snapshot.diagrams) same = same && diagram_isomorphic(snapshot, d, arch, arch.diagram(d.letter));
    if (same) ++good;
    else bad += e.key + " ";
  }
  return {good == total && total == 20,
          std::to_string(good) + "/" + std::to_string(total) + " catalog rules idempotent" +
              (bad.empty() ? "" : " (failing: " + bad + ")")};
}

Outcome round_trip() {
  std::size_t total = 0, good = 0;
  auto check_one = [&](const std::string& text) {
    ++total;
    auto ast = parse_rule(text);
    if (parse_rule(render_rule(ast)) == ast) ++good;
  };
  std::size_t forms = 0;
  for (const auto& e : builtin_catalog()) {
    if (e.short_form.empty()) continue;
    ++forms;
    check_one(e.short_form);
  }
  std::size_t strings = t::office_rule_strings().size();
  for (const auto& s : t::office_rule_strings()) check_one(s);
  return {good == total && forms == 20 && strings == 13,
          std::to_string(good) + "/" + std::to_string(total) + " (" + std::to_string(forms) + " catalog forms + " +
              std::to_string(strings) + " scenario strings)"};
}

Outcome consistency() {
  auto arch = t::run_scenario("office.arch");
  auto r = check(arch);
  bool full = r.ok;
  for (const auto& c : r.coverage) full = full && c.fraction() == 1.0;
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < arch.traces.size(); ++i) {
    auto copy = arch;
    copy.traces.erase(copy.traces.begin() + static_cast<long>(i));
    flipped += !check(copy).ok;
  }
  return {full && r.coverage.size() == 10 && flipped == arch.traces.size(),
          std::string("ok=") + (r.ok ? "true" : "false") + ", coverage 1.0 on " + std::to_string(r.coverage.size()) +
              " diagrams, " + std::to_string(flipped) + "/" + std::to_string(arch.traces.size()) +
              " trace deletions flip ok"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"golden scenario reaches 11 diagrams with 13/13 rules fired", golden_run},
      {"golden diagram contents match the hand-traced fixture", fixture_table},
      {"composite rule equals the five simple rules", composite_vs_simple},
      {"business use case rule creates 1 use case, 3 actors, 3 associations", business_shape},
      {"pattern cascade equals the explicit business rules", pattern_cascade},
      {"every catalog rule is idempotent on its canonical seed", idempotence},
      {"rule strings round-trip through the parser", round_trip},
      {"golden run is consistent and every trace is load-bearing", consistency},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " [" << o.detail
              << "]\n";
  }
  std::cout << "NOTE 9 not reproducible here: the count of simple rules replaced by the composite rules relies on "
               "an external rule catalog that is not available; criterion 3 checks the one printed 5-to-1 case "
               "instead. Entropy-based consistency measures are out of scope.\n";
  return failures == 0 ? 0 : 1;
}
