#include <gtest/gtest.h>

#include "support.hpp"

using namespace archweave;
using archweave::testing::load_scenario;
using archweave::testing::run_scenario;

TEST(ModelText, ReadsTheContextSeed) {
  auto arch = load_scenario("office.arch");
  EXPECT_EQ(arch.name, "Office");
  ASSERT_EQ(arch.diagrams.size(), 1u);
  const auto& x = arch.diagram('X');
  EXPECT_EQ(x.elements.size(), 3u);
  EXPECT_EQ(x.edges.size(), 2u);
  EXPECT_EQ(arch.attachments.size(), 13u);
  EXPECT_EQ(arch.attachments[0].host_diagram, 'X');
  EXPECT_EQ(arch.attachments[1].host_diagram, 'R');
  EXPECT_EQ(arch.attachments[12].describe(), "Q m \"downLoad<Requests>\": QlmlMqyq");
  for (const auto& a : arch.attachments) EXPECT_FALSE(a.fired);
}

TEST(ModelText, WriterOutputForBusinessUseCases) {
  auto arch = run_scenario("business_actors.arch");
  std::ostringstream os;
  write_diagram(os, arch, arch.diagram('B'), false);
  EXPECT_EQ(os.str(),
            "diagram B \"Business Use Case Diagram\" {\n"
            "  actor \"Client\"\n"
            "  usecase \"1.Request_service\"\n"
            "  actor \"Employee\"\n"
            "  actor \"Manager\"\n"
            "  edge association actor \"Client\" -> usecase \"1.Request_service\"\n"
            "  edge association actor \"Employee\" -> usecase \"1.Request_service\"\n"
            "  edge association actor \"Manager\" -> usecase \"1.Request_service\"\n"
            "}\n");
}

TEST(ModelText, RoundTripOfTheGoldenResult) {
  auto arch = run_scenario("office.arch");
  auto text = write_model(arch);
  auto again = parse_model(text);
  EXPECT_TRUE(structurally_equal(arch, again));
  EXPECT_EQ(write_model(again), text);
  for (const auto& a : again.attachments) EXPECT_TRUE(a.fired) << a.describe();
  EXPECT_EQ(again.traces.size(), arch.traces.size());
}

TEST(ModelText, ScenarioAndOperationListsSurvive) {
  auto arch = run_scenario("scenario_flow.arch");
  auto again = parse_model(write_model(arch));
  const auto& b = again.diagram('B');
  const auto* u = b.find_by_key(ElementKind::UseCase, parse_name_spec("Registration"), "scenarios");
  ASSERT_NE(u, nullptr);
  EXPECT_EQ(u->scenario, (std::vector<std::string>{"Receive_request", "[Received]:Request", "Register"}));
}

TEST(ModelText, ErrorsAreLocated) {
  struct Case {
    std::string text;
    std::size_t line, column;
  };
  std::vector<Case> cases = {
      {"architecture \"A\"\ndiagram X \"C\" {\n  gadget \"Request\"\n}\n", 3, 3},
      {"architecture \"A\"\ndiagram X \"C\" {\n  event \"Request\n}\n", 3, 9},
      {"architecture \"A\"\ndiagram Q \"C\" {\n  actor \"Client\"\n}\n", 3, 3},
      {"architecture \"A\"\ndiagram X \"C\" {\n  event \"A\"\n  edge control \"A\" -> \"B\"\n}\n", 4, 23},
      {"diagram X \"C\" {\n}\n", 1, 1},
  };
  for (const auto& c : cases) {
    try {
      parse_model(c.text);
      ADD_FAILURE() << c.text;
    } catch (const Error& e) {
      ASSERT_TRUE(e.line().has_value()) << e.what();
      EXPECT_EQ(*e.line(), c.line) << e.what();
      EXPECT_EQ(*e.column(), c.column) << e.what();
    }
  }
}

TEST(ModelText, RuleOnWrongDiagramIsRejected) {
  EXPECT_THROW(parse_model("architecture \"A\"\ndiagram X \"C\" {\n  event \"E\"\n  rule on event \"E\": ReviBaua\n}\n"), Error);
}

TEST(Json, RoundTripOfTheGoldenResult) {
  auto arch = run_scenario("office.arch");
  auto text = emit_json(arch);
  auto again = parse_json(text);
  EXPECT_TRUE(structurally_equal(arch, again));
  EXPECT_EQ(emit_json(again), text);
}

TEST(Json, Shape) {
  auto arch = run_scenario("composite_c1.arch");
  auto j = to_json(arch);
  ASSERT_EQ(j["diagrams"].size(), 2u);
  EXPECT_EQ(j["diagrams"][1]["letter"], "R");
  EXPECT_EQ(j["diagrams"][1]["family"], "Activity");
  EXPECT_EQ(j["traces"][0]["rule"], "Xevi(:Decision)Ri(:Request)v(1.Request_service)i(:Decision)");
  EXPECT_EQ(j["attachments"][0]["fired"], true);
  EXPECT_TRUE(j["diagrams"][0]["elements"][0]["stereotype"].is_null());
}

TEST(Json, EmptyArchitecture) {
  Architecture arch;
  auto j = to_json(arch);
  EXPECT_TRUE(j["diagrams"].is_array());
  EXPECT_TRUE(j["diagrams"].empty());
  EXPECT_TRUE(parse_json(emit_json(arch)).diagrams.empty());
}

TEST(Json, BadInput) {
  try {
    parse_json("{\"diagrams\": [");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
  }
  try {
    parse_json(R"({"diagrams":[{"letter":"C","name":"c","elements":[{"id":1,"kind":"actor","name":"A"}],"edges":[]}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Schema);
  }
}

TEST(PlantUml, DeterministicAndOnePerDiagram) {
  auto a = run_scenario("office.arch");
  auto b = run_scenario("office.arch");
  std::set<std::string> files;
  for (const auto& d : a.diagrams) {
    EXPECT_EQ(emit_plantuml(a, d), emit_plantuml(b, b.diagram(d.letter)));
    files.insert(plantuml_file_name(d));
  }
  EXPECT_EQ(files.size(), 11u);
  EXPECT_TRUE(files.count("C_business_class_diagram.puml"));
}

TEST(PlantUml, ClassDiagramText) {
  auto arch = run_scenario("office.arch");
  auto text = emit_plantuml(arch, arch.diagram('C'));
  EXPECT_EQ(text.rfind("@startuml\n", 0), 0u);
  EXPECT_NE(text.find("class \"Request\""), std::string::npos);
  EXPECT_NE(text.find("-- \"1..*\""), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 8), "@enduml\n");
}

TEST(PlantUml, SequenceHasReturns) {
  auto arch = run_scenario("office.arch");
  auto text = emit_plantuml(arch, arch.diagram('Q'));
  EXPECT_NE(text.find(" : downLoad<Requests>\n"), std::string::npos);
  EXPECT_NE(text.find(" --> "), std::string::npos);
}

TEST(PlantUml, EmptyDiagram) {
  Architecture arch;
  auto& d = ensure_diagram(arch, 'M');
  EXPECT_EQ(emit_plantuml(arch, d), "@startuml\ntitle Component Diagram\n@enduml\n");
  EXPECT_EQ(plantuml_file_name(d), "M_component_diagram.puml");
}
