#include <gtest/gtest.h>

#include "support.hpp"

using namespace archweave;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::Io;
}

}  // namespace

TEST(NameSpec, ParseAndRender) {
  EXPECT_EQ(parse_name_spec("[Sent]:Request"), (NameSpec{std::nullopt, "Sent", "Request"}));
  EXPECT_EQ(parse_name_spec("1.Request_service"), (NameSpec{"1.Request_service", std::nullopt, std::nullopt}));
  EXPECT_EQ(parse_name_spec("order[Paid]:Order"), (NameSpec{"order", "Paid", "Order"}));
  EXPECT_EQ(render(NameSpec{std::nullopt, "Approved", "Decision"}), "[Approved]:Decision");
  EXPECT_EQ(render(NameSpec{"downLoad<Requests>", std::nullopt, "Request"}, "::"), "downLoad<Requests>::Request");
}

TEST(NameSpec, Normalization) {
  EXPECT_EQ(normalize_name("4.Send_decision"), "Send_decision");
  EXPECT_EQ(normalize_name("Send decision"), "Send_decision");
  EXPECT_EQ(normalize_name("Registration"), "Registration");
}

TEST(DiagramKinds, CanonicalOrderAndLayers) {
  std::string letters;
  for (const auto& k : kDiagramKinds) letters += k.letter;
  EXPECT_EQ(letters, "XRBAUCSZYJTQM");
  EXPECT_EQ(diagram_kind('X').layer_rank, 0);
  EXPECT_EQ(diagram_kind('U').layer_rank, diagram_kind('C').layer_rank);
  EXPECT_LT(diagram_kind('Z').layer_rank, diagram_kind('Y').layer_rank);
  EXPECT_EQ(diagram_kind('M').family, Family::Component);
  EXPECT_EQ(diagram_kind('S').family, Family::State);
}

TEST(Model, IdsAreSharedByElementsAndEdges) {
  Architecture arch;
  ensure_diagram(arch, 'X');
  auto a = find_or_create_element(arch, 'X', ElementKind::Event, parse_name_spec("Request"));
  auto b = find_or_create_element(arch, 'X', ElementKind::Action, parse_name_spec("Office"));
  auto e = create_edge(arch, 'X', EdgeKind::ControlFlow, a.id, b.id);
  EXPECT_EQ(a.id.value, 1u);
  EXPECT_EQ(b.id.value, 2u);
  EXPECT_EQ(e.id.value, 3u);
}

TEST(Model, DiagramsKeepCanonicalOrder) {
  Architecture arch;
  for (char c : std::string("MZXBR")) ensure_diagram(arch, c);
  EXPECT_EQ(archweave::testing::letters_of(arch), "XRBZM");
  EXPECT_EQ(arch.diagram('Z').name, "System Use Case Realization Diagram");
}

TEST(Model, MergeIsIdempotent) {
  Architecture arch;
  ensure_diagram(arch, 'A');
  auto p = find_or_create_element(arch, 'A', ElementKind::Partition, parse_name_spec("Client"));
  auto v1 = find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Receive"));
  auto v2 = find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Receive"), std::nullopt, p.id);
  EXPECT_TRUE(v1.created);
  EXPECT_FALSE(v2.created);
  EXPECT_TRUE(v2.refined);
  EXPECT_EQ(v1.id, v2.id);
  auto v3 = find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Receive"), std::nullopt, p.id);
  EXPECT_FALSE(v3.created);
  EXPECT_FALSE(v3.refined);
  auto e1 = create_edge(arch, 'A', EdgeKind::ControlFlow, v1.id, v1.id);
  auto e2 = create_edge(arch, 'A', EdgeKind::ControlFlow, v1.id, v1.id);
  EXPECT_TRUE(e1.created);
  EXPECT_FALSE(e2.created);
  EXPECT_EQ(arch.diagram('A').elements.size(), 2u);
  EXPECT_EQ(arch.diagram('A').edges.size(), 1u);
}

TEST(Model, StereotypeIsPartOfTheKey) {
  Architecture arch;
  ensure_diagram(arch, 'R');
  auto a = find_or_create_element(arch, 'R', ElementKind::Instance, parse_name_spec(":Request"), "product");
  auto b = find_or_create_element(arch, 'R', ElementKind::Instance, parse_name_spec(":Request"));
  EXPECT_NE(a.id, b.id);
}

TEST(Model, CompatibilityErrors) {
  Architecture arch;
  for (char c : std::string("ABCS")) ensure_diagram(arch, c);
  EXPECT_EQ(kind_of([&] { find_or_create_element(arch, 'C', ElementKind::Actor, parse_name_spec("Client")); }),
            ErrorKind::Schema);
  EXPECT_EQ(kind_of([&] { find_or_create_element(arch, 'B', ElementKind::Action, parse_name_spec("Approve")); }),
            ErrorKind::Schema);
  auto c1 = find_or_create_element(arch, 'C', ElementKind::Class, parse_name_spec("Request"));
  auto c2 = find_or_create_element(arch, 'C', ElementKind::Class, parse_name_spec("Decision"));
  EXPECT_EQ(kind_of([&] { create_edge(arch, 'C', EdgeKind::ControlFlow, c1.id, c2.id); }), ErrorKind::Schema);
  EXPECT_EQ(kind_of([&] { create_edge(arch, 'C', EdgeKind::Association, c1.id, c2.id, std::nullopt, "*..1"); }),
            ErrorKind::Schema);
  EXPECT_EQ(kind_of([&] { create_edge(arch, 'C', EdgeKind::Association, c1.id, c2.id, std::nullopt, "3..1"); }),
            ErrorKind::Schema);
  EXPECT_TRUE(create_edge(arch, 'C', EdgeKind::Association, c1.id, c2.id, std::nullopt, "1..*").created);
  auto a = find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Approve"));
  EXPECT_EQ(kind_of([&] { create_edge(arch, 'C', EdgeKind::Association, c1.id, a.id); }), ErrorKind::NotFound);
}

TEST(Model, ContainerConflict) {
  Architecture arch;
  ensure_diagram(arch, 'A');
  auto p1 = find_or_create_element(arch, 'A', ElementKind::Partition, parse_name_spec("Client"));
  auto p2 = find_or_create_element(arch, 'A', ElementKind::Partition, parse_name_spec("Employee"));
  find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Receive"), std::nullopt, p1.id);
  EXPECT_EQ(kind_of([&] {
              find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Receive"), std::nullopt, p2.id);
            }),
            ErrorKind::Conflict);
  auto v = find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Approve"));
  EXPECT_EQ(kind_of([&] {
              find_or_create_element(arch, 'A', ElementKind::Action, parse_name_spec("Other"), std::nullopt, v.id);
            }),
            ErrorKind::Schema);
}

TEST(Model, UseCaseAssociationsPointAtTheUseCase) {
  Architecture arch;
  ensure_diagram(arch, 'B');
  auto u = find_or_create_element(arch, 'B', ElementKind::UseCase, parse_name_spec("Service"));
  auto a = find_or_create_element(arch, 'B', ElementKind::Actor, parse_name_spec("Client"));
  auto e = create_edge(arch, 'B', EdgeKind::Association, u.id, a.id);
  const auto* edge = arch.edge(e.id);
  EXPECT_EQ(edge->from, a.id);
  EXPECT_EQ(edge->to, u.id);
  EXPECT_FALSE(create_edge(arch, 'B', EdgeKind::Association, a.id, u.id).created);
}

TEST(Model, RealizationMayCrossFromYToU) {
  Architecture arch;
  ensure_diagram(arch, 'U');
  ensure_diagram(arch, 'Y');
  auto target = find_or_create_element(arch, 'U', ElementKind::UseCase, parse_name_spec("Registration"));
  auto y = find_or_create_element(arch, 'Y', ElementKind::UseCase, parse_name_spec("Form_display"));
  EXPECT_TRUE(create_edge(arch, 'Y', EdgeKind::Realization, y.id, target.id).created);
  EXPECT_EQ(kind_of([&] { create_edge(arch, 'U', EdgeKind::Realization, target.id, y.id); }), ErrorKind::NotFound);
  EXPECT_TRUE(validate(arch).empty());
}

TEST(Isomorphism, IgnoresIdsAndOrder) {
  Architecture a, b;
  ensure_diagram(a, 'C');
  ensure_diagram(b, 'C');
  auto a1 = find_or_create_element(a, 'C', ElementKind::Class, parse_name_spec("Request"));
  auto a2 = find_or_create_element(a, 'C', ElementKind::Class, parse_name_spec("Decision"));
  create_edge(a, 'C', EdgeKind::Association, a1.id, a2.id, std::nullopt, "1..*");
  b.next_id();
  auto b2 = find_or_create_element(b, 'C', ElementKind::Class, parse_name_spec("Decision"));
  auto b1 = find_or_create_element(b, 'C', ElementKind::Class, parse_name_spec("Request"));
  create_edge(b, 'C', EdgeKind::Association, b1.id, b2.id, std::nullopt, "1..*");
  EXPECT_TRUE(diagram_isomorphic(a, a.diagram('C'), b, b.diagram('C')));
  b.diagram('C').edges[0].multiplicity = "0..1";
  EXPECT_FALSE(diagram_isomorphic(a, a.diagram('C'), b, b.diagram('C')));
}

TEST(Isomorphism, DetectsDifferentContainers) {
  auto a = archweave::testing::run_scenario("office_explicit.arch");
  auto b = a;
  auto& d = b.diagram('A');
  Id client{}, manager{};
  for (const auto& e : d.elements) {
    if (e.kind == ElementKind::Partition && e.spec.name == "Client") client = e.id;
    if (e.kind == ElementKind::Partition && e.spec.name == "Manager") manager = e.id;
  }
  for (auto& e : d.elements)
    if (e.container == client) {
      e.container = manager;
      break;
    }
  EXPECT_FALSE(diagram_isomorphic(a, a.diagram('A'), b, b.diagram('A')));
  EXPECT_TRUE(diagram_isomorphic(a, a.diagram('B'), b, b.diagram('B')));
}
