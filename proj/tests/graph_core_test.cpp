#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evobench/delta.hpp"
#include "evobench/errors.hpp"
#include "evobench/graph.hpp"
#include "evobench/graph_io.hpp"
#include "evobench/seed_env.hpp"
#include "helpers.hpp"

using namespace evobench;
using namespace evobench::testing;

TEST_CASE("node id parses and orders lexicographically") {
  NodeId id = NodeId::parse("User.user_id");
  CHECK(id.database == "User");
  CHECK(id.attribute == "user_id");
  CHECK(id.str() == "User.user_id");
  CHECK(NodeId{"Cart", "items"} < NodeId{"User", "email"});
  CHECK(NodeId{"User", "email"} < NodeId{"User", "name"});
  CHECK_THROWS_AS(NodeId::parse("no_dot_here"), ParseError);
  CHECK_THROWS_AS(NodeId::parse(".leading"), ParseError);
  CHECK_THROWS_AS(NodeId::parse("trailing."), ParseError);
}

TEST_CASE("value type tags round-trip") {
  for (const char* tag : {"str", "int", "float", "bool", "List[str]",
                          "Dict[str, Any]", "Optional[str]", "Optional[int]"}) {
    CHECK(ValueType::parse(tag).str() == tag);
  }
  CHECK(ValueType::parse("Optional[float]").nullable);
  CHECK_FALSE(ValueType::parse("float").nullable);
  CHECK_THROWS_AS(ValueType::parse("Tuple[int]"), ParseError);
}

TEST_CASE("both seed fixtures validate cleanly") {
  for (auto scale : {SeedScale::Desk, SeedScale::Paper}) {
    EnvGraph g = build_seed_graph(scale);
    ValidationReport report = validate(g);
    INFO(report.summary());
    CHECK(report.ok());
  }
}

TEST_CASE("validator flags a dangling tool input") {
  EnvGraph g = tiny_graph();
  g.add_tool(make_tool("get_ghost", ToolKind::Read, {"User.user_id"},
                       {"Order.order_id"}));
  {
    // Point the tool at a node the graph does not have.
    EnvGraph bad = tiny_graph();
    ToolSpec t = make_tool("get_ghost", ToolKind::Read, {"Ghost.ghost_id"},
                           {"Order.order_id"});
    bad.add_tool(t);
    ValidationReport report = validate(bad);
    CHECK_FALSE(report.ok());
    bool mentions = false;
    for (const auto& v : report.violations) {
      if (v.subject == "get_ghost") mentions = true;
    }
    CHECK(mentions);
  }
}

TEST_CASE("validator flags a duplicate primary key") {
  EnvGraph g = tiny_graph();
  g.add_node(make_node("Order.second_id", "str", true));
  ValidationReport report = validate(g);
  CHECK_FALSE(report.ok());
  bool mentions = false;
  for (const auto& v : report.violations) {
    if (v.message.find("primary key") != std::string::npos) mentions = true;
  }
  CHECK(mentions);
}

TEST_CASE("validator flags a dangling edge tool name") {
  EnvGraph g = tiny_graph();
  RelationEdge e = make_edge("Order.status", "User.name", Relationship::LinksTo,
                             Cardinality::OneToOne, {"not_a_tool"});
  g.add_edge(e);
  CHECK_FALSE(validate(g).ok());
}

TEST_CASE("builders reject duplicate identities") {
  EnvGraph g = tiny_graph();
  CHECK_THROWS_AS(g.add_node(make_node("User.name", "str")), ConflictError);
  CHECK_THROWS_AS(g.add_tool(make_tool("get_user_orders", ToolKind::Read,
                                       {"User.user_id"}, {"User.name"})),
                  ConflictError);
  CHECK_THROWS_AS(g.remove_node(NodeId{"User", "missing"}), ConflictError);
}

TEST_CASE("empty delta bumps the version and changes nothing else") {
  EnvGraph g = tiny_graph();
  std::string before = graph_canonical_text(g);
  EnvGraph next = apply_delta(g, GraphDelta{});
  CHECK(next.version_id() == "G1");
  CHECK(next.metadata().at("parent") == "G0");
  CHECK(isomorphic(g, next));
  // The input version is untouched.
  CHECK(graph_canonical_text(g) == before);
}

TEST_CASE("delta application applies removals before additions") {
  EnvGraph g = tiny_graph();
  GraphDelta delta;
  delta.removed_nodes.push_back(*g.find_node(NodeId{"Order", "status"}));
  delta.removed_edges.push_back(
      *g.find_edge(EdgeKey{NodeId{"Order", "order_id"}, NodeId{"Order", "status"},
                           Relationship::HasAttribute}));
  // get_user_orders outputs Order.status, so the delta has to retire it too.
  delta.removed_tools.push_back(*g.find_tool("get_user_orders"));
  delta.removed_edges.push_back(
      *g.find_edge(EdgeKey{NodeId{"Order", "user_id"}, NodeId{"User", "user_id"},
                           Relationship::References}));
  RelationEdge pruned = make_edge("Order.user_id", "User.user_id",
                                  Relationship::References, Cardinality::ManyToOne);
  delta.added_edges.push_back(pruned);
  EnvGraph next = apply_delta(g, delta);
  CHECK_FALSE(next.has_node(NodeId{"Order", "status"}));
  CHECK_FALSE(next.has_tool("get_user_orders"));
  CHECK(next.find_edge(pruned.key())->tools.empty());
  CHECK(validate(next).ok());
}

TEST_CASE("delta conflicts name the offending element") {
  EnvGraph g = tiny_graph();
  GraphDelta add_existing;
  add_existing.added_nodes.push_back(make_node("User.name", "str"));
  try {
    apply_delta(g, add_existing);
    FAIL("expected ConflictError");
  } catch (const ConflictError& e) {
    CHECK(std::string(e.what()).find("User.name") != std::string::npos);
  }

  GraphDelta remove_missing;
  remove_missing.removed_tools.push_back(
      make_tool("no_such_tool", ToolKind::Read, {"User.user_id"}, {"User.name"}));
  CHECK_THROWS_AS(apply_delta(g, remove_missing), ConflictError);
}

TEST_CASE("diff of equal graphs is empty") {
  EnvGraph g = tiny_graph();
  CHECK(diff(g, g).empty());
}

TEST_CASE("diff infers the strategy from the change shape") {
  EnvGraph g = tiny_graph();

  EnvGraph removal = g;
  removal.remove_tool("get_user_orders");
  removal.set_edge_tools(EdgeKey{NodeId{"Order", "user_id"}, NodeId{"User", "user_id"},
                                 Relationship::References},
                         {});
  CHECK(diff(g, removal).strategy == Strategy::Deprecation);

  EnvGraph tooled = g;
  tooled.add_tool(make_tool("get_user_name", ToolKind::Read, {"User.user_id"},
                            {"User.name"}));
  CHECK(diff(g, tooled).strategy == Strategy::Saturation);

  EnvGraph grown = g;
  grown.add_node(make_node("Invoice.invoice_id", "str", true));
  CHECK(diff(g, grown).strategy == Strategy::Completion);
}

TEST_CASE("diff then apply reproduces the target graph") {
  EnvGraph a = tiny_graph();
  EnvGraph b = a;
  b.remove_tool("get_user_orders");
  b.set_edge_tools(EdgeKey{NodeId{"Order", "user_id"}, NodeId{"User", "user_id"},
                           Relationship::References},
                   {});
  b.add_node(make_node("Invoice.invoice_id", "str", true));
  b.add_node(make_node("Invoice.order_id", "str", false, true));
  b.add_edge(make_edge("Invoice.order_id", "Order.order_id", Relationship::References,
                       Cardinality::ManyToOne));
  GraphDelta d = diff(a, b);
  CHECK(isomorphic(apply_delta(a, d), b));
}

TEST_CASE("version ids advance numerically") {
  CHECK(next_version_id("G0") == "G1");
  CHECK(next_version_id("G3") == "G4");
  CHECK(next_version_id("G12") == "G13");
  CHECK(next_version_id("snapshot") == "snapshot_next");
}

TEST_CASE("insertion order does not leak into the serialization") {
  EnvGraph forward = tiny_graph();

  EnvGraph backward;
  backward.set_version_id("G0");
  backward.add_node(make_node("Order.status", "str"));
  backward.add_node(make_node("Order.user_id", "str", false, true));
  backward.add_node(make_node("Order.order_id", "str", true));
  backward.add_node(make_node("User.name", "str"));
  backward.add_node(make_node("User.user_id", "str", true));
  backward.add_tool(make_tool("get_user_orders", ToolKind::Read, {"User.user_id"},
                              {"Order.order_id", "Order.status"}));
  backward.add_edge(make_edge("Order.user_id", "User.user_id",
                              Relationship::References, Cardinality::ManyToOne,
                              {"get_user_orders"}));
  backward.add_edge(make_edge("Order.order_id", "Order.status",
                              Relationship::HasAttribute, Cardinality::OneToOne));
  backward.add_edge(make_edge("User.user_id", "User.name", Relationship::HasAttribute,
                              Cardinality::OneToOne));

  CHECK(graph_canonical_text(forward) == graph_canonical_text(backward));
}

TEST_CASE("graph documents round-trip exactly") {
  for (auto scale : {SeedScale::Desk, SeedScale::Paper}) {
    EnvGraph g = build_seed_graph(scale);
    EnvGraph back = graph_from_json(graph_to_json(g));
    CHECK(back.version_id() == g.version_id());
    CHECK(graph_canonical_text(back) == graph_canonical_text(g));
  }
}

TEST_CASE("delta documents round-trip exactly") {
  EnvGraph a = tiny_graph();
  EnvGraph b = a;
  b.add_node(make_node("Invoice.invoice_id", "str", true));
  b.add_tool(make_tool("get_order_status", ToolKind::Read, {"Order.order_id"},
                       {"Order.status"}));
  GraphDelta d = diff(a, b);
  d.context.title = "test delta";
  d.context.narrative = "adds an invoice key and a status read";
  d.context.metadata = Json{{"new_tools", Json::array({"get_order_status"})}};
  GraphDelta back = delta_from_json(delta_to_json(d));
  CHECK(back == d);
}

TEST_CASE("malformed documents raise parse errors with a locator") {
  Json doc = graph_to_json(tiny_graph());
  doc["edges"][0]["relationship_type"] = "sibling_of";
  try {
    graph_from_json(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK_FALSE(e.where.empty());
  }

  Json missing = graph_to_json(tiny_graph());
  missing.erase("databases");
  CHECK_THROWS_AS(graph_from_json(missing), ParseError);
}

TEST_CASE("file io round-trips through canonical text") {
  auto path = std::filesystem::temp_directory_path() / "evobench_graph_core_io.json";
  EnvGraph g = build_seed_graph(SeedScale::Desk);
  write_graph_file(path, g);
  EnvGraph back = read_graph_file(path);
  CHECK(graph_canonical_text(back) == graph_canonical_text(g));
  write_text_file(path, "{not json");
  CHECK_THROWS_AS(read_graph_file(path), ParseError);
  std::filesystem::remove(path);
}
