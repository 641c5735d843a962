#include "evobench/adapters.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include <httplib.h>

#include "evobench/errors.hpp"
#include "evobench/graph_io.hpp"

namespace evobench {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

const std::set<std::string>& write_verbs() {
  static const std::set<std::string> verbs{
      "add",    "apply",  "assign", "associate", "book",  "cancel", "clear",
      "create", "delete", "enroll", "initiate",  "issue", "link",   "mark",
      "open",   "place",  "register", "remove",  "send",  "set",    "start",
      "update", "write"};
  return verbs;
}

std::string leading_verb(const std::string& name) {
  std::size_t us = name.find('_');
  return us == std::string::npos ? name : name.substr(0, us);
}

}  // namespace

ChatEndpoint parse_endpoint(const std::string& url) {
  std::string rest = url;
  if (starts_with(rest, "https://")) {
    throw AdapterError("https endpoints are not supported: " + url);
  }
  if (starts_with(rest, "http://")) rest = rest.substr(7);
  ChatEndpoint ep;
  std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  ep.path = slash == std::string::npos ? "/chat" : rest.substr(slash);
  std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    ep.host = authority;
    ep.port = 80;
  } else {
    ep.host = authority.substr(0, colon);
    try {
      ep.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw AdapterError("bad port in endpoint: " + url);
    }
  }
  if (ep.host.empty()) throw AdapterError("empty host in endpoint: " + url);
  return ep;
}

std::string chat(const ChatEndpoint& endpoint,
                 const std::vector<std::pair<std::string, std::string>>& messages) {
  Json body{{"model", endpoint.model}, {"messages", Json::array()}};
  for (const auto& [role, content] : messages) {
    body["messages"].push_back(Json{{"role", role}, {"content", content}});
  }
  httplib::Client client(endpoint.host, endpoint.port);
  client.set_connection_timeout(endpoint.timeout_seconds);
  client.set_read_timeout(endpoint.timeout_seconds);
  httplib::Headers headers;
  if (const char* token = std::getenv(endpoint.credential_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");
  if (!res) {
    throw AdapterError("chat endpoint unreachable: " + endpoint.host + ":" +
                       std::to_string(endpoint.port));
  }
  if (res->status != 200) {
    throw AdapterError("chat endpoint returned status " +
                       std::to_string(res->status));
  }
  Json reply;
  try {
    reply = Json::parse(res->body);
  } catch (const Json::exception& e) {
    throw AdapterError(std::string("chat reply is not JSON: ") + e.what());
  }
  if (reply.contains("content") && reply["content"].is_string()) {
    return reply["content"].get<std::string>();
  }
  if (reply.contains("choices") && reply["choices"].is_array() &&
      !reply["choices"].empty()) {
    const Json& msg = reply["choices"][0].value("message", Json::object());
    if (msg.contains("content") && msg["content"].is_string()) {
      return msg["content"].get<std::string>();
    }
  }
  throw AdapterError("chat reply carries no content field");
}

std::string extract_tagged(const std::string& text, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  std::size_t a = text.find(open);
  if (a == std::string::npos) throw AdapterError("missing <" + tag + "> block");
  a += open.size();
  std::size_t b = text.find(close, a);
  if (b == std::string::npos) throw AdapterError("unterminated <" + tag + "> block");
  return trim(text.substr(a, b - a));
}

namespace {

Json parse_tag_json(const std::string& reply, const std::string& tag) {
  std::string body = extract_tagged(reply, tag);
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw AdapterError("<" + tag + "> body is not JSON: " + std::string(e.what()));
  }
}

/// Resolves a node reference from a tool signature. Bare attribute names are
/// matched against the proposal's new nodes first, then the current graph;
/// ambiguity prefers a new database, then the smallest id.
NodeId resolve_node_ref(const std::string& ref,
                        const std::vector<AttributeNode>& new_nodes,
                        const std::vector<std::string>& new_databases,
                        const EnvGraph& graph) {
  if (ref.find('.') != std::string::npos) return NodeId::parse(ref);
  std::vector<NodeId> matches;
  for (const auto& n : new_nodes) {
    if (n.id.attribute == ref) matches.push_back(n.id);
  }
  if (matches.empty()) {
    for (const auto& [id, node] : graph.nodes()) {
      if (id.attribute == ref) matches.push_back(id);
    }
  }
  if (matches.empty()) throw AdapterError("unresolvable node reference: " + ref);
  std::sort(matches.begin(), matches.end());
  for (const auto& id : matches) {
    if (std::find(new_databases.begin(), new_databases.end(), id.database) !=
        new_databases.end())
      return id;
  }
  return matches.front();
}

/// Parses "name(label: node, ...) -> Target" into a ToolSpec. Target may be
/// "Db.attr", a database name (resolved to its new nodes, else its primary
/// key), or empty.
ToolSpec parse_tool_signature(const std::string& sig,
                              const std::vector<AttributeNode>& new_nodes,
                              const std::vector<std::string>& new_databases,
                              const EnvGraph& graph) {
  std::size_t open = sig.find('(');
  if (open == std::string::npos) {
    throw AdapterError("tool signature without parameter list: " + sig);
  }
  ToolSpec tool;
  tool.name = trim(sig.substr(0, open));
  if (tool.name.empty()) throw AdapterError("tool signature without a name: " + sig);
  tool.kind = write_verbs().count(leading_verb(tool.name)) ? ToolKind::Write
                                                           : ToolKind::Read;
  std::size_t close = sig.find(')', open);
  if (close == std::string::npos) {
    throw AdapterError("unterminated parameter list: " + sig);
  }
  std::string params = sig.substr(open + 1, close - open - 1);
  std::istringstream in(params);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    std::size_t colon = piece.find(':');
    std::string ref = trim(colon == std::string::npos ? piece : piece.substr(colon + 1));
    tool.inputs.push_back(resolve_node_ref(ref, new_nodes, new_databases, graph));
  }
  if (tool.inputs.empty()) {
    throw AdapterError("tool signature with no inputs: " + sig);
  }
  std::size_t arrow = sig.find("->", close);
  std::string target = arrow == std::string::npos ? "" : trim(sig.substr(arrow + 2));
  if (!target.empty()) {
    if (target.find('.') != std::string::npos) {
      tool.outputs.push_back(NodeId::parse(target));
    } else {
      for (const auto& n : new_nodes) {
        if (n.id.database == target) tool.outputs.push_back(n.id);
      }
      if (tool.outputs.empty()) {
        if (auto pk = graph.primary_key(target)) tool.outputs.push_back(*pk);
      }
      if (tool.outputs.empty()) {
        throw AdapterError("tool return target unknown: " + target);
      }
    }
  }
  if (tool.outputs.empty()) {
    throw AdapterError("tool signature with no outputs: " + sig);
  }
  std::sort(tool.outputs.begin(), tool.outputs.end());
  tool.outputs.erase(std::unique(tool.outputs.begin(), tool.outputs.end()),
                     tool.outputs.end());
  tool.description = tool.name + " over " + target;
  return tool;
}

}  // namespace

CompletionProposal parse_completion_reply(const std::string& reply,
                                          const EnvGraph& graph) {
  CompletionProposal out;

  std::istringstream proposal(extract_tagged(reply, "task_proposal"));
  std::string line;
  enum class Section { None, Gaps } section = Section::None;
  while (std::getline(proposal, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (starts_with(line, "### Task:")) {
      out.task_name = trim(line.substr(9));
      continue;
    }
    if (starts_with(line, "User Story:")) {
      std::string story = trim(line.substr(11));
      if (story.size() >= 2 && story.front() == '"' && story.back() == '"') {
        story = story.substr(1, story.size() - 2);
      }
      out.user_story = story;
      continue;
    }
    if (starts_with(line, "Why Not Supported")) {
      section = Section::Gaps;
      continue;
    }
    if (starts_with(line, "Required Capabilities")) {
      section = Section::None;
      continue;
    }
    if (section == Section::Gaps) {
      while (!line.empty() && (line.front() == '-' || line.front() == '*')) {
        line = trim(line.substr(1));
      }
      if (!line.empty()) out.capability_gaps.push_back(line);
    }
  }
  if (out.task_name.empty()) throw AdapterError("task proposal without a name");

  Json design = parse_tag_json(reply, "graph_evolve_design");
  out.rationale = design.value("rationale", "");
  for (const auto& db : design.value("new_databases", Json::array())) {
    out.new_databases.push_back(db.get<std::string>());
  }
  for (const auto& jn : design.value("new_nodes", Json::array())) {
    AttributeNode n;
    n.id = NodeId{jn.at("database").get<std::string>(),
                  jn.at("attribute").get<std::string>()};
    n.value_type = ValueType::parse(jn.at("type").get<std::string>());
    n.description = jn.value("description", "");
    n.is_primary_key = jn.value("is_primary_key", false);
    n.is_foreign_key = jn.value("is_foreign_key", false);
    n.modifiable = jn.value("modifiable", true);
    for (const auto& v : jn.value("allowed_values", Json::array())) {
      n.allowed_values.push_back(v);
    }
    out.new_nodes.push_back(std::move(n));
  }

  auto note_tool = [&](const std::string& sig) -> std::string {
    ToolSpec tool =
        parse_tool_signature(sig, out.new_nodes, out.new_databases, graph);
    for (const auto& existing : out.new_tools) {
      if (existing.name == tool.name) return tool.name;
    }
    out.new_tools.push_back(tool);
    return tool.name;
  };

  for (const auto& je : design.value("new_edges", Json::array())) {
    RelationEdge e;
    e.source = NodeId{je.at("source_database").get<std::string>(),
                      je.at("source_attribute").get<std::string>()};
    e.target = NodeId{je.at("target_database").get<std::string>(),
                      je.at("target_attribute").get<std::string>()};
    e.relationship = parse_relationship(je.at("relationship_type").get<std::string>());
    e.cardinality = parse_cardinality(je.at("cardinality").get<std::string>());
    e.description = je.value("description", "");
    for (const auto& sig : je.value("tools", Json::array())) {
      e.tools.push_back(note_tool(sig.get<std::string>()));
    }
    out.new_edges.push_back(std::move(e));
  }
  for (const auto& sig : design.value("new_tools", Json::array())) {
    note_tool(sig.get<std::string>());
  }
  return out;
}

std::vector<ShortcutCandidate> parse_shortcut_reply(
    const std::string& reply, const std::vector<std::vector<NodeId>>& paths) {
  Json proposals = parse_tag_json(reply, "tool_proposals");
  if (!proposals.is_array()) {
    throw AdapterError("<tool_proposals> body is not an array");
  }
  std::vector<ShortcutCandidate> out;
  for (const auto& jp : proposals) {
    std::size_t path_id = jp.at("path_id").get<std::size_t>();
    if (path_id >= paths.size()) {
      throw AdapterError("path_id out of range: " + std::to_string(path_id));
    }
    const std::vector<NodeId>& path = paths[path_id];
    ShortcutCandidate c;
    c.path = path;
    c.tool_name = jp.at("tool_name").get<std::string>();
    c.description = jp.value("description", "");
    c.rationale = jp.value("rationale", "");
    for (const auto& u : jp.value("use_cases", Json::array())) {
      c.use_cases.push_back(u.get<std::string>());
    }
    auto map_ids = [&](const char* key, std::vector<NodeId>& into) {
      for (const auto& ji : jp.at(key)) {
        std::size_t i = ji.get<std::size_t>();
        if (i >= path.size()) {
          throw AdapterError(std::string(key) + " index out of range: " +
                             std::to_string(i));
        }
        into.push_back(path[i]);
      }
    };
    map_ids("input_node_ids", c.proposed_inputs);
    map_ids("output_node_ids", c.proposed_outputs);
    if (c.proposed_inputs.empty() || c.proposed_outputs.empty()) {
      throw AdapterError("shortcut " + c.tool_name + " needs inputs and outputs");
    }
    out.push_back(std::move(c));
  }
  return out;
}

DeprecationDecision parse_deprecation_reply(
    const std::string& reply, const std::vector<DeprecationCandidate>& candidates) {
  Json j = parse_tag_json(reply, "deprecation_decision");
  DeprecationDecision d;
  const Json& id = j.at("candidate_id");
  if (id.is_number_integer()) {
    std::size_t i = id.get<std::size_t>();
    if (i >= candidates.size()) {
      throw AdapterError("candidate_id out of range: " + std::to_string(i));
    }
    d.candidate_id = candidates[i].candidate_id;
  } else {
    d.candidate_id = id.get<std::string>();
    bool known = false;
    for (const auto& c : candidates) known |= c.candidate_id == d.candidate_id;
    if (!known) throw AdapterError("unknown candidate_id: " + d.candidate_id);
  }
  d.reason = j.value("deprecation_reason", j.value("reason", ""));
  d.impact_summary = j.value("impact_summary", "");
  d.challenge = parse_challenge(j.value("challenge_level", "medium"));
  d.workaround_hint = j.value("workaround_hint", "");
  return d;
}

Json agent_request(const std::vector<ConversationEvent>& conversation,
                   const Json& tool_catalog, const Json& memory_context) {
  Json convo = Json::array();
  for (const auto& e : conversation) convo.push_back(event_to_json(e));
  return Json{{"conversation", std::move(convo)},
              {"tool_catalog", tool_catalog},
              {"memory_context", memory_context}};
}

std::vector<AgentPolicy::Action> parse_agent_reply(const Json& response) {
  bool has_reply = response.contains("reply");
  bool has_calls = response.contains("tool_calls");
  if (has_reply == has_calls) {
    throw AdapterError("agent reply must carry exactly one of reply/tool_calls");
  }
  std::vector<AgentPolicy::Action> actions;
  if (has_reply) {
    actions.push_back({std::nullopt, response.at("reply").get<std::string>()});
    return actions;
  }
  const Json& calls = response.at("tool_calls");
  if (!calls.is_array() || calls.empty()) {
    throw AdapterError("tool_calls must be a non-empty array");
  }
  for (const auto& jc : calls) {
    ToolCall call;
    call.tool = jc.at("tool").get<std::string>();
    for (const auto& [key, value] : jc.value("args", Json::object()).items()) {
      call.args[NodeId::parse(key)] = value;
    }
    actions.push_back({std::move(call), std::nullopt});
  }
  return actions;
}

namespace {

std::string graph_summary_prompt(const EnvGraph& graph) {
  return "Current environment graph:\n" + graph_to_json(graph).dump(2);
}

}  // namespace

CompletionProposal HttpProposer::propose_completion(const EnvGraph& graph, Rng& rng) {
  try {
    std::string prompt =
        graph_summary_prompt(graph) +
        "\n\nPropose one feature the system cannot support today, then the "
        "graph additions backing it. Reply with the feature wrapped in "
        "<task_proposal> tags (### Task: line, User Story: line, Why Not "
        "Supported: list) followed by <graph_evolve_design> tags holding JSON "
        "with keys rationale, new_databases, new_nodes, new_edges, new_tools. "
        "Node entries carry database, attribute, type, description, "
        "is_primary_key, is_foreign_key, modifiable; edges carry "
        "source_database, source_attribute, target_database, target_attribute, "
        "relationship_type, cardinality, description, tools. Tools are "
        "signature strings like name(arg: node_name) -> Database.";
    std::string reply = chat(
        endpoint_,
        {{"system", "You design data models and APIs for an evolving backend."},
         {"user", prompt}});
    return parse_completion_reply(reply, graph);
  } catch (const Error&) {
    if (fallback_) return fallback_->propose_completion(graph, rng);
    throw;
  }
}

std::vector<ShortcutCandidate> HttpProposer::select_shortcuts(
    const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths,
    int count, Rng& rng) {
  try {
    Json catalog = Json::array();
    for (std::size_t p = 0; p < paths.size(); ++p) {
      Json nodes = Json::array();
      for (std::size_t i = 0; i < paths[p].size(); ++i) {
        nodes.push_back(Json{{"node_id", i}, {"node", paths[p][i].str()}});
      }
      catalog.push_back(Json{{"path_id", p}, {"nodes", std::move(nodes)}});
    }
    std::string prompt =
        "Candidate traversal paths:\n" + catalog.dump(2) + "\n\nSelect " +
        std::to_string(count) +
        " paths and design one shortcut tool per selection. Reply with "
        "<tool_proposals> tags holding a JSON array of {path_id, tool_name, "
        "tool_type, description, input_node_ids, output_node_ids, rationale, "
        "use_cases}; node ids index into the chosen path.";
    std::string reply = chat(
        endpoint_,
        {{"system", "You design shortcut APIs over entity relationships."},
         {"user", prompt}});
    std::vector<ShortcutCandidate> picked = parse_shortcut_reply(reply, paths);
    if (static_cast<int>(picked.size()) > count) picked.resize(count);
    return picked;
  } catch (const Error&) {
    if (fallback_) return fallback_->select_shortcuts(graph, paths, count, rng);
    throw;
  }
}

DeprecationDecision HttpProposer::select_deprecation(
    const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
    Rng& rng) {
  try {
    Json listing = Json::array();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const DeprecationCandidate& c = candidates[i];
      Json removed_nodes = Json::array();
      for (const auto& n : c.removed_nodes) removed_nodes.push_back(n.id.str());
      listing.push_back(Json{{"candidate_id", i},
                             {"kind", to_string(c.kind)},
                             {"removed_nodes", std::move(removed_nodes)},
                             {"removed_edges", c.removed_edges.size()},
                             {"affected_tools", c.affected_tools}});
    }
    std::string prompt =
        "Deprecation candidates:\n" + listing.dump(2) +
        "\n\nSelect the one that makes the most realistic and instructive "
        "deprecation. Reply with <deprecation_decision> tags holding JSON "
        "{candidate_id, deprecation_reason, impact_summary, challenge_level "
        "(easy|medium|hard|extreme), workaround_hint}.";
    std::string reply =
        chat(endpoint_,
             {{"system", "You manage API deprecations for a production system."},
              {"user", prompt}});
    return parse_deprecation_reply(reply, candidates);
  } catch (const Error&) {
    if (fallback_) return fallback_->select_deprecation(graph, candidates, rng);
    throw;
  }
}

void HttpAgentPolicy::reset(const Json& memory_context) {
  memory_context_ = memory_context;
  pending_.clear();
}

AgentPolicy::Action HttpAgentPolicy::step(
    const std::vector<ConversationEvent>& conversation, const Json& tool_catalog,
    const std::vector<ToolResult>& last_results) {
  (void)last_results;  // already present in the conversation as tool events
  if (!pending_.empty()) {
    Action next = pending_.front();
    pending_.pop_front();
    return next;
  }
  try {
    Json request = agent_request(conversation, tool_catalog, memory_context_);
    std::string prompt =
        request.dump() +
        "\n\nAct as the assistant. Reply with JSON: either {\"tool_calls\": "
        "[{\"tool\": name, \"args\": {\"Database.attribute\": value}}]} or "
        "{\"reply\": text}.";
    std::string reply =
        chat(endpoint_, {{"system", "You operate tools for a support agent."},
                         {"user", prompt}});
    std::vector<Action> actions = parse_agent_reply(Json::parse(reply));
    for (auto& a : actions) pending_.push_back(std::move(a));
  } catch (const Json::exception& e) {
    throw PolicyError(std::string("agent reply unparseable: ") + e.what());
  } catch (const AdapterError& e) {
    throw PolicyError(e.what());
  }
  Action next = pending_.front();
  pending_.pop_front();
  return next;
}

}  // namespace evobench
