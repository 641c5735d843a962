#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "evobench/eval.hpp"
#include "evobench/graph.hpp"
#include "evobench/proposer.hpp"

namespace evobench {

/// Where a chat completion service lives. The credential is read from the
/// named environment variable at request time; it is never written to disk
/// and never appears in configuration files.
struct ChatEndpoint {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string path = "/chat";
  std::string model = "default";
  std::string credential_env = "EVOBENCH_API_KEY";
  int timeout_seconds = 60;
};

/// Parses "http://host:port/path". The scheme is optional; https is refused
/// (the client is plain HTTP, meant for local gateways and test stubs).
ChatEndpoint parse_endpoint(const std::string& url);

/// One chat exchange: POSTs {model, messages:[{role, content}]} and returns
/// the assistant text. Accepts either a bare {content: ...} body or the
/// {choices:[{message:{content}}]} shape. Throws AdapterError on transport
/// or shape problems.
std::string chat(const ChatEndpoint& endpoint,
                 const std::vector<std::pair<std::string, std::string>>& messages);

/// Body of the first <tag>...</tag> block in `text`. Throws AdapterError
/// when the block is missing or unterminated.
std::string extract_tagged(const std::string& text, const std::string& tag);

/// Completion replies arrive as a <task_proposal> prose block followed by a
/// <graph_evolve_design> JSON block; this turns the pair into a proposal.
/// Tool signature strings ("name(a: node, ...) -> Entity") are resolved
/// against the design's new nodes first, then the current graph.
CompletionProposal parse_completion_reply(const std::string& reply,
                                          const EnvGraph& graph);

/// Shortcut replies are a <tool_proposals> JSON array whose node ids index
/// into the candidate path named by path_id.
std::vector<ShortcutCandidate> parse_shortcut_reply(
    const std::string& reply, const std::vector<std::vector<NodeId>>& paths);

/// Deprecation replies are a <deprecation_decision> JSON object; candidate_id
/// may be an index into `candidates` or one of their string ids.
DeprecationDecision parse_deprecation_reply(
    const std::string& reply, const std::vector<DeprecationCandidate>& candidates);

/// Agent wire format: request carries exactly what a policy may see.
Json agent_request(const std::vector<ConversationEvent>& conversation,
                   const Json& tool_catalog, const Json& memory_context);

/// Response is {reply: text} or {tool_calls: [{tool, args}]}; a multi-call
/// response becomes one action per call, in order.
std::vector<AgentPolicy::Action> parse_agent_reply(const Json& response);

/// Proposer backed by a chat endpoint speaking the tagged wire formats.
/// When `fallback` is set, any transport or parse failure falls through to
/// it instead of surfacing; leave it null to make failures loud.
class HttpProposer : public Proposer {
 public:
  explicit HttpProposer(ChatEndpoint endpoint, Proposer* fallback = nullptr)
      : endpoint_(std::move(endpoint)), fallback_(fallback) {}

  CompletionProposal propose_completion(const EnvGraph& graph, Rng& rng) override;
  std::vector<ShortcutCandidate> select_shortcuts(
      const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths,
      int count, Rng& rng) override;
  DeprecationDecision select_deprecation(
      const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
      Rng& rng) override;

 private:
  ChatEndpoint endpoint_;
  Proposer* fallback_;
};

/// AgentPolicy backed by a chat endpoint. Each step sends the full
/// policy-visible payload; surplus tool calls from one response are queued
/// and replayed on subsequent steps without another request.
class HttpAgentPolicy : public AgentPolicy {
 public:
  explicit HttpAgentPolicy(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  void reset(const Json& memory_context) override;
  Action step(const std::vector<ConversationEvent>& conversation,
              const Json& tool_catalog,
              const std::vector<ToolResult>& last_results) override;

 private:
  ChatEndpoint endpoint_;
  Json memory_context_ = Json::array();
  std::deque<Action> pending_;
};

}  // namespace evobench
