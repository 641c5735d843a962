#include "evobench/eval.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "evobench/errors.hpp"
#include "evobench/graph_io.hpp"

namespace evobench {

Json event_to_json(const ConversationEvent& e) {
  return Json{{"role", e.role}, {"turn", e.turn}, {"payload", e.payload}};
}

ConversationEvent event_from_json(const Json& j) {
  ConversationEvent e;
  e.role = j.at("role").get<std::string>();
  e.turn = j.at("turn").get<int>();
  e.payload = j.at("payload");
  return e;
}

std::string to_string(MemoryMode m) {
  switch (m) {
    case MemoryMode::Baseline: return "baseline";
    case MemoryMode::History: return "history";
    case MemoryMode::Reflection: return "reflection";
  }
  return "baseline";
}

MemoryMode parse_memory_mode(const std::string& s) {
  if (s == "baseline") return MemoryMode::Baseline;
  if (s == "history") return MemoryMode::History;
  if (s == "reflection") return MemoryMode::Reflection;
  throw ParseError("memory_mode", "unknown memory mode \"" + s + "\"");
}

void MemoryModule::remember(Json entry) {
  if (mode == MemoryMode::Baseline) return;
  entries.push_back(std::move(entry));
  while (static_cast<int>(entries.size()) > capacity) entries.pop_front();
}

Json MemoryModule::context() const {
  Json out = Json::array();
  for (const auto& e : entries) out.push_back(e);
  return out;
}

Json tool_catalog(const EnvGraph& graph) {
  Json out = Json::array();
  for (const auto& [name, tool] : graph.tools()) {
    Json inputs = Json::array();
    for (const auto& in : tool.inputs) {
      const AttributeNode* n = graph.find_node(in);
      inputs.push_back(Json{{"node", in.str()},
                            {"type", n ? n->value_type.str() : "unknown"},
                            {"optional", tool.is_optional_input(in)}});
    }
    Json outputs = Json::array();
    for (const auto& o : tool.outputs) outputs.push_back(o.str());
    out.push_back(Json{{"name", name},
                       {"kind", to_string(tool.kind)},
                       {"inputs", std::move(inputs)},
                       {"outputs", std::move(outputs)},
                       {"description", tool.description}});
  }
  return out;
}

namespace {

std::string literal_text(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

bool check_state_success(const std::vector<FactPattern>& criteria,
                         const std::set<Fact>& knowledge,
                         const std::string& reply_text) {
  for (const auto& pattern : criteria) {
    bool hit = false;
    for (const auto& f : knowledge) {
      if (f.node != pattern.node) continue;
      if (pattern.wildcard || f.value == pattern.value) {
        hit = true;
        break;
      }
    }
    if (!hit && !pattern.wildcard) {
      hit = reply_text.find(literal_text(pattern.value)) != std::string::npos;
    }
    if (!hit) return false;
  }
  return true;
}

ScriptedOraclePolicy::ScriptedOraclePolicy(const TaskInstance& task) {
  for (const auto& turn : task.reference.turns) actions_.push_back(turn.action);
}

void ScriptedOraclePolicy::reset(const Json& memory_context) {
  (void)memory_context;
  next_ = 0;
  called_this_turn_ = false;
}

AgentPolicy::Action ScriptedOraclePolicy::step(
    const std::vector<ConversationEvent>& conversation, const Json& tool_catalog,
    const std::vector<ToolResult>& last_results) {
  (void)conversation;
  (void)tool_catalog;
  (void)last_results;
  if (next_ < actions_.size() && !called_this_turn_) {
    called_this_turn_ = true;
    return {actions_[next_], std::nullopt};
  }
  called_this_turn_ = false;
  ++next_;
  return {std::nullopt, "Done. Anything else I can help with?"};
}

void NullPolicy::reset(const Json& memory_context) { (void)memory_context; }

AgentPolicy::Action NullPolicy::step(
    const std::vector<ConversationEvent>& conversation, const Json& tool_catalog,
    const std::vector<ToolResult>& last_results) {
  (void)conversation;
  (void)tool_catalog;
  (void)last_results;
  return {std::nullopt, "I'm sorry, I can't look into that right now."};
}

void RecordingProbePolicy::reset(const Json& memory_context) {
  seen.push_back(Json{{"event", "reset"}, {"memory_context", memory_context}});
}

AgentPolicy::Action RecordingProbePolicy::step(
    const std::vector<ConversationEvent>& conversation, const Json& tool_catalog,
    const std::vector<ToolResult>& last_results) {
  Json convo = Json::array();
  for (const auto& e : conversation) convo.push_back(event_to_json(e));
  Json results = Json::array();
  for (const auto& r : last_results) results.push_back(result_to_json(r));
  seen.push_back(Json{{"event", "step"},
                      {"conversation", std::move(convo)},
                      {"tool_catalog", tool_catalog},
                      {"last_results", std::move(results)}});
  return {std::nullopt, "Understood."};
}

TaskReport run_task(const TaskInstance& task, AgentPolicy& policy,
                    const SimConfig& config) {
  SandboxState st = restore_task_state(task);
  st.deprecated = config.deprecated;
  policy.reset(config.memory_context);
  Json catalog = tool_catalog(task.subgraph);

  TaskReport report;
  report.task_id = task.task_id;
  report.version_id = task.env_version;
  report.T = static_cast<int>(task.instructions.size());

  std::vector<ConversationEvent> conversation;
  std::set<Fact> knowledge;
  int satisfied_total = 0;

  for (const auto& instruction : task.instructions) {
    int t = instruction.turn;
    conversation.push_back(
        {"user", t, Json{{"utterance", instruction.utterance}}});

    TurnOutcome outcome;
    outcome.turn = t;
    bool satisfied = false;

    for (int attempt = 0; attempt <= config.retry_budget && !satisfied;
         ++attempt) {
      outcome.attempts = attempt;
      std::vector<ToolResult> last_results;
      bool replied = false;
      std::string reply;
      try {
        for (int s = 0; s < config.max_steps_per_attempt && !replied; ++s) {
          AgentPolicy::Action action =
              policy.step(conversation, catalog, last_results);
          bool has_call = action.call.has_value();
          bool has_reply = action.reply.has_value();
          if (has_call == has_reply) {
            throw PolicyError("policy must produce exactly one of a tool call "
                              "or a reply");
          }
          if (has_call) {
            ToolCall call = *action.call;
            if (call.tool.empty()) throw PolicyError("tool call without a name");
            call.turn = t;
            ToolResult result = execute_tool(st, call);
            knowledge.insert(result.facts.begin(), result.facts.end());
            outcome.tool_calls += 1;
            conversation.push_back(
                {"agent", t, Json{{"tool_call", call_to_json(call)}}});
            conversation.push_back(
                {"tool", t, Json{{"result", result_to_json(result)}}});
            last_results = {std::move(result)};
          } else {
            reply = *action.reply;
            conversation.push_back({"agent", t, Json{{"reply", reply}}});
            replied = true;
          }
        }
      } catch (const PolicyError&) {
        replied = false;  // malformed action: attempt is spent
      }
      if (replied) {
        satisfied = check_state_success(instruction.criteria, knowledge, reply);
      }
      if (!satisfied && attempt < config.retry_budget) {
        conversation.push_back(
            {"user", t,
             Json{{"utterance",
                   "That's not quite what I asked for. I still need this: " +
                       instruction.utterance}}});
      }
    }

    outcome.satisfied = satisfied ? 1 : 0;
    satisfied_total += outcome.satisfied;
    report.turns.push_back(outcome);
  }

  report.N_tool = static_cast<int>(st.call_log.size());
  report.C = report.T == 0
                 ? 0.0
                 : static_cast<double>(satisfied_total) / report.T;
  report.transcript = std::move(conversation);
  return report;
}

std::map<std::string, std::string> deprecated_lineage(const Episode& episode,
                                                      std::size_t k) {
  std::map<std::string, std::string> out;
  for (std::size_t step = 1; step <= k && step <= episode.steps.size(); ++step) {
    const GraphDelta& delta = episode.steps[step - 1].delta;
    if (delta.strategy != Strategy::Deprecation) continue;
    std::string hint = delta.context.metadata.value("workaround", "");
    for (const auto& tool : delta.removed_tools) out[tool.name] = hint;
  }
  return out;
}

EvalReport run_episode_eval(
    const Episode& episode,
    const std::map<std::string, std::vector<TaskInstance>>& tasks_by_version,
    const PolicyFactory& factory, MemoryMode strategy, SimConfig config) {
  EvalReport report;
  report.strategy = to_string(strategy);

  MemoryModule memory;
  memory.mode = strategy;
  memory.capacity = config.memory_capacity;

  for (std::size_t k = 0; k < episode.version_count(); ++k) {
    const EnvGraph& graph = episode.version(k);
    auto it = tasks_by_version.find(graph.version_id());
    if (it == tasks_by_version.end()) {
      throw Error("no tasks for version " + graph.version_id());
    }
    SimConfig version_config = config;
    for (const auto& [tool, hint] : deprecated_lineage(episode, k)) {
      version_config.deprecated[tool] = hint;
    }

    VersionSummary summary;
    summary.version_id = graph.version_id();

    for (std::size_t i = 0; i < it->second.size(); ++i) {
      const TaskInstance& task = it->second[i];
      const TaskReport* last = nullptr;
      for (int rerun = 0; rerun < std::max(1, config.reruns); ++rerun) {
        version_config.memory_context = memory.context();
        std::unique_ptr<AgentPolicy> policy = factory(task);
        TaskReport tr;
        try {
          tr = run_task(task, *policy, version_config);
        } catch (const Error& e) {
          throw Error(graph.version_id() + " task " + std::to_string(i) +
                      " rerun " + std::to_string(rerun) + ": " + e.what());
        }
        report.task_reports.push_back(std::move(tr));
        last = &report.task_reports.back();
        summary.mean_C += last->C;
        summary.mean_T += last->T;
        summary.mean_N_tool += last->N_tool;
        summary.runs += 1;
      }
      if (strategy == MemoryMode::History) {
        Json events = Json::array();
        for (const auto& e : last->transcript) events.push_back(event_to_json(e));
        memory.remember(
            Json{{"task_id", last->task_id}, {"transcript", std::move(events)}});
      } else if (strategy == MemoryMode::Reflection) {
        memory.remember(summarize_reflection(last->transcript, last->C));
      }
    }

    if (summary.runs > 0) {
      summary.mean_C /= summary.runs;
      summary.mean_T /= summary.runs;
      summary.mean_N_tool /= summary.runs;
    }
    report.versions.push_back(summary);
  }

  for (const auto& tr : report.task_reports) {
    report.overall_C += tr.C;
    report.overall_T += tr.T;
    report.overall_N_tool += tr.N_tool;
  }
  if (!report.task_reports.empty()) {
    double n = static_cast<double>(report.task_reports.size());
    report.overall_C /= n;
    report.overall_T /= n;
    report.overall_N_tool /= n;
  }
  return report;
}

Json summarize_reflection(const std::vector<ConversationEvent>& transcript,
                          double final_C) {
  if (transcript.empty()) return Json::object();
  std::map<std::string, std::pair<int, int>> tallies;  // name -> (ok, error)
  std::map<std::string, std::string> deprecated;
  std::string last_call;
  for (const auto& event : transcript) {
    if (event.role == "agent" && event.payload.contains("tool_call")) {
      last_call = event.payload.at("tool_call").at("tool").get<std::string>();
    } else if (event.role == "tool" && !last_call.empty()) {
      const Json& result = event.payload.at("result");
      bool ok = result.at("ok").get<bool>();
      auto& [oks, errors] = tallies[last_call];
      (ok ? oks : errors) += 1;
      if (result.at("error").get<std::string>() == "deprecated_tool") {
        deprecated[last_call] = result.value("workaround_hint", "");
      }
      last_call.clear();
    }
  }
  Json tools = Json::object();
  for (const auto& [name, counts] : tallies) {
    tools[name] = Json{{"ok", counts.first}, {"error", counts.second}};
  }
  Json digest{{"tools", std::move(tools)},
              {"deprecated_encountered", deprecated},
              {"final_C", final_C}};
  // Stay under the 1KB cap by dropping tool tallies from the back.
  std::vector<std::string> names;
  for (const auto& [name, counts] : tallies) names.push_back(name);
  while (digest.dump().size() > 1024 && !names.empty()) {
    digest.at("tools").erase(names.back());
    names.pop_back();
  }
  return digest;
}

std::string transcript_jsonl(const TaskReport& report) {
  std::string out;
  for (const auto& event : report.transcript) {
    out += event_to_json(event).dump();
    out += "\n";
  }
  return out;
}

namespace {

std::string cell(double v) { return Json(v).dump(); }

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::string out = "version_id,mean_C,mean_T,mean_N_tool\n";
  for (const auto& v : report.versions) {
    out += v.version_id + "," + cell(v.mean_C) + "," + cell(v.mean_T) + "," +
           cell(v.mean_N_tool) + "\n";
  }
  out += "overall," + cell(report.overall_C) + "," + cell(report.overall_T) +
         "," + cell(report.overall_N_tool) + "\n";
  return out;
}

EvalReport parse_report_csv(const std::string& text) {
  EvalReport report;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      if (line != "version_id,mean_C,mean_T,mean_N_tool") {
        throw ParseError("csv", "unexpected header: " + line);
      }
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string c;
    while (std::getline(row, c, ',')) cells.push_back(c);
    if (cells.size() != 4) throw ParseError("csv", "bad row: " + line);
    if (cells[0] == "overall") {
      report.overall_C = std::stod(cells[1]);
      report.overall_T = std::stod(cells[2]);
      report.overall_N_tool = std::stod(cells[3]);
    } else {
      VersionSummary v;
      v.version_id = cells[0];
      v.mean_C = std::stod(cells[1]);
      v.mean_T = std::stod(cells[2]);
      v.mean_N_tool = std::stod(cells[3]);
      report.versions.push_back(std::move(v));
    }
  }
  return report;
}

void emit_report(const EvalReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/report.csv", report_csv(report));
  std::map<std::string, int> rerun_index;
  for (const auto& tr : report.task_reports) {
    std::string stem = tr.task_id;
    std::replace(stem.begin(), stem.end(), ':', '_');
    int r = rerun_index[tr.task_id]++;
    write_text_file(dir + "/" + stem + "_r" + std::to_string(r) + ".jsonl",
                    transcript_jsonl(tr));
  }
}

}  // namespace evobench
