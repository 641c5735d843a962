#include "evobench/proposer.hpp"

#include <algorithm>

#include "evobench/errors.hpp"

namespace evobench {

std::string to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::Bridge: return "bridge";
    case CandidateKind::Database: return "database";
    case CandidateKind::PeripheralEdge: return "peripheral_edge";
  }
  return "database";
}

std::string to_string(ChallengeLevel c) {
  switch (c) {
    case ChallengeLevel::Easy: return "easy";
    case ChallengeLevel::Medium: return "medium";
    case ChallengeLevel::Hard: return "hard";
    case ChallengeLevel::Extreme: return "extreme";
  }
  return "medium";
}

ChallengeLevel parse_challenge(const std::string& s) {
  if (s == "easy") return ChallengeLevel::Easy;
  if (s == "medium") return ChallengeLevel::Medium;
  if (s == "hard") return ChallengeLevel::Hard;
  if (s == "extreme") return ChallengeLevel::Extreme;
  throw ParseError("challenge_level", "unknown level \"" + s + "\"");
}

namespace {

struct FieldTemplate {
  const char* attr;
  const char* type;
  const char* description;
  bool core = true;             // non-core fields are included per seed
  const char* fk_anchor = "";   // database whose primary key this references
  std::vector<Json> allowed = {};
};

struct FeatureTemplate {
  std::vector<const char*> name_options;  // PascalCase database names
  const char* story;
  const char* gap;
  std::vector<FieldTemplate> fields;  // fields[0] must be the primary key
  // Verbs for generated tools: create + list always; extra is optional.
  const char* create_verb;
  const char* extra_verb;     // e.g. "cancel", empty disables
  const char* status_attr;    // attribute the extra verb flips
};

const std::vector<FeatureTemplate>& feature_bank() {
  static const std::vector<FeatureTemplate> bank = {
      {{"PriceAlert", "StockAlert", "RestockAlert", "DealAlert"},
       "Customers want to be told when a product becomes worth buying.",
       "No way to watch a product for price or availability changes.",
       {{"alert_id", "str", "Alert identifier"},
        {"user_id", "str", "Subscribed user", true, "User"},
        {"product_id", "str", "Watched product", true, "Product"},
        {"target_price", "float", "Trigger threshold"},
        {"alert_type", "str", "What change triggers the alert", true, "",
         {Json("price_drop"), Json("price_increase"), Json("back_in_stock")}},
        {"status", "str", "Alert lifecycle state", true, "",
         {Json("active"), Json("triggered"), Json("cancelled")}},
        {"include_competitors", "bool", "Alert on competitor listings too", false},
        {"competitor_list", "List[str]", "Competitor products to watch", false},
        {"notify_channel", "str", "Where to deliver the alert", false, "",
         {Json("email"), Json("push"), Json("sms")}}},
       "create",
       "cancel",
       "status"},
      {{"GiftCard", "StoreCredit", "PromoCard"},
       "Support needs to issue spendable balances against an account.",
       "No stored-value instrument exists on the account.",
       {{"card_id", "str", "Card identifier"},
        {"user_id", "str", "Card holder", true, "User"},
        {"balance", "float", "Remaining balance"},
        {"currency", "str", "Balance currency", true, "",
         {Json("USD"), Json("EUR"), Json("GBP")}},
        {"status", "str", "Card state", true, "",
         {Json("active"), Json("exhausted"), Json("cancelled")}},
        {"expires_at", "str", "Expiry date", false},
        {"issued_reason", "str", "Why the card was issued", false, "",
         {Json("goodwill"), Json("refund"), Json("promotion")}}},
       "issue",
       "cancel",
       "status"},
      {{"SupportTicket", "ServiceCase", "HelpRequest"},
       "Customers need a tracked thread for problems tools cannot fix.",
       "Agent conversations vanish; nothing records open problems.",
       {{"ticket_id", "str", "Ticket identifier"},
        {"user_id", "str", "Reporting user", true, "User"},
        {"order_id", "str", "Order under discussion", false, "Order"},
        {"subject", "str", "One-line problem statement"},
        {"priority", "str", "Queue priority", true, "",
         {Json("low"), Json("normal"), Json("high"), Json("urgent")}},
        {"status", "str", "Ticket state", true, "",
         {Json("open"), Json("pending"), Json("resolved")}},
        {"assigned_team", "str", "Owning team", false, "",
         {Json("billing"), Json("logistics"), Json("catalog")}}},
       "open",
       "resolve",
       "status"},
      {{"LoyaltyAccount", "RewardAccount", "PointsAccount"},
       "Repeat buyers should accrue points toward perks.",
       "Purchases leave no trace toward any loyalty program.",
       {{"account_id", "str", "Loyalty account identifier"},
        {"user_id", "str", "Enrolled user", true, "User"},
        {"points", "int", "Current point balance"},
        {"tier", "str", "Earned tier", true, "",
         {Json("bronze"), Json("silver"), Json("gold"), Json("platinum")}},
        {"enrolled_at", "str", "Enrollment date", false},
        {"streak_weeks", "int", "Consecutive purchase weeks", false}},
       "enroll",
       "",
       ""},
      {{"ReferralCode", "InviteCode"},
       "Existing customers should be able to invite friends for credit.",
       "There is no referral mechanism at all.",
       {{"referral_id", "str", "Referral identifier"},
        {"user_id", "str", "Referring user", true, "User"},
        {"code", "str", "Shareable code"},
        {"uses", "int", "Redemptions so far"},
        {"reward_amount", "float", "Credit per redemption"},
        {"status", "str", "Code state", true, "",
         {Json("active"), Json("expired"), Json("revoked")}},
        {"expires_at", "str", "Expiry date", false}},
       "create",
       "revoke",
       "status"},
      {{"DeliverySlot", "PickupWindow"},
       "Customers want to choose when an order arrives.",
       "Delivery timing is invisible and unchangeable.",
       {{"slot_id", "str", "Slot identifier"},
        {"user_id", "str", "Booking user", true, "User"},
        {"order_id", "str", "Order being scheduled", false, "Order"},
        {"window_start", "str", "Window opens"},
        {"window_end", "str", "Window closes"},
        {"slot_type", "str", "Kind of slot", true, "",
         {Json("standard"), Json("express"), Json("weekend")}},
        {"confirmed", "bool", "Whether the slot is locked in", false}},
       "book",
       "",
       ""}};
  return bank;
}

NodeId anchor_pk(const EnvGraph& graph, const std::string& preferred, Rng& rng) {
  if (auto pk = graph.primary_key(preferred)) return *pk;
  std::vector<NodeId> pks;
  for (const auto& db : graph.databases()) {
    if (auto pk = graph.primary_key(db)) pks.push_back(*pk);
  }
  if (pks.empty()) throw ProposerError("graph has no primary keys to anchor on");
  return pks[static_cast<std::size_t>(rng.uniform(pks.size()))];
}

}  // namespace

CompletionProposal SeededProposer::propose_completion(const EnvGraph& graph, Rng& rng) {
  const auto& bank = feature_bank();
  const auto& tpl = bank[static_cast<std::size_t>(rng.uniform(bank.size()))];

  std::string db;
  std::size_t name_start = static_cast<std::size_t>(rng.uniform(tpl.name_options.size()));
  for (std::size_t i = 0; i < tpl.name_options.size(); ++i) {
    const char* option = tpl.name_options[(name_start + i) % tpl.name_options.size()];
    if (!graph.databases().count(option)) { db = option; break; }
  }
  if (db.empty()) throw ProposerError("all template database names already taken");

  CompletionProposal p;
  p.new_databases = {db};
  p.user_story = tpl.story;
  p.capability_gaps = {tpl.gap};
  std::string feature = snake_case(db);
  p.task_name = "Introduce " + db;
  p.rationale = std::string("Fills the gap: ") + tpl.gap;

  NodeId pk_id{db, tpl.fields[0].attr};
  std::vector<std::pair<NodeId, NodeId>> fk_links;  // new fk node -> anchor pk
  for (std::size_t i = 0; i < tpl.fields.size(); ++i) {
    const auto& f = tpl.fields[i];
    bool include = f.core || rng.chance(0.5);
    if (!include) continue;
    AttributeNode node;
    node.id = {db, f.attr};
    node.value_type = ValueType::parse(f.type);
    node.description = f.description;
    node.is_primary_key = i == 0;
    if (f.fk_anchor[0] != '\0') {
      NodeId anchor = anchor_pk(graph, f.fk_anchor, rng);
      node.is_foreign_key = true;
      node.value_type = graph.find_node(anchor)->value_type;
      fk_links.emplace_back(node.id, anchor);
    }
    if (!f.allowed.empty()) {
      // Keep a seeded subset of at least two vocabulary entries, in order.
      std::vector<Json> chosen;
      for (const auto& v : f.allowed) {
        if (chosen.size() < 2 || rng.chance(0.7)) chosen.push_back(v);
      }
      node.allowed_values = std::move(chosen);
    }
    p.new_nodes.push_back(std::move(node));
  }

  for (const auto& node : p.new_nodes) {
    if (node.id == pk_id) continue;
    RelationEdge e;
    e.source = pk_id;
    e.target = node.id;
    e.relationship = Relationship::HasAttribute;
    e.cardinality = Cardinality::OneToOne;
    e.description = db + " record field " + node.id.attribute;
    p.new_edges.push_back(std::move(e));
  }
  for (const auto& [fk, anchor] : fk_links) {
    RelationEdge e;
    e.source = fk;
    e.target = anchor;
    e.relationship = Relationship::References;
    e.cardinality = Cardinality::ManyToOne;
    e.description = db + " belongs to " + anchor.database;
    p.new_edges.push_back(std::move(e));
  }
  if (fk_links.empty()) throw ProposerError("template produced an island database");

  // Tools: a writer that creates records, a reader keyed on the first
  // anchor, and optionally a status-flipping writer.
  const NodeId& main_anchor = fk_links.front().second;
  std::string create_name = std::string(tpl.create_verb) + "_" + feature;
  std::string list_name = "get_" + snake_case(main_anchor.database) + "_" + feature + "s";

  ToolSpec create;
  create.name = create_name;
  create.kind = ToolKind::Write;
  create.inputs.push_back(main_anchor);
  for (const auto& [fk, anchor] : fk_links) {
    if (anchor != main_anchor) create.inputs.push_back(anchor);
  }
  for (const auto& node : p.new_nodes) {
    if (node.is_primary_key || node.is_foreign_key) continue;
    create.inputs.push_back(node.id);
    if (!node.value_type.nullable && node.allowed_values.empty() &&
        node.value_type.kind == ValueKind::Boolean) {
      create.optional_inputs.push_back(node.id);
    }
  }
  create.outputs.push_back(pk_id);
  if (tpl.status_attr[0] != '\0') {
    NodeId status{db, tpl.status_attr};
    for (const auto& node : p.new_nodes) {
      if (node.id == status) create.outputs.push_back(status);
    }
  }
  create.description = "Create a " + feature + " record";
  p.new_tools.push_back(create);

  ToolSpec list;
  list.name = list_name;
  list.kind = ToolKind::Read;
  list.inputs.push_back(main_anchor);
  list.outputs.push_back(pk_id);
  int extra_outputs = 0;
  for (const auto& node : p.new_nodes) {
    if (node.is_primary_key || node.is_foreign_key) continue;
    list.outputs.push_back(node.id);
    if (++extra_outputs == 2) break;
  }
  list.description = "List " + feature + " records for a " +
                     snake_case(main_anchor.database);
  p.new_tools.push_back(list);

  if (tpl.extra_verb[0] != '\0' && rng.chance(0.6)) {
    NodeId status{db, tpl.status_attr};
    ToolSpec extra;
    extra.name = std::string(tpl.extra_verb) + "_" + feature;
    extra.kind = ToolKind::Write;
    extra.inputs.push_back(pk_id);
    extra.outputs.push_back(pk_id);
    extra.outputs.push_back(status);
    extra.description = "Move a " + feature + " to a terminal state";
    p.new_tools.push_back(extra);
  }

  // Access edge from the main anchor so the new database is reachable.
  RelationEdge access;
  access.source = main_anchor;
  access.target = pk_id;
  access.relationship = Relationship::LinksTo;
  access.cardinality = Cardinality::OneToMany;
  for (const auto& t : p.new_tools) access.tools.push_back(t.name);
  access.description = db + " records for the " + snake_case(main_anchor.database);
  p.new_edges.push_back(std::move(access));

  return p;
}

std::vector<ShortcutCandidate> SeededProposer::select_shortcuts(
    const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths, int count,
    Rng& rng) {
  (void)rng;
  // Longer walks collapse more lookups, so rank by hop count, then name.
  std::vector<std::vector<NodeId>> ranked = paths;
  std::sort(ranked.begin(), ranked.end(),
            [](const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });

  std::vector<ShortcutCandidate> out;
  std::set<std::string> used_names;
  for (const auto& path : ranked) {
    if (static_cast<int>(out.size()) >= count) break;
    ShortcutCandidate c;
    c.path = path;
    c.proposed_inputs = {path.front()};
    // Outputs: the longest suffix of the path inside the terminal database,
    // capped at two nodes.
    std::size_t suffix_start = path.size() - 1;
    while (suffix_start > 0 &&
           path[suffix_start - 1].database == path.back().database &&
           path.size() - (suffix_start - 1) <= 2) {
      --suffix_start;
    }
    if (suffix_start == 0) suffix_start = 1;  // keep inputs/outputs disjoint
    for (std::size_t i = suffix_start; i < path.size(); ++i) {
      c.proposed_outputs.push_back(path[i]);
    }
    std::string base = "get_" + snake_case(path.front().database) + "_" +
                       snake_case(path.back().database) + "_" + path.back().attribute;
    std::string name = base;
    int suffix = 2;
    while (graph.has_tool(name) || used_names.count(name)) {
      name = base + "_" + std::to_string(suffix++);
    }
    used_names.insert(name);
    c.tool_name = name;
    c.description = "Direct lookup from " + path.front().str() + " to " +
                    path.back().str();
    c.rationale = "Collapses " + std::to_string(path.size() - 1) +
                  " traversal steps into one call";
    c.use_cases = {"Answer " + path.back().attribute + " questions keyed on " +
                   path.front().str() + " without intermediate lookups"};
    out.push_back(std::move(c));
  }
  return out;
}

DeprecationDecision SeededProposer::select_deprecation(
    const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
    Rng& rng) {
  (void)graph;
  if (candidates.empty()) throw ProposerError("no deprecation candidates offered");

  // Only candidates that actually retire tools make an interesting
  // challenge; fall back to the full list if none do.
  std::vector<const DeprecationCandidate*> pool;
  for (const auto& c : candidates) {
    if (!c.affected_tools.empty()) pool.push_back(&c);
  }
  if (pool.empty()) {
    for (const auto& c : candidates) pool.push_back(&c);
  }

  auto challenge_of = [](CandidateKind kind) {
    switch (kind) {
      case CandidateKind::Database: return ChallengeLevel::Medium;
      case CandidateKind::Bridge: return ChallengeLevel::Hard;
      case CandidateKind::PeripheralEdge: return ChallengeLevel::Easy;
    }
    return ChallengeLevel::Medium;
  };
  const ChallengeLevel preference[] = {ChallengeLevel::Medium, ChallengeLevel::Hard,
                                       ChallengeLevel::Easy, ChallengeLevel::Extreme};
  const DeprecationCandidate* chosen = nullptr;
  for (ChallengeLevel want : preference) {
    std::vector<const DeprecationCandidate*> level;
    for (const auto* c : pool) {
      if (challenge_of(c->kind) == want) level.push_back(c);
    }
    if (!level.empty()) {
      chosen = level[static_cast<std::size_t>(rng.uniform(level.size()))];
      break;
    }
  }

  DeprecationDecision d;
  d.candidate_id = chosen->candidate_id;
  d.challenge = challenge_of(chosen->kind);
  std::string subject = chosen->kind == CandidateKind::Database
                            ? chosen->removed_nodes.front().id.database
                            : chosen->removed_edges.front().key().str();
  switch (chosen->kind) {
    case CandidateKind::Database:
      d.reason = "The " + subject +
                 " service is being re-architected and its direct endpoints are retired.";
      d.impact_summary = std::to_string(chosen->affected_tools.size()) +
                         " tools and " + std::to_string(chosen->removed_nodes.size()) +
                         " data points go away with the " + subject + " store.";
      d.workaround_hint =
          "The " + subject +
          " service is offline. Note down the identifiers involved (for example "
          "product IDs the customer wants) so the request can be completed once a "
          "replacement service lands.";
      break;
    case CandidateKind::Bridge:
      d.reason = "The integration behind " + subject + " was decommissioned.";
      d.impact_summary = "Removing the only link " + subject +
                         " splits the affected records from the rest of the graph.";
      d.workaround_hint =
          "The direct connection is gone. Collect the source-side identifiers and "
          "answer from records already on this side, or tell the customer which "
          "lookup is no longer possible.";
      break;
    case CandidateKind::PeripheralEdge:
      d.reason = "The field behind " + subject + " is no longer maintained.";
      d.impact_summary = "A peripheral attribute and its access path disappear.";
      d.workaround_hint =
          "That attribute is no longer tracked. Proceed without it and say so if "
          "the customer asks.";
      break;
  }
  return d;
}

CompletionProposal ReplayProposer::propose_completion(const EnvGraph& graph, Rng& rng) {
  (void)graph;
  (void)rng;
  if (completions.empty()) throw ProposerError("replay proposer has no completion");
  CompletionProposal p = completions.front();
  completions.erase(completions.begin());
  return p;
}

std::vector<ShortcutCandidate> ReplayProposer::select_shortcuts(
    const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths, int count,
    Rng& rng) {
  (void)graph;
  (void)paths;
  (void)rng;
  std::vector<ShortcutCandidate> out = shortcuts;
  if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(count));
  return out;
}

DeprecationDecision ReplayProposer::select_deprecation(
    const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
    Rng& rng) {
  if (deprecation) return *deprecation;
  if (deprecation_target) {
    for (const auto& c : candidates) {
      if (c.candidate_id == *deprecation_target) {
        SeededProposer fallback;
        std::vector<DeprecationCandidate> one{c};
        return fallback.select_deprecation(graph, one, rng);
      }
    }
    throw ProposerError("replay target not among candidates: " + *deprecation_target);
  }
  throw ProposerError("replay proposer has no deprecation decision");
}

DeprecationDecision cart_retirement_decision() {
  DeprecationDecision d;
  d.candidate_id = "database:Cart";
  d.reason =
      "The cart service is being re-architected; its direct manipulation endpoints "
      "are retired while the migration runs.";
  d.impact_summary =
      "All five cart tools and the five Cart data points disappear, along with "
      "every connection into the Cart store.";
  d.challenge = ChallengeLevel::Medium;
  d.workaround_hint =
      "Cart endpoints are unavailable. Note down the product IDs the customer "
      "wants so they can be added once the cart service returns, and handle "
      "everything else about the request now.";
  return d;
}

CompletionProposal price_alert_proposal(const EnvGraph& seed_graph) {
  (void)seed_graph;
  CompletionProposal p;
  p.task_name = "Introduce PriceAlert";
  p.user_story =
      "Customers want to be told when a product they are watching drops in price "
      "or comes back in stock.";
  p.capability_gaps = {"No way to watch a product for price or availability changes."};
  p.new_databases = {"PriceAlert"};
  p.rationale = "Price watching is the most requested missing capability.";

  auto node = [](const char* attr, const char* type, const char* desc, bool pk, bool fk,
                 std::vector<Json> allowed = {}) {
    AttributeNode n;
    n.id = {"PriceAlert", attr};
    n.value_type = ValueType::parse(type);
    n.description = desc;
    n.is_primary_key = pk;
    n.is_foreign_key = fk;
    n.allowed_values = std::move(allowed);
    return n;
  };
  p.new_nodes = {
      node("alert_id", "str", "Alert identifier", true, false),
      node("user_id", "str", "Subscribed user", false, true),
      node("product_id", "str", "Watched product", false, true),
      node("target_price", "float", "Trigger threshold", false, false),
      node("alert_type", "str", "What change triggers the alert", false, false,
           {Json("price_drop"), Json("price_increase"), Json("back_in_stock")}),
      node("include_competitors", "bool", "Alert on competitor listings too", false,
           false),
      node("competitor_list", "Optional[List[str]]", "Competitor products to watch",
           false, false),
      node("status", "str", "Alert lifecycle state", false, false,
           {Json("active"), Json("triggered"), Json("cancelled")})};

  auto edge = [](const std::string& src, const std::string& dst, Relationship rel,
                 Cardinality card, std::vector<std::string> tools,
                 const char* desc) {
    RelationEdge e;
    e.source = NodeId::parse(src);
    e.target = NodeId::parse(dst);
    e.relationship = rel;
    e.cardinality = card;
    e.tools = std::move(tools);
    e.description = desc;
    return e;
  };
  for (const char* attr : {"user_id", "product_id", "target_price", "alert_type",
                           "include_competitors", "competitor_list", "status"}) {
    p.new_edges.push_back(edge("PriceAlert.alert_id", std::string("PriceAlert.") + attr,
                               Relationship::HasAttribute, Cardinality::OneToOne, {},
                               "PriceAlert record field"));
  }
  p.new_edges.push_back(edge("PriceAlert.user_id", "User.user_id",
                             Relationship::References, Cardinality::ManyToOne, {},
                             "Alert belongs to a user"));
  p.new_edges.push_back(edge("PriceAlert.product_id", "Product.asin",
                             Relationship::References, Cardinality::ManyToOne, {},
                             "Alert watches a product"));
  p.new_edges.push_back(edge(
      "User.user_id", "PriceAlert.alert_id", Relationship::LinksTo,
      Cardinality::OneToMany,
      {"create_price_alert", "get_user_price_alerts", "cancel_price_alert"},
      "Alerts registered by the user"));

  ToolSpec create;
  create.name = "create_price_alert";
  create.kind = ToolKind::Write;
  create.inputs = {NodeId{"User", "user_id"}, NodeId{"Product", "asin"},
                   NodeId{"PriceAlert", "target_price"},
                   NodeId{"PriceAlert", "alert_type"},
                   NodeId{"PriceAlert", "include_competitors"},
                   NodeId{"PriceAlert", "competitor_list"}};
  create.optional_inputs = {NodeId{"PriceAlert", "include_competitors"},
                            NodeId{"PriceAlert", "competitor_list"}};
  create.outputs = {NodeId{"PriceAlert", "alert_id"}, NodeId{"PriceAlert", "status"}};
  create.description = "Register a price alert on a product";
  p.new_tools.push_back(create);

  ToolSpec list;
  list.name = "get_user_price_alerts";
  list.kind = ToolKind::Read;
  list.inputs = {NodeId{"User", "user_id"}};
  list.outputs = {NodeId{"PriceAlert", "alert_id"}, NodeId{"PriceAlert", "target_price"},
                  NodeId{"PriceAlert", "status"}};
  list.description = "List a user's price alerts";
  p.new_tools.push_back(list);

  ToolSpec cancel;
  cancel.name = "cancel_price_alert";
  cancel.kind = ToolKind::Write;
  cancel.inputs = {NodeId{"PriceAlert", "alert_id"}};
  cancel.outputs = {NodeId{"PriceAlert", "alert_id"}, NodeId{"PriceAlert", "status"}};
  cancel.description = "Cancel one price alert";
  p.new_tools.push_back(cancel);

  return p;
}

}  // namespace evobench
