#pragma once

#include <filesystem>
#include <string>

#include "evobench/delta.hpp"
#include "evobench/graph.hpp"

namespace evobench {

/// Graph document layout:
///   { "version_id", "metadata",
///     "databases": { "<Db>": { "attributes": [ {...}, ... ] } },
///     "edges": [ {...}, ... ],
///     "tools": [ {...}, ... ] }
/// Ordering is canonical everywhere (databases and keys sorted, attributes by
/// name, edges by (source, target, relationship), tools by name), so two
/// structurally equal graphs produce byte-identical text.
Json graph_to_json(const EnvGraph& graph);
EnvGraph graph_from_json(const Json& doc);

/// Same document minus version_id and metadata; the basis of isomorphism.
Json graph_body_json(const EnvGraph& graph);

/// Dump with a trailing newline, 2-space indent, sorted keys.
std::string canonical_text(const Json& doc);
std::string graph_canonical_text(const EnvGraph& graph);

/// Equality of everything but version_id and lineage metadata.
bool isomorphic(const EnvGraph& a, const EnvGraph& b);

Json delta_to_json(const GraphDelta& delta);
GraphDelta delta_from_json(const Json& doc);

Json context_to_json(const EvolutionContext& context);
EvolutionContext context_from_json(const Json& doc);

Json node_to_json(const AttributeNode& node);
AttributeNode node_from_json(const Json& doc, const std::string& database);
Json edge_to_json(const RelationEdge& edge);
RelationEdge edge_from_json(const Json& doc);
Json tool_to_json(const ToolSpec& tool);
ToolSpec tool_from_json(const Json& doc);

/// File helpers. Readers throw ParseError with a locator on malformed input;
/// writers emit canonical text.
EnvGraph read_graph_file(const std::filesystem::path& path);
void write_graph_file(const std::filesystem::path& path, const EnvGraph& graph);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace evobench
